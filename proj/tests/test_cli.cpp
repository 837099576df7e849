#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "cli.hpp"
#include "qillum/bounds.hpp"
#include "qillum/receivers.hpp"

using namespace qillum;
using namespace qillum::cli;

namespace {

constexpr double kLog10Half = -0.30102999566398120;

RunSettings nominal_settings(int points = 6) {
  RunSettings s;
  s.config.params = validate_params({0.01, 0.01, 20.0});
  s.k_grid = {1, 100000000, points};
  return s;
}

// Cells of the CSV data rows (comment and header lines skipped).
std::vector<std::vector<std::string>> data_rows(const std::string& csv) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(csv);
  std::string line;
  bool header_seen = false;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (!header_seen) {
      header_seen = true;
      continue;
    }
    std::vector<std::string> cells;
    std::istringstream row(line);
    std::string cell;
    while (std::getline(row, cell, ',')) cells.push_back(cell);
    rows.push_back(cells);
  }
  return rows;
}

int run_args(std::vector<std::string> args, std::string* err_text = nullptr) {
  args.insert(args.begin(), "qillum");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run(static_cast<int>(argv.size()), argv.data(), out, err);
  if (err_text != nullptr) *err_text = err.str();
  return code;
}

std::filesystem::path scratch_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("qillum_cli_test_" + name);
  std::filesystem::remove_all(dir);
  return dir;
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("K grid") {
  const auto ks = make_k_grid({});
  CHECK(ks.size() == 30);
  CHECK(ks.front() == 1);
  CHECK(ks.back() == 100000000);
  for (std::size_t i = 1; i < ks.size(); ++i) CHECK(ks[i] > ks[i - 1]);

  const auto narrow = make_k_grid({1, 5, 30});
  CHECK(narrow == std::vector<std::int64_t>{1, 2, 3, 4, 5});
  CHECK(make_k_grid({7, 7, 1}) == std::vector<std::int64_t>{7});

  CHECK_THROWS_AS(make_k_grid({0, 10, 5}), UsageError);
  CHECK_THROWS_AS(make_k_grid({10, 5, 5}), UsageError);
  CHECK_THROWS_AS(make_k_grid({1, 10, 0}), UsageError);
}

TEST_CASE("error curve invariants") {
  ErrorCurve c{"x", {}, ""};
  c.append(1, kLog10Half);
  c.append(2, -1.0);
  CHECK_THROWS_AS(c.append(2, -2.0), Error);
  CHECK_THROWS_AS(c.append(3, -0.2), Error);
  CHECK(c.points.size() == 2);
}

TEST_CASE("parameter digest") {
  const RunSettings a = nominal_settings();
  RunSettings b = nominal_settings();
  CHECK(params_digest(a) == params_digest(b));
  CHECK(params_digest(a).rfind("fnv1a64:", 0) == 0);
  CHECK(params_digest(a).size() == 8 + 16);
  b.config.params.n_b = 21.0;
  CHECK(params_digest(a) != params_digest(b));
  b = nominal_settings();
  b.tail_tol = 1e-10;
  CHECK(params_digest(a) != params_digest(b));
}

TEST_CASE("bounds output is byte-identical across runs") {
  const RunSettings s = nominal_settings();
  const CommandOutput first = cmd_bounds(s);
  const CommandOutput second = cmd_bounds(s);
  REQUIRE(first.files.size() == 1);
  CHECK(first.files[0].file_name == "bounds.csv");
  CHECK(first.files[0].text == second.files[0].text);
  CHECK(first.meta == second.meta);

  const auto rows = data_rows(first.files[0].text);
  CHECK(rows.size() == make_k_grid(s.k_grid).size());
  for (const auto& r : rows) {
    REQUIRE(r.size() == 8);
    const double lower_c = std::stod(r[1]), upper_c = std::stod(r[2]);
    const double lower_q = std::stod(r[3]), upper_q = std::stod(r[4]);
    CHECK(lower_c <= upper_c);
    CHECK(lower_q <= upper_q);
    CHECK(std::stod(r[5]) >= lower_c);
    CHECK(std::stod(r[5]) <= upper_c);
    CHECK(std::stod(r[6]) >= lower_q);
  }
}

TEST_CASE("bounds with kappa = 0 are all one half") {
  RunSettings s = nominal_settings();
  s.config.params = validate_params({0.01, 0.0, 20.0});
  const auto rows = data_rows(cmd_bounds(s).files[0].text);
  REQUIRE(!rows.empty());
  for (const auto& r : rows)
    for (std::size_t i = 1; i < r.size(); ++i) CHECK(std::abs(std::stod(r[i]) - kLog10Half) <= 1e-6);
}

TEST_CASE("helstrom curve starts at the single-pair error") {
  RunSettings s = nominal_settings(4);
  const CommandOutput out = cmd_helstrom(s);
  const auto rows = data_rows(out.files[0].text);
  REQUIRE(rows.front()[0] == "1");
  const SpdcPair pair = build_spdc_pair(s.config.params, s.tail_tol);
  const HelstromResult h = helstrom_single_shot(pair.rho0, pair.rho1);
  CHECK(std::stod(rows.front()[2]) == doctest::Approx(std::log10(h.pe_single)).epsilon(1e-14));
  const double gain = resolve_gain(s.config.params, s.config.receiver.gain);
  const double opa =
      opa_error_exact(s.config.params, gain, 1, s.config.receiver.threshold_policy).error.log10_pe;
  CHECK(std::stod(rows.front()[1]) == doctest::Approx(opa).epsilon(1e-14));
}

TEST_CASE("exponent report") {
  const CommandOutput out = cmd_exponents(nominal_settings());
  std::map<std::string, std::pair<double, std::string>> table;
  for (const auto& r : data_rows(out.files[0].text))
    table[r[0]] = {std::stod(r[1]), r.size() > 2 ? r[2] : ""};
  const ScenarioParams p = validate_params({0.01, 0.01, 20.0});
  CHECK(table.at("r_c").first == doctest::Approx(p.kappa * p.n_s / (4 * p.n_b)));
  CHECK(table.at("r_q").first == doctest::Approx(p.kappa * p.n_s / p.n_b));
  const double g = table.at("g_star").first;
  CHECK(table.at("r_opa_star").first == doctest::Approx(opa_exponent(p, g)).epsilon(1e-14));
  const double db = std::stod(table.at("r_opa_star").second);
  CHECK(db == doctest::Approx(10 * std::log10(table.at("r_opa_star").first / table.at("r_c").first)));
  CHECK(db > 0.0);
  CHECK(db < 3.0);
  CHECK(table.at("g_star").second.empty());
  CHECK(out.summary.find("r_opa_star") != std::string::npos);
}

TEST_CASE("sweep rows follow the grid") {
  RunSettings s = nominal_settings();
  const CommandOutput out = cmd_sweep(s, SweepAxis::n_b, {10.0, 20.0, 40.0});
  const auto rows = data_rows(out.files[0].text);
  REQUIRE(rows.size() == 3);
  CHECK(std::stod(rows[1][3]) == 20.0);
  CHECK(std::stod(rows[2][5]) == doctest::Approx(0.01 * 0.01 / (4 * 40.0)));

  CHECK_THROWS_AS(cmd_sweep(s, SweepAxis::kappa, {}), UsageError);
  CHECK_THROWS_AS(cmd_sweep(s, SweepAxis::kappa, {0.5, 1.5}), UsageError);
  CHECK_THROWS_AS(cmd_sweep(s, SweepAxis::gain, {1.0}), UsageError);
  CHECK(parse_axis("N_B") == SweepAxis::n_b);
  CHECK(parse_axis("G") == SweepAxis::gain);
  CHECK_THROWS_AS(parse_axis("N_X"), UsageError);
  CHECK(parse_grid("1, 2,3") == std::vector<double>{1.0, 2.0, 3.0});
  CHECK_THROWS_AS(parse_grid(""), UsageError);
  CHECK_THROWS_AS(parse_grid("1,x"), UsageError);
}

TEST_CASE("exit codes") {
  const auto dir = scratch_dir("exit");
  std::string err;
  CHECK(run_args({"--help"}) == kExitOk);
  CHECK(run_args({}) == kExitUsage);
  CHECK(run_args({"bounds", "--no-such-flag"}) == kExitUsage);
  CHECK(run_args({"sweep", "--axis", "N_B", "--grid", "", "--out", dir.string()}, &err) ==
        kExitUsage);
  CHECK(err.find("empty") != std::string::npos);
  CHECK(run_args({"sweep", "--axis", "kappa", "--grid", "0.5,2"}) == kExitUsage);
  CHECK(run_args({"bounds", "--config", (dir / "missing.cfg").string()}) == kExitUsage);
  CHECK(run_args({"bounds", "--tail-tol", "2"}) == kExitUsage);
  CHECK(run_args({"bounds", "--k-min", "0"}) == kExitUsage);
  CHECK(run_args({"bounds", "--n-s", "-1"}) == kExitUsage);

  std::filesystem::create_directories(dir);
  std::ofstream(dir / "bad.cfg") << "n_s=0.01\nkappa=0.01\nn_b=20\nbogus=1\n";
  CHECK(run_args({"bounds", "--config", (dir / "bad.cfg").string()}, &err) == kExitUsage);
  CHECK(err.find("bogus") != std::string::npos);

  // N_B = 0 is a valid scenario whose target-present state is undefined
  CHECK(run_args({"exponents", "--n-b", "0", "--out", dir.string()}) == kExitComputation);
  std::filesystem::remove_all(dir);
}

TEST_CASE("files land in the output directory") {
  const auto dir = scratch_dir("files");
  std::filesystem::create_directories(dir);
  std::ofstream(dir / "run.cfg") << "n_s=0.01\nkappa=0.01\nn_b=20\ngain=bhattacharyya\n";
  const auto out = dir / "out";
  REQUIRE(run_args({"helstrom", "--config", (dir / "run.cfg").string(), "--k-max", "1000",
                    "--k-points", "4", "--out", out.string()}) == kExitOk);
  CHECK(std::filesystem::exists(out / "helstrom.csv"));
  CHECK(std::filesystem::exists(out / "meta.txt"));
  std::ifstream meta(out / "meta.txt");
  std::stringstream text;
  text << meta.rdbuf();
  CHECK(text.str().find("gain=bhattacharyya") != std::string::npos);
  CHECK(text.str().find("digest: fnv1a64:") != std::string::npos);
  std::filesystem::remove_all(dir);
}

}
