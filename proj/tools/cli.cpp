#include "cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <numbers>
#include <sstream>

#include "qillum/bounds.hpp"
#include "qillum/receivers.hpp"

#ifndef QILLUM_VERSION
#define QILLUM_VERSION "0.0.0"
#endif

namespace qillum::cli {

namespace {

constexpr double kLog10Half = -0.30102999566398120;
// Largest cutoffs for which numeric Chernoff overlaps are attempted: the
// coherent pair needs one dense eigensolve of that size, the SPDC pair one
// small block per photon-number difference.
constexpr int kMaxDenseCutoff = 2000;
constexpr int kMaxBlockCutoff = 250000;
const double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string num(double v) { return std::isnan(v) ? "nan" : format_double(v); }

double log10_from_ln(double ln_p) { return ln_p / std::numbers::ln10; }

std::string one_line(const std::string& rendered) {
  std::string s = rendered;
  std::replace(s.begin(), s.end(), '\n', ' ');
  while (!s.empty() && s.back() == ' ') s.pop_back();
  return s;
}

class Csv {
public:
  Csv(const std::string& command, const RunSettings& settings, std::vector<std::string> columns)
      : columns_(std::move(columns)) {
    text_ << "# qillum " << command << ' ' << QILLUM_VERSION << '\n'
          << "# params: " << one_line(render_config(settings.config))
          << " tail_tol=" << format_double(settings.tail_tol) << '\n'
          << "# digest: " << params_digest(settings) << '\n';
    for (std::size_t i = 0; i < columns_.size(); ++i) text_ << (i ? "," : "") << columns_[i];
    text_ << '\n';
  }

  void row(const std::vector<std::string>& cells) {
    if (cells.size() != columns_.size()) throw Error("csv row width mismatch");
    for (std::size_t i = 0; i < cells.size(); ++i) text_ << (i ? "," : "") << cells[i];
    text_ << '\n';
  }

  std::string str() const { return text_.str(); }

private:
  std::vector<std::string> columns_;
  std::ostringstream text_;
};

// Exponents -ln Q_half and -ln Q_qcb, ordered for the bound formulas.
struct Overlaps {
  bool available = false;
  double r_half = kNaN;
  double r_qcb = kNaN;
  double s_star = kNaN;
};

Overlaps overlaps_from(const ChernoffResult& c) {
  Overlaps o;
  o.available = true;
  o.r_half = std::max(0.0, -std::log(c.q_half));
  o.r_qcb = std::max(o.r_half, c.exponent);
  o.s_star = c.s_star;
  return o;
}

struct SpdcAnalysis {
  TruncationSpec trunc;
  double trace0 = kNaN;
  double trace1 = kNaN;
  double clamped = kNaN;
  Overlaps overlaps;
};

SpdcAnalysis analyse_spdc(const ScenarioParams& p, double tail_tol) {
  SpdcAnalysis a;
  a.trunc = TruncationSpec::for_params(p, tail_tol);
  if (a.trunc.n_r_max > kMaxBlockCutoff) return a;
  const SpdcPair pair = build_spdc_pair(p, tail_tol);
  const SpectralData spectra = block_eigendecompose(pair.rho0, pair.rho1, SpectralMode::each);
  a.trace0 = pair.rho0.trace();
  a.trace1 = pair.rho1.trace();
  a.clamped = spectra.first.clamped_mass + spectra.second.clamped_mass;
  a.overlaps = overlaps_from(qcb(spectra.first, spectra.second));
  return a;
}

struct CoherentAnalysis {
  int cutoff = 0;
  Overlaps overlaps;
};

CoherentAnalysis analyse_coherent(const ScenarioParams& p, double tail_tol) {
  CoherentAnalysis a;
  a.cutoff = thermal_cutoff(p.kappa * p.n_s + p.n_b, tail_tol);
  if (a.cutoff > kMaxDenseCutoff) return a;
  a.overlaps = overlaps_from(coherent_chernoff(p, tail_tol));
  return a;
}

ErrorProbability opa_exact(const RunSettings& s, double gain, std::int64_t k) {
  const ReceiverConfig& r = s.config.receiver;
  if (r.count_model == CountModel::on_off)
    return opa_error_onoff(s.config.params, gain, k, r.threshold_policy).error;
  return opa_error_exact(s.config.params, gain, k, r.threshold_policy).error;
}

std::string csv_from_curves(const std::string& command, const RunSettings& settings,
                            const std::vector<ErrorCurve>& curves) {
  std::vector<std::string> columns{"K"};
  for (const auto& c : curves) columns.push_back(c.label);
  Csv csv(command, settings, columns);
  const std::size_t n = curves.empty() ? 0 : curves.front().points.size();
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<std::string> cells{std::to_string(curves.front().points[i].first)};
    for (const auto& c : curves) cells.push_back(num(c.points[i].second));
    csv.row(cells);
  }
  return csv.str();
}

std::string meta_header(const std::string& command, const RunSettings& s, double gain) {
  std::ostringstream m;
  m << "tool: qillum " << QILLUM_VERSION << '\n'
    << "command: " << command << '\n'
    << "digest: " << params_digest(s) << '\n'
    << "config: " << one_line(render_config(s.config)) << '\n'
    << "tail_tol: " << format_double(s.tail_tol) << '\n'
    << "k_grid: " << s.k_grid.k_min << ".." << s.k_grid.k_max << " (" << s.k_grid.points
    << " points requested)\n"
    << "gain: " << format_double(gain) << '\n'
    << "asymptotic_regime: " << (s.config.params.asymptotic_regime ? "yes" : "no") << '\n';
  return m.str();
}

std::string truncation_report(const SpdcAnalysis& q, const CoherentAnalysis* c) {
  std::ostringstream m;
  m << "spdc_truncation: n_r_max=" << q.trunc.n_r_max << " n_i_max=" << q.trunc.n_i_max
    << " trace_rho0=" << num(q.trace0) << " trace_rho1=" << num(q.trace1)
    << " clamped_mass=" << num(q.clamped) << '\n';
  if (c != nullptr) m << "coherent_cutoff: " << c->cutoff << '\n';
  return m.str();
}

void require_overlaps(const Overlaps& o, const char* what) {
  if (!o.available)
    throw Error(std::string(what) + ": Fock cutoff too large for a numeric Chernoff overlap");
}

// Exponent summary shared by `exponents` and `sweep`.
struct ExponentSet {
  ExponentReport closed;
  SpdcAnalysis quantum;
  CoherentAnalysis classical;
  GainOptimum optimum;
  double gain = kNaN;
  double r_opa = kNaN;
  BhattacharyyaResult bhatt;
};

ExponentSet compute_exponents(const ScenarioParams& p, double gain, double tail_tol) {
  ExponentSet e;
  e.closed = asymptotic_exponents(p);
  e.quantum = analyse_spdc(p, tail_tol);
  e.classical = analyse_coherent(p, tail_tol);
  e.optimum = optimize_gain(p);
  e.gain = gain;
  e.r_opa = opa_exponent(p, gain);
  e.bhatt = opa_bhattacharyya(p, gain);
  return e;
}

double db_over(double r, double reference) {
  if (!(reference > 0.0) || !(r > 0.0) || std::isnan(r)) return kNaN;
  return 10.0 * std::log10(r / reference);
}

std::uint64_t fnv1a(const std::string& text) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot read config file '" + path + "'");
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace

std::vector<std::int64_t> make_k_grid(const KGrid& grid) {
  if (grid.k_min < 1) throw UsageError("--k-min must be >= 1");
  if (grid.k_max < grid.k_min) throw UsageError("--k-max must be >= --k-min");
  if (grid.points < 1) throw UsageError("--k-points must be >= 1");
  std::vector<std::int64_t> ks;
  if (grid.points == 1 || grid.k_min == grid.k_max) {
    ks.push_back(grid.k_min);
    if (grid.points > 1) return ks;
    return ks;
  }
  const double lo = std::log(static_cast<double>(grid.k_min));
  const double hi = std::log(static_cast<double>(grid.k_max));
  for (int i = 0; i < grid.points; ++i) {
    std::int64_t k = i + 1 == grid.points
                         ? grid.k_max
                         : std::llround(std::exp(lo + (hi - lo) * i / (grid.points - 1.0)));
    k = std::clamp(k, grid.k_min, grid.k_max);
    if (ks.empty() || k > ks.back()) ks.push_back(k);
  }
  return ks;
}

void ErrorCurve::append(std::int64_t k, double log10_pe) {
  if (!points.empty() && k <= points.back().first)
    throw Error("curve '" + label + "': K must be strictly increasing");
  if (!(log10_pe <= kLog10Half + 1e-12))
    throw Error("curve '" + label + "': log10 P_e above log10(1/2) at K=" + std::to_string(k));
  points.emplace_back(k, log10_pe);
}

std::string params_digest(const RunSettings& s) {
  std::ostringstream text;
  text << render_config(s.config) << "tail_tol=" << format_double(s.tail_tol) << '\n'
       << "k_min=" << s.k_grid.k_min << "\nk_max=" << s.k_grid.k_max
       << "\nk_points=" << s.k_grid.points << '\n';
  std::ostringstream out;
  out << "fnv1a64:" << std::hex << std::setw(16) << std::setfill('0') << fnv1a(text.str());
  return out.str();
}

CommandOutput cmd_bounds(const RunSettings& s) {
  const ScenarioParams& p = s.config.params;
  const double gain = resolve_gain(p, s.config.receiver.gain);
  const SpdcAnalysis quantum = analyse_spdc(p, s.tail_tol);
  const CoherentAnalysis classical = analyse_coherent(p, s.tail_tol);
  require_overlaps(quantum.overlaps, "SPDC pair");
  require_overlaps(classical.overlaps, "coherent pair");

  const std::string hash = params_digest(s);
  std::vector<ErrorCurve> curves;
  for (const char* label : {"lower_classical", "upper_classical", "lower_quantum",
                            "upper_quantum", "homodyne", "opa_exact", "opa_gaussian"})
    curves.push_back({label, {}, hash});

  for (std::int64_t k : make_k_grid(s.k_grid)) {
    const BoundTriple c = error_prob_bounds_from_exponents(classical.overlaps.r_half,
                                                           classical.overlaps.r_qcb, k);
    const BoundTriple q =
        error_prob_bounds_from_exponents(quantum.overlaps.r_half, quantum.overlaps.r_qcb, k);
    curves[0].append(k, log10_from_ln(c.log_lower));
    curves[1].append(k, log10_from_ln(c.log_upper_qcb));
    curves[2].append(k, log10_from_ln(q.log_lower));
    curves[3].append(k, log10_from_ln(q.log_upper_qcb));
    curves[4].append(k, homodyne_error(p, k).log10_pe);
    curves[5].append(k, opa_exact(s, gain, k).log10_pe);
    curves[6].append(k, opa_error_gaussian(p, gain, k).error.log10_pe);
  }

  CommandOutput out;
  out.files.push_back({"bounds.csv", csv_from_curves("bounds", s, curves)});
  std::ostringstream meta;
  meta << meta_header("bounds", s, gain) << truncation_report(quantum, &classical)
       << "s_star_quantum: " << num(quantum.overlaps.s_star) << '\n'
       << "s_star_classical: " << num(classical.overlaps.s_star) << '\n';
  out.meta = meta.str();
  out.summary = "bounds: " + std::to_string(curves.front().points.size()) + " K values\n";
  return out;
}

CommandOutput cmd_helstrom(const RunSettings& s) {
  const ScenarioParams& p = s.config.params;
  const double gain = resolve_gain(p, s.config.receiver.gain);
  const SpdcPair pair = build_spdc_pair(p, s.tail_tol);
  const HelstromResult h = helstrom_single_shot(pair.rho0, pair.rho1);

  const std::string hash = params_digest(s);
  std::vector<ErrorCurve> curves;
  for (const char* label : {"opa_exact", "helstrom_majority_exact", "helstrom_majority_clt"})
    curves.push_back({label, {}, hash});
  for (std::int64_t k : make_k_grid(s.k_grid)) {
    curves[0].append(k, opa_exact(s, gain, k).log10_pe);
    curves[1].append(k, separable_helstrom_error(h, k, VoteMethod::exact_binomial).error.log10_pe);
    curves[2].append(k, separable_helstrom_error(h, k, VoteMethod::clt).error.log10_pe);
  }

  CommandOutput out;
  out.files.push_back({"helstrom.csv", csv_from_curves("helstrom", s, curves)});
  std::ostringstream meta;
  meta << meta_header("helstrom", s, gain)
       << "spdc_truncation: n_r_max=" << pair.rho0.trunc.n_r_max
       << " n_i_max=" << pair.rho0.trunc.n_i_max << '\n'
       << "helstrom_pe_single: " << num(h.pe_single) << '\n'
       << "helstrom_p01: " << num(h.p01) << '\n'
       << "helstrom_p10: " << num(h.p10) << '\n'
       << "helstrom_trace_distance: " << num(h.trace_distance) << '\n'
       << "helstrom_clamped_mass: " << num(h.clamped_mass) << '\n'
       << "vote_model: per-pair error pe_single under both hypotheses\n";
  out.meta = meta.str();
  out.summary = "helstrom: " + std::to_string(curves.front().points.size()) +
                " K values, single-shot P_e " + num(h.pe_single) + "\n";
  return out;
}

CommandOutput cmd_exponents(const RunSettings& s) {
  const ScenarioParams& p = s.config.params;
  const double gain = resolve_gain(p, s.config.receiver.gain);
  const ExponentSet e = compute_exponents(p, gain, s.tail_tol);
  const double r_c = e.closed.r_c;

  struct Line {
    std::string name;
    double value;
    bool exponent;
  };
  const std::vector<Line> lines = {
      {"r_c", e.closed.r_c, true},
      {"r_c_hom", e.closed.r_c_hom, true},
      {"r_q", e.closed.r_q, true},
      {"r_c_numeric", e.classical.overlaps.r_qcb, true},
      {"s_star_classical", e.classical.overlaps.s_star, false},
      {"r_q_numeric", e.quantum.overlaps.r_qcb, true},
      {"s_star_quantum", e.quantum.overlaps.s_star, false},
      {"g_star", e.optimum.gain, false},
      {"r_opa_star", e.optimum.r_opa, true},
      {"gain", e.gain, false},
      {"r_opa", e.r_opa, true},
      {"r_b_exact", e.bhatt.r_b_exact, true},
      {"r_b_paper_form", e.bhatt.r_b_paper_form, true},
  };

  Csv csv("exponents", s, {"quantity", "value", "gain_db_vs_r_c"});
  std::ostringstream table;
  table << std::left << std::setw(18) << "quantity" << std::setw(24) << "value"
        << "dB vs R_C\n";
  for (const Line& l : lines) {
    const double db = l.exponent ? db_over(l.value, r_c) : kNaN;
    csv.row({l.name, num(l.value), l.exponent ? num(db) : ""});
    table << std::left << std::setw(18) << l.name << std::setw(24) << num(l.value);
    if (l.exponent) table << (std::isnan(db) ? "—" : num(db));
    table << '\n';
  }

  CommandOutput out;
  out.files.push_back({"exponents.csv", csv.str()});
  out.meta = meta_header("exponents", s, gain) + truncation_report(e.quantum, &e.classical);
  out.summary = table.str();
  return out;
}

SweepAxis parse_axis(const std::string& name) {
  if (name == "kappa") return SweepAxis::kappa;
  if (name == "N_B" || name == "n_b") return SweepAxis::n_b;
  if (name == "N_S" || name == "n_s") return SweepAxis::n_s;
  if (name == "G" || name == "g" || name == "gain") return SweepAxis::gain;
  throw UsageError("unknown sweep axis '" + name + "' (expected kappa, N_B, N_S or G)");
}

std::vector<double> parse_grid(const std::string& text) {
  std::vector<double> values;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    const auto first = item.find_first_not_of(" \t");
    if (first == std::string::npos) continue;
    const auto last = item.find_last_not_of(" \t");
    const std::string token = item.substr(first, last - first + 1);
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(token, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != token.size() || !std::isfinite(v))
      throw UsageError("grid value '" + token + "' is not a finite number");
    values.push_back(v);
  }
  if (values.empty()) throw UsageError("sweep grid is empty");
  return values;
}

CommandOutput cmd_sweep(const RunSettings& s, SweepAxis axis, const std::vector<double>& grid) {
  if (grid.empty()) throw UsageError("sweep grid is empty");

  // Validate the whole grid before computing anything.
  struct Point {
    double x;
    ScenarioParams params;
    GainSetting gain;
  };
  std::vector<Point> points;
  for (double x : grid) {
    Point pt{x, s.config.params, s.config.receiver.gain};
    try {
      switch (axis) {
        case SweepAxis::kappa: pt.params.kappa = x; break;
        case SweepAxis::n_b: pt.params.n_b = x; break;
        case SweepAxis::n_s: pt.params.n_s = x; break;
        case SweepAxis::gain:
          if (!(x > 1.0)) throw DomainError("gain", "OPA gain must be > 1");
          pt.gain = GainSetting::fixed(x);
          break;
      }
      pt.params = validate_params(pt.params);
    } catch (const DomainError& e) {
      throw UsageError(std::string("grid value ") + format_double(x) + ": " + e.what());
    }
    points.push_back(pt);
  }

  Csv csv("sweep", s,
          {"x", "n_s", "kappa", "n_b", "gain", "r_c", "r_c_hom", "r_q", "r_q_numeric",
           "s_star_quantum", "r_c_numeric", "r_opa", "g_star", "r_opa_star", "r_b_exact",
           "r_b_paper_form", "r_b_ratio", "r_b_paper_ratio"});
  for (const Point& pt : points) {
    const ScenarioParams& p = pt.params;
    const ExponentSet e = compute_exponents(p, resolve_gain(p, pt.gain), s.tail_tol);
    const double half_rq = p.kappa * p.n_s / (2.0 * p.n_b);
    const double ratio = half_rq > 0.0 ? e.bhatt.r_b_exact / half_rq : kNaN;
    const double paper_ratio = half_rq > 0.0 ? e.bhatt.r_b_paper_form / half_rq : kNaN;
    csv.row({num(pt.x), num(p.n_s), num(p.kappa), num(p.n_b), num(e.gain), num(e.closed.r_c),
             num(e.closed.r_c_hom), num(e.closed.r_q), num(e.quantum.overlaps.r_qcb),
             num(e.quantum.overlaps.s_star), num(e.classical.overlaps.r_qcb), num(e.r_opa),
             num(e.optimum.gain), num(e.optimum.r_opa), num(e.bhatt.r_b_exact),
             num(e.bhatt.r_b_paper_form), num(ratio), num(paper_ratio)});
  }

  CommandOutput out;
  out.files.push_back({"sweep.csv", csv.str()});
  std::ostringstream meta;
  meta << meta_header("sweep", s, kNaN) << "points: " << points.size() << '\n';
  out.meta = meta.str();
  out.summary = "sweep: " + std::to_string(points.size()) + " points\n";
  return out;
}

void write_outputs(const CommandOutput& output, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  auto write = [&](const std::string& name, const std::string& text) {
    std::ofstream f(dir / name, std::ios::binary | std::ios::trunc);
    f << text;
    if (!f) throw Error("cannot write " + (dir / name).string());
  };
  for (const Artifact& a : output.files) write(a.file_name, a.text);
  write("meta.txt", output.meta);
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Quantum illumination detection: bounds, receivers and sweeps", "qillum"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_version_flag("--version", std::string("qillum ") + QILLUM_VERSION);

  std::string config_path;
  std::string out_dir = ".";
  double tail_tol = 1e-9;
  KGrid grid;
  std::string axis_name;
  std::string grid_text;
  std::map<std::string, std::string> overrides;
  std::map<std::string, std::string> flag_values;

  app.add_option("--config", config_path, "key=value config file");
  app.add_option("--out", out_dir, "output directory")->capture_default_str();
  app.add_option("--k-min", grid.k_min, "smallest K")->capture_default_str();
  app.add_option("--k-max", grid.k_max, "largest K")->capture_default_str();
  app.add_option("--k-points", grid.points, "number of log-spaced K values")
      ->capture_default_str();
  app.add_option("--tail-tol", tail_tol, "Fock truncation tail tolerance")->capture_default_str();
  const std::pair<const char*, const char*> keyed[] = {
      {"--n-s", "n_s"},   {"--kappa", "kappa"},
      {"--n-b", "n_b"},   {"--k", "k"},
      {"--gain", "gain"}, {"--threshold-policy", "threshold_policy"},
      {"--count-model", "count_model"}};
  for (const auto& [flag, key] : keyed) flag_values[key];
  for (const auto& [flag, key] : keyed)
    app.add_option(flag, flag_values[key], std::string("override config key ") + key);

  CLI::App* bounds = app.add_subcommand("bounds", "error-probability bounds and receiver curves");
  CLI::App* helstrom = app.add_subcommand("helstrom", "separable Helstrom vs OPA receiver");
  CLI::App* exponents = app.add_subcommand("exponents", "error exponents and dB gains");
  CLI::App* sweep = app.add_subcommand("sweep", "exponent report over a parameter grid");
  sweep->add_option("--axis", axis_name, "kappa, N_B, N_S or G")->required();
  sweep->add_option("--grid", grid_text, "comma-separated values")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kExitOk : kExitUsage;
  }

  RunSettings settings;
  SweepAxis axis = SweepAxis::kappa;
  std::vector<double> sweep_grid;
  try {
    KeyValues kv = config_path.empty()
                       ? KeyValues{{"n_s", "0.01"}, {"kappa", "0.01"}, {"n_b", "20"}}
                       : parse_key_values(read_file(config_path));
    for (const auto& [flag, key] : keyed)
      if (app.count(flag) > 0) kv[key] = flag_values[key];
    settings.config = config_from_key_values(kv);
    if (!(tail_tol > 0.0 && tail_tol < 1.0)) throw UsageError("--tail-tol must lie in (0, 1)");
    settings.tail_tol = tail_tol;
    settings.k_grid = grid;
    make_k_grid(grid);
    if (sweep->parsed()) {
      axis = parse_axis(axis_name);
      sweep_grid = parse_grid(grid_text);
    }
  } catch (const Error& e) {
    err << "qillum: " << e.what() << '\n';
    return kExitUsage;
  }

  try {
    CommandOutput result;
    if (bounds->parsed()) result = cmd_bounds(settings);
    else if (helstrom->parsed()) result = cmd_helstrom(settings);
    else if (exponents->parsed()) result = cmd_exponents(settings);
    else result = cmd_sweep(settings, axis, sweep_grid);
    write_outputs(result, out_dir);
    out << result.summary;
  } catch (const UsageError& e) {
    err << "qillum: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "qillum: " << e.what() << '\n';
    return kExitComputation;
  }
  return kExitOk;
}

}  // namespace qillum::cli
