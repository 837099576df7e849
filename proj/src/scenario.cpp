#include "qillum/scenario.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <sstream>

#include "qillum/errors.hpp"

namespace qillum {

namespace {

constexpr std::array<std::string_view, 7> kKnownKeys = {
    "n_s", "kappa", "n_b", "gain", "k", "threshold_policy", "count_model"};

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

double parse_number(std::string_view text, const std::string& key) {
  double v = 0.0;
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc{} || ptr != end || !std::isfinite(v))
    throw ParseError(0, key, "expected a finite number, got '" + std::string(text) + "'");
  return v;
}

}  // namespace

ScenarioParams validate_params(const ScenarioParams& raw) {
  if (!(raw.n_s > 0.0) || !std::isfinite(raw.n_s))
    throw DomainError("n_s", "mean signal photon number must be finite and > 0");
  if (!(raw.kappa >= 0.0 && raw.kappa <= 1.0))
    throw DomainError("kappa", "transmissivity must lie in [0, 1]");
  if (!(raw.n_b >= 0.0) || !std::isfinite(raw.n_b))
    throw DomainError("n_b", "mean background photon number must be finite and >= 0");

  ScenarioParams out = raw;
  out.asymptotic_regime = raw.n_s <= kRegimeMaxSignal && raw.kappa <= kRegimeMaxKappa &&
                     raw.n_b >= kRegimeMinBackground;
  return out;
}

ReceiverConfig validate_receiver(const ReceiverConfig& raw) {
  if (raw.gain.mode == GainSetting::Mode::fixed &&
      !(raw.gain.value > 1.0 && std::isfinite(raw.gain.value)))
    throw DomainError("gain", "OPA gain must be > 1");
  if (raw.k < 1) throw DomainError("k", "number of mode pairs must be >= 1");
  return raw;
}

std::string format_double(double v) {
  std::array<char, 64> buf{};
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), ptr);
}

std::string to_string(ThresholdPolicy p) {
  return p == ThresholdPolicy::paper_formula ? "paper_formula" : "optimal_scan";
}

std::string to_string(CountModel m) {
  return m == CountModel::full_counting ? "full_counting" : "on_off";
}

std::string to_string(const GainSetting& g) {
  switch (g.mode) {
    case GainSetting::Mode::automatic: return "auto";
    case GainSetting::Mode::bhattacharyya_preset: return "bhattacharyya";
    case GainSetting::Mode::fixed: break;
  }
  return format_double(g.value);
}

ThresholdPolicy parse_threshold_policy(std::string_view s) {
  if (s == "paper_formula") return ThresholdPolicy::paper_formula;
  if (s == "optimal_scan") return ThresholdPolicy::optimal_scan;
  throw ParseError(0, "threshold_policy", "expected paper_formula or optimal_scan");
}

CountModel parse_count_model(std::string_view s) {
  if (s == "full_counting") return CountModel::full_counting;
  if (s == "on_off") return CountModel::on_off;
  throw ParseError(0, "count_model", "expected full_counting or on_off");
}

GainSetting parse_gain(std::string_view s) {
  if (s == "auto") return GainSetting::automatic();
  if (s == "bhattacharyya") return GainSetting::preset();
  return GainSetting::fixed(parse_number(s, "gain"));
}

KeyValues parse_key_values(std::string_view text) {
  KeyValues kv;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    std::string_view line = text.substr(pos, eol - pos);
    pos = eol + 1;
    ++line_no;

    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;

    const auto eq = line.find('=');
    if (eq == std::string_view::npos)
      throw ParseError(line_no, "", "expected key=value, got '" + std::string(line) + "'");
    const std::string key(trim(line.substr(0, eq)));
    const std::string value(trim(line.substr(eq + 1)));
    if (key.empty()) throw ParseError(line_no, "", "empty key");
    if (std::find(kKnownKeys.begin(), kKnownKeys.end(), key) == kKnownKeys.end())
      throw ParseError(line_no, key, "unknown key");
    if (value.empty()) throw ParseError(line_no, key, "empty value");
    if (!kv.emplace(key, value).second) throw ParseError(line_no, key, "duplicate key");
  }
  return kv;
}

Config config_from_key_values(const KeyValues& kv) {
  for (const auto& [key, value] : kv) {
    if (std::find(kKnownKeys.begin(), kKnownKeys.end(), key) == kKnownKeys.end())
      throw ParseError(0, key, "unknown key");
  }
  auto required = [&](const std::string& key) {
    auto it = kv.find(key);
    if (it == kv.end()) throw ParseError(0, key, "missing required key");
    return parse_number(it->second, key);
  };

  Config c;
  c.params.n_s = required("n_s");
  c.params.kappa = required("kappa");
  c.params.n_b = required("n_b");

  if (auto it = kv.find("gain"); it != kv.end()) c.receiver.gain = parse_gain(it->second);
  if (auto it = kv.find("k"); it != kv.end()) {
    std::int64_t k = 0;
    const auto& s = it->second;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), k);
    if (ec != std::errc{} || ptr != s.data() + s.size())
      throw ParseError(0, "k", "expected a positive integer, got '" + s + "'");
    c.receiver.k = k;
  }
  if (auto it = kv.find("threshold_policy"); it != kv.end())
    c.receiver.threshold_policy = parse_threshold_policy(it->second);
  if (auto it = kv.find("count_model"); it != kv.end())
    c.receiver.count_model = parse_count_model(it->second);

  c.params = validate_params(c.params);
  c.receiver = validate_receiver(c.receiver);
  return c;
}

Config parse_config(std::string_view text) { return config_from_key_values(parse_key_values(text)); }

std::string render_config(const Config& config) {
  std::ostringstream out;
  out << "n_s=" << format_double(config.params.n_s) << '\n'
      << "kappa=" << format_double(config.params.kappa) << '\n'
      << "n_b=" << format_double(config.params.n_b) << '\n'
      << "gain=" << to_string(config.receiver.gain) << '\n'
      << "k=" << config.receiver.k << '\n'
      << "threshold_policy=" << to_string(config.receiver.threshold_policy) << '\n'
      << "count_model=" << to_string(config.receiver.count_model) << '\n';
  return out.str();
}

}  // namespace qillum
