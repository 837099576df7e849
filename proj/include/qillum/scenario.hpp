#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>

namespace qillum {

/// Physical scenario shared by every transmitter/receiver model. Priors are
/// always equal and therefore not a field.
struct ScenarioParams {
  double n_s = 0.0;    ///< mean signal (and idler) photons per mode
  double kappa = 0.0;  ///< round-trip channel transmissivity
  double n_b = 0.0;    ///< mean background photons per return mode

  /// Set by validate_params: N_S <= 0.1, kappa <= 0.1 and N_B >= 10.
  bool asymptotic_regime = false;

  friend bool operator==(const ScenarioParams&, const ScenarioParams&) = default;
};

inline constexpr double kRegimeMaxSignal = 0.1;
inline constexpr double kRegimeMaxKappa = 0.1;
inline constexpr double kRegimeMinBackground = 10.0;

/// Throws DomainError naming the offending field; otherwise returns a copy
/// with `asymptotic_regime` filled in.
ScenarioParams validate_params(const ScenarioParams& raw);

enum class ThresholdPolicy { paper_formula, optimal_scan };
enum class CountModel { full_counting, on_off };

/// OPA gain: an explicit value G > 1, `auto` (maximise R_OPA), or the
/// `bhattacharyya` preset G = 1 + N_S / sqrt(N_B).
struct GainSetting {
  enum class Mode { fixed, automatic, bhattacharyya_preset };
  Mode mode = Mode::automatic;
  double value = 0.0;  ///< only meaningful for Mode::fixed

  static GainSetting fixed(double g) { return {Mode::fixed, g}; }
  static GainSetting automatic() { return {Mode::automatic, 0.0}; }
  static GainSetting preset() { return {Mode::bhattacharyya_preset, 0.0}; }

  friend bool operator==(const GainSetting&, const GainSetting&) = default;
};

struct ReceiverConfig {
  GainSetting gain;
  std::int64_t k = 1;
  ThresholdPolicy threshold_policy = ThresholdPolicy::paper_formula;
  CountModel count_model = CountModel::full_counting;

  friend bool operator==(const ReceiverConfig&, const ReceiverConfig&) = default;
};

/// Throws DomainError unless G > 1 (when fixed) and K >= 1.
ReceiverConfig validate_receiver(const ReceiverConfig& raw);

struct Config {
  ScenarioParams params;
  ReceiverConfig receiver;

  friend bool operator==(const Config&, const Config&) = default;
};

/// Raw `key=value` pairs, in file order irrelevant. `#` starts a comment.
using KeyValues = std::map<std::string, std::string>;

/// Tokenises a flat key-value document. Rejects unknown and duplicate keys.
KeyValues parse_key_values(std::string_view text);

/// Builds and validates a config. n_s, kappa and n_b are required; receiver
/// keys default to gain=auto, k=1, paper_formula, full_counting.
Config config_from_key_values(const KeyValues& kv);

/// parse_key_values followed by config_from_key_values.
Config parse_config(std::string_view text);

/// Inverse of parse_config: parse_config(render_config(c)) == c.
std::string render_config(const Config& config);

std::string to_string(ThresholdPolicy p);
std::string to_string(CountModel m);
std::string to_string(const GainSetting& g);
ThresholdPolicy parse_threshold_policy(std::string_view s);
CountModel parse_count_model(std::string_view s);
GainSetting parse_gain(std::string_view s);

/// Shortest decimal text that parses back to exactly `v`.
std::string format_double(double v);

}  // namespace qillum
