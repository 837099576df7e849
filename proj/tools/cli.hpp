#pragma once

// Command implementations behind the `qillum` executable. Each command
// returns its artifacts as text so that callers decide where they go.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "qillum/errors.hpp"
#include "qillum/scenario.hpp"

namespace qillum::cli {

/// Bad flags, config or grids. Maps to exit code 2.
class UsageError : public Error {
public:
  using Error::Error;
};

inline constexpr int kExitOk = 0;
inline constexpr int kExitComputation = 1;
inline constexpr int kExitUsage = 2;

struct KGrid {
  std::int64_t k_min = 1;
  std::int64_t k_max = 100000000;
  int points = 30;
};

/// Log-spaced integers from k_min to k_max inclusive, rounded and
/// deduplicated (so fewer than `points` values when the range is narrow).
std::vector<std::int64_t> make_k_grid(const KGrid& grid);

/// One labelled log10 P_e curve.
struct ErrorCurve {
  std::string label;
  std::vector<std::pair<std::int64_t, double>> points;
  std::string params_hash;

  /// Enforces strictly increasing K and log10_pe <= log10(1/2) + 1e-12.
  void append(std::int64_t k, double log10_pe);
};

struct RunSettings {
  Config config;
  double tail_tol = 1e-9;
  KGrid k_grid;
};

/// "fnv1a64:<16 hex digits>" over the rendered config, tail_tol and K grid.
std::string params_digest(const RunSettings& settings);

struct Artifact {
  std::string file_name;
  std::string text;
};

struct CommandOutput {
  std::vector<Artifact> files;  ///< data files, byte-for-byte deterministic
  std::string meta;             ///< contents of meta.txt
  std::string summary;          ///< printed to stdout
};

CommandOutput cmd_bounds(const RunSettings& settings);
CommandOutput cmd_helstrom(const RunSettings& settings);
CommandOutput cmd_exponents(const RunSettings& settings);

enum class SweepAxis { kappa, n_b, n_s, gain };

/// Accepts kappa, N_B, N_S, G (and lower-case spellings).
SweepAxis parse_axis(const std::string& name);

/// Comma-separated numbers; UsageError when empty or malformed.
std::vector<double> parse_grid(const std::string& text);

CommandOutput cmd_sweep(const RunSettings& settings, SweepAxis axis,
                        const std::vector<double>& grid);

/// Writes every artifact plus meta.txt into `dir`, creating it if needed.
void write_outputs(const CommandOutput& output, const std::filesystem::path& dir);

/// Full command-line entry point; returns the process exit code.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace qillum::cli
