#pragma once

// Experiment orchestration behind the command-line tool: a run
// configuration, the artifact-writing subcommands and the full pipeline.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace salem {

/// Every field has a default; the defaulted config runs the middle-thirds
/// Cantor pipeline end to end. `workers` and `output` are not serialized, so
/// they never change the config hash or any artifact.
struct RunConfig {
  std::string construction = "ifs";  // ifs | fat-cantor | gap-table
  int depth = 12;
  std::vector<double> ifs_ratios{1.0 / 3.0, 1.0 / 3.0};
  std::vector<double> ifs_offsets{0.0, 2.0 / 3.0};
  std::vector<double> ifs_weights;  // empty: uniform
  std::vector<double> fat_c;        // c_1..c_K; empty: default sequence
  std::string gap_table;            // path, gap-table construction only
  std::string measure_file;         // optional measure for gap-table

  int m = 1;
  double alpha = 1.0;
  std::string bump = "smoothstep";  // smoothstep | exponential
  int bump_order = 0;               // 0: m + 1
  std::string nu = "uniform";
  std::uint64_t seed = 1;
  std::optional<double> s;  // dimension of the measure; derived when unset

  int j_min = 6;
  int j_max = 16;
  int points_per_band = 0;  // 0: fixed spacing `xi_spacing`
  double xi_spacing = 0.5;

  std::vector<int> q{1, 2};
  std::size_t n_samples = 200;
  std::size_t modulus_pairs = 100000;
  std::size_t derivative_points = 10000;

  int psi_depth = 6;        // J grid: construction pieces of depth <= psi_depth
  int psi_x_max_exp = 20;   // x grid: 2^0 .. 2^psi_x_max_exp
  double psi_margin = 0.02;
  std::string psi_mode = "auto";  // auto | schedule | raw

  unsigned workers = 1;
  std::string output;

  /// Throws Error(parameter) describing the first invalid field.
  void validate() const;

  /// Canonical JSON, keys in declaration order, trailing newline.
  std::string to_json() const;
  std::string hash() const;  // SHA-256 of to_json()

  /// Overrides fields present in the JSON object. Unknown keys and wrong
  /// types throw Error(parameter); malformed JSON throws Error(parse).
  void merge_json(std::string_view json_text);

  /// Sets one field from text: JSON values are accepted, and lists may also
  /// be given comma-separated. `workers` and `output` are settable here.
  void set(std::string_view key, std::string_view value);

  static const std::vector<std::string>& keys();
};

inline constexpr int kExitPass = 0;
inline constexpr int kExitPropertyFailure = 1;
inline constexpr int kExitConfigError = 2;

struct CommandResult {
  int exit_code = kExitPass;
  std::string output_dir;
  std::string message;  // failure description, empty on success
};

const std::vector<std::string>& command_names();

/// Output directory: `config.output` if set, else
/// $SALEMLAB_OUTPUT_ROOT (default "salemlab-runs") joined with the first 12
/// hex digits of the config hash.
std::string resolve_output_dir(const RunConfig& config);

/// Runs one subcommand, writing its artifacts plus config.json. Never
/// throws; errors are mapped to exit codes.
CommandResult run_command(const RunConfig& config, std::string_view command);

}  // namespace salem
