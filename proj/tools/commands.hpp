#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

namespace rblab::cli {

inline constexpr const char* kToolVersion = "1.0.0";
inline constexpr int kManifestSchemaVersion = 1;

/// One flat parameter set shared by every subcommand; each subcommand
/// exposes only the relevant flags, everything is echoed into the manifest.
/// Field names double as flag names (dashes for underscores) and as config
/// keys.
struct Params {
  // common
  std::uint64_t seed = 12345;
  int reps = 1;
  int workers = 1;

  // process / simulation
  double h = 0.7;
  double h1 = 0.7;
  double h2 = 0.7;
  int steps = 256;
  int oversample = 16;
  double t = 1.0;
  std::string normalization = "exact-variance";

  // local time
  std::string kind = "slt";
  double eps = 0.05;
  double y = 0.0;
  double kappa = 4.0;
  std::vector<double> ladder;  // eps-study ladder
  double moment_p = 1.0;

  // holder experiments
  int n = 2;  // moment order
  double t_base = 0.5;
  std::vector<double> deltas;
  double y_base = 0.0;
  std::vector<double> offsets;  // in units of sqrt(eps)

  // spectral
  std::vector<double> breakpoints{0.0, 1.0};
  std::vector<double> coeffs{1.0};
  int nodes = 2000;
  double omega = 400.0;
  double grading = 3.0;
  int trunc = 200;

  // density
  double x_max = 0.0;  // 0 -> sized automatically from the tail bound
  int x_points = 2001;

  // refine
  std::vector<int> nodes_ladder{500, 1000, 2000};
};

nlohmann::json params_to_json(const Params& p);

/// Strict parse: unknown keys are rejected by name.
Params params_from_json(const nlohmann::json& j);

/// Merge a config file into `p`, skipping keys listed in `cli_set` (flags
/// already given on the command line win).
void apply_config(Params& p, const std::filesystem::path& config_path,
                  const std::vector<std::string>& cli_set);

struct OutputRecord {
  std::string path;  // relative to out_dir
  std::string digest;
};

struct CommandResult {
  std::vector<OutputRecord> outputs;
  std::string summary;  // printed to stdout
};

/// Execute a subcommand, writing CSV outputs into out_dir. Pure function of
/// (name, params): byte-identical outputs per run regardless of workers.
CommandResult run_command(const std::string& name, const Params& p,
                          const std::filesystem::path& out_dir);

/// Emit <command>.manifest.json next to the outputs.
void write_manifest(const std::string& command, const Params& p,
                    const std::vector<OutputRecord>& outputs,
                    double wall_time_seconds,
                    const std::filesystem::path& out_dir);

/// Re-run the manifest's command with its recorded parameters and compare
/// output digests. Returns true when every file is byte-identical.
bool replay_manifest(const std::filesystem::path& manifest_path,
                     const std::filesystem::path& out_dir,
                     int workers_override);  // -1 keeps recorded workers

}  // namespace rblab::cli
