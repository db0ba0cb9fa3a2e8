#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <map>
#include <sstream>
#include <stdexcept>

#include "rblab/csv.hpp"
#include "rblab/errors.hpp"
#include "rblab/holder_lab.hpp"
#include "rblab/local_time.hpp"
#include "rblab/parallel.hpp"
#include "rblab/process_model.hpp"
#include "rblab/rng.hpp"
#include "rblab/simulator.hpp"
#include "rblab/spectral.hpp"

namespace rblab::cli {

using nlohmann::json;

namespace {

// single source of truth for the field list: visits (key, member pointer)
template <class V>
void visit_params(V&& visit) {
  visit("seed", &Params::seed);
  visit("reps", &Params::reps);
  visit("workers", &Params::workers);
  visit("h", &Params::h);
  visit("h1", &Params::h1);
  visit("h2", &Params::h2);
  visit("steps", &Params::steps);
  visit("oversample", &Params::oversample);
  visit("t", &Params::t);
  visit("normalization", &Params::normalization);
  visit("kind", &Params::kind);
  visit("eps", &Params::eps);
  visit("y", &Params::y);
  visit("kappa", &Params::kappa);
  visit("ladder", &Params::ladder);
  visit("moment_p", &Params::moment_p);
  visit("n", &Params::n);
  visit("t_base", &Params::t_base);
  visit("deltas", &Params::deltas);
  visit("y_base", &Params::y_base);
  visit("offsets", &Params::offsets);
  visit("breakpoints", &Params::breakpoints);
  visit("coeffs", &Params::coeffs);
  visit("nodes", &Params::nodes);
  visit("omega", &Params::omega);
  visit("grading", &Params::grading);
  visit("trunc", &Params::trunc);
  visit("x_max", &Params::x_max);
  visit("x_points", &Params::x_points);
  visit("nodes_ladder", &Params::nodes_ladder);
}

LocalTimeKind parse_kind(const std::string& kind) {
  if (kind == "slt") return LocalTimeKind::kSelf;
  if (kind == "ilt") return LocalTimeKind::kIntersection;
  if (kind == "clt") return LocalTimeKind::kCollision;
  throw std::invalid_argument("kind must be one of slt, ilt, clt, got '" +
                              kind + "'");
}

IntervalCoefficients coeffs_of(const Params& p) {
  return IntervalCoefficients(p.breakpoints, p.coeffs);
}

QuadratureSpec quad_of(const Params& p) {
  return QuadratureSpec{p.nodes, p.omega, p.grading};
}

HolderConfig holder_config(const Params& p) {
  HolderConfig cfg;
  cfg.kind = parse_kind(p.kind);
  cfg.h1 = cfg.kind == LocalTimeKind::kSelf ? p.h : p.h1;
  cfg.h2 = p.h2;
  cfg.moment_order = p.n;
  cfg.epsilon = p.eps;
  cfg.n_steps = p.steps;
  cfg.oversample = p.oversample;
  cfg.reps = p.reps;
  cfg.seed = p.seed;
  cfg.kappa = p.kappa;
  cfg.workers = p.workers;
  cfg.t_base = p.t_base;
  cfg.deltas = p.deltas;
  cfg.horizon = p.t;
  cfg.y_base = p.y_base;
  cfg.offsets = p.offsets;
  return cfg;
}

OutputRecord emit(const std::filesystem::path& out_dir,
                  const std::string& name, const CsvWriter& csv) {
  csv.write(out_dir / name);
  return OutputRecord{name, csv.digest()};
}

std::string fd(double v) { return format_double(v); }

// ---- subcommands ---------------------------------------------------------

CommandResult cmd_simulate(const Params& p,
                           const std::filesystem::path& out_dir) {
  SimulationConfig cfg{p.steps,        p.oversample,
                       p.t,            HurstParam(p.h),
                       p.seed,         Normalization::kExactVariance};
  if (p.normalization == "none") {
    cfg.normalization = Normalization::kNone;
  } else if (p.normalization != "exact-variance") {
    throw std::invalid_argument(
        "normalization must be 'exact-variance' or 'none'");
  }
  const auto path = simulate_rosenblatt(cfg);
  CsvWriter csv({"s", "x"});
  for (int i = 0; i <= path.grid.steps(); ++i) {
    csv.row({fd(path.grid.point(i)), fd(path.values[i])});
  }
  CommandResult result;
  result.outputs.push_back(emit(out_dir, "simulate.csv", csv));
  std::ostringstream ss;
  ss << "simulate: H=" << p.h << " steps=" << p.steps << " X(T)="
     << path.values.back();
  result.summary = ss.str();
  return result;
}

CommandResult cmd_spectrum(const Params& p,
                           const std::filesystem::path& out_dir) {
  const auto disc = discretize_operator(coeffs_of(p), HurstParam(p.h),
                                        quad_of(p));
  const auto spec = eigen_spectrum(disc, p.trunc);
  CsvWriter csv({"j", "lambda_j"});
  for (int j = 0; j < spec.truncation; ++j) {
    csv.row({format_int(j + 1), fd(spec.eigenvalues[j])});
  }
  CommandResult result;
  result.outputs.push_back(emit(out_dir, "spectrum.csv", csv));
  std::ostringstream ss;
  ss << "spectrum: J=" << spec.truncation
     << " sum lambda^2=" << fd(spec.sum_sq)
     << " calibration=" << fd(spec.calibration);
  result.summary = ss.str();
  return result;
}

std::vector<double> density_grid(const EigenSpectrum& spec, const Params& p) {
  double half_width = p.x_max;
  if (half_width <= 0.0) {
    // widen until the Chernoff-estimated tail is comfortably below the
    // 1e-4 precondition
    half_width = 4.0 * std::sqrt(2.0 * spec.sum_sq);
    while (chaos_tail_bound(spec, half_width) >= 1e-5) half_width *= 1.25;
  }
  const int n = p.x_points;
  if (n < 3 || n % 2 == 0) {
    throw std::invalid_argument("x_points must be odd and >= 3");
  }
  std::vector<double> grid(n);
  for (int i = 0; i < n; ++i) {
    grid[i] = -half_width + 2.0 * half_width * i / (n - 1);
  }
  return grid;
}

CommandResult cmd_density(const Params& p,
                          const std::filesystem::path& out_dir) {
  const auto disc = discretize_operator(coeffs_of(p), HurstParam(p.h),
                                        quad_of(p));
  const auto spec = eigen_spectrum(disc, p.trunc);
  const auto result_density = marginal_density(spec, density_grid(spec, p));
  CsvWriter csv({"x", "p"});
  for (std::size_t i = 0; i < result_density.x.size(); ++i) {
    csv.row({fd(result_density.x[i]), fd(result_density.density[i])});
  }
  CommandResult result;
  result.outputs.push_back(emit(out_dir, "density.csv", csv));
  double integral = 0.0;
  const double dx = result_density.x[1] - result_density.x[0];
  for (std::size_t i = 0; i + 1 < result_density.x.size(); ++i) {
    integral +=
        0.5 * (result_density.density[i] + result_density.density[i + 1]) * dx;
  }
  std::ostringstream ss;
  ss << "density: points=" << result_density.x.size()
     << " integral=" << fd(integral)
     << " freq_cutoff=" << fd(result_density.freq_cutoff)
     << " freq_step=" << fd(result_density.freq_step);
  result.summary = ss.str();
  return result;
}

CommandResult cmd_local_time(const std::string& name, const Params& p,
                             const std::filesystem::path& out_dir) {
  const LocalTimeKind kind = parse_kind(name);
  const MollifierScale eps(p.eps);
  const SpaceOffset y{p.y};
  const double h_min =
      kind == LocalTimeKind::kSelf ? p.h : std::min(p.h1, p.h2);
  const double floor = resolution_floor(p.t / p.steps, h_min, p.kappa);
  if (p.eps < floor) {
    throw std::invalid_argument(
        "eps " + std::to_string(p.eps) +
        " is below the resolution floor kappa*dt^{2H} = " +
        std::to_string(floor));
  }
  if (p.reps < 1) throw std::invalid_argument("reps must be >= 1");

  std::vector<LocalTimeEstimate> estimates(p.reps);
  const TimeGrid grid(p.t, p.steps);
  parallel_for(p.reps, p.workers, [&](int r) {
    const std::uint64_t rep_seed =
        derive_seed(p.seed, static_cast<std::uint64_t>(r));
    if (kind == LocalTimeKind::kSelf) {
      SimulationConfig cfg{p.steps, p.oversample, p.t, HurstParam(p.h),
                           rep_seed};
      estimates[r] = slt_estimate(simulate_rosenblatt(cfg), eps, y);
    } else {
      const auto [p1, p2] = simulate_independent_pair(
          grid, HurstParam(p.h1), HurstParam(p.h2), rep_seed, p.oversample);
      estimates[r] = kind == LocalTimeKind::kIntersection
                         ? ilt_estimate(p1, p2, eps, y)
                         : clt_estimate(p1, p2, eps, y);
    }
  });

  CsvWriter csv({"kind", "t", "y", "eps", "value", "seed"});
  for (int r = 0; r < p.reps; ++r) {
    csv.row({name, fd(estimates[r].t), fd(estimates[r].y),
             fd(estimates[r].epsilon), fd(estimates[r].value),
             format_uint(derive_seed(p.seed, static_cast<std::uint64_t>(r)))});
  }
  CommandResult result;
  result.outputs.push_back(emit(out_dir, name + ".csv", csv));
  double mean = 0.0;
  for (const auto& e : estimates) mean += e.value;
  mean /= p.reps;
  std::ostringstream ss;
  ss << name << ": reps=" << p.reps << " mean=" << fd(mean);
  result.summary = ss.str();
  return result;
}

CommandResult cmd_eps_study(const Params& p,
                            const std::filesystem::path& out_dir) {
  EpsStudyConfig cfg;
  cfg.kind = parse_kind(p.kind);
  cfg.h1 = cfg.kind == LocalTimeKind::kSelf ? p.h : p.h1;
  cfg.h2 = p.h2;
  cfg.n_steps = p.steps;
  cfg.oversample = p.oversample;
  cfg.horizon = p.t;
  cfg.y = p.y;
  cfg.ladder = p.ladder;
  cfg.reps = p.reps;
  cfg.seed = p.seed;
  cfg.moment_p = p.moment_p;
  cfg.kappa = p.kappa;
  cfg.workers = p.workers;
  const auto rows = epsilon_convergence_study(cfg);
  CsvWriter csv({"eps", "mean", "stderr", "diff_next", "diff_stderr"});
  for (const auto& row : rows) {
    csv.row({fd(row.epsilon), fd(row.mean_value), fd(row.stderr_value),
             fd(row.diff_to_next), fd(row.stderr_diff)});
  }
  CommandResult result;
  result.outputs.push_back(emit(out_dir, "eps-study.csv", csv));
  std::ostringstream ss;
  ss << "eps-study: " << p.kind << " rungs=" << rows.size()
     << " last mean=" << fd(rows.back().mean_value) << " last diff="
     << fd(rows[rows.size() - 2].diff_to_next);
  result.summary = ss.str();
  return result;
}

CommandResult cmd_holder(const std::string& name, const Params& p,
                         const std::filesystem::path& out_dir) {
  const bool time_experiment = name == "holder-time";
  const auto cfg = holder_config(p);
  const auto res = time_experiment ? holder_time_experiment(cfg)
                                   : holder_space_experiment(cfg);
  CsvWriter raw({"delta", "moment", "stderr"});
  for (const auto& row : res.rows) {
    raw.row({fd(row.delta), fd(row.moment), fd(row.stderr_)});
  }
  CsvWriter fit({"slope", "stderr", "n", "kind", "H1", "H2"});
  fit.row({fd(res.fit.slope), fd(res.fit.stderr_slope), format_int(p.n),
           p.kind, fd(cfg.h1), fd(cfg.h2)});
  CommandResult result;
  result.outputs.push_back(emit(out_dir, name + ".raw.csv", raw));
  result.outputs.push_back(emit(out_dir, name + ".fit.csv", fit));

  const auto kind = parse_kind(p.kind);
  const auto table = theoretical_exponents(
      kind, HurstParam(cfg.h1),
      kind == LocalTimeKind::kSelf ? std::nullopt
                                   : std::optional<HurstParam>(HurstParam(cfg.h2)));
  const double sup = time_experiment ? table.time_exponent_sup
                                     : table.space_exponent_sup;
  std::ostringstream ss;
  ss << name << ": " << p.kind << " slope=" << fd(res.fit.slope) << " +/- "
     << fd(res.fit.stderr_slope) << " (n*sup=" << fd(p.n * sup) << ")";
  if (res.smoothing_dominated) {
    ss << "\nnote: offsets sit below sqrt(eps)/2; mollifier smoothing "
          "dominates the fitted slope";
  }
  result.summary = ss.str();
  return result;
}

CommandResult cmd_exponents(const Params& p,
                            const std::filesystem::path& out_dir) {
  const auto kind = parse_kind(p.kind);
  const double h1 = kind == LocalTimeKind::kSelf ? p.h : p.h1;
  const auto table = theoretical_exponents(
      kind, HurstParam(h1),
      kind == LocalTimeKind::kSelf ? std::nullopt
                                   : std::optional<HurstParam>(HurstParam(p.h2)));
  CsvWriter csv({"kind", "H1", "H2", "exists", "space_sup", "time_sup"});
  csv.row({p.kind, fd(table.h1), fd(table.h2),
           table.exists ? "true" : "false", fd(table.space_exponent_sup),
           fd(table.time_exponent_sup)});
  CommandResult result;
  result.outputs.push_back(emit(out_dir, "exponents.csv", csv));
  std::ostringstream ss;
  ss << "exponents: " << p.kind << " H1=" << fd(table.h1)
     << " H2=" << fd(table.h2) << " exists="
     << (table.exists ? "true" : "false")
     << " space_sup=" << fd(table.space_exponent_sup)
     << " time_sup=" << fd(table.time_exponent_sup);
  result.summary = ss.str();
  return result;
}

CommandResult cmd_refine(const Params& p,
                         const std::filesystem::path& out_dir) {
  if (p.nodes_ladder.size() < 2) {
    throw std::invalid_argument("nodes ladder needs at least 2 entries");
  }
  const auto coeffs = coeffs_of(p);
  const HurstParam h(p.h);
  CsvWriter csv({"nodes", "omega", "grading", "trunc", "sum_lambda_sq",
                 "raw_sum_lambda_sq", "rel_change"});
  double prev_raw = 0.0;
  bool first = true;
  std::ostringstream ss;
  ss << "refine:";
  for (int nodes : p.nodes_ladder) {
    QuadratureSpec quad{nodes, p.omega, p.grading};
    const int trunc = std::min(p.trunc, nodes);
    const auto spec =
        eigen_spectrum(discretize_operator(coeffs, h, quad), trunc);
    const double raw = spec.sum_sq / (spec.calibration * spec.calibration);
    const double rel =
        first ? std::numeric_limits<double>::quiet_NaN()
              : std::abs(raw - prev_raw) / prev_raw;
    csv.row({format_int(nodes), fd(p.omega), fd(p.grading), format_int(trunc),
             fd(spec.sum_sq), fd(raw), fd(rel)});
    ss << " N=" << nodes << " raw=" << fd(raw);
    if (!first) ss << " (rel " << fd(rel) << ")";
    prev_raw = raw;
    first = false;
  }
  CommandResult result;
  result.outputs.push_back(emit(out_dir, "refine.csv", csv));
  result.summary = ss.str();
  return result;
}

CommandResult cmd_verify_bound(const Params& p,
                               const std::filesystem::path& out_dir) {
  const auto coeffs = coeffs_of(p);
  const HurstParam h(p.h);
  const auto spec =
      eigen_spectrum(discretize_operator(coeffs, h, quad_of(p)), p.trunc);
  const auto report = verify_lower_bound(spec, coeffs, h);

  CsvWriter csv({"j", "sigma_j", "bound_rhs", "ratio"});
  std::vector<double> sigma;
  for (double l : spec.eigenvalues) sigma.push_back(std::abs(l));
  std::sort(sigma.rbegin(), sigma.rend());
  for (std::size_t j = 1; j <= report.ratios.size(); ++j) {
    const double rhs = report.max_weighted_term *
                       std::pow(static_cast<double>(j), -h.value());
    csv.row({format_int(static_cast<long long>(j)), fd(sigma[j - 1]), fd(rhs),
             fd(report.ratios[j - 1])});
  }
  CsvWriter summary({"fitted_c", "max_weighted_term", "window_min_ratio",
                     "window_max_ratio", "negative_eigenvalues", "pass"});
  summary.row({fd(report.fitted_constant), fd(report.max_weighted_term),
               fd(report.window_min_ratio), fd(report.window_max_ratio),
               format_int(report.negative_eigenvalues),
               report.pass ? "true" : "false"});
  CommandResult result;
  result.outputs.push_back(emit(out_dir, "verify-bound.csv", csv));
  result.outputs.push_back(emit(out_dir, "verify-bound.summary.csv", summary));
  std::ostringstream ss;
  ss << "verify-bound: fitted c=" << fd(report.fitted_constant)
     << " window sigma_j j^H in [" << fd(report.window_min_ratio) << ", "
     << fd(report.window_max_ratio) << "] negatives="
     << report.negative_eigenvalues << (report.pass ? " PASS" : " FAIL");
  result.summary = ss.str();
  return result;
}

}  // namespace

json params_to_json(const Params& p) {
  json j;
  visit_params([&](const char* key, auto member) { j[key] = p.*member; });
  return j;
}

Params params_from_json(const json& j) {
  Params p;
  std::map<std::string, std::function<void(const json&)>> setters;
  visit_params([&](const char* key, auto member) {
    setters[key] = [&p, member](const json& value) {
      value.get_to(p.*member);
    };
  });
  for (const auto& [key, value] : j.items()) {
    auto it = setters.find(key);
    if (it == setters.end()) {
      throw std::invalid_argument("unknown config field '" + key + "'");
    }
    it->second(value);
  }
  return p;
}

void apply_config(Params& p, const std::filesystem::path& config_path,
                  const std::vector<std::string>& cli_set) {
  json j;
  try {
    j = json::parse(read_file(config_path));
  } catch (const json::parse_error& e) {
    throw std::invalid_argument("config " + config_path.string() +
                                " is not valid JSON: " + e.what());
  }
  if (!j.is_object()) {
    throw std::invalid_argument("config must be a JSON object");
  }
  std::map<std::string, std::function<void(const json&)>> setters;
  visit_params([&](const char* key, auto member) {
    setters[key] = [&p, member](const json& value) {
      value.get_to(p.*member);
    };
  });
  for (const auto& [key, value] : j.items()) {
    auto it = setters.find(key);
    if (it == setters.end()) {
      throw std::invalid_argument("unknown config field '" + key + "'");
    }
    if (std::find(cli_set.begin(), cli_set.end(), key) != cli_set.end()) {
      continue;  // command line wins
    }
    it->second(value);
  }
}

CommandResult run_command(const std::string& name, const Params& p,
                          const std::filesystem::path& out_dir) {
  std::filesystem::create_directories(out_dir);
  if (name == "simulate") return cmd_simulate(p, out_dir);
  if (name == "spectrum") return cmd_spectrum(p, out_dir);
  if (name == "density") return cmd_density(p, out_dir);
  if (name == "slt" || name == "ilt" || name == "clt") {
    return cmd_local_time(name, p, out_dir);
  }
  if (name == "eps-study") return cmd_eps_study(p, out_dir);
  if (name == "holder-time" || name == "holder-space") {
    return cmd_holder(name, p, out_dir);
  }
  if (name == "exponents") return cmd_exponents(p, out_dir);
  if (name == "refine") return cmd_refine(p, out_dir);
  if (name == "verify-bound") return cmd_verify_bound(p, out_dir);
  throw std::invalid_argument("unknown command '" + name + "'");
}

void write_manifest(const std::string& command, const Params& p,
                    const std::vector<OutputRecord>& outputs,
                    double wall_time_seconds,
                    const std::filesystem::path& out_dir) {
  json j;
  j["schema_version"] = kManifestSchemaVersion;
  j["tool_version"] = kToolVersion;
  j["command"] = command;
  j["parameters"] = params_to_json(p);
  j["master_seed"] = p.seed;
  j["discretization"] = json{{"n_steps", p.steps},
                             {"oversample", p.oversample},
                             {"eps_ladder", p.ladder},
                             {"nodes", p.nodes},
                             {"omega", p.omega},
                             {"grading", p.grading},
                             {"truncation", p.trunc}};
  json outs = json::array();
  for (const auto& o : outputs) {
    outs.push_back(json{{"path", o.path}, {"digest", o.digest}});
  }
  j["outputs"] = outs;
  j["wall_time_seconds"] = wall_time_seconds;
  write_file_atomic(out_dir / (command + ".manifest.json"), j.dump(2) + "\n");
}

bool replay_manifest(const std::filesystem::path& manifest_path,
                     const std::filesystem::path& out_dir,
                     int workers_override) {
  json j;
  try {
    j = json::parse(read_file(manifest_path));
  } catch (const json::parse_error& e) {
    throw std::invalid_argument("manifest is not valid JSON: " +
                                std::string(e.what()));
  }
  if (j.value("schema_version", 0) != kManifestSchemaVersion) {
    throw std::invalid_argument("unsupported manifest schema version");
  }
  const std::string command = j.at("command").get<std::string>();
  Params p = params_from_json(j.at("parameters"));
  if (workers_override >= 1) p.workers = workers_override;
  const auto result = run_command(command, p, out_dir);

  std::map<std::string, std::string> produced;
  for (const auto& o : result.outputs) produced[o.path] = o.digest;
  bool all_match = true;
  for (const auto& rec : j.at("outputs")) {
    const auto path = rec.at("path").get<std::string>();
    const auto digest = rec.at("digest").get<std::string>();
    auto it = produced.find(path);
    const bool match = it != produced.end() && it->second == digest;
    all_match = all_match && match;
    std::printf("%s %s\n", match ? "MATCH   " : "MISMATCH", path.c_str());
  }
  return all_match;
}

}  // namespace rblab::cli
