#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <exception>
#include <string>
#include <vector>

#include "commands.hpp"
#include "rblab/errors.hpp"

namespace {

using rblab::cli::Params;

struct Cli {
  Params params;
  std::string out_dir = ".";
  std::string config;
  std::string manifest;  // replay target
};

// options shared by every subcommand
void add_common(CLI::App* cmd, Cli& cli) {
  // --h is a domain flag here, so the help flag keeps only its long form
  cmd->set_help_flag("--help", "print this help and exit");
  cmd->add_option("--seed", cli.params.seed, "master seed");
  cmd->add_option("--reps", cli.params.reps, "replications");
  cmd->add_option("--workers", cli.params.workers,
                  "worker threads (results are invariant to this)");
  cmd->add_option("--out-dir", cli.out_dir, "output directory");
  cmd->add_option("--config", cli.config,
                  "JSON config file; command-line flags win");
}

void add_hurst_single(CLI::App* cmd, Cli& cli) {
  cmd->add_option("--h", cli.params.h, "Hurst parameter, in (0.5, 1)");
}

void add_hurst_pair(CLI::App* cmd, Cli& cli) {
  cmd->add_option("--h1", cli.params.h1, "first Hurst parameter");
  cmd->add_option("--h2", cli.params.h2, "second Hurst parameter");
}

void add_grid(CLI::App* cmd, Cli& cli) {
  cmd->add_option("--steps", cli.params.steps, "grid steps");
  cmd->add_option("--oversample", cli.params.oversample,
                  "internal oversampling factor");
  cmd->add_option("--t", cli.params.t, "time horizon");
}

void add_spectral(CLI::App* cmd, Cli& cli) {
  cmd->add_option("--breakpoints", cli.params.breakpoints,
                  "step-function breakpoints l_1 < ... < l_{m+1}")
      ->delimiter(',');
  cmd->add_option("--coeffs", cli.params.coeffs, "step-function coefficients")
      ->delimiter(',');
  cmd->add_option("--nodes", cli.params.nodes, "quadrature nodes (even)");
  cmd->add_option("--omega", cli.params.omega, "frequency cutoff");
  cmd->add_option("--grading", cli.params.grading, "grid grading exponent");
  cmd->add_option("--trunc", cli.params.trunc, "spectrum truncation J");
}

void add_mollifier(CLI::App* cmd, Cli& cli) {
  cmd->add_option("--eps", cli.params.eps, "mollifier variance");
  cmd->add_option("--y", cli.params.y, "space offset");
  cmd->add_option("--kappa", cli.params.kappa,
                  "resolution-floor multiplier kappa");
}

// names of params set on the command line, for config-merge precedence
std::vector<std::string> cli_set_keys(const CLI::App* cmd) {
  std::vector<std::string> keys;
  for (const auto* opt : cmd->get_options()) {
    if (opt->count() == 0) continue;
    std::string name = opt->get_name();
    if (name.rfind("--", 0) == 0) name = name.substr(2);
    for (auto& c : name) {
      if (c == '-') c = '_';
    }
    keys.push_back(name);
  }
  return keys;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "rblab: Rosenblatt-process simulation, second-chaos spectra and "
      "local-time experiments"};
  app.set_help_flag("--help", "print this help and exit");
  app.require_subcommand(1);
  Cli cli;

  auto* simulate = app.add_subcommand(
      "simulate", "sample a Rosenblatt path and write (s, x) CSV");
  add_common(simulate, cli);
  add_hurst_single(simulate, cli);
  add_grid(simulate, cli);
  simulate->add_option("--normalization", cli.params.normalization,
                       "exact-variance | none");

  auto* spectrum = app.add_subcommand(
      "spectrum", "eigenvalues of the discretized chaos operator");
  add_common(spectrum, cli);
  add_hurst_single(spectrum, cli);
  add_spectral(spectrum, cli);

  auto* density = app.add_subcommand(
      "density", "marginal density by Fourier inversion");
  add_common(density, cli);
  add_hurst_single(density, cli);
  add_spectral(density, cli);
  density->add_option("--x-max", cli.params.x_max,
                      "half-width of the density grid (0 = auto)");
  density->add_option("--x-points", cli.params.x_points,
                      "density grid points (odd)");

  auto* slt = app.add_subcommand(
      "slt", "self-intersection local time estimates over replications");
  add_common(slt, cli);
  add_hurst_single(slt, cli);
  add_grid(slt, cli);
  add_mollifier(slt, cli);

  auto* ilt = app.add_subcommand(
      "ilt", "intersection local time of two independent paths");
  add_common(ilt, cli);
  add_hurst_pair(ilt, cli);
  add_grid(ilt, cli);
  add_mollifier(ilt, cli);

  auto* clt = app.add_subcommand(
      "clt", "collision local time of two independent paths");
  add_common(clt, cli);
  add_hurst_pair(clt, cli);
  add_grid(clt, cli);
  add_mollifier(clt, cli);

  auto* eps_study = app.add_subcommand(
      "eps-study", "Cauchy-in-epsilon study with common random paths");
  add_common(eps_study, cli);
  eps_study->add_option("--kind", cli.params.kind, "slt | ilt | clt");
  add_hurst_single(eps_study, cli);
  add_hurst_pair(eps_study, cli);
  add_grid(eps_study, cli);
  eps_study->add_option("--y", cli.params.y, "space offset");
  eps_study->add_option("--ladder", cli.params.ladder,
                        "strictly decreasing epsilons")
      ->delimiter(',');
  eps_study->add_option("--moment-p", cli.params.moment_p,
                        "moment exponent reported per rung");
  eps_study->add_option("--kappa", cli.params.kappa,
                        "resolution-floor multiplier");

  auto* holder_time = app.add_subcommand(
      "holder-time", "moment scaling in the horizon, log-log fit");
  add_common(holder_time, cli);
  holder_time->add_option("--kind", cli.params.kind, "slt | ilt | clt");
  add_hurst_single(holder_time, cli);
  add_hurst_pair(holder_time, cli);
  holder_time->add_option("--n", cli.params.n, "moment order (1..3)");
  holder_time->add_option("--t-base", cli.params.t_base, "base horizon");
  holder_time->add_option("--deltas", cli.params.deltas, "horizon offsets")
      ->delimiter(',');
  holder_time->add_option("--eps", cli.params.eps, "mollifier variance");
  holder_time->add_option("--steps", cli.params.steps, "grid steps");
  holder_time->add_option("--oversample", cli.params.oversample,
                          "oversampling factor");
  holder_time->add_option("--kappa", cli.params.kappa,
                          "resolution-floor multiplier");

  auto* holder_space = app.add_subcommand(
      "holder-space", "moment scaling in the space offset, log-log fit");
  add_common(holder_space, cli);
  holder_space->add_option("--kind", cli.params.kind, "slt | ilt | clt");
  add_hurst_single(holder_space, cli);
  add_hurst_pair(holder_space, cli);
  holder_space->add_option("--n", cli.params.n, "moment order (1..3)");
  holder_space->add_option("--t", cli.params.t, "time horizon");
  holder_space->add_option("--y-base", cli.params.y_base, "base offset");
  holder_space
      ->add_option("--offsets", cli.params.offsets,
                   "offset ladder in units of sqrt(eps)")
      ->delimiter(',');
  holder_space->add_option("--eps", cli.params.eps, "mollifier variance");
  holder_space->add_option("--steps", cli.params.steps, "grid steps");
  holder_space->add_option("--oversample", cli.params.oversample,
                           "oversampling factor");
  holder_space->add_option("--kappa", cli.params.kappa,
                           "resolution-floor multiplier");

  auto* exponents = app.add_subcommand(
      "exponents", "theoretical existence and exponent suprema");
  add_common(exponents, cli);
  exponents->add_option("--kind", cli.params.kind, "slt | ilt | clt");
  add_hurst_single(exponents, cli);
  add_hurst_pair(exponents, cli);

  auto* refine = app.add_subcommand(
      "refine", "discretization refinement study for the spectrum");
  add_common(refine, cli);
  add_hurst_single(refine, cli);
  add_spectral(refine, cli);
  refine->add_option("--nodes-ladder", cli.params.nodes_ladder,
                     "node counts to sweep")
      ->delimiter(',');

  auto* verify_bound = app.add_subcommand(
      "verify-bound", "check the singular-value decay lower bound");
  add_common(verify_bound, cli);
  add_hurst_single(verify_bound, cli);
  add_spectral(verify_bound, cli);

  auto* replay = app.add_subcommand(
      "replay", "re-run a manifest and compare output digests");
  replay->set_help_flag("--help", "print this help and exit");
  replay->add_option("manifest", cli.manifest, "manifest JSON path")
      ->required();
  replay->add_option("--out-dir", cli.out_dir,
                     "output directory (default: replay_out)");
  replay->add_option("--workers", cli.params.workers,
                     "override recorded worker count");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  CLI::App* active = app.get_subcommands().front();
  const std::string command = active->get_name();

  try {
    if (command == "replay") {
      const int workers =
          active->count("--workers") ? cli.params.workers : -1;
      const std::string out_dir =
          active->count("--out-dir") ? cli.out_dir : "replay_out";
      const bool ok =
          rblab::cli::replay_manifest(cli.manifest, out_dir, workers);
      std::printf("replay: %s\n", ok ? "all outputs match" : "digest mismatch");
      return ok ? 0 : 3;
    }

    if (!cli.config.empty()) {
      rblab::cli::apply_config(cli.params, cli.config, cli_set_keys(active));
    }
    // --h is a convenience for the pair kinds: it fills h1/h2 unless they
    // were given explicitly
    if (active->get_option_no_throw("--h") && active->count("--h") > 0) {
      auto* o1 = active->get_option_no_throw("--h1");
      auto* o2 = active->get_option_no_throw("--h2");
      if (o1 && o1->count() == 0) cli.params.h1 = cli.params.h;
      if (o2 && o2->count() == 0) cli.params.h2 = cli.params.h;
    }

    const auto start = std::chrono::steady_clock::now();
    const auto result =
        rblab::cli::run_command(command, cli.params, cli.out_dir);
    const double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
            .count();
    rblab::cli::write_manifest(command, cli.params, result.outputs, wall,
                               cli.out_dir);
    if (!result.summary.empty()) std::printf("%s\n", result.summary.c_str());
    for (const auto& o : result.outputs) {
      std::printf("wrote %s (%s)\n", o.path.c_str(), o.digest.c_str());
    }
    return 0;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  } catch (const rblab::numerical_error& e) {
    std::fprintf(stderr, "numerical error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
}
