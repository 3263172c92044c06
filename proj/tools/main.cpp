#include <CLI11.hpp>
#include <string>

#include "wtgs/cli.hpp"
#include "wtgs/config.hpp"
#include "wtgs/errors.hpp"

namespace {

// Registers the full option set on a subcommand, bound directly to cfg fields.
// Values loaded from --config are already in cfg, so only flags the user
// actually passes override them.
void add_options(CLI::App* sub, wtgs::RunConfig& cfg, std::string& config_path) {
  sub->set_help_flag("--help", "print this help and exit");  // frees -h / --h
  sub->add_option("--config", config_path,
                  "key=value configuration file (flags override its values)");

  sub->add_option("--data", cfg.data, "'synth' or a CSV file path");
  sub->add_option("--response", cfg.response, "response column name for CSV data");
  sub->add_flag("--center", cfg.center, "subtract covariate column means (CSV data)");
  sub->add_flag("--scale", cfg.scale, "divide covariate columns by their sd (CSV data)");
  sub->add_option("--N", cfg.N, "synthetic sample size");
  sub->add_option("--P", cfg.P, "synthetic covariate count");
  sub->add_option("--k-true", cfg.k_true, "number of nonzero coefficients");
  sub->add_option("--beta-scale", cfg.beta_scale, "magnitude of the nonzero coefficients");
  sub->add_option("--noise-sd", cfg.noise_sd, "observation noise standard deviation");
  sub->add_option("--correlation", cfg.correlation, "equicorrelation of covariate columns");
  sub->add_option("--data-seed", cfg.data_seed, "seed for data generation");

  sub->add_option("--h", cfg.h, "prior inclusion probability (default: min(0.5, 5/P))");
  sub->add_option("--tau", cfg.tau, "prior precision scale");
  sub->add_option("--nu0", cfg.nu0, "noise-variance prior shape (0 = improper prior)");
  sub->add_option("--lambda0", cfg.lambda0, "noise-variance prior scale");
  sub->add_option("--eps", cfg.eps, "exploration bonus on the flip weights");
  sub->add_option("--S", cfg.S, "expected conditional evaluations per iteration (default: P)");
  sub->add_option("--T", cfg.T, "chain length");
  sub->add_option("--R", cfg.R, "replicates for variance comparison");
  sub->add_option("--burn", cfg.burn, "burn-in iterations");
  sub->add_option("--anchor", cfg.anchor, "anchor set size for the subset sampler");
  sub->add_option("--seed", cfg.seed, "sampler seed");
  sub->add_option("--sampler", cfg.sampler, "sampler kind")
      ->check(CLI::IsMember({"wtgs", "subset", "vc"}));
  sub->add_option("--s-grid", cfg.s_grid, "comma-separated S values for compare")
      ->delimiter(',');

  sub->add_option("--threads", cfg.threads, "worker threads (0 = hardware concurrency)");
  sub->add_flag("--svg,!--no-svg", cfg.svg, "write SVG plots");
  sub->add_option("--out", cfg.out, "output directory");
  sub->add_option("--traj-covs", cfg.traj_covs, "covariates tracked in the trajectory plot");
  sub->add_option("--gram-budget-mb", cfg.gram_budget_mb,
                  "memory budget for caching the Gram matrix");
}

}  // namespace

int main(int argc, char** argv) {
  wtgs::RunConfig cfg;

  // Pre-pass: apply a --config file before CLI11 binds flag values on top.
  for (int a = 1; a < argc; ++a) {
    const std::string tok = argv[a];
    std::string path;
    if (tok == "--config" && a + 1 < argc) path = argv[a + 1];
    else if (tok.rfind("--config=", 0) == 0) path = tok.substr(9);
    if (path.empty()) continue;
    const int rc = wtgs::run_guarded([&] {
      cfg = wtgs::parse_config_file(path);
      return 0;
    });
    if (rc != 0) return rc;
  }

  CLI::App app{"weighted tempered Gibbs sampling for Bayesian variable selection"};
  app.set_help_flag("--help", "print this help and exit");
  app.require_subcommand(1);
  std::string config_path;

  CLI::App* sub_run = app.add_subcommand("run", "run one sampler and write its outputs");
  CLI::App* sub_compare =
      app.add_subcommand("compare", "estimator variance across an S grid, subset vs vc");
  CLI::App* sub_oracle = app.add_subcommand(
      "oracle-check", "exact posterior / kernel / spectral checks on a small instance");
  CLI::App* sub_gen = app.add_subcommand("gen-data", "write a synthetic dataset and its truth");
  for (CLI::App* sub : {sub_run, sub_compare, sub_oracle, sub_gen})
    add_options(sub, cfg, config_path);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : wtgs::exit_config_error;
  }

  if (sub_run->parsed()) return wtgs::run_guarded([&] { return wtgs::cmd_run(cfg); });
  if (sub_compare->parsed()) return wtgs::run_guarded([&] { return wtgs::cmd_compare(cfg); });
  if (sub_oracle->parsed()) return wtgs::run_guarded([&] { return wtgs::cmd_oracle_check(cfg); });
  if (sub_gen->parsed()) return wtgs::run_guarded([&] { return wtgs::cmd_gen_data(cfg); });
  return wtgs::exit_config_error;
}
