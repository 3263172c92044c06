#include "wtgs/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <limits>
#include <string>
#include <vector>

#include "wtgs/data.hpp"
#include "wtgs/errors.hpp"
#include "wtgs/estimators.hpp"
#include "wtgs/model.hpp"
#include "wtgs/oracle.hpp"
#include "wtgs/samplers.hpp"
#include "wtgs/svg.hpp"
#include "wtgs/trace_io.hpp"

namespace wtgs {

namespace {

std::string num(double v) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string num6(double v) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

std::string iso_utc_now() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void ensure_outdir(const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw DataError("cannot create output directory '" + dir + "': " + ec.message());
}

struct ResolvedRun {
  RunConfig cfg;       // with h and S made concrete
  Dataset ds;
  bool synthetic = false;
  GroundTruth truth;   // meaningful only when synthetic
};

SynthConfig synth_config(const RunConfig& cfg) {
  SynthConfig sc;
  sc.N = cfg.N;
  sc.P = cfg.P;
  sc.k_true = cfg.k_true;
  sc.beta_scale = cfg.beta_scale;
  sc.noise_sd = cfg.noise_sd;
  sc.correlation = cfg.correlation;
  sc.seed = cfg.data_seed;
  return sc;
}

ResolvedRun resolve_run(const RunConfig& in) {
  ResolvedRun r;
  r.cfg = in;
  if (in.gram_budget_mb < 0) throw ConfigError("gram_budget_mb must be >= 0");
  const std::size_t budget = static_cast<std::size_t>(in.gram_budget_mb) << 20;

  if (in.data == "synth") {
    SynthResult sr = generate_gaussian(synth_config(in), budget);
    r.ds = std::move(sr.ds);
    r.truth = std::move(sr.truth);
    r.synthetic = true;
  } else {
    if (!std::filesystem::exists(in.data))
      throw ConfigError("data file does not exist: " + in.data);
    CsvOptions opts;
    opts.center = in.center;
    opts.scale = in.scale;
    r.ds = load_csv(in.data, in.response, opts, budget);
    r.cfg.N = r.ds.N();
    r.cfg.P = r.ds.P();
  }

  if (r.cfg.h < 0.0) r.cfg.h = Hyperparams::default_h(r.ds.P());
  if (r.cfg.S < 0) r.cfg.S = r.ds.P();
  if (r.cfg.T < 1) throw ConfigError("T must be >= 1");
  if (r.cfg.R < 1) throw ConfigError("R must be >= 1");
  if (r.cfg.burn < 0 || r.cfg.burn >= r.cfg.T)
    throw ConfigError("burn must lie in [0, T)");
  if (r.cfg.traj_covs < 0) throw ConfigError("traj_covs must be >= 0");
  return r;
}

Hyperparams hyperparams_of(const RunConfig& cfg) {
  Hyperparams hp;
  hp.h = cfg.h;
  hp.tau = cfg.tau;
  hp.nu0 = cfg.nu0;
  hp.lambda0 = cfg.lambda0;
  hp.eps = cfg.eps;
  hp.S = cfg.S;
  hp.T = cfg.T;
  hp.seed = cfg.seed;
  return hp;
}

SamplerKind kind_of(const std::string& name) {
  if (name == "wtgs") return SamplerKind::wtgs;
  if (name == "subset") return SamplerKind::subset;
  if (name == "vc") return SamplerKind::vc;
  throw ConfigError("sampler must be one of wtgs, subset, vc");
}

void write_pip_csv(const PipEstimate& est, const std::string& path) {
  std::ofstream f(path);
  if (!f) throw DataError("cannot open for writing: " + path);
  f << "covariate,estimate\n";
  for (long long j = 0; j < est.values.size(); ++j)
    f << j << "," << num(est.values[j]) << "\n";
}

// Cumulative weighted inclusion-probability estimates for selected covariates,
// one row per contributing iteration. The same window as the final estimator:
// active iterations past the burn-in.
struct Trajectory {
  std::vector<int> covariates;
  std::vector<long long> t;                // contributing iterations, ascending
  std::vector<std::vector<double>> est;    // est[k][row] for covariates[k]
};

Trajectory build_trajectory(const SamplerTrace& trace, long long burn,
                            const std::vector<int>& covariates) {
  Trajectory traj;
  traj.covariates = covariates;
  traj.est.resize(covariates.size());
  if (covariates.empty()) return traj;

  const long long window_start = (trace.kind == SamplerKind::subset) ? trace.t_burn : burn;
  double max_log = -std::numeric_limits<double>::infinity();
  for (long long t = window_start + 1; t <= trace.T; ++t)
    if (trace.q[t - 1]) max_log = std::max(max_log, trace.rho_tilde_log[t - 1]);
  if (!std::isfinite(max_log)) return traj;

  std::vector<double> numer(covariates.size(), 0.0);
  double denom = 0.0;
  std::vector<char> in_subset(trace.P, 0);
  for (long long t = window_start + 1; t <= trace.T; ++t) {
    if (!trace.q[t - 1]) continue;
    const double w = std::exp(trace.rho_tilde_log[t - 1] - max_log);
    const auto& pips = trace.cond_pips[t - 1];
    const std::uint8_t* g = trace.gamma_at(t);
    if (trace.kind == SamplerKind::subset) {
      const auto& sub = trace.subset[t - 1];
      for (auto s : sub) in_subset[s] = 1;
      for (std::size_t k = 0; k < covariates.size(); ++k) {
        const int j = covariates[k];
        double p = g[j] ? 1.0 : 0.0;
        if (in_subset[j]) {
          const auto it = std::lower_bound(sub.begin(), sub.end(), j);
          p = pips[static_cast<std::size_t>(it - sub.begin())];
        }
        numer[k] += w * p;
      }
      for (auto s : sub) in_subset[s] = 0;
    } else {
      for (std::size_t k = 0; k < covariates.size(); ++k)
        numer[k] += w * pips[covariates[k]];
    }
    denom += w;
    traj.t.push_back(t);
    for (std::size_t k = 0; k < covariates.size(); ++k)
      traj.est[k].push_back(numer[k] / denom);
  }
  return traj;
}

void write_trajectory_csv(const Trajectory& traj, const std::string& path) {
  std::ofstream f(path);
  if (!f) throw DataError("cannot open for writing: " + path);
  f << "t,covariate,estimate\n";
  for (std::size_t row = 0; row < traj.t.size(); ++row)
    for (std::size_t k = 0; k < traj.covariates.size(); ++k)
      f << traj.t[row] << "," << traj.covariates[k] << "," << num(traj.est[k][row]) << "\n";
}

void write_trajectory_svg(const Trajectory& traj, const std::string& path) {
  std::vector<SvgSeries> series(traj.covariates.size());
  for (std::size_t k = 0; k < traj.covariates.size(); ++k) {
    series[k].label = "x" + std::to_string(traj.covariates[k]);
    series[k].x.assign(traj.t.begin(), traj.t.end());
    series[k].y = traj.est[k];
  }
  write_line_svg(path, "inclusion-probability estimates", "iteration", "estimate", series);
}

void write_run_metadata(const ResolvedRun& r, const SamplerTrace& trace, double elapsed_s,
                        const std::string& path) {
  nlohmann::json j;
  j["command"] = "run";
  j["timestamp_utc"] = iso_utc_now();
  j["elapsed_seconds"] = elapsed_s;
  j["sampler"] = r.cfg.sampler;
  j["N"] = r.cfg.N;
  j["P"] = r.cfg.P;
  j["T"] = r.cfg.T;
  j["S"] = r.cfg.S;
  j["seed"] = r.cfg.seed;
  j["active_count"] = trace.active_count;
  j["cond_evals_total"] = trace.cond_evals_total;
  j["cond_evals_init"] = trace.cond_evals_init;
  j["numerical_warnings"] = numerical_warning_count();
  std::ofstream f(path);
  if (!f) throw DataError("cannot open for writing: " + path);
  f << j.dump(2) << "\n";
}

}  // namespace

int cmd_run(const RunConfig& in) {
  const auto t0 = std::chrono::steady_clock::now();
  ResolvedRun r = resolve_run(in);
  const Hyperparams hp = hyperparams_of(r.cfg);
  hp.validate(r.ds.P());
  ensure_outdir(r.cfg.out);

  const SamplerKind kind = kind_of(r.cfg.sampler);
  RngStream rng(r.cfg.seed, 0);
  SamplerTrace trace;
  switch (kind) {
    case SamplerKind::wtgs: trace = run_wtgs(r.ds, hp, rng); break;
    case SamplerKind::vc: trace = run_vc_wtgs(r.ds, hp, rng); break;
    case SamplerKind::subset:
      trace = run_subset_wtgs(r.ds, hp, static_cast<int>(r.cfg.anchor), r.cfg.burn, rng);
      break;
  }

  PipEstimate est = (kind == SamplerKind::subset)
                        ? rao_blackwell_pip_subset(trace)
                        : rao_blackwell_pip_vc(trace, r.cfg.burn);

  const auto out = [&](const std::string& name) { return r.cfg.out + "/" + name; };
  write_trace_csv(trace, out("trace.csv"));
  write_trace_journal(trace, out("trace.jrnl"));
  write_pip_csv(est, out("pip_estimate.csv"));

  const int n_traj = static_cast<int>(std::min<long long>(r.cfg.traj_covs, r.ds.P()));
  const Trajectory traj = build_trajectory(trace, r.cfg.burn, anchors_by_correlation(r.ds, n_traj));
  write_trajectory_csv(traj, out("trajectory.csv"));
  if (r.cfg.svg) write_trajectory_svg(traj, out("trajectory.svg"));

  write_resolved_config(r.cfg, out("resolved_config.txt"));
  if (r.synthetic) write_truth_json(r.truth, out("truth.json"));
  const double elapsed =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  write_run_metadata(r, trace, elapsed, out("metadata.json"));

  std::vector<int> order(r.ds.P());
  for (int j = 0; j < r.ds.P(); ++j) order[j] = j;
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    if (est.values[a] != est.values[b]) return est.values[a] > est.values[b];
    return a < b;
  });
  std::cout << "sampler=" << r.cfg.sampler << " P=" << r.cfg.P << " T=" << r.cfg.T
            << " S=" << r.cfg.S << " active=" << trace.active_count
            << " conditional_evals=" << trace.cond_evals_total << "\n";
  std::cout << "top covariates by estimated inclusion probability:\n";
  const int show = std::min<int>(10, static_cast<int>(order.size()));
  for (int k = 0; k < show; ++k)
    std::cout << "  x" << order[k] << "  " << num6(est.values[order[k]]) << "\n";
  std::cout << "outputs written to " << r.cfg.out << "/\n";
  if (numerical_warning_count() > 0)
    std::cerr << "warning: " << numerical_warning_count()
              << " conditional probabilities were floored during weight computation\n";
  return exit_ok;
}

int cmd_compare(const RunConfig& in) {
  ResolvedRun r = resolve_run(in);
  ensure_outdir(r.cfg.out);

  std::vector<long long> grid = r.cfg.s_grid;
  if (grid.empty()) {
    grid = {1, r.ds.P() / 4, r.ds.P() / 2, r.ds.P()};
    grid.erase(std::remove_if(grid.begin(), grid.end(), [](long long s) { return s < 1; }),
               grid.end());
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  }
  for (auto s : grid)
    if (s < 1 || s > r.ds.P()) throw ConfigError("s_grid values must lie in [1, P]");

  const Hyperparams hp = hyperparams_of(r.cfg);
  hp.validate(r.ds.P());

  HarnessConfig hc;
  hc.S_values = grid;
  hc.R = static_cast<int>(r.cfg.R);
  hc.seed0 = r.cfg.seed;
  hc.threads = static_cast<int>(r.cfg.threads);
  hc.burn = r.cfg.burn;
  hc.t_burn = r.cfg.burn;
  hc.anchor_size = static_cast<int>(r.cfg.anchor);

  hc.sampler = SamplerKind::subset;
  const std::vector<VarianceReport> rep_subset = variance_harness(r.ds, hp, hc);
  hc.sampler = SamplerKind::vc;
  const std::vector<VarianceReport> rep_vc = variance_harness(r.ds, hp, hc);

  const std::string csv_path = r.cfg.out + "/compare.csv";
  {
    std::ofstream f(csv_path);
    if (!f) throw DataError("cannot open for writing: " + csv_path);
    f << "sampler,S,covariate,mean,variance,R,T,seed0\n";
    const auto emit = [&](const char* name, const std::vector<VarianceReport>& reps) {
      for (const auto& rep : reps)
        for (int j = 0; j < rep.P; ++j)
          f << name << "," << rep.S << "," << j << "," << num(rep.mean[j]) << ","
            << num(rep.variance[j]) << "," << rep.R << "," << rep.T << "," << rep.seed0 << "\n";
    };
    emit("subset", rep_subset);
    emit("vc", rep_vc);
  }

  nlohmann::json j;
  j["R"] = r.cfg.R;
  j["T"] = r.cfg.T;
  j["seed0"] = r.cfg.seed;
  for (const auto* pair : {&rep_subset, &rep_vc}) {
    const char* name = (pair == &rep_subset) ? "subset" : "vc";
    for (const auto& rep : *pair) {
      nlohmann::json e;
      e["S"] = rep.S;
      e["mean"] = std::vector<double>(rep.mean.data(), rep.mean.data() + rep.mean.size());
      e["variance"] =
          std::vector<double>(rep.variance.data(), rep.variance.data() + rep.variance.size());
      j[name].push_back(e);
    }
  }
  {
    const std::string json_path = r.cfg.out + "/compare.json";
    std::ofstream f(json_path);
    if (!f) throw DataError("cannot open for writing: " + json_path);
    f << j.dump(2) << "\n";
  }

  const auto mean_variance = [](const VarianceReport& rep) {
    return rep.variance.size() ? rep.variance.mean() : 0.0;
  };
  if (r.cfg.svg) {
    std::vector<SvgSeries> series(2);
    series[0].label = "subset";
    series[1].label = "vc";
    for (const auto& rep : rep_subset) {
      series[0].x.push_back(static_cast<double>(rep.S));
      series[0].y.push_back(mean_variance(rep));
    }
    for (const auto& rep : rep_vc) {
      series[1].x.push_back(static_cast<double>(rep.S));
      series[1].y.push_back(mean_variance(rep));
    }
    write_line_svg(r.cfg.out + "/variance_vs_s.svg", "estimator variance by evaluation budget",
                   "S", "mean variance", series);
  }
  write_resolved_config(r.cfg, r.cfg.out + "/resolved_config.txt");
  {
    nlohmann::json meta;
    meta["command"] = "compare";
    meta["timestamp_utc"] = iso_utc_now();
    meta["s_grid"] = grid;
    const std::string meta_path = r.cfg.out + "/metadata.json";
    std::ofstream f(meta_path);
    if (!f) throw DataError("cannot open for writing: " + meta_path);
    f << meta.dump(2) << "\n";
  }

  std::cout << "S";
  for (const char* name : {"subset", "vc"}) std::cout << "," << name << "_mean_variance";
  std::cout << "\n";
  for (std::size_t k = 0; k < grid.size(); ++k)
    std::cout << grid[k] << "," << num6(mean_variance(rep_subset[k])) << ","
              << num6(mean_variance(rep_vc[k])) << "\n";
  std::cout << "outputs written to " << r.cfg.out << "/\n";
  return exit_ok;
}

int cmd_oracle_check(const RunConfig& in) {
  RunConfig small = in;
  if (small.data == "synth" && small.P > max_kernel_P && small.P == RunConfig{}.P) {
    small.P = 3;  // the synthetic default of 200 is far past the enumeration cap
    small.k_true = std::min(small.k_true, small.P);
  }
  ResolvedRun r = resolve_run(small);
  if (r.ds.P() > max_kernel_P)
    throw ConfigError("exact kernel checks need P <= " + std::to_string(max_kernel_P));

  const Hyperparams hp = hyperparams_of(r.cfg);
  hp.validate(r.ds.P());

  int failures = 0;
  const auto report = [&failures](bool pass, const std::string& name, const std::string& detail) {
    std::cout << (pass ? "[PASS] " : "[FAIL] ") << name << ": " << detail << "\n";
    if (!pass) ++failures;
  };

  const ExactPosterior ep = enumerate_posterior(r.ds, hp);
  {
    const double psum = ep.probs.sum();
    bool in_range = true;
    for (int j = 0; j < ep.P; ++j)
      in_range = in_range && ep.pips[j] >= 0.0 && ep.pips[j] <= 1.0;
    report(std::abs(psum - 1.0) < 1e-12 && in_range, "enumeration",
           "probabilities sum to " + num6(psum) + ", inclusion probabilities in [0,1]");
  }

  const KernelPair kp = build_kernel(r.ds, hp);
  {
    double worst = 0.0;
    for (long long row = 0; row < kp.K_star.rows(); ++row)
      worst = std::max(worst, std::abs(kp.K_star.row(row).sum() - 1.0));
    report(worst < 1e-12, "kernel-rows", "max |row sum - 1| = " + num6(worst));
  }
  {
    const Eigen::VectorXd lhs = kp.K_star.transpose() * kp.pi_gamma;
    const double worst = (lhs - kp.pi_gamma).cwiseAbs().maxCoeff();
    report(worst < 1e-10, "stationarity", "max |pi K - pi| = " + num6(worst));
  }
  {
    const double worst = check_detailed_balance(kp);
    report(worst < 1e-10, "detailed-balance", "max flow asymmetry = " + num6(worst));
  }
  {
    const GapBoundReport gb = verify_gap_bound(kp, r.cfg.S, r.ds.P());
    report(gb.pass, "gap-ordering",
           "gap = " + num6(gb.lhs) + ", interpolated bound = " + num6(gb.rhs1) +
               ", activity floor = " + num6(gb.rhs2));
  }
  {
    // Informational: the error bound depends on T and is often vacuous on tiny
    // instances (and always when the joint chain has zero gap at S = P).
    const VarianceBound vb = variance_bound_eval(r.ds, hp, 0, r.cfg.T);
    std::cout << "[info] variance-bound: covariate 0, T = " << r.cfg.T << ", bound = "
              << (vb.vacuous ? std::string("vacuous") : num6(vb.value))
              << " (epsilon0 = " << num6(vb.epsilon0) << ")\n";
  }

  std::cout << (failures == 0 ? "all checks passed\n"
                              : std::to_string(failures) + " check(s) failed\n");
  return failures == 0 ? exit_ok : exit_oracle_failure;
}

int cmd_gen_data(const RunConfig& in) {
  if (in.data != "synth")
    throw ConfigError("data generation only supports the synthetic protocol (data=synth)");
  if (in.gram_budget_mb < 0) throw ConfigError("gram_budget_mb must be >= 0");
  SynthResult sr =
      generate_gaussian(synth_config(in), static_cast<std::size_t>(in.gram_budget_mb) << 20);
  ensure_outdir(in.out);
  write_dataset_csv(sr.ds, in.out + "/data.csv", in.response);
  write_truth_json(sr.truth, in.out + "/truth.json");
  std::cout << "wrote " << in.out << "/data.csv (" << sr.ds.N() << " rows, " << sr.ds.P()
            << " covariates) and " << in.out << "/truth.json\n";
  return exit_ok;
}

int run_guarded(const std::function<int()>& body) {
  try {
    return body();
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return exit_config_error;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return exit_data_error;
  } catch (const NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return exit_numerical_error;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace wtgs
