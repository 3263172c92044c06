#include "wtgs/estimators.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <thread>

#include <json.hpp>

#include "wtgs/errors.hpp"
#include "wtgs/rng.hpp"

namespace wtgs {

namespace {

// Log-sum-exp normalization over the iterations selected by `eligible`.
Eigen::VectorXd normalized_over(const SamplerTrace& tr,
                                const std::vector<char>& eligible) {
  Eigen::VectorXd w = Eigen::VectorXd::Zero(tr.T);
  double mx = -std::numeric_limits<double>::infinity();
  for (long long t = 1; t <= tr.T; ++t)
    if (eligible[t - 1]) mx = std::max(mx, tr.rho_tilde_log[t - 1]);
  if (mx == -std::numeric_limits<double>::infinity())
    throw ConfigError("weight normalization over an empty iteration window");
  double total = 0.0;
  for (long long t = 1; t <= tr.T; ++t)
    if (eligible[t - 1]) total += std::exp(tr.rho_tilde_log[t - 1] - mx);
  for (long long t = 1; t <= tr.T; ++t)
    if (eligible[t - 1]) w[t - 1] = std::exp(tr.rho_tilde_log[t - 1] - mx) / total;
  return w;
}

}  // namespace

Eigen::VectorXd normalize_weights(const SamplerTrace& trace) {
  std::vector<char> eligible(trace.T, 0);
  for (long long t = 1; t <= trace.T; ++t)
    eligible[t - 1] = trace.q[t - 1] == 1 && t > trace.t_burn;
  return normalized_over(trace, eligible);
}

PipEstimate rao_blackwell_pip_vc(const SamplerTrace& trace, long long burn) {
  if (burn < 0 || burn >= trace.T) throw ConfigError("burn must satisfy 0 <= burn < T");
  std::vector<char> eligible(trace.T, 0);
  long long t_eff = 0;
  for (long long t = 1; t <= trace.T; ++t) {
    if (trace.q[t - 1] != 1 || t <= burn) continue;
    if (trace.cond_pips[t - 1].size() != static_cast<std::size_t>(trace.P))
      throw ConfigError("trace lacks full conditional records on an active iteration");
    eligible[t - 1] = 1;
    ++t_eff;
  }
  if (t_eff == 0) throw ConfigError("no active iterations past the burn-in window");

  PipEstimate est;
  est.weights_used = normalized_over(trace, eligible);
  est.t_effective = t_eff;
  est.values = Eigen::VectorXd::Zero(trace.P);
  for (long long t = 1; t <= trace.T; ++t) {
    if (!eligible[t - 1]) continue;
    const double w = est.weights_used[t - 1];
    const auto& p = trace.cond_pips[t - 1];
    for (int i = 0; i < trace.P; ++i) est.values[i] += w * p[i];
  }
  return est;
}

PipEstimate rao_blackwell_pip_subset(const SamplerTrace& trace) {
  if (trace.subset.size() != static_cast<std::size_t>(trace.T))
    throw ConfigError("trace lacks per-iteration subset records");
  std::vector<char> eligible(trace.T, 0);
  long long t_eff = 0;
  for (long long t = 1; t <= trace.T; ++t) {
    if (trace.q[t - 1] != 1 || t <= trace.t_burn) continue;
    eligible[t - 1] = 1;
    ++t_eff;
  }
  if (t_eff == 0) throw ConfigError("no iterations past the burn-in window");

  PipEstimate est;
  est.weights_used = normalized_over(trace, eligible);
  est.t_effective = t_eff;
  est.values = Eigen::VectorXd::Zero(trace.P);
  std::vector<char> in_subset(trace.P);
  for (long long t = 1; t <= trace.T; ++t) {
    if (!eligible[t - 1]) continue;
    const double w = est.weights_used[t - 1];
    const auto& sub = trace.subset[t - 1];
    const auto& p = trace.cond_pips[t - 1];
    const auto* g = trace.gamma_at(t);
    std::fill(in_subset.begin(), in_subset.end(), 0);
    for (std::size_t r = 0; r < sub.size(); ++r) {
      in_subset[sub[r]] = 1;
      est.values[sub[r]] += w * p[r];
    }
    for (int i = 0; i < trace.P; ++i)
      if (!in_subset[i]) est.values[i] += w * g[i];
  }
  return est;
}

std::vector<VarianceReport> variance_harness(const Dataset& ds, const Hyperparams& hp,
                                             const HarnessConfig& cfg) {
  if (cfg.R < 2) throw ConfigError("variance harness needs R >= 2 replicates");
  if (cfg.S_values.empty()) throw ConfigError("variance harness needs at least one S value");
  if (!cfg.replicate_seeds.empty()) {
    if (cfg.replicate_seeds.size() != static_cast<std::size_t>(cfg.R))
      throw ConfigError("replicate_seeds must list exactly R seeds");
    std::set<std::uint64_t> uniq(cfg.replicate_seeds.begin(), cfg.replicate_seeds.end());
    if (uniq.size() != cfg.replicate_seeds.size())
      throw ConfigError("replicate seeds must be distinct");
  }
  const auto P = static_cast<int>(ds.P());

  std::vector<VarianceReport> reports;
  for (long long S : cfg.S_values) {
    Hyperparams hs = hp;
    hs.S = S;
    hs.validate(P);
    if (cfg.sampler == SamplerKind::subset && cfg.anchor_size >= S)
      throw ConfigError("anchor_size must stay below every S in the grid");

    std::vector<Eigen::VectorXd> values(cfg.R);
    std::vector<std::exception_ptr> errors(cfg.R);
    std::atomic<int> next{0};
    auto worker = [&]() {
      for (;;) {
        const int r = next.fetch_add(1);
        if (r >= cfg.R) return;
        try {
          RngStream rng = cfg.replicate_seeds.empty()
                              ? RngStream(cfg.seed0, static_cast<std::uint64_t>(r))
                              : RngStream(cfg.replicate_seeds[r], 0);
          switch (cfg.sampler) {
            case SamplerKind::vc:
              values[r] = rao_blackwell_pip_vc(run_vc_wtgs(ds, hs, rng), cfg.burn).values;
              break;
            case SamplerKind::wtgs:
              values[r] = rao_blackwell_pip_vc(run_wtgs(ds, hs, rng), cfg.burn).values;
              break;
            case SamplerKind::subset:
              values[r] = rao_blackwell_pip_subset(
                              run_subset_wtgs(ds, hs, cfg.anchor_size, cfg.t_burn, rng))
                              .values;
              break;
          }
        } catch (...) {
          errors[r] = std::current_exception();
          return;
        }
      }
    };
    int nthreads = cfg.threads > 0 ? cfg.threads
                                   : static_cast<int>(std::thread::hardware_concurrency());
    nthreads = std::max(1, std::min(nthreads, cfg.R));
    std::vector<std::thread> pool;
    for (int w = 0; w < nthreads; ++w) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
    for (int r = 0; r < cfg.R; ++r) {
      if (errors[r]) {
        try {
          std::rethrow_exception(errors[r]);
        } catch (const std::exception& e) {
          throw NumericalError("replicate " + std::to_string(r) + " failed: " + e.what());
        }
      }
    }

    // Deterministic reduction in replicate index order.
    VarianceReport rep;
    rep.S = S;
    rep.P = P;
    rep.T = hs.T;
    rep.R = cfg.R;
    rep.seed0 = cfg.seed0;
    rep.mean = Eigen::VectorXd::Zero(P);
    for (int r = 0; r < cfg.R; ++r) rep.mean += values[r];
    rep.mean /= static_cast<double>(cfg.R);
    rep.variance = Eigen::VectorXd::Zero(P);
    for (int r = 0; r < cfg.R; ++r) {
      Eigen::VectorXd d = values[r] - rep.mean;
      rep.variance += d.cwiseProduct(d);
    }
    rep.variance /= static_cast<double>(cfg.R - 1);
    reports.push_back(std::move(rep));
  }
  return reports;
}

void write_variance_csv(const std::vector<VarianceReport>& reports, const std::string& path) {
  std::ofstream f(path);
  if (!f) throw DataError("cannot open for writing: " + path);
  f << "S,covariate,mean,variance,R,T,seed0\n";
  char buf[512];
  for (const auto& rep : reports) {
    for (int i = 0; i < rep.P; ++i) {
      std::snprintf(buf, sizeof(buf), "%lld,%d,%.17g,%.17g,%d,%lld,%llu\n",
                    static_cast<long long>(rep.S), i, rep.mean[i], rep.variance[i], rep.R,
                    static_cast<long long>(rep.T),
                    static_cast<unsigned long long>(rep.seed0));
      f << buf;
    }
  }
}

void write_variance_json(const std::vector<VarianceReport>& reports, const std::string& path) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& rep : reports) {
    for (int i = 0; i < rep.P; ++i) {
      rows.push_back({{"S", rep.S},
                      {"covariate", i},
                      {"mean", rep.mean[i]},
                      {"variance", rep.variance[i]},
                      {"R", rep.R},
                      {"T", rep.T},
                      {"seed0", rep.seed0}});
    }
  }
  std::ofstream f(path);
  if (!f) throw DataError("cannot open for writing: " + path);
  f << rows.dump(2) << "\n";
}

}  // namespace wtgs
