#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "wtgs/model.hpp"
#include "wtgs/samplers.hpp"

namespace wtgs {

struct PipEstimate {
  Eigen::VectorXd values;        // length P, each in [0,1]
  Eigen::VectorXd weights_used;  // length T; normalized, zero off the window
  long long t_effective = 0;     // iterations contributing
};

// Normalized importance weights over the trace: log-sum-exp over iterations
// that are active and past the trace's burn-in; those outside get exactly 0.
Eigen::VectorXd normalize_weights(const SamplerTrace& trace);

// Weighted average of the stored conditional inclusion probabilities over
// active iterations with t > burn (weights renormalized over that window).
PipEstimate rao_blackwell_pip_vc(const SamplerTrace& trace, long long burn = 0);

// Mixes stored conditionals (coordinates inside the iteration's subset) with
// raw inclusion indicators (outside), over t > t_burn.
PipEstimate rao_blackwell_pip_subset(const SamplerTrace& trace);

struct HarnessConfig {
  std::vector<long long> S_values;
  int R = 2;
  std::uint64_t seed0 = 0;
  std::vector<std::uint64_t> replicate_seeds;  // optional; must be R distinct values
  int threads = 0;                             // 0 = hardware concurrency
  SamplerKind sampler = SamplerKind::vc;
  long long burn = 0;     // estimator burn-in (vc / wtgs)
  int anchor_size = 0;    // subset sampler only
  long long t_burn = 0;   // subset sampler only
};

struct VarianceReport {
  long long S = 0;
  int P = 0;
  long long T = 0;
  int R = 0;
  std::uint64_t seed0 = 0;
  Eigen::VectorXd mean;      // per-covariate estimator mean across replicates
  Eigen::VectorXd variance;  // per-covariate unbiased sample variance
};

// R independent chains per S value (replicate r uses stream r unless explicit
// seeds are given); per-covariate mean and unbiased variance of the estimator.
// Replicates run on a worker pool but are reduced in index order, so the
// output is independent of the thread count.
std::vector<VarianceReport> variance_harness(const Dataset& ds, const Hyperparams& hp,
                                             const HarnessConfig& cfg);

// Schema: S,covariate,mean,variance,R,T,seed0 (one row per S x covariate).
void write_variance_csv(const std::vector<VarianceReport>& reports, const std::string& path);
void write_variance_json(const std::vector<VarianceReport>& reports, const std::string& path);

}  // namespace wtgs
