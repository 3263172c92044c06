#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "wtgs/model.hpp"
#include "wtgs/rng.hpp"

namespace wtgs {

enum class SamplerKind { wtgs, subset, vc };

const char* sampler_kind_name(SamplerKind k);

// Per-iteration chain records plus run-level counters. Iteration t runs from 1
// to T; gamma0 is the initialization state. Inactive iterations (q = 0) copy
// the previous gamma, carry rho_tilde_log = 0 and record no flip, no
// conditionals. cond_pips / subset are in-memory only (not serialized).
struct SamplerTrace {
  int P = 0;
  long long T = 0;
  SamplerKind kind = SamplerKind::vc;
  long long t_burn = 0;

  GammaVec gamma0;
  std::vector<std::uint8_t> gamma;  // T x P, row-major, row t-1
  std::vector<double> rho_tilde_log;
  std::vector<std::uint8_t> q;
  std::vector<std::int32_t> flipped;  // -1 when inactive
  std::vector<std::vector<double>> cond_pips;
  std::vector<std::vector<std::int32_t>> subset;

  long long active_count = 0;
  long long cond_evals_total = 0;
  long long cond_evals_init = 0;

  const std::uint8_t* gamma_at(long long t) const {  // t in 1..T
    return gamma.data() + static_cast<std::size_t>(t - 1) * P;
  }
};

// Field-wise equality of everything a serialized trace carries (kind excluded).
bool traces_equal(const SamplerTrace& a, const SamplerTrace& b);

GammaVec flip(const GammaVec& gamma, int i);

// Inverse-CDF draw over exp(log_weights - max), fixed index order.
int sample_categorical(const Eigen::VectorXd& log_weights, RngStream& rng);

// Uniform draw of an S-subset of [0,P) constrained to contain {i} and the
// anchors: the remaining slots are filled by sampling without replacement from
// the complement (partial Fisher-Yates over the ordered complement list).
// Result is sorted ascending. Exposed for distribution-law tests.
std::vector<int> draw_subset(int i, const std::vector<int>& anchors, long long S,
                             long long P, RngStream& rng);

// anchor_size covariate indices with the largest |Pearson correlation(X_j, Y)|;
// a constant column scores 0; ties break toward the lower index. Sorted ascending.
std::vector<int> anchors_by_correlation(const Dataset& ds, int anchor_size);

// Variable-complexity chain: a Bernoulli(S/P) coin gates each iteration after
// the first. Active iterations draw the flip coordinate from the conditionals
// cached at the previous active step, flip, then compute all P conditionals at
// the new state (exactly P evaluations per active iteration).
// RNG draw order: P init Bernoulli(h) draws; then per iteration the gate draw
// (from t = 2 on; consumed even when S = P), then the categorical draw.
SamplerTrace run_vc_wtgs(const Dataset& ds, const Hyperparams& hp, RngStream rng);

// Classic chain: identical to run_vc_wtgs with S = P (every iteration active);
// the traces are bit-identical under a shared (seed, stream).
SamplerTrace run_wtgs(const Dataset& ds, const Hyperparams& hp, RngStream rng);

// Subset chain: starts from the all-zeros state with an anchor set chosen by
// |correlation with Y|. Each iteration draws the flip from the S conditionals
// cached on the previous subset, flips, draws the next subset around the
// flipped coordinate plus the anchors, and computes the S conditionals there.
// During the first t_burn iterations the anchor set adapts every 100 steps to
// the coordinates with the highest running-mean observed inclusion
// probabilities (unvisited coordinates score 0; ties break low).
// RNG draw order: one uniform for i0, the subset draws for the initial subset;
// then per iteration the categorical draw followed by the subset draws.
SamplerTrace run_subset_wtgs(const Dataset& ds, const Hyperparams& hp, int anchor_size,
                             long long t_burn, RngStream rng);

}  // namespace wtgs
