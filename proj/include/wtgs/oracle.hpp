#pragma once

#include <Eigen/Dense>
#include "wtgs/model.hpp"

namespace wtgs {

inline constexpr long long max_enumeration_P = 20;
inline constexpr long long max_kernel_P = 12;

// Exhaustive posterior over all 2^P inclusion vectors. A state gamma is
// encoded as a P-bit integer with bit j equal to gamma_j.
struct ExactPosterior {
  int P = 0;
  Eigen::VectorXd log_post;  // unnormalized log posterior per state
  Eigen::VectorXd probs;     // normalized probabilities
  Eigen::VectorXd pips;      // exact per-covariate inclusion probabilities
};

ExactPosterior enumerate_posterior(const Dataset& ds, const Hyperparams& hp);

// Explicit transition kernels of the chain on small instances.
//   K_star: the gamma-marginal kernel, (S/P) * flip kernel + (1 - S/P) * I.
//   pi_gamma: its stationary distribution, proportional to posterior * phi.
//   gap_full: spectral gap of the joint (gamma, activity) chain, computed on
//             the explicit 2^(P+1)-state kernel (restricted to the states of
//             positive mass when S = P, where the inactive half is unreachable).
//   gap_P: spectral gap of the pure flip chain (the S = P kernel).
// Gaps are 1 minus the second-largest absolute eigenvalue of the
// pi-symmetrized kernel, excluding the single unit eigenvalue.
struct KernelPair {
  Eigen::MatrixXd K_star;
  Eigen::VectorXd pi_gamma;
  double gap_full = 0.0;
  double gap_P = 0.0;
};

KernelPair build_kernel(const Dataset& ds, const Hyperparams& hp);

// Max over ordered pairs of |pi(x) K(x,y) - pi(y) K(y,x)| for the gamma kernel.
double check_detailed_balance(const KernelPair& kp);

// Spectral-gap ordering check: lhs = gap_full, rhs1 = 1 - (S/P)(1 - gap_P),
// rhs2 = 1 - S/P; pass iff lhs >= rhs1 - 1e-9 and rhs1 >= rhs2 - 1e-9.
struct GapBoundReport {
  double lhs = 0.0;
  double rhs1 = 0.0;
  double rhs2 = 0.0;
  bool pass = false;
};

GapBoundReport verify_gap_bound(const KernelPair& kp, long long S, long long P);

// Finite-T error bound for the estimator of covariate i, evaluated exactly on
// an enumerable instance. epsilon0 >= 1 (or a zero gap) makes the bound
// vacuous: value = +inf and the flag is set.
struct VarianceBound {
  double value = 0.0;
  double epsilon0 = 0.0;
  bool vacuous = false;
};

VarianceBound variance_bound_eval(const Dataset& ds, const Hyperparams& hp, int i, long long T);

}  // namespace wtgs
