#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <vector>

#include "wtgs/errors.hpp"

namespace wtgs {

inline constexpr std::size_t default_gram_budget_bytes = std::size_t(2) << 30;  // 2 GiB

// Immutable observation container. The Gram matrix A = X^T X is kept only when
// its P*P*8 bytes fit the budget; the correlation vector nu = X^T Y and the
// squared column norms are cheap and always precomputed. Without A, per-state
// operations fall back to on-the-fly column products.
struct Dataset {
  Eigen::MatrixXd X;                 // N x P design
  Eigen::VectorXd Y;                 // N response
  std::optional<Eigen::MatrixXd> A;  // P x P Gram matrix, optional
  Eigen::VectorXd nu;                // X^T Y
  Eigen::VectorXd col_sqnorm;        // squared column norms (Gram diagonal)
  double yty = 0.0;

  long long N() const { return X.rows(); }
  long long P() const { return X.cols(); }

  static Dataset from_xy(Eigen::MatrixXd X, Eigen::VectorXd Y,
                         std::size_t gram_budget_bytes = default_gram_budget_bytes);
};

struct Hyperparams {
  double h = 0.5;        // prior inclusion probability
  double tau = 1.0;      // prior precision scale
  double nu0 = 1.0;      // inverse-gamma shape parameter (times 1/2)
  double lambda0 = 1.0;  // inverse-gamma scale parameter (paired with nu0)
  double eps = 0.0;      // exploration bonus added to the inclusion weight
  long long S = 1;       // expected number of conditional evaluations per step
  long long T = 1;       // chain length
  std::uint64_t seed = 0;

  // nu0 == 0 switches to an improper prior on the noise variance; the constant
  // that would involve Gamma(nu0/2) is dropped (it cancels in every ratio).
  bool improper_prior() const { return nu0 == 0.0; }
  void validate(long long P) const;  // throws ConfigError
  static double default_h(long long P);
};

using GammaVec = std::vector<std::uint8_t>;

inline std::size_t gamma_count(const GammaVec& g) {
  std::size_t k = 0;
  for (auto b : g) k += (b != 0);
  return k;
}

// Cached per-state quantities: the Cholesky factor L of M = X_g^T X_g + tau*I
// over the included columns, the half-solved correlation v = L^{-1} nu_I, the
// full solve w = M^{-1} nu_I, and the residual quadratic form s_gamma.
struct ModelState {
  GammaVec gamma;
  std::vector<int> included;  // sorted indices with gamma[j] = 1
  Eigen::MatrixXd L;          // lower Cholesky factor, |I| x |I|
  Eigen::VectorXd v;          // L^{-1} nu_I
  Eigen::VectorXd w;          // M^{-1} nu_I
  Eigen::MatrixXd Xg;         // N x |I| column copy; kept only when A is absent
  double s_gamma = 0.0;       // Y^T Y - nu_I^T M^{-1} nu_I + nu0*lambda0

  std::size_t size() const { return included.size(); }
};

// Per-candidate quantities behind a single inclusion flip, exposed so the
// determinant-ratio and rank-one identities can be checked directly.
struct CovariateScratch {
  double d = 0.0;          // det(M_excluded) / det(M_included), via the Schur complement
  double m = 0.0;          // projected correlation residual
  double s_with = 0.0;     // quadratic form with the coordinate included
  double s_without = 0.0;  // quadratic form with it excluded
};

// Inclusion probabilities and log odds for a set of candidate coordinates.
struct ConditionalSet {
  Eigen::VectorXd p1;        // p(gamma_j = 1 | rest)
  Eigen::VectorXd log_odds;  // log p1 - log(1 - p1)
};

// Log flip weights (one per candidate) and their log-sum. The sum is log of
// the tempering normalizer phi; the sampler's importance weight is exp(-log_phi).
struct WeightTable {
  Eigen::VectorXd logw;
  double log_phi = 0.0;
};

ModelState rebuild_state(const GammaVec& gamma, const Dataset& ds, const Hyperparams& hp);

double log_marginal_likelihood(const GammaVec& gamma, const Dataset& ds, const Hyperparams& hp);

// log of p(gamma_i = 1 | rest, data) / p(gamma_i = 0 | rest, data).
double conditional_log_odds(int i, const ModelState& st, const Dataset& ds,
                            const Hyperparams& hp, CovariateScratch* scratch = nullptr);
double conditional_odds(int i, const ModelState& st, const Dataset& ds, const Hyperparams& hp);
double conditional_pip(int i, const ModelState& st, const Dataset& ds, const Hyperparams& hp);

// All P conditional inclusion probabilities, sharing one Cholesky factor.
Eigen::VectorXd all_conditional_pips(const ModelState& st, const Dataset& ds,
                                     const Hyperparams& hp);
ConditionalSet conditionals_full(const ModelState& st, const Dataset& ds, const Hyperparams& hp);
ConditionalSet conditionals_on(const std::vector<int>& support, const ModelState& st,
                               const Dataset& ds, const Hyperparams& hp);

// Tempering normalizer phi = sum_j eta_j / (2 * p(gamma_j | rest)) over all
// coordinates, where eta_j = p(gamma_j = 1 | rest) + eps/P.
double phi(const ModelState& st, const Dataset& ds, const Hyperparams& hp);

// Same quantity restricted to an explicit support, from precomputed
// conditionals aligned with it. Conditional probabilities are floored at
// 1e-300 before division; floor hits bump the numerical warning counter.
WeightTable flip_weight_table(const GammaVec& gamma, const std::vector<int>& support,
                              const ConditionalSet& cs, double eps, long long P);

long long numerical_warning_count();
void reset_numerical_warnings();

}  // namespace wtgs
