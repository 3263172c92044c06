#include "wtgs/model.hpp"

#include <algorithm>
#include <atomic>
#include <cassert>
#include <cmath>
#include <limits>

namespace wtgs {

namespace {

std::atomic<long long> g_numerical_warnings{0};

constexpr double k_floor_log = -690.77552789821368;  // log(1e-300)
constexpr double k_two_pi = 6.283185307179586476925286766559;

inline double softplus(double x) {
  return x > 0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
}

inline double log_add_exp(double a, double b) {
  double hi = std::max(a, b), lo = std::min(a, b);
  if (hi == -std::numeric_limits<double>::infinity()) return hi;
  return hi + std::log1p(std::exp(lo - hi));
}

std::vector<int> included_indices(const GammaVec& gamma) {
  std::vector<int> idx;
  idx.reserve(gamma.size());
  for (int j = 0; j < static_cast<int>(gamma.size()); ++j)
    if (gamma[j]) idx.push_back(j);
  return idx;
}

// Column products against the included block: a_i = X_I^T x_i.
Eigen::VectorXd candidate_column(const Dataset& ds, const ModelState& st, int i) {
  const auto k = static_cast<Eigen::Index>(st.size());
  Eigen::VectorXd a(k);
  if (ds.A) {
    for (Eigen::Index r = 0; r < k; ++r) a[r] = (*ds.A)(st.included[r], i);
  } else {
    a.noalias() = st.Xg.transpose() * ds.X.col(i);
  }
  return a;
}

}  // namespace

long long numerical_warning_count() { return g_numerical_warnings.load(); }
void reset_numerical_warnings() { g_numerical_warnings.store(0); }

Dataset Dataset::from_xy(Eigen::MatrixXd X, Eigen::VectorXd Y, std::size_t gram_budget_bytes) {
  if (X.rows() < 1 || X.cols() < 1) throw DataError("dataset must have N >= 1 and P >= 1");
  if (Y.size() != X.rows()) throw DataError("response length does not match the design rows");
  if (!X.allFinite()) throw DataError("design matrix contains non-finite entries");
  if (!Y.allFinite()) throw DataError("response contains non-finite entries");

  Dataset ds;
  ds.X = std::move(X);
  ds.Y = std::move(Y);
  ds.yty = ds.Y.squaredNorm();
  ds.nu.noalias() = ds.X.transpose() * ds.Y;
  ds.col_sqnorm = ds.X.colwise().squaredNorm();
  const auto P = static_cast<std::size_t>(ds.X.cols());
  if (P * P * sizeof(double) <= gram_budget_bytes) {
    ds.A.emplace();
    ds.A->noalias() = ds.X.transpose() * ds.X;
#ifndef NDEBUG
    // The Gram matrix is computed here, so symmetry can only break by corruption.
    assert(ds.A->isApprox(ds.A->transpose(), 1e-10));
#endif
  }
  return ds;
}

double Hyperparams::default_h(long long P) {
  return std::min(0.5, 5.0 / static_cast<double>(P));
}

void Hyperparams::validate(long long P) const {
  if (!(h > 0.0 && h < 1.0)) throw ConfigError("h must lie strictly inside (0,1)");
  if (!(tau > 0.0)) throw ConfigError("tau must be positive");
  if (!(nu0 >= 0.0)) throw ConfigError("nu0 must be nonnegative");
  if (!(lambda0 >= 0.0)) throw ConfigError("lambda0 must be nonnegative");
  if (nu0 > 0.0 && !(lambda0 > 0.0))
    throw ConfigError("lambda0 must be positive when nu0 > 0");
  if (!(eps >= 0.0)) throw ConfigError("eps must be nonnegative");
  if (S < 1 || S > P) throw ConfigError("S must lie in [1, P]");
  if (T < 1) throw ConfigError("T must be positive");
}

ModelState rebuild_state(const GammaVec& gamma, const Dataset& ds, const Hyperparams& hp) {
  ModelState st;
  st.gamma = gamma;
  st.included = included_indices(gamma);
  const auto k = static_cast<Eigen::Index>(st.included.size());

  if (!ds.A) {
    st.Xg.resize(ds.X.rows(), k);
    for (Eigen::Index c = 0; c < k; ++c) st.Xg.col(c) = ds.X.col(st.included[c]);
  }

  if (k == 0) {
    st.L.resize(0, 0);
    st.v.resize(0);
    st.w.resize(0);
    st.s_gamma = ds.yty + hp.nu0 * hp.lambda0;
    if (!(st.s_gamma > 0.0))
      throw NumericalError("non-positive residual quadratic form", 0, st.s_gamma);
    return st;
  }

  Eigen::MatrixXd M(k, k);
  if (ds.A) {
    for (Eigen::Index r = 0; r < k; ++r)
      for (Eigen::Index c = 0; c < k; ++c) M(r, c) = (*ds.A)(st.included[r], st.included[c]);
  } else {
    M.noalias() = st.Xg.transpose() * st.Xg;
  }
  M.diagonal().array() += hp.tau;

  Eigen::LLT<Eigen::MatrixXd> llt(M);
  if (llt.info() != Eigen::Success)
    throw NumericalError("cholesky factorization failed", st.included.size(),
                         M.diagonal().minCoeff());
  st.L = llt.matrixL();

  Eigen::VectorXd nuI(k);
  for (Eigen::Index r = 0; r < k; ++r) nuI[r] = ds.nu[st.included[r]];
  st.v = st.L.triangularView<Eigen::Lower>().solve(nuI);
  st.w = st.L.transpose().triangularView<Eigen::Upper>().solve(st.v);
  st.s_gamma = ds.yty - st.v.squaredNorm() + hp.nu0 * hp.lambda0;
  if (!(st.s_gamma > 0.0))
    throw NumericalError("non-positive residual quadratic form", st.included.size(), st.s_gamma);
  return st;
}

double log_marginal_likelihood(const GammaVec& gamma, const Dataset& ds, const Hyperparams& hp) {
  const ModelState st = rebuild_state(gamma, ds, hp);
  const auto k = static_cast<double>(st.size());
  const auto N = static_cast<double>(ds.N());

  double logdet = 0.0;
  for (Eigen::Index r = 0; r < st.L.rows(); ++r) logdet += 2.0 * std::log(st.L(r, r));

  double out = -0.5 * logdet + 0.5 * k * std::log(hp.tau) -
               0.5 * N * std::log(k_two_pi) + std::lgamma(0.5 * (N + hp.nu0)) -
               0.5 * (N + hp.nu0) * std::log(0.5 * st.s_gamma);
  if (!hp.improper_prior())
    out += 0.5 * hp.nu0 * std::log(0.5 * hp.nu0 * hp.lambda0) - std::lgamma(0.5 * hp.nu0);
  return out;
}

double conditional_log_odds(int i, const ModelState& st, const Dataset& ds,
                            const Hyperparams& hp, CovariateScratch* scratch) {
  const auto N = static_cast<double>(ds.N());
  const auto k = static_cast<Eigen::Index>(st.size());
  double d, m, s_with, s_without;

  if (!st.gamma[i]) {
    // Addition: Schur complement of the bordered system gives both the
    // determinant ratio and the rank-one update of the quadratic form.
    Eigen::VectorXd a = candidate_column(ds, st, i);
    Eigen::VectorXd u = k > 0 ? st.L.triangularView<Eigen::Lower>().solve(a).eval()
                              : Eigen::VectorXd(0);
    const double denom = ds.col_sqnorm[i] + hp.tau - u.squaredNorm();
    if (!(denom > 0.0))
      throw NumericalError("non-positive bordering pivot", st.included.size() + 1, denom);
    d = 1.0 / denom;
    m = (k > 0 ? st.v.dot(u) : 0.0) - ds.nu[i];
    s_without = st.s_gamma;
    s_with = s_without - d * m * m;
    if (!(s_with > 0.0))
      throw NumericalError("non-positive residual quadratic form after inclusion",
                           st.included.size() + 1, s_with);
  } else {
    // Removal: the same pivot read off the inverse diagonal of the factor.
    const auto pos = static_cast<Eigen::Index>(
        std::lower_bound(st.included.begin(), st.included.end(), i) - st.included.begin());
    Eigen::VectorXd e = Eigen::VectorXd::Zero(k);
    e[pos] = 1.0;
    Eigen::VectorXd u = st.L.triangularView<Eigen::Lower>().solve(e);
    d = u.squaredNorm();
    s_with = st.s_gamma;
    s_without = s_with + st.w[pos] * st.w[pos] / d;
    m = -st.w[pos] / d;
  }

  if (scratch) *scratch = CovariateScratch{d, m, s_with, s_without};
  return std::log(hp.h) - std::log1p(-hp.h) + 0.5 * std::log(hp.tau) + 0.5 * std::log(d) +
         0.5 * (N + hp.nu0) * (std::log(s_without) - std::log(s_with));
}

double conditional_odds(int i, const ModelState& st, const Dataset& ds, const Hyperparams& hp) {
  return std::exp(conditional_log_odds(i, st, ds, hp));
}

double conditional_pip(int i, const ModelState& st, const Dataset& ds, const Hyperparams& hp) {
  return 1.0 / (1.0 + std::exp(-conditional_log_odds(i, st, ds, hp)));
}

ConditionalSet conditionals_on(const std::vector<int>& support, const ModelState& st,
                               const Dataset& ds, const Hyperparams& hp) {
  ConditionalSet cs;
  const auto n = static_cast<Eigen::Index>(support.size());
  cs.p1.resize(n);
  cs.log_odds.resize(n);
  for (Eigen::Index r = 0; r < n; ++r) {
    const double lo = conditional_log_odds(support[r], st, ds, hp);
    cs.log_odds[r] = lo;
    cs.p1[r] = 1.0 / (1.0 + std::exp(-lo));
  }
  return cs;
}

ConditionalSet conditionals_full(const ModelState& st, const Dataset& ds, const Hyperparams& hp) {
  std::vector<int> all(ds.P());
  for (int j = 0; j < static_cast<int>(all.size()); ++j) all[j] = j;
  return conditionals_on(all, st, ds, hp);
}

Eigen::VectorXd all_conditional_pips(const ModelState& st, const Dataset& ds,
                                     const Hyperparams& hp) {
  return conditionals_full(st, ds, hp).p1;
}

WeightTable flip_weight_table(const GammaVec& gamma, const std::vector<int>& support,
                              const ConditionalSet& cs, double eps, long long P) {
  WeightTable wt;
  const auto n = static_cast<Eigen::Index>(support.size());
  wt.logw.resize(n);
  const double log_eps_term =
      eps > 0.0 ? std::log(eps / static_cast<double>(P)) : -std::numeric_limits<double>::infinity();
  for (Eigen::Index r = 0; r < n; ++r) {
    const double lo = cs.log_odds[r];
    const double lp1 = -softplus(-lo);
    const double lp_cur = gamma[support[r]] ? lp1 : -softplus(lo);
    const double log_eta = eps > 0.0 ? log_add_exp(lp1, log_eps_term) : lp1;
    double lp_floored = lp_cur;
    if (lp_floored < k_floor_log) {
      lp_floored = k_floor_log;
      g_numerical_warnings.fetch_add(1, std::memory_order_relaxed);
    }
    wt.logw[r] = std::log(0.5) + log_eta - lp_floored;
  }
  double mx = wt.logw.maxCoeff();
  if (mx == -std::numeric_limits<double>::infinity()) {
    wt.log_phi = mx;
    return wt;
  }
  double acc = 0.0;
  for (Eigen::Index r = 0; r < n; ++r) acc += std::exp(wt.logw[r] - mx);
  wt.log_phi = mx + std::log(acc);
  return wt;
}

double phi(const ModelState& st, const Dataset& ds, const Hyperparams& hp) {
  const ConditionalSet cs = conditionals_full(st, ds, hp);
  std::vector<int> all(ds.P());
  for (int j = 0; j < static_cast<int>(all.size()); ++j) all[j] = j;
  return std::exp(flip_weight_table(st.gamma, all, cs, hp.eps, ds.P()).log_phi);
}

}  // namespace wtgs
