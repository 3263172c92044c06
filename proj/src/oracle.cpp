#include "wtgs/oracle.hpp"

#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

#include "wtgs/errors.hpp"

namespace wtgs {

namespace {

GammaVec gamma_from_bits(std::uint64_t g, int P) {
  GammaVec out(P);
  for (int j = 0; j < P; ++j) out[j] = (g >> j) & 1u;
  return out;
}

// 1 minus the second-largest absolute eigenvalue (excluding the single unit
// eigenvalue) of the pi-symmetrized kernel. Reversibility makes
// sqrt(K(x,y) K(y,x)) the symmetrized entry, which avoids dividing by tiny
// stationary masses.
double spectral_gap(const Eigen::MatrixXd& K) {
  const auto n = K.rows();
  Eigen::MatrixXd M(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    M(i, i) = K(i, i);
    for (Eigen::Index j = i + 1; j < n; ++j) M(i, j) = M(j, i) = std::sqrt(K(i, j) * K(j, i));
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(M, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw NumericalError("eigensolver failed to converge");
  const auto& ev = es.eigenvalues();  // ascending
  if (n < 2) return 1.0;
  const double second = std::max(std::abs(ev[0]), std::abs(ev[n - 2]));
  return 1.0 - second;
}

struct EnumeratedChain {
  ExactPosterior ep;
  Eigen::VectorXd log_phi;     // per state
  Eigen::MatrixXd flip_probs;  // f(j | gamma): 2^P x P, rows sum to 1
  Eigen::VectorXd pi_gamma;    // normalized, proportional to posterior * phi
};

EnumeratedChain enumerate_chain(const Dataset& ds, const Hyperparams& hp) {
  EnumeratedChain ch;
  ch.ep = enumerate_posterior(ds, hp);
  const int P = ch.ep.P;
  const auto n = static_cast<Eigen::Index>(std::uint64_t(1) << P);

  ch.log_phi.resize(n);
  ch.flip_probs.resize(n, P);
  std::vector<int> all(P);
  std::iota(all.begin(), all.end(), 0);
  ConditionalSet cs;
  cs.p1.resize(P);
  cs.log_odds.resize(P);
  for (Eigen::Index g = 0; g < n; ++g) {
    for (int j = 0; j < P; ++j) {
      const auto g1 = static_cast<Eigen::Index>(g | (std::uint64_t(1) << j));
      const auto g0 = static_cast<Eigen::Index>(g & ~(std::uint64_t(1) << j));
      const double lo = ch.ep.log_post[g1] - ch.ep.log_post[g0];
      cs.log_odds[j] = lo;
      cs.p1[j] = 1.0 / (1.0 + std::exp(-lo));
    }
    const WeightTable wt =
        flip_weight_table(gamma_from_bits(g, P), all, cs, hp.eps, P);
    ch.log_phi[g] = wt.log_phi;
    for (int j = 0; j < P; ++j) ch.flip_probs(g, j) = std::exp(wt.logw[j] - wt.log_phi);
  }

  // Stationary law of the flip chain: posterior reweighted by phi.
  Eigen::VectorXd lp(n);
  for (Eigen::Index g = 0; g < n; ++g)
    lp[g] = ch.ep.log_post[g] + ch.log_phi[g];
  const double mx = lp.maxCoeff();
  ch.pi_gamma = (lp.array() - mx).exp();
  ch.pi_gamma /= ch.pi_gamma.sum();
  return ch;
}

}  // namespace

ExactPosterior enumerate_posterior(const Dataset& ds, const Hyperparams& hp) {
  const auto P = static_cast<int>(ds.P());
  if (P > max_enumeration_P)
    throw ConfigError("posterior enumeration is capped at P <= " +
                      std::to_string(max_enumeration_P));
  hp.validate(P);

  ExactPosterior ep;
  ep.P = P;
  const auto n = static_cast<Eigen::Index>(std::uint64_t(1) << P);
  ep.log_post.resize(n);
  const double log_h = std::log(hp.h);
  const double log_1mh = std::log1p(-hp.h);
  for (Eigen::Index g = 0; g < n; ++g) {
    const GammaVec gamma = gamma_from_bits(g, P);
    const auto k = static_cast<double>(gamma_count(gamma));
    ep.log_post[g] = log_marginal_likelihood(gamma, ds, hp) + k * log_h +
                     (static_cast<double>(P) - k) * log_1mh;
  }
  const double mx = ep.log_post.maxCoeff();
  ep.probs = (ep.log_post.array() - mx).exp();
  ep.probs /= ep.probs.sum();

  ep.pips = Eigen::VectorXd::Zero(P);
  for (Eigen::Index g = 0; g < n; ++g)
    for (int j = 0; j < P; ++j)
      if ((g >> j) & 1) ep.pips[j] += ep.probs[g];
  return ep;
}

KernelPair build_kernel(const Dataset& ds, const Hyperparams& hp) {
  const auto P = static_cast<int>(ds.P());
  if (P > max_kernel_P)
    throw ConfigError("explicit kernels are capped at P <= " + std::to_string(max_kernel_P));

  const EnumeratedChain ch = enumerate_chain(ds, hp);
  const auto n = static_cast<Eigen::Index>(std::uint64_t(1) << P);
  const double a = static_cast<double>(hp.S) / static_cast<double>(P);

  // Pure flip kernel (every iteration flips) and the gated mixture.
  Eigen::MatrixXd Kp = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index g = 0; g < n; ++g)
    for (int j = 0; j < P; ++j)
      Kp(g, static_cast<Eigen::Index>(g ^ (std::uint64_t(1) << j))) += ch.flip_probs(g, j);

  KernelPair kp;
  kp.K_star = a * Kp;
  kp.K_star.diagonal().array() += 1.0 - a;
  kp.pi_gamma = ch.pi_gamma;
  kp.gap_P = spectral_gap(Kp);

  if (hp.S == P) {
    // The inactive half of the joint chain carries zero mass; on its support
    // the joint kernel coincides with K_star.
    kp.gap_full = spectral_gap(kp.K_star);
  } else {
    // Explicit joint chain on (gamma, activity): K((g,Q) -> (g',Q')) =
    // K_star(g,g') q(Q') with q = (1-a, a).
    const double q[2] = {1.0 - a, a};
    Eigen::MatrixXd Kfull(2 * n, 2 * n);
    for (Eigen::Index g = 0; g < n; ++g)
      for (int Q = 0; Q < 2; ++Q)
        for (Eigen::Index g2 = 0; g2 < n; ++g2)
          for (int Q2 = 0; Q2 < 2; ++Q2)
            Kfull(2 * g + Q, 2 * g2 + Q2) = kp.K_star(g, g2) * q[Q2];
    kp.gap_full = spectral_gap(Kfull);
  }
  return kp;
}

double check_detailed_balance(const KernelPair& kp) {
  const auto n = kp.K_star.rows();
  double worst = 0.0;
  for (Eigen::Index x = 0; x < n; ++x)
    for (Eigen::Index y = 0; y < n; ++y)
      worst = std::max(worst, std::abs(kp.pi_gamma[x] * kp.K_star(x, y) -
                                       kp.pi_gamma[y] * kp.K_star(y, x)));
  return worst;
}

GapBoundReport verify_gap_bound(const KernelPair& kp, long long S, long long P) {
  GapBoundReport r;
  const double a = static_cast<double>(S) / static_cast<double>(P);
  r.lhs = kp.gap_full;
  r.rhs1 = 1.0 - a * (1.0 - kp.gap_P);
  r.rhs2 = 1.0 - a;
  r.pass = r.lhs >= r.rhs1 - 1e-9 && r.rhs1 >= r.rhs2 - 1e-9;
  return r;
}

VarianceBound variance_bound_eval(const Dataset& ds, const Hyperparams& hp, int i,
                                  long long T) {
  const auto P = static_cast<int>(ds.P());
  if (i < 0 || i >= P) throw ConfigError("covariate index out of range");
  if (T < 2) throw ConfigError("the bound needs T >= 2");

  const EnumeratedChain ch = enumerate_chain(ds, hp);
  const KernelPair kp = build_kernel(ds, hp);
  const double pip = ch.ep.pips[i];

  // phi_hat = phi^{-1} / max phi^{-1}, so its maximum over states is exactly 1.
  const double min_log_phi = ch.log_phi.minCoeff();
  double e_phi_hat = 0.0;
  for (Eigen::Index g = 0; g < ch.pi_gamma.size(); ++g)
    e_phi_hat += ch.pi_gamma[g] * std::exp(min_log_phi - ch.log_phi[g]);
  const double min_pi = ch.pi_gamma.minCoeff();

  VarianceBound vb;
  const double inf = std::numeric_limits<double>::infinity();
  if (!(kp.gap_full > 0.0) || !(pip > 0.0) || !(e_phi_hat > 0.0) || !(min_pi > 0.0)) {
    vb.value = inf;
    vb.epsilon0 = inf;
    vb.vacuous = true;
    return vb;
  }
  const double e = std::exp(1.0);
  vb.epsilon0 =
      static_cast<double>(P) / (pip * e_phi_hat * static_cast<double>(hp.S)) *
      std::sqrt(64.0 * e * std::log(static_cast<double>(T)) /
                (kp.gap_full * static_cast<double>(T)));
  if (vb.epsilon0 >= 1.0) {
    vb.value = inf;
    vb.vacuous = true;
    return vb;
  }
  const double r = vb.epsilon0 / (1.0 - vb.epsilon0);
  vb.value = 4.0 * r * r * pip * pip +
             (4.0 * static_cast<double>(P) / static_cast<double>(hp.S)) /
                 (min_pi * static_cast<double>(T));
  vb.vacuous = false;
  return vb;
}

}  // namespace wtgs
