#include "wtgs/samplers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "wtgs/errors.hpp"

namespace wtgs {

namespace {

// Shared body of the classic and variable-complexity chains. The classic chain
// is the S = P special case; the gate draw is consumed for every t >= 2 in
// both so that the two share one RNG draw sequence.
SamplerTrace run_vc_impl(const Dataset& ds, const Hyperparams& hp, RngStream& rng,
                         SamplerKind kind) {
  const auto P = static_cast<int>(ds.P());
  hp.validate(P);
  const double activity = static_cast<double>(hp.S) / static_cast<double>(P);

  SamplerTrace tr;
  tr.P = P;
  tr.T = hp.T;
  tr.kind = kind;
  tr.t_burn = 0;
  tr.gamma.resize(static_cast<std::size_t>(hp.T) * P);
  tr.rho_tilde_log.resize(hp.T);
  tr.q.resize(hp.T);
  tr.flipped.resize(hp.T);
  tr.cond_pips.resize(hp.T);

  GammaVec gamma(P);
  for (int j = 0; j < P; ++j) gamma[j] = rng.bernoulli(hp.h) ? 1 : 0;
  tr.gamma0 = gamma;

  ModelState st = rebuild_state(gamma, ds, hp);
  ConditionalSet cs = conditionals_full(st, ds, hp);
  tr.cond_evals_init = P;
  tr.cond_evals_total = P;

  std::vector<int> all(P);
  std::iota(all.begin(), all.end(), 0);
  WeightTable wt = flip_weight_table(gamma, all, cs, hp.eps, P);

  for (long long t = 1; t <= hp.T; ++t) {
    const bool active = (t == 1) ? true : rng.bernoulli(activity);
    auto* row = tr.gamma.data() + static_cast<std::size_t>(t - 1) * P;
    if (active) {
      int i;
      try {
        i = sample_categorical(wt.logw, rng);
        gamma[i] ^= 1;
        st = rebuild_state(gamma, ds, hp);
        cs = conditionals_full(st, ds, hp);
      } catch (NumericalError& e) {
        e.iteration = t;
        throw;
      }
      tr.cond_evals_total += P;
      wt = flip_weight_table(gamma, all, cs, hp.eps, P);
      tr.q[t - 1] = 1;
      tr.flipped[t - 1] = i;
      tr.rho_tilde_log[t - 1] = -wt.log_phi;
      tr.cond_pips[t - 1].assign(cs.p1.data(), cs.p1.data() + P);
      ++tr.active_count;
    } else {
      tr.q[t - 1] = 0;
      tr.flipped[t - 1] = -1;
      tr.rho_tilde_log[t - 1] = 0.0;
    }
    std::copy(gamma.begin(), gamma.end(), row);
  }
  return tr;
}

}  // namespace

const char* sampler_kind_name(SamplerKind k) {
  switch (k) {
    case SamplerKind::wtgs: return "wtgs";
    case SamplerKind::subset: return "subset";
    case SamplerKind::vc: return "vc";
  }
  return "?";
}

bool traces_equal(const SamplerTrace& a, const SamplerTrace& b) {
  return a.P == b.P && a.T == b.T && a.t_burn == b.t_burn && a.gamma0 == b.gamma0 &&
         a.gamma == b.gamma && a.rho_tilde_log == b.rho_tilde_log && a.q == b.q &&
         a.flipped == b.flipped && a.cond_pips == b.cond_pips && a.subset == b.subset &&
         a.active_count == b.active_count && a.cond_evals_total == b.cond_evals_total &&
         a.cond_evals_init == b.cond_evals_init;
}

GammaVec flip(const GammaVec& gamma, int i) {
  GammaVec out = gamma;
  out[i] ^= 1;
  return out;
}

int sample_categorical(const Eigen::VectorXd& log_weights, RngStream& rng) {
  const auto n = log_weights.size();
  if (n == 0) throw NumericalError("categorical draw over an empty weight vector");
  const double mx = log_weights.maxCoeff();
  if (mx == -std::numeric_limits<double>::infinity())
    throw NumericalError("categorical draw with no finite weight");
  double total = 0.0;
  for (Eigen::Index j = 0; j < n; ++j) total += std::exp(log_weights[j] - mx);
  const double target = rng.uniform() * total;
  double cum = 0.0;
  int last_positive = 0;
  for (Eigen::Index j = 0; j < n; ++j) {
    const double w = std::exp(log_weights[j] - mx);
    if (w > 0.0) last_positive = static_cast<int>(j);
    cum += w;
    if (target < cum) return static_cast<int>(j);
  }
  return last_positive;  // guards the target == total rounding edge
}

std::vector<int> draw_subset(int i, const std::vector<int>& anchors, long long S,
                             long long P, RngStream& rng) {
  std::vector<int> base = anchors;
  if (std::find(base.begin(), base.end(), i) == base.end()) base.push_back(i);
  std::sort(base.begin(), base.end());

  const auto free_slots = static_cast<std::size_t>(S) - base.size();
  std::vector<int> comp;
  comp.reserve(P - base.size());
  for (int j = 0; j < P; ++j)
    if (!std::binary_search(base.begin(), base.end(), j)) comp.push_back(j);

  // Partial Fisher-Yates over the ordered complement: one uniform draw per slot.
  for (std::size_t t = 0; t < free_slots; ++t) {
    const auto j = t + rng.uniform_int(comp.size() - t);
    std::swap(comp[t], comp[j]);
  }
  std::vector<int> out = base;
  out.insert(out.end(), comp.begin(), comp.begin() + free_slots);
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<int> anchors_by_correlation(const Dataset& ds, int anchor_size) {
  const auto N = static_cast<double>(ds.N());
  const auto P = static_cast<int>(ds.P());
  const double ymean = ds.Y.mean();
  const double syy = ds.Y.squaredNorm() - N * ymean * ymean;
  std::vector<double> score(P, 0.0);
  for (int j = 0; j < P; ++j) {
    const double xmean = ds.X.col(j).mean();
    const double sxx = ds.col_sqnorm[j] - N * xmean * xmean;
    if (sxx > 0.0 && syy > 0.0) {
      const double sxy = ds.nu[j] - N * xmean * ymean;
      score[j] = std::abs(sxy / std::sqrt(sxx * syy));
    }
  }
  std::vector<int> idx(P);
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](int a, int b) {
    return score[a] != score[b] ? score[a] > score[b] : a < b;
  });
  idx.resize(anchor_size);
  std::sort(idx.begin(), idx.end());
  return idx;
}

SamplerTrace run_vc_wtgs(const Dataset& ds, const Hyperparams& hp, RngStream rng) {
  return run_vc_impl(ds, hp, rng, SamplerKind::vc);
}

SamplerTrace run_wtgs(const Dataset& ds, const Hyperparams& hp, RngStream rng) {
  Hyperparams full = hp;
  full.S = ds.P();
  return run_vc_impl(ds, full, rng, SamplerKind::wtgs);
}

SamplerTrace run_subset_wtgs(const Dataset& ds, const Hyperparams& hp, int anchor_size,
                             long long t_burn, RngStream rng) {
  const auto P = static_cast<int>(ds.P());
  hp.validate(P);
  if (anchor_size < 0 || anchor_size >= hp.S)
    throw ConfigError("anchor_size must satisfy 0 <= anchor_size < S");
  if (t_burn < 0 || t_burn >= hp.T) throw ConfigError("t_burn must satisfy 0 <= t_burn < T");

  SamplerTrace tr;
  tr.P = P;
  tr.T = hp.T;
  tr.kind = SamplerKind::subset;
  tr.t_burn = t_burn;
  tr.gamma.resize(static_cast<std::size_t>(hp.T) * P);
  tr.rho_tilde_log.resize(hp.T);
  tr.q.assign(hp.T, 1);
  tr.flipped.resize(hp.T);
  tr.cond_pips.resize(hp.T);
  tr.subset.resize(hp.T);

  std::vector<int> anchors = anchors_by_correlation(ds, anchor_size);
  GammaVec gamma(P, 0);
  tr.gamma0 = gamma;
  ModelState st = rebuild_state(gamma, ds, hp);

  const int i0 = static_cast<int>(rng.uniform_int(P));
  std::vector<int> sub = draw_subset(i0, anchors, hp.S, P, rng);
  ConditionalSet cs = conditionals_on(sub, st, ds, hp);
  tr.cond_evals_init = hp.S;
  tr.cond_evals_total = hp.S;
  WeightTable wt = flip_weight_table(gamma, sub, cs, hp.eps, P);

  // Running means of observed conditional inclusion probabilities drive the
  // burn-in anchor adaptation; unvisited coordinates score zero.
  std::vector<double> obs_sum(P, 0.0);
  std::vector<long long> obs_cnt(P, 0);
  auto absorb_observations = [&](const std::vector<int>& support, const Eigen::VectorXd& p1) {
    for (std::size_t r = 0; r < support.size(); ++r) {
      obs_sum[support[r]] += p1[static_cast<Eigen::Index>(r)];
      ++obs_cnt[support[r]];
    }
  };
  absorb_observations(sub, cs.p1);

  for (long long t = 1; t <= hp.T; ++t) {
    int i;
    try {
      const int pos = sample_categorical(wt.logw, rng);
      i = sub[pos];
      gamma[i] ^= 1;
      st = rebuild_state(gamma, ds, hp);
      sub = draw_subset(i, anchors, hp.S, P, rng);
      cs = conditionals_on(sub, st, ds, hp);
    } catch (NumericalError& e) {
      e.iteration = t;
      throw;
    }
    tr.cond_evals_total += hp.S;
    wt = flip_weight_table(gamma, sub, cs, hp.eps, P);

    tr.flipped[t - 1] = i;
    tr.rho_tilde_log[t - 1] = -wt.log_phi;
    tr.cond_pips[t - 1].assign(cs.p1.data(), cs.p1.data() + cs.p1.size());
    tr.subset[t - 1].assign(sub.begin(), sub.end());
    std::copy(gamma.begin(), gamma.end(),
              tr.gamma.data() + static_cast<std::size_t>(t - 1) * P);
    ++tr.active_count;

    if (t <= t_burn) {
      absorb_observations(sub, cs.p1);
      if (t % 100 == 0 && anchor_size > 0) {
        std::vector<int> idx(P);
        std::iota(idx.begin(), idx.end(), 0);
        std::vector<double> mean(P, 0.0);
        for (int j = 0; j < P; ++j)
          if (obs_cnt[j] > 0) mean[j] = obs_sum[j] / static_cast<double>(obs_cnt[j]);
        std::sort(idx.begin(), idx.end(), [&](int a, int b) {
          return mean[a] != mean[b] ? mean[a] > mean[b] : a < b;
        });
        idx.resize(anchor_size);
        std::sort(idx.begin(), idx.end());
        anchors = std::move(idx);
      }
    }
  }
  return tr;
}

}  // namespace wtgs
