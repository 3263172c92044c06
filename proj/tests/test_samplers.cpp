#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <vector>

#include "wtgs/errors.hpp"
#include "wtgs/model.hpp"
#include "wtgs/rng.hpp"
#include "wtgs/samplers.hpp"

using namespace wtgs;

namespace {

Dataset random_dataset(int N, int P, std::uint64_t seed) {
  RngStream rng(seed);
  Eigen::MatrixXd X(N, P);
  for (int r = 0; r < N; ++r)
    for (int c = 0; c < P; ++c) X(r, c) = 2.0 * rng.uniform() - 1.0;
  Eigen::VectorXd Y = X.col(0) + 0.7 * X.col(P - 1);
  for (int r = 0; r < N; ++r) Y[r] += 0.3 * (2.0 * rng.uniform() - 1.0);
  return Dataset::from_xy(std::move(X), std::move(Y));
}

Dataset zero_dataset(int N, int P) {
  Eigen::VectorXd Y(N);
  for (int r = 0; r < N; ++r) Y[r] = 0.25 * r - 1.0;
  return Dataset::from_xy(Eigen::MatrixXd::Zero(N, P), std::move(Y));
}

// Row-by-row structural invariants shared by all chains.
void check_flip_consistency(const SamplerTrace& tr) {
  GammaVec prev = tr.gamma0;
  for (long long t = 1; t <= tr.T; ++t) {
    const auto* g = tr.gamma_at(t);
    const GammaVec row(g, g + tr.P);
    if (tr.q[t - 1]) {
      const int i = tr.flipped[t - 1];
      REQUIRE(i >= 0);
      REQUIRE(i < tr.P);
      GammaVec expect = prev;
      expect[i] ^= 1;
      REQUIRE(row == expect);
    } else {
      REQUIRE(tr.flipped[t - 1] == -1);
      REQUIRE(tr.rho_tilde_log[t - 1] == 0.0);
      REQUIRE(row == prev);
      REQUIRE(tr.cond_pips[t - 1].empty());
    }
    prev = row;
  }
}

}  // namespace

TEST_CASE("flip toggles exactly one coordinate") {
  for (unsigned bits = 0; bits < 16; ++bits) {
    GammaVec g(4);
    for (int j = 0; j < 4; ++j) g[j] = (bits >> j) & 1u;
    for (int i = 0; i < 4; ++i) {
      const GammaVec f = flip(g, i);
      int diff = 0;
      for (int j = 0; j < 4; ++j) diff += (f[j] != g[j]);
      CHECK(diff == 1);
      CHECK(f[i] == (g[i] ^ 1));
      CHECK(flip(f, i) == g);
    }
  }
}

TEST_CASE("categorical sampling follows the weight ratios") {
  Eigen::VectorXd logw(2);
  logw << std::log(1.0), std::log(3.0);
  RngStream rng(13);
  const int n = 100000;
  int second = 0;
  for (int k = 0; k < n; ++k) second += (sample_categorical(logw, rng) == 1);
  CHECK(std::abs(second / static_cast<double>(n) - 0.75) < 0.01);
}

TEST_CASE("categorical sampling is shift-invariant in log space") {
  Eigen::VectorXd a(3), b(3);
  a << -1.0, 0.0, 2.0;
  b = a.array() + 500.0;  // same distribution, large common offset
  RngStream r1(21), r2(21);
  for (int k = 0; k < 2000; ++k) CHECK(sample_categorical(a, r1) == sample_categorical(b, r2));
}

TEST_CASE("categorical sampling rejects empty and all-impossible weights") {
  RngStream rng(1);
  CHECK_THROWS_AS(sample_categorical(Eigen::VectorXd(0), rng), NumericalError);
  Eigen::VectorXd w(2);
  w << -std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(sample_categorical(w, rng), NumericalError);
}

TEST_CASE("subset draws contain the flip coordinate and the anchors") {
  RngStream rng(4);
  for (int k = 0; k < 200; ++k) {
    const std::vector<int> sub = draw_subset(3, {0, 5}, 4, 8, rng);
    REQUIRE(sub.size() == 4);
    CHECK(std::is_sorted(sub.begin(), sub.end()));
    CHECK(std::set<int>(sub.begin(), sub.end()).size() == 4);
    CHECK(std::binary_search(sub.begin(), sub.end(), 3));
    CHECK(std::binary_search(sub.begin(), sub.end(), 0));
    CHECK(std::binary_search(sub.begin(), sub.end(), 5));
    for (int j : sub) CHECK(j < 8);
  }
}

TEST_CASE("subset draws are uniform over the admissible sets") {
  // P = 6, S = 3, anchors = {2}, i = 0: the third member is uniform over
  // {1, 3, 4, 5}, giving four equally likely subsets.
  RngStream rng(8);
  std::map<std::vector<int>, int> counts;
  const int n = 100000;
  for (int k = 0; k < n; ++k) ++counts[draw_subset(0, {2}, 3, 6, rng)];
  REQUIRE(counts.size() == 4);
  double chi2 = 0.0;
  const double expected = n / 4.0;
  for (const auto& [sub, c] : counts) {
    CHECK(std::binary_search(sub.begin(), sub.end(), 0));
    CHECK(std::binary_search(sub.begin(), sub.end(), 2));
    chi2 += (c - expected) * (c - expected) / expected;
  }
  CHECK(chi2 < 16.27);  // chi-square(3) at the 0.999 level
}

TEST_CASE("anchor selection ranks by absolute correlation with the response") {
  const int N = 50;
  RngStream rng(3);
  Eigen::MatrixXd X(N, 4);
  for (int r = 0; r < N; ++r)
    for (int c = 0; c < 4; ++c) X(r, c) = 2.0 * rng.uniform() - 1.0;
  X.col(2) = Eigen::VectorXd::Constant(N, 3.0);  // constant column scores zero
  Eigen::VectorXd Y = -2.0 * X.col(1);           // perfect negative correlation
  for (int r = 0; r < N; ++r) Y[r] += 0.01 * (2.0 * rng.uniform() - 1.0);
  const Dataset ds = Dataset::from_xy(std::move(X), std::move(Y));

  CHECK(anchors_by_correlation(ds, 1) == std::vector<int>{1});
  const std::vector<int> two = anchors_by_correlation(ds, 2);
  CHECK(two.size() == 2);
  CHECK(std::binary_search(two.begin(), two.end(), 1));
  CHECK_FALSE(std::binary_search(two.begin(), two.end(), 2));
  CHECK(anchors_by_correlation(ds, 0).empty());
}

TEST_CASE("anchor selection breaks exact ties toward the lower index") {
  Eigen::MatrixXd X(4, 3);
  X.col(0) << 1, 2, 3, 4;
  X.col(1) = X.col(0);  // identical columns tie exactly
  X.col(2) << 0.1, -0.2, 0.15, 0.05;
  Eigen::VectorXd Y = X.col(0);
  const Dataset ds = Dataset::from_xy(std::move(X), std::move(Y));
  CHECK(anchors_by_correlation(ds, 1) == std::vector<int>{0});
}

TEST_CASE("variable-complexity chain: structure, counters, and determinism") {
  const Dataset ds = random_dataset(20, 6, 55);
  Hyperparams hp;
  hp.S = 3;
  hp.T = 400;

  const SamplerTrace a = run_vc_wtgs(ds, hp, RngStream(9, 0));
  const SamplerTrace b = run_vc_wtgs(ds, hp, RngStream(9, 0));
  CHECK(traces_equal(a, b));
  const SamplerTrace c = run_vc_wtgs(ds, hp, RngStream(10, 0));
  CHECK_FALSE(traces_equal(a, c));

  CHECK(a.P == 6);
  CHECK(a.T == 400);
  CHECK(a.q[0] == 1);  // the first iteration is always active
  check_flip_consistency(a);

  long long active = 0;
  for (long long t = 1; t <= a.T; ++t) {
    active += a.q[t - 1];
    if (a.q[t - 1]) {
      REQUIRE(a.cond_pips[t - 1].size() == 6);
      for (double p : a.cond_pips[t - 1]) {
        CHECK(p >= 0.0);
        CHECK(p <= 1.0);
      }
      CHECK(std::isfinite(a.rho_tilde_log[t - 1]));
    }
  }
  CHECK(active == a.active_count);
  CHECK(a.cond_evals_init == 6);
  CHECK(a.cond_evals_total == a.cond_evals_init + a.active_count * 6);
}

TEST_CASE("activity frequency tracks S/P") {
  const Dataset ds = random_dataset(15, 5, 66);
  Hyperparams hp;
  hp.S = 2;
  hp.T = 20000;
  const SamplerTrace tr = run_vc_wtgs(ds, hp, RngStream(77, 0));
  const double r = 2.0 / 5.0;
  const double expect = 1.0 + (hp.T - 1) * r;
  const double slack = 3.0 * std::sqrt(hp.T * r * (1.0 - r));
  CHECK(std::abs(tr.active_count - expect) < slack);
}

TEST_CASE("S = P makes the variable-complexity chain replay the classic one") {
  const Dataset ds = random_dataset(18, 5, 31);
  Hyperparams hp;
  hp.S = 5;
  hp.T = 300;
  const SamplerTrace vc = run_vc_wtgs(ds, hp, RngStream(12, 0));
  const SamplerTrace classic = run_wtgs(ds, hp, RngStream(12, 0));
  CHECK(vc.kind == SamplerKind::vc);
  CHECK(classic.kind == SamplerKind::wtgs);
  CHECK(traces_equal(vc, classic));
  CHECK(classic.active_count == 300);  // every iteration active
}

TEST_CASE("single-coordinate chain alternates deterministically") {
  const Dataset ds = zero_dataset(5, 1);
  Hyperparams hp;
  hp.S = 1;
  hp.T = 50;
  const SamplerTrace tr = run_wtgs(ds, hp, RngStream(2, 0));
  for (long long t = 2; t <= tr.T; ++t)
    CHECK(tr.gamma_at(t)[0] == (tr.gamma_at(t - 1)[0] ^ 1));
}

TEST_CASE("subset chain: structure, counters, and subset membership") {
  const Dataset ds = random_dataset(25, 8, 91);
  Hyperparams hp;
  hp.S = 3;
  hp.T = 500;
  const SamplerTrace tr = run_subset_wtgs(ds, hp, 1, 100, RngStream(5, 0));

  CHECK(tr.kind == SamplerKind::subset);
  CHECK(tr.t_burn == 100);
  CHECK(tr.gamma0 == GammaVec(8, 0));
  CHECK(tr.active_count == 500);
  CHECK(tr.cond_evals_init == 3);
  CHECK(tr.cond_evals_total == 3 + 500 * 3);

  check_flip_consistency(tr);
  for (long long t = 1; t <= tr.T; ++t) {
    const auto& sub = tr.subset[t - 1];
    REQUIRE(sub.size() == 3);
    CHECK(std::is_sorted(sub.begin(), sub.end()));
    // The flipped coordinate seeds the next subset draw, so it is a member.
    CHECK(std::binary_search(sub.begin(), sub.end(), tr.flipped[t - 1]));
    REQUIRE(tr.cond_pips[t - 1].size() == 3);
  }
  // The flip coordinate is always drawn from the previous iteration's subset.
  for (long long t = 2; t <= tr.T; ++t) {
    const auto& prev = tr.subset[t - 2];
    CHECK(std::binary_search(prev.begin(), prev.end(), tr.flipped[t - 1]));
  }

  const SamplerTrace again = run_subset_wtgs(ds, hp, 1, 100, RngStream(5, 0));
  CHECK(traces_equal(tr, again));
}

TEST_CASE("subset chain with S = P always visits every coordinate") {
  const Dataset ds = random_dataset(12, 4, 44);
  Hyperparams hp;
  hp.S = 4;
  hp.T = 60;
  const SamplerTrace tr = run_subset_wtgs(ds, hp, 0, 0, RngStream(3, 0));
  const std::vector<std::int32_t> full{0, 1, 2, 3};
  for (long long t = 1; t <= tr.T; ++t) CHECK(tr.subset[t - 1] == full);
}

TEST_CASE("subset chain rejects inconsistent sizes") {
  const Dataset ds = random_dataset(10, 4, 1);
  Hyperparams hp;
  hp.S = 2;
  hp.T = 10;
  CHECK_THROWS_AS(run_subset_wtgs(ds, hp, 2, 0, RngStream(1, 0)), ConfigError);
  CHECK_THROWS_AS(run_subset_wtgs(ds, hp, -1, 0, RngStream(1, 0)), ConfigError);
  CHECK_THROWS_AS(run_subset_wtgs(ds, hp, 0, 10, RngStream(1, 0)), ConfigError);
}

TEST_CASE("burn-in anchor adaptation locks onto the informative coordinate") {
  // Covariate 0 dominates Y; whatever the anchor's starting point, the running
  // means of observed conditional inclusion probabilities must pull it onto
  // coordinate 0, so every post-burn-in subset contains it.
  const int N = 40, P = 6;
  RngStream rng(123);
  Eigen::MatrixXd X(N, P);
  for (int r = 0; r < N; ++r)
    for (int c = 0; c < P; ++c) X(r, c) = 2.0 * rng.uniform() - 1.0;
  Eigen::VectorXd Y = 3.0 * X.col(0);
  for (int r = 0; r < N; ++r) Y[r] += 0.1 * (2.0 * rng.uniform() - 1.0);
  const Dataset ds = Dataset::from_xy(std::move(X), std::move(Y));

  Hyperparams hp;
  hp.S = 2;
  hp.T = 800;
  const SamplerTrace tr = run_subset_wtgs(ds, hp, 1, 300, RngStream(6, 0));
  // After the adaptive burn-in, every subset carries the anchor; the anchor
  // must have settled on the dominant coordinate.
  for (long long t = 400; t <= tr.T; ++t) {
    const auto& sub = tr.subset[t - 1];
    CHECK(std::binary_search(sub.begin(), sub.end(), 0));
  }
}
