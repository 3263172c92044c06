#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <json.hpp>
#include <string>

#include "wtgs/data.hpp"
#include "wtgs/errors.hpp"

using namespace wtgs;

namespace {

struct TempFile {
  std::string path;
  explicit TempFile(std::string p) : path(std::move(p)) {}
  ~TempFile() { std::remove(path.c_str()); }
};

void write_text(const std::string& path, const std::string& text) {
  std::ofstream f(path);
  f << text;
}

}  // namespace

TEST_CASE("synthetic generation is deterministic in its seed") {
  SynthConfig cfg;
  cfg.N = 20;
  cfg.P = 7;
  cfg.k_true = 2;
  cfg.seed = 31;
  const SynthResult a = generate_gaussian(cfg);
  const SynthResult b = generate_gaussian(cfg);
  CHECK((a.ds.X - b.ds.X).cwiseAbs().maxCoeff() == 0.0);
  CHECK((a.ds.Y - b.ds.Y).cwiseAbs().maxCoeff() == 0.0);
  cfg.seed = 32;
  const SynthResult c = generate_gaussian(cfg);
  CHECK((a.ds.X - c.ds.X).cwiseAbs().maxCoeff() > 0.0);
}

TEST_CASE("synthetic shapes, truth layout, and residual scale") {
  SynthConfig cfg;
  cfg.N = 100;
  cfg.P = 200;
  cfg.k_true = 5;
  cfg.beta_scale = 2.0;
  cfg.noise_sd = 0.5;
  cfg.seed = 8;
  const SynthResult sr = generate_gaussian(cfg);
  CHECK(sr.ds.N() == 100);
  CHECK(sr.ds.P() == 200);
  REQUIRE(sr.truth.beta.size() == 200);
  CHECK(sr.truth.active_set == std::vector<int>{0, 1, 2, 3, 4});
  for (int j = 0; j < 5; ++j) CHECK(sr.truth.beta[j] == 2.0);
  for (int j = 5; j < 200; ++j) CHECK(sr.truth.beta[j] == 0.0);
  CHECK(sr.truth.noise_sd == 0.5);

  // The residual Y - X beta is the noise vector: mean ~ 0, sd ~ noise_sd.
  const Eigen::VectorXd resid = sr.ds.Y - sr.ds.X * sr.truth.beta;
  CHECK(std::abs(resid.mean()) < 0.2);
  const double sd = std::sqrt(resid.squaredNorm() / resid.size());
  CHECK(sd == doctest::Approx(0.5).epsilon(0.25));

  // Design entries are standard normal: the pooled mean and variance agree.
  CHECK(std::abs(sr.ds.X.mean()) < 0.02);
  CHECK(sr.ds.X.squaredNorm() / (100.0 * 200.0) == doctest::Approx(1.0).epsilon(0.05));
}

TEST_CASE("equicorrelated columns have the requested pairwise correlation") {
  SynthConfig cfg;
  cfg.N = 4000;
  cfg.P = 3;
  cfg.k_true = 0;
  cfg.correlation = 0.5;
  cfg.seed = 12;
  const SynthResult sr = generate_gaussian(cfg);
  for (int a = 0; a < 3; ++a) {
    for (int b = a + 1; b < 3; ++b) {
      const Eigen::VectorXd xa = sr.ds.X.col(a).array() - sr.ds.X.col(a).mean();
      const Eigen::VectorXd xb = sr.ds.X.col(b).array() - sr.ds.X.col(b).mean();
      const double corr = xa.dot(xb) / std::sqrt(xa.squaredNorm() * xb.squaredNorm());
      CHECK(corr == doctest::Approx(0.5).epsilon(0.12));
    }
  }
}

TEST_CASE("a null model carries no active covariates") {
  SynthConfig cfg;
  cfg.N = 15;
  cfg.P = 6;
  cfg.k_true = 0;
  cfg.seed = 4;
  const SynthResult sr = generate_gaussian(cfg);
  CHECK(sr.truth.active_set.empty());
  CHECK(sr.truth.beta.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("synthetic configuration is validated") {
  SynthConfig cfg;
  cfg.k_true = 300;  // exceeds P = 200
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = SynthConfig{};
  cfg.correlation = 1.0;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = SynthConfig{};
  cfg.noise_sd = 0.0;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = SynthConfig{};
  cfg.N = 0;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
}

TEST_CASE("CSV round trip preserves every bit") {
  SynthConfig cfg;
  cfg.N = 25;
  cfg.P = 6;
  cfg.k_true = 2;
  cfg.seed = 77;
  const SynthResult sr = generate_gaussian(cfg);
  TempFile tmp("roundtrip_test.csv");
  write_dataset_csv(sr.ds, tmp.path);
  const Dataset back = load_csv(tmp.path, "y");
  REQUIRE(back.N() == 25);
  REQUIRE(back.P() == 6);
  // 17 significant digits survive the trip bit-exactly.
  CHECK((back.X - sr.ds.X).cwiseAbs().maxCoeff() == 0.0);
  CHECK((back.Y - sr.ds.Y).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("CSV loader selects the response column by name") {
  TempFile tmp("named_response_test.csv");
  write_text(tmp.path, "a,target,b\n1,10,2\n3,20,4\n5,30,6\n7,40,8\n");
  const Dataset ds = load_csv(tmp.path, "target");
  REQUIRE(ds.N() == 4);
  REQUIRE(ds.P() == 2);
  CHECK(ds.Y[0] == 10.0);
  CHECK(ds.Y[3] == 40.0);
  CHECK(ds.X(0, 0) == 1.0);  // column order preserved around the response
  CHECK(ds.X(0, 1) == 2.0);
}

TEST_CASE("CSV loader names the offending position in its errors") {
  TempFile tmp("malformed_test.csv");

  write_text(tmp.path, "a,y\n1,2\n3\n");
  CHECK_THROWS_WITH_AS(load_csv(tmp.path, "y"), doctest::Contains("row 3"), DataError);

  write_text(tmp.path, "a,y\n1,2\nx,4\n");
  CHECK_THROWS_WITH_AS(load_csv(tmp.path, "y"),
                       doctest::Contains("column 'a'"), DataError);

  write_text(tmp.path, "a,y\n1,2\n,4\n");
  CHECK_THROWS_AS(load_csv(tmp.path, "y"), DataError);

  write_text(tmp.path, "a,b\n1,2\n");
  CHECK_THROWS_WITH_AS(load_csv(tmp.path, "y"), doctest::Contains("'y'"), DataError);

  write_text(tmp.path, "a,y\n1,5\n2,5\n");
  CHECK_THROWS_WITH_AS(load_csv(tmp.path, "y"), doctest::Contains("constant"), DataError);

  CHECK_THROWS_AS(load_csv("does_not_exist_test.csv", "y"), DataError);
}

TEST_CASE("centering and scaling normalize the covariate columns") {
  TempFile tmp("center_scale_test.csv");
  write_text(tmp.path, "a,b,y\n1,10,0\n2,20,1\n3,30,2\n4,40,3\n");
  CsvOptions opts;
  opts.center = true;
  opts.scale = true;
  const Dataset ds = load_csv(tmp.path, "y", opts);
  for (int c = 0; c < 2; ++c) {
    CHECK(std::abs(ds.X.col(c).mean()) < 1e-14);
    const double sd = std::sqrt(ds.X.col(c).squaredNorm() / (ds.N() - 1));
    CHECK(sd == doctest::Approx(1.0).epsilon(1e-12));
  }
  CHECK(ds.Y[2] == 2.0);  // the response is left untouched
}

TEST_CASE("ground-truth sidecar serializes losslessly") {
  SynthConfig cfg;
  cfg.N = 10;
  cfg.P = 4;
  cfg.k_true = 2;
  cfg.beta_scale = 1.25;
  cfg.seed = 99;
  const SynthResult sr = generate_gaussian(cfg);
  TempFile tmp("truth_test.json");
  write_truth_json(sr.truth, tmp.path);

  std::ifstream f(tmp.path);
  const nlohmann::json j = nlohmann::json::parse(f);
  CHECK(j["active_set"].get<std::vector<int>>() == sr.truth.active_set);
  CHECK(j["noise_sd"].get<double>() == sr.truth.noise_sd);
  CHECK(j["seed"].get<std::uint64_t>() == sr.truth.seed);
  const auto beta = j["beta"].get<std::vector<double>>();
  REQUIRE(beta.size() == 4);
  CHECK(beta[0] == 1.25);
  CHECK(beta[3] == 0.0);
}
