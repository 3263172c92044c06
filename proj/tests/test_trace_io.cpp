#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include "wtgs/errors.hpp"
#include "wtgs/model.hpp"
#include "wtgs/rng.hpp"
#include "wtgs/samplers.hpp"
#include "wtgs/trace_io.hpp"

using namespace wtgs;

namespace {

struct TempFile {
  std::string path;
  explicit TempFile(std::string p) : path(std::move(p)) {}
  ~TempFile() { std::remove(path.c_str()); }
};

Dataset random_dataset(int N, int P, std::uint64_t seed) {
  RngStream rng(seed);
  Eigen::MatrixXd X(N, P);
  for (int r = 0; r < N; ++r)
    for (int c = 0; c < P; ++c) X(r, c) = 2.0 * rng.uniform() - 1.0;
  Eigen::VectorXd Y = X.col(0);
  for (int r = 0; r < N; ++r) Y[r] += 0.3 * (2.0 * rng.uniform() - 1.0);
  return Dataset::from_xy(std::move(X), std::move(Y));
}

std::string slurp(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("hex packing encodes four coordinates per digit") {
  const GammaVec g{1, 0, 0, 1, 1};  // digit 0: bits 0 and 3 -> 9; digit 1: bit 0 -> 1
  CHECK(pack_gamma_hex(g.data(), 5) == "91");
  CHECK(unpack_gamma_hex("91", 5) == g);

  const GammaVec zeros(7, 0);
  CHECK(pack_gamma_hex(zeros.data(), 7) == "00");
  const GammaVec ones(4, 1);
  CHECK(pack_gamma_hex(ones.data(), 4) == "f");
}

TEST_CASE("hex packing round-trips every 6-bit pattern") {
  for (unsigned bits = 0; bits < 64; ++bits) {
    GammaVec g(6);
    for (int j = 0; j < 6; ++j) g[j] = (bits >> j) & 1u;
    CHECK(unpack_gamma_hex(pack_gamma_hex(g.data(), 6), 6) == g);
  }
}

TEST_CASE("trace CSV carries metadata, header, and one row per iteration") {
  const Dataset ds = random_dataset(10, 5, 3);
  Hyperparams hp;
  hp.S = 2;
  hp.T = 40;
  const SamplerTrace tr = run_vc_wtgs(ds, hp, RngStream(4, 0));

  TempFile tmp("trace_csv_test.csv");
  write_trace_csv(tr, tmp.path);

  std::ifstream f(tmp.path);
  std::string line;
  std::getline(f, line);
  CHECK(line.find("# P=5 T=40 t_burn=0 gamma0=") == 0);
  std::getline(f, line);
  CHECK(line == "t,q,flipped,rho_tilde_log,gamma_hex");
  long long rows = 0;
  while (std::getline(f, line)) ++rows;
  CHECK(rows == 40);
}

TEST_CASE("binary journal round-trips all serialized fields") {
  const Dataset ds = random_dataset(12, 6, 9);
  Hyperparams hp;
  hp.S = 3;
  hp.T = 75;
  const SamplerTrace tr = run_vc_wtgs(ds, hp, RngStream(21, 0));

  TempFile tmp("trace_journal_test.jrnl");
  write_trace_journal(tr, tmp.path);
  const SamplerTrace back = read_trace_journal(tmp.path);

  CHECK(back.P == tr.P);
  CHECK(back.T == tr.T);
  CHECK(back.t_burn == tr.t_burn);
  CHECK(back.gamma0 == tr.gamma0);
  CHECK(back.gamma == tr.gamma);
  CHECK(back.q == tr.q);
  CHECK(back.flipped == tr.flipped);
  CHECK(back.rho_tilde_log == tr.rho_tilde_log);
  CHECK(back.active_count == tr.active_count);

  // Re-serializing the read-back trace reproduces the file byte for byte.
  TempFile tmp2("trace_journal_test2.jrnl");
  write_trace_journal(back, tmp2.path);
  CHECK(slurp(tmp.path) == slurp(tmp2.path));
}

TEST_CASE("journal reader rejects truncated and foreign files") {
  const Dataset ds = random_dataset(8, 4, 5);
  Hyperparams hp;
  hp.S = 4;
  hp.T = 10;
  const SamplerTrace tr = run_wtgs(ds, hp, RngStream(2, 0));

  TempFile tmp("trace_truncated_test.jrnl");
  write_trace_journal(tr, tmp.path);
  const std::string full = slurp(tmp.path);

  std::ofstream(tmp.path, std::ios::binary) << full.substr(0, full.size() / 2);
  CHECK_THROWS_AS(read_trace_journal(tmp.path), DataError);

  std::ofstream(tmp.path, std::ios::binary) << "NOTATRACE" << full;
  CHECK_THROWS_AS(read_trace_journal(tmp.path), DataError);

  CHECK_THROWS_AS(read_trace_journal("missing_journal_test.jrnl"), DataError);
}

TEST_CASE("CSV rows reconstruct the stored inclusion vectors") {
  const Dataset ds = random_dataset(9, 7, 13);
  Hyperparams hp;
  hp.S = 7;
  hp.T = 12;
  const SamplerTrace tr = run_wtgs(ds, hp, RngStream(6, 0));

  TempFile tmp("trace_rows_test.csv");
  write_trace_csv(tr, tmp.path);
  std::ifstream f(tmp.path);
  std::string line;
  std::getline(f, line);  // metadata
  std::getline(f, line);  // header
  for (long long t = 1; t <= tr.T; ++t) {
    REQUIRE(std::getline(f, line));
    const auto last_comma = line.rfind(',');
    const GammaVec g = unpack_gamma_hex(line.substr(last_comma + 1), 7);
    const auto* row = tr.gamma_at(t);
    CHECK(g == GammaVec(row, row + 7));
  }
}
