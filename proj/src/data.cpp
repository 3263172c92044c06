#include "wtgs/data.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "wtgs/errors.hpp"
#include "wtgs/rng.hpp"

namespace wtgs {

namespace {

constexpr double k_two_pi = 6.283185307179586476925286766559;

// Box-Muller pairs on top of the portable uniform stream; the spare value is
// cached so the draw count stays deterministic.
class GaussianDraws {
 public:
  explicit GaussianDraws(RngStream& rng) : rng_(rng) {}
  double next() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1 = rng_.uniform();
    while (u1 == 0.0) u1 = rng_.uniform();
    const double u2 = rng_.uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    spare_ = r * std::sin(k_two_pi * u2);
    has_spare_ = true;
    return r * std::cos(k_two_pi * u2);
  }

 private:
  RngStream& rng_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      cells.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  cells.push_back(cur);
  return cells;
}

}  // namespace

void SynthConfig::validate() const {
  if (N < 1 || P < 1) throw ConfigError("synthetic data needs N >= 1 and P >= 1");
  if (k_true < 0 || k_true > P) throw ConfigError("k_true must lie in [0, P]");
  if (!(noise_sd > 0.0)) throw ConfigError("noise_sd must be positive");
  if (!(correlation >= 0.0 && correlation < 1.0))
    throw ConfigError("correlation must lie in [0, 1)");
}

SynthResult generate_gaussian(const SynthConfig& cfg, std::size_t gram_budget_bytes) {
  cfg.validate();
  RngStream rng(cfg.seed, 0);
  GaussianDraws gauss(rng);

  // Draw order: per row, the shared factor first (when correlated), then the
  // row's entries; the response noise follows after the whole matrix.
  Eigen::MatrixXd X(cfg.N, cfg.P);
  const double c = cfg.correlation;
  for (long long n = 0; n < cfg.N; ++n) {
    double shared = 0.0;
    if (c > 0.0) shared = gauss.next();
    for (long long j = 0; j < cfg.P; ++j) {
      const double z = gauss.next();
      X(n, j) = c > 0.0 ? std::sqrt(1.0 - c) * z + std::sqrt(c) * shared : z;
    }
  }

  GroundTruth truth;
  truth.beta = Eigen::VectorXd::Zero(cfg.P);
  for (long long j = 0; j < cfg.k_true; ++j) {
    truth.beta[j] = cfg.beta_scale;
    truth.active_set.push_back(static_cast<int>(j));
  }
  truth.noise_sd = cfg.noise_sd;
  truth.seed = cfg.seed;

  Eigen::VectorXd Y = X * truth.beta;
  for (long long n = 0; n < cfg.N; ++n) Y[n] += cfg.noise_sd * gauss.next();

  return SynthResult{Dataset::from_xy(std::move(X), std::move(Y), gram_budget_bytes),
                     std::move(truth)};
}

Dataset load_csv(const std::string& path, const std::string& response_column,
                 const CsvOptions& opts, std::size_t gram_budget_bytes) {
  std::ifstream f(path);
  if (!f) throw DataError("cannot open CSV file: " + path);

  std::string line;
  if (!std::getline(f, line)) throw DataError("empty CSV file: " + path);
  std::vector<std::string> header = split_csv_line(line);
  for (auto& h : header) h = trim(h);

  long long response_idx = -1;
  for (std::size_t c = 0; c < header.size(); ++c)
    if (header[c] == response_column) {
      response_idx = static_cast<long long>(c);
      break;
    }
  if (response_idx < 0)
    throw DataError("response column '" + response_column + "' not found in header");
  if (header.size() < 2) throw DataError("CSV needs at least one covariate column");

  std::vector<std::vector<double>> rows;
  long long lineno = 1;
  while (std::getline(f, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    const std::vector<std::string> cells = split_csv_line(line);
    if (cells.size() != header.size())
      throw DataError("row " + std::to_string(lineno) + " has " +
                      std::to_string(cells.size()) + " cells, expected " +
                      std::to_string(header.size()));
    std::vector<double> vals(cells.size());
    for (std::size_t c = 0; c < cells.size(); ++c) {
      const std::string cell = trim(cells[c]);
      if (cell.empty())
        throw DataError("row " + std::to_string(lineno) + " column '" + header[c] +
                        "': missing value");
      char* end = nullptr;
      vals[c] = std::strtod(cell.c_str(), &end);
      if (end != cell.c_str() + cell.size() || !std::isfinite(vals[c]))
        throw DataError("row " + std::to_string(lineno) + " column '" + header[c] +
                        "': not numeric '" + cell + "'");
    }
    rows.push_back(std::move(vals));
  }
  if (rows.empty()) throw DataError("CSV has a header but no data rows: " + path);

  const auto N = static_cast<long long>(rows.size());
  const auto P = static_cast<long long>(header.size()) - 1;
  Eigen::MatrixXd X(N, P);
  Eigen::VectorXd Y(N);
  for (long long n = 0; n < N; ++n) {
    long long col = 0;
    for (std::size_t c = 0; c < header.size(); ++c) {
      if (static_cast<long long>(c) == response_idx)
        Y[n] = rows[n][c];
      else
        X(n, col++) = rows[n][c];
    }
  }

  if ((Y.array() == Y[0]).all())
    throw DataError("response column '" + response_column + "' is constant");

  if (opts.center || opts.scale) {
    for (long long j = 0; j < P; ++j) {
      const double mean = X.col(j).mean();
      if (opts.center) X.col(j).array() -= mean;
      if (opts.scale) {
        const double centered_ss =
            opts.center ? X.col(j).squaredNorm()
                        : (X.col(j).array() - mean).matrix().squaredNorm();
        const double sd = std::sqrt(centered_ss / static_cast<double>(N > 1 ? N - 1 : 1));
        if (sd > 0.0) X.col(j) /= sd;
      }
    }
  }

  return Dataset::from_xy(std::move(X), std::move(Y), gram_budget_bytes);
}

void write_dataset_csv(const Dataset& ds, const std::string& path,
                       const std::string& response_name) {
  std::ofstream f(path);
  if (!f) throw DataError("cannot open for writing: " + path);
  for (long long j = 0; j < ds.P(); ++j) f << "x" << j << ",";
  f << response_name << "\n";
  char buf[64];
  for (long long n = 0; n < ds.N(); ++n) {
    for (long long j = 0; j < ds.P(); ++j) {
      std::snprintf(buf, sizeof(buf), "%.17g,", ds.X(n, j));
      f << buf;
    }
    std::snprintf(buf, sizeof(buf), "%.17g\n", ds.Y[n]);
    f << buf;
  }
}

void write_truth_json(const GroundTruth& truth, const std::string& path) {
  nlohmann::json j;
  j["beta"] = std::vector<double>(truth.beta.data(), truth.beta.data() + truth.beta.size());
  j["active_set"] = truth.active_set;
  j["noise_sd"] = truth.noise_sd;
  j["seed"] = truth.seed;
  std::ofstream f(path);
  if (!f) throw DataError("cannot open for writing: " + path);
  f << j.dump(2) << "\n";
}

}  // namespace wtgs
