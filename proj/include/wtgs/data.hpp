#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "wtgs/model.hpp"

namespace wtgs {

// Synthetic-data protocol: X entries are i.i.d. standard normal (optionally
// equicorrelated through a shared per-row factor), the true coefficient vector
// has beta_scale at the first k_true coordinates and zero elsewhere, and
// Y = X beta + noise_sd * standard normal.
struct SynthConfig {
  long long N = 100;
  long long P = 200;
  long long k_true = 5;
  double beta_scale = 1.0;
  double noise_sd = 1.0;
  double correlation = 0.0;  // equicorrelation of columns, in [0,1)
  std::uint64_t seed = 0;

  void validate() const;  // throws ConfigError
};

struct GroundTruth {
  Eigen::VectorXd beta;
  std::vector<int> active_set;
  double noise_sd = 0.0;
  std::uint64_t seed = 0;
};

struct SynthResult {
  Dataset ds;
  GroundTruth truth;
};

SynthResult generate_gaussian(const SynthConfig& cfg,
                              std::size_t gram_budget_bytes = default_gram_budget_bytes);

struct CsvOptions {
  bool center = false;  // subtract covariate column means
  bool scale = false;   // divide covariate columns by their standard deviation
};

// Rectangular numeric CSV with a header row; the named response column becomes
// Y and the remaining columns become X in header order. Ragged rows, empty or
// non-numeric cells, and a constant response are rejected with positions named.
Dataset load_csv(const std::string& path, const std::string& response_column,
                 const CsvOptions& opts = {},
                 std::size_t gram_budget_bytes = default_gram_budget_bytes);

// Header x0..x{P-1},<response_name>; 17 significant digits (round-trip exact).
void write_dataset_csv(const Dataset& ds, const std::string& path,
                       const std::string& response_name = "y");

void write_truth_json(const GroundTruth& truth, const std::string& path);

}  // namespace wtgs
