#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace wtgs {

// Resolved run configuration. Every key can come from a key=value config file
// or a command-line flag (flags win). Unknown keys are rejected.
struct RunConfig {
  // data source
  std::string data = "synth";  // "synth" or a CSV path
  std::string response = "y";
  bool center = false;
  bool scale = false;
  long long N = 100;
  long long P = 200;
  long long k_true = 5;
  double beta_scale = 1.0;
  double noise_sd = 1.0;
  double correlation = 0.0;
  std::uint64_t data_seed = 1;

  // model / sampler
  double h = -1.0;  // negative = use the default min(0.5, 5/P)
  double tau = 1.0;
  double nu0 = 1.0;
  double lambda0 = 1.0;
  double eps = 0.0;
  long long S = -1;  // negative = use P
  long long T = 20000;
  long long R = 2;
  long long burn = 0;
  long long anchor = 0;
  std::uint64_t seed = 0;
  std::string sampler = "vc";  // wtgs | subset | vc
  std::vector<long long> s_grid;

  // execution / output
  long long threads = 0;
  bool svg = true;
  std::string out = "out";
  long long traj_covs = 5;
  long long gram_budget_mb = 2048;
};

// Parse a UTF-8 key=value file ('#' comments, blank lines allowed).
RunConfig parse_config_file(const std::string& path);

// Apply one key=value pair; throws ConfigError on unknown keys or bad values.
void apply_config_kv(RunConfig& cfg, const std::string& key, const std::string& value);

// Canonical serialization (sorted keys); written next to every run's outputs.
std::string resolved_config_text(const RunConfig& cfg);
void write_resolved_config(const RunConfig& cfg, const std::string& path);

}  // namespace wtgs
