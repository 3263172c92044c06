#include "wtgs/config.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "wtgs/errors.hpp"

namespace wtgs {

namespace {

long long to_ll(const std::string& key, const std::string& v) {
  char* end = nullptr;
  const long long out = std::strtoll(v.c_str(), &end, 10);
  if (end != v.c_str() + v.size() || v.empty())
    throw ConfigError("key '" + key + "': expected an integer, got '" + v + "'");
  return out;
}

std::uint64_t to_u64(const std::string& key, const std::string& v) {
  char* end = nullptr;
  const unsigned long long out = std::strtoull(v.c_str(), &end, 10);
  if (end != v.c_str() + v.size() || v.empty())
    throw ConfigError("key '" + key + "': expected an unsigned integer, got '" + v + "'");
  return out;
}

double to_dbl(const std::string& key, const std::string& v) {
  char* end = nullptr;
  const double out = std::strtod(v.c_str(), &end);
  if (end != v.c_str() + v.size() || v.empty())
    throw ConfigError("key '" + key + "': expected a number, got '" + v + "'");
  return out;
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "on" || v == "true" || v == "1") return true;
  if (v == "off" || v == "false" || v == "0") return false;
  throw ConfigError("key '" + key + "': expected on/off, got '" + v + "'");
}

std::vector<long long> to_ll_list(const std::string& key, const std::string& v) {
  std::vector<long long> out;
  std::string cur;
  std::stringstream ss(v);
  while (std::getline(ss, cur, ','))
    if (!cur.empty()) out.push_back(to_ll(key, cur));
  if (out.empty()) throw ConfigError("key '" + key + "': empty list");
  return out;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::string num(double v) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

void apply_config_kv(RunConfig& cfg, const std::string& key, const std::string& value) {
  if (key == "data") cfg.data = value;
  else if (key == "response") cfg.response = value;
  else if (key == "center") cfg.center = to_bool(key, value);
  else if (key == "scale") cfg.scale = to_bool(key, value);
  else if (key == "N") cfg.N = to_ll(key, value);
  else if (key == "P") cfg.P = to_ll(key, value);
  else if (key == "k_true") cfg.k_true = to_ll(key, value);
  else if (key == "beta_scale") cfg.beta_scale = to_dbl(key, value);
  else if (key == "noise_sd") cfg.noise_sd = to_dbl(key, value);
  else if (key == "correlation") cfg.correlation = to_dbl(key, value);
  else if (key == "data_seed") cfg.data_seed = to_u64(key, value);
  else if (key == "h") cfg.h = to_dbl(key, value);
  else if (key == "tau") cfg.tau = to_dbl(key, value);
  else if (key == "nu0") cfg.nu0 = to_dbl(key, value);
  else if (key == "lambda0") cfg.lambda0 = to_dbl(key, value);
  else if (key == "eps") cfg.eps = to_dbl(key, value);
  else if (key == "S") cfg.S = to_ll(key, value);
  else if (key == "T") cfg.T = to_ll(key, value);
  else if (key == "R") cfg.R = to_ll(key, value);
  else if (key == "burn") cfg.burn = to_ll(key, value);
  else if (key == "anchor") cfg.anchor = to_ll(key, value);
  else if (key == "seed") cfg.seed = to_u64(key, value);
  else if (key == "sampler") {
    if (value != "wtgs" && value != "subset" && value != "vc")
      throw ConfigError("sampler must be one of wtgs, subset, vc");
    cfg.sampler = value;
  } else if (key == "s_grid") cfg.s_grid = to_ll_list(key, value);
  else if (key == "threads") cfg.threads = to_ll(key, value);
  else if (key == "svg") cfg.svg = to_bool(key, value);
  else if (key == "out") cfg.out = value;
  else if (key == "traj_covs") cfg.traj_covs = to_ll(key, value);
  else if (key == "gram_budget_mb") cfg.gram_budget_mb = to_ll(key, value);
  else throw ConfigError("unknown config key '" + key + "'");
}

RunConfig parse_config_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open config file: " + path);
  RunConfig cfg;
  std::string line;
  long long lineno = 0;
  while (std::getline(f, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(lineno) + ": expected key=value");
    apply_config_kv(cfg, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  return cfg;
}

std::string resolved_config_text(const RunConfig& cfg) {
  std::ostringstream s;
  s << "N=" << cfg.N << "\n";
  s << "P=" << cfg.P << "\n";
  s << "R=" << cfg.R << "\n";
  s << "S=" << cfg.S << "\n";
  s << "T=" << cfg.T << "\n";
  s << "anchor=" << cfg.anchor << "\n";
  s << "beta_scale=" << num(cfg.beta_scale) << "\n";
  s << "burn=" << cfg.burn << "\n";
  s << "center=" << (cfg.center ? "on" : "off") << "\n";
  s << "correlation=" << num(cfg.correlation) << "\n";
  s << "data=" << cfg.data << "\n";
  s << "data_seed=" << cfg.data_seed << "\n";
  s << "eps=" << num(cfg.eps) << "\n";
  s << "gram_budget_mb=" << cfg.gram_budget_mb << "\n";
  s << "h=" << num(cfg.h) << "\n";
  s << "k_true=" << cfg.k_true << "\n";
  s << "lambda0=" << num(cfg.lambda0) << "\n";
  s << "noise_sd=" << num(cfg.noise_sd) << "\n";
  s << "nu0=" << num(cfg.nu0) << "\n";
  s << "out=" << cfg.out << "\n";
  s << "response=" << cfg.response << "\n";
  s << "sampler=" << cfg.sampler << "\n";
  s << "scale=" << (cfg.scale ? "on" : "off") << "\n";
  s << "seed=" << cfg.seed << "\n";
  if (!cfg.s_grid.empty()) {
    s << "s_grid=";
    for (std::size_t i = 0; i < cfg.s_grid.size(); ++i)
      s << cfg.s_grid[i] << (i + 1 < cfg.s_grid.size() ? "," : "");
    s << "\n";
  }
  s << "svg=" << (cfg.svg ? "on" : "off") << "\n";
  s << "threads=" << cfg.threads << "\n";
  s << "traj_covs=" << cfg.traj_covs << "\n";
  return s.str();
}

void write_resolved_config(const RunConfig& cfg, const std::string& path) {
  std::ofstream f(path);
  if (!f) throw DataError("cannot open for writing: " + path);
  f << resolved_config_text(cfg);
}

}  // namespace wtgs
