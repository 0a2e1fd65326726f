#include "hiercache/config.hpp"

#include <cctype>
#include <fstream>
#include <sstream>

#include "hiercache/errors.hpp"

namespace hiercache {

ValidationResult validate_config(const NetworkConfig& cfg) {
  ValidationResult res;
  auto err = [&](const char* field, std::string msg) {
    res.issues.push_back({Severity::Error, field, std::move(msg)});
  };
  if (cfg.n_files < 1) err("n_files", "must be at least 1");
  if (cfg.k1 < 1) err("k1", "must be at least 1");
  if (cfg.k2 < 1) err("k2", "must be at least 1");
  if (cfg.m1 < 0.0 || cfg.m1 > cfg.n_files)
    err("m1", "relay cache size must lie in [0, n_files]");
  if (cfg.m2 < 0.0 || cfg.m2 > cfg.n_files)
    err("m2", "user cache size must lie in [0, n_files]");
  if (cfg.alpha < 0.0 || cfg.alpha > 1.0) err("alpha", "must lie in [0, 1]");
  if (cfg.beta < 0.0 || cfg.beta > 1.0) err("beta", "must lie in [0, 1]");
  if (cfg.n_files >= 1 && cfg.k1 >= 1 && cfg.k2 >= 1 && cfg.n_files < cfg.users()) {
    res.issues.push_back({Severity::Warning, "n_files",
                          "fewer files than users: all-distinct worst case demand infeasible"});
  }
  return res;
}

Demand worst_case_demand(const NetworkConfig& cfg) {
  if (cfg.n_files < cfg.users())
    throw WorstCaseInfeasibleError("worst_case_demand: needs n_files >= k1*k2");
  Demand d;
  d.file_of.resize(cfg.users());
  for (int u = 0; u < cfg.users(); ++u) d.file_of[u] = u + 1;
  return d;
}

namespace {

std::string trim(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

double parse_number(const std::string& key, const std::string& value) {
  try {
    std::size_t pos = 0;
    double v = std::stod(value, &pos);
    if (pos != value.size()) throw ParseError("");
    return v;
  } catch (...) {
    throw ParseError("config: bad numeric value for '" + key + "': " + value);
  }
}

std::uint64_t parse_u64(const std::string& key, const std::string& value) {
  try {
    std::size_t pos = 0;
    unsigned long long v = std::stoull(value, &pos);
    if (pos != value.size()) throw ParseError("");
    return v;
  } catch (...) {
    throw ParseError("config: bad integer value for '" + key + "': " + value);
  }
}

int parse_int(const std::string& key, const std::string& value) {
  auto v = parse_u64(key, value);
  if (v > 1000000000ull) throw ParseError("config: value for '" + key + "' too large");
  return static_cast<int>(v);
}

}  // namespace

NetworkConfig parse_config_text(const std::string& text) {
  NetworkConfig cfg;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ParseError("config line " + std::to_string(lineno) + ": expected key = value");
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (key == "n_files") cfg.n_files = parse_int(key, value);
    else if (key == "k1") cfg.k1 = parse_int(key, value);
    else if (key == "k2") cfg.k2 = parse_int(key, value);
    else if (key == "m1") cfg.m1 = parse_number(key, value);
    else if (key == "m2") cfg.m2 = parse_number(key, value);
    else if (key == "file_bits") cfg.file_bits = parse_u64(key, value);
    else if (key == "alpha") cfg.alpha = parse_number(key, value);
    else if (key == "beta") cfg.beta = parse_number(key, value);
    else if (key == "seed") cfg.seed = parse_u64(key, value);
    else throw ParseError("config line " + std::to_string(lineno) + ": unknown key '" + key + "'");
  }
  return cfg;
}

NetworkConfig load_config_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ParseError("config: cannot open " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return parse_config_text(ss.str());
}

}  // namespace hiercache
