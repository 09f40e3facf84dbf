#include "cidlab/run_config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace cidlab {

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::istringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, sep)) out.push_back(trim(tok));
  return out;
}

}  // namespace

std::vector<double> parse_grid(const std::string& spec) {
  std::vector<double> out;
  if (spec.empty()) return out;
  const auto parts = split(spec, ':');
  if (parts.size() == 3) {
    const double a = std::stod(parts[0]), step = std::stod(parts[1]), b = std::stod(parts[2]);
    if (step <= 0.0) throw std::invalid_argument("grid: step must be positive");
    const long n = std::lround((b - a) / step);
    for (long i = 0; i <= n; ++i) {
      const double v = a + step * static_cast<double>(i);
      if (v > b + 0.5 * step) break;
      out.push_back(v);
    }
    return out;
  }
  for (const auto& tok : split(spec, ','))
    if (!tok.empty()) out.push_back(std::stod(tok));
  return out;
}

RunConfig parse_config(const std::string& text) {
  RunConfig cfg;
  cfg.raw_text = text;
  std::istringstream in(text);
  std::string line, section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[' && line.back() == ']') {
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("config line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string val = trim(line.substr(eq + 1));
    const std::string qual = section.empty() ? key : section + "." + key;

    if (qual == "model.variant") cfg.model.variant = val;
    else if (qual == "model.params") cfg.model.params = parse_grid(val);
    else if (qual == "model.sizes") {
      cfg.model.sizes.clear();
      for (const auto& tok : split(val, ',')) cfg.model.sizes.push_back(std::stoi(tok));
    } else if (qual == "sampler.samples") cfg.sampler.samples = std::stol(val);
    else if (qual == "sampler.chains") cfg.sampler.chains = std::stoi(val);
    else if (qual == "sampler.thermalization") cfg.sampler.thermalization = std::stol(val);
    else if (qual == "sampler.thinning") cfg.sampler.thinning = std::stol(val);
    else if (qual == "sampler.bond_pair_weight") cfg.sampler.bond_pair_weight = std::stod(val);
    else if (qual == "sampler.single_site_weight") cfg.sampler.single_site_weight = std::stod(val);
    else if (qual == "sampler.seed") cfg.sampler.seed = std::stoull(val);
    else if (qual == "estimator.baseline_file") cfg.estimator.baseline_file = val;
    else if (qual == "estimator.tol") cfg.estimator.tol = std::stod(val);
    else if (qual == "estimator.bond_cap") cfg.estimator.bond_cap = std::stoi(val);
    else if (qual == "estimator.observable") cfg.estimator.observable = val;
    else if (qual == "estimator.fe_exponent") cfg.estimator.fe_exponent = std::stod(val);
    else if (qual == "estimator.baseline_k") cfg.estimator.baseline_k = std::stoi(val);
    else if (qual == "output.dir") cfg.output.dir = val;
    else if (qual == "output.prefix") cfg.output.prefix = val;
    else if (qual == "output.threads" || qual == "threads") cfg.threads = std::stoi(val);
    else throw std::invalid_argument("config: unknown key '" + qual + "'");
  }
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::uint64_t config_hash(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace cidlab
