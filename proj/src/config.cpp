#include "levyruin/config.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <set>
#include <sstream>

#include "levyruin/errors.hpp"

namespace levyruin {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

double parse_number(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const double x = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument("trailing characters");
    return x;
  } catch (const std::exception&) {
    throw ConfigError("value '" + v + "' for key '" + key + "' is not a number", key);
  }
}

std::vector<double> parse_list(const std::string& key, const std::string& v) {
  std::vector<double> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) continue;
    out.push_back(parse_number(key, item));
  }
  if (out.empty()) throw ConfigError("empty list for key '" + key + "'", key);
  return out;
}

const std::set<std::string> kTripletKeys = {"drift", "sigma2", "jump.intensity",
                                            "jump.law"};
const std::set<std::string> kLawParamKeys = {"rate", "mu", "s", "alpha", "x_min",
                                             "values", "probs"};
const std::set<std::string> kExperimentKeys = {
    "seed",   "workers",      "out",   "format",   "eps",  "n_replicates",
    "u",      "u_grid",       "q_grid", "horizon",  "grid_step", "method",
    "p",      "n_paths",      "n_steps", "n_max",   "n"};

JumpLaw build_law(const std::string& prefix, const std::string& name,
                  const std::map<std::string, std::string>& params,
                  std::set<std::string>* used) {
  auto need = [&](const std::string& p) -> std::string {
    auto it = params.find(p);
    if (it == params.end())
      throw ConfigError("missing '" + prefix + ".jump.params." + p + "' for law '" +
                            name + "'",
                        prefix + ".jump.params." + p);
    used->insert(p);
    return it->second;
  };
  const std::string base = prefix + ".jump.params.";
  if (name == "none") return JumpLaw{};
  if (name == "exponential")
    return JumpLaw{ExponentialPositive{parse_number(base + "rate", need("rate"))}};
  if (name == "lognormal")
    return JumpLaw{ShiftedLognormal{parse_number(base + "mu", need("mu")),
                                    parse_number(base + "s", need("s"))}};
  if (name == "pareto")
    return JumpLaw{ParetoPositive{parse_number(base + "alpha", need("alpha")),
                                  parse_number(base + "x_min", need("x_min"))}};
  if (name == "atoms") {
    DiscreteAtoms a;
    a.values = parse_list(base + "values", need("values"));
    a.probs = parse_list(base + "probs", need("probs"));
    return JumpLaw{a};
  }
  throw ConfigError("unknown jump law '" + name + "'", prefix + ".jump.law");
}

LevyTriplet build_triplet(const std::string& prefix,
                          const std::map<std::string, std::string>& kv) {
  LevyTriplet t;
  std::map<std::string, std::string> law_params;
  std::string law_name = "none";
  for (const auto& [k, v] : kv) {
    if (k == "drift") t.drift = parse_number(prefix + "." + k, v);
    else if (k == "sigma2") t.diffusion_var = parse_number(prefix + "." + k, v);
    else if (k == "jump.intensity") t.jump_intensity = parse_number(prefix + "." + k, v);
    else if (k == "jump.law") law_name = v;
    else if (k.rfind("jump.params.", 0) == 0) law_params[k.substr(12)] = v;
    else throw ConfigError("unknown key '" + prefix + "." + k + "'", prefix + "." + k);
  }
  for (const auto& [k, v] : law_params) {
    (void)v;
    if (kLawParamKeys.find(k) == kLawParamKeys.end())
      throw ConfigError("unknown key '" + prefix + ".jump.params." + k + "'",
                        prefix + ".jump.params." + k);
  }
  std::set<std::string> used;
  t.jump_law = build_law(prefix, law_name, law_params, &used);
  return t;
}

}  // namespace

std::string config_hash_hex(const std::string& text) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  std::ostringstream oss;
  oss << std::hex << h;
  return oss.str();
}

ExperimentConfig parse_config_text(const std::string& text) {
  ExperimentConfig cfg;
  cfg.config_hash = config_hash_hex(text);

  std::map<std::string, std::string> r_kv, p_kv;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(line_no) + " is not 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string val = trim(line.substr(eq + 1));
    if (key.empty() || val.empty())
      throw ConfigError("line " + std::to_string(line_no) + " has an empty key or value",
                        key);
    if (key.rfind("r.", 0) == 0) {
      r_kv[key.substr(2)] = val;
    } else if (key.rfind("p.", 0) == 0) {
      p_kv[key.substr(2)] = val;
    } else if (kExperimentKeys.count(key)) {
      if (key == "seed") cfg.seed = static_cast<std::uint64_t>(parse_number(key, val));
      else if (key == "workers")
        cfg.workers = static_cast<unsigned>(parse_number(key, val));
      else if (key == "out") cfg.out_dir = val;
      else if (key == "format") {
        if (val != "json" && val != "csv")
          throw ConfigError("format must be 'json' or 'csv'", key);
        cfg.format = val;
      } else {
        cfg.extras[key] = val;
      }
    } else {
      throw ConfigError("unknown key '" + key + "'", key);
    }
  }
  cfg.model.r = build_triplet("r", r_kv);
  cfg.model.p = build_triplet("p", p_kv);
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open config file '" + path + "'");
  std::ostringstream buf;
  buf << f.rdbuf();
  return parse_config_text(buf.str());
}

double ExperimentConfig::get(const std::string& key, double def) const {
  auto it = extras.find(key);
  if (it == extras.end()) return def;
  return parse_number(key, it->second);
}

std::uint64_t ExperimentConfig::get_u64(const std::string& key, std::uint64_t def) const {
  auto it = extras.find(key);
  if (it == extras.end()) return def;
  return static_cast<std::uint64_t>(parse_number(key, it->second));
}

std::vector<double> ExperimentConfig::get_list(const std::string& key,
                                               const std::vector<double>& def) const {
  auto it = extras.find(key);
  if (it == extras.end()) return def;
  return parse_list(key, it->second);
}

bool ExperimentConfig::has(const std::string& key) const {
  return extras.find(key) != extras.end();
}

}  // namespace levyruin
