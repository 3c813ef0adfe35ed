#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "levyruin/model.hpp"

namespace levyruin {

// Flat dotted-key config: one `key = value` per line, `#` comments.
// Model keys: r.drift, r.sigma2, r.jump.intensity, r.jump.law,
// r.jump.params.* and the same under p.*. Everything else is an experiment
// parameter (seed, workers, out, eps, n_replicates, u, u_grid, horizon, ...).
struct ExperimentConfig {
  ModelPair model;
  std::uint64_t seed = 1;
  unsigned workers = 0;  // 0 = hardware default
  std::string out_dir = "out";
  std::string format = "json";  // json | csv (csv additionally writes tables)
  std::string config_hash;      // FNV-1a of the raw config text

  double get(const std::string& key, double def) const;
  std::uint64_t get_u64(const std::string& key, std::uint64_t def) const;
  std::vector<double> get_list(const std::string& key,
                               const std::vector<double>& def) const;
  bool has(const std::string& key) const;

  std::map<std::string, std::string> extras;  // raw non-model keys
};

ExperimentConfig parse_config_text(const std::string& text);
ExperimentConfig load_config(const std::string& path);

std::string config_hash_hex(const std::string& text);

}  // namespace levyruin
