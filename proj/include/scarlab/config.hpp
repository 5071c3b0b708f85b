#pragma once

// Flat JSON experiment configuration. Every key is optional and falls back to
// the default below; unknown keys are rejected so typos cannot silently run
// the wrong experiment.

#include <fstream>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "scarlab/basis.hpp"
#include "scarlab/scars.hpp"

namespace scarlab {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ExperimentConfig {
  int n_sites = 14;
  std::string scar_method = "neel_overlap";  // or "entropy_outlier"
  int scar_count = 6;
  double band_fraction = 0.6;
  std::string ensemble = "canonical";  // or "microcanonical"
  double micro_window_fraction = 0.1;
  double t_max = 40.0;
  int n_points = 401;
  int pair_a = -1;  // position in the sorted scar list; -1 = central scar
  int pair_b = -1;  // -1 = same as pair_a
  std::vector<int> n_sweep = {8, 10, 12, 14};
  double factorization_gate = 0.35;
  double haar_gate_sigmas = 4.0;
  int haar_dim = 8;
  int haar_samples = 20000;
  std::vector<int> haar_typicality_dims = {2, 4, 8, 16};
  std::uint64_t seed = 20260824;
  std::string out_dir = "out";
  std::string cache_dir = "";  // empty: resolved by the CLI

  ScarOptions scar_options() const {
    ScarOptions opt;
    opt.method = scar_method == "entropy_outlier" ? ScarMethod::kEntropyOutlier
                                                  : ScarMethod::kNeelOverlap;
    opt.count = scar_count;
    opt.band_fraction = band_fraction;
    return opt;
  }
};

inline void validate_config(const ExperimentConfig& cfg) {
  if (cfg.n_sites < kMinSites || cfg.n_sites > kMaxSites)
    throw ConfigError("n_sites must lie in [" + std::to_string(kMinSites) +
                      ", " + std::to_string(kMaxSites) + "]");
  if (cfg.scar_method != "neel_overlap" && cfg.scar_method != "entropy_outlier")
    throw ConfigError("scar_method must be neel_overlap or entropy_outlier");
  if (cfg.scar_count < 1) throw ConfigError("scar_count must be positive");
  if (cfg.band_fraction <= 0.0 || cfg.band_fraction > 1.0)
    throw ConfigError("band_fraction must lie in (0, 1]");
  if (cfg.ensemble != "canonical" && cfg.ensemble != "microcanonical")
    throw ConfigError("ensemble must be canonical or microcanonical");
  if (cfg.micro_window_fraction <= 0.0 || cfg.micro_window_fraction > 1.0)
    throw ConfigError("micro_window_fraction must lie in (0, 1]");
  if (cfg.t_max <= 0.0) throw ConfigError("t_max must be positive");
  if (cfg.n_points < 2) throw ConfigError("n_points must be at least 2");
  if (cfg.n_sweep.empty()) throw ConfigError("n_sweep must not be empty");
  for (std::size_t i = 0; i + 1 < cfg.n_sweep.size(); ++i)
    if (cfg.n_sweep[i] >= cfg.n_sweep[i + 1])
      throw ConfigError("n_sweep must be strictly ascending");
  for (int n : cfg.n_sweep)
    if (n < kMinSites || n > kMaxSites)
      throw ConfigError("n_sweep entries must lie in [" +
                        std::to_string(kMinSites) + ", " +
                        std::to_string(kMaxSites) + "]");
  if (cfg.factorization_gate <= 0.0)
    throw ConfigError("factorization_gate must be positive");
  if (cfg.haar_gate_sigmas <= 0.0)
    throw ConfigError("haar_gate_sigmas must be positive");
  if (cfg.haar_dim < 2) throw ConfigError("haar_dim must be at least 2");
  if (cfg.haar_samples < 100)
    throw ConfigError("haar_samples must be at least 100");
  if (cfg.haar_typicality_dims.empty())
    throw ConfigError("haar_typicality_dims must not be empty");
  for (int d : cfg.haar_typicality_dims)
    if (d < 2) throw ConfigError("haar_typicality_dims entries must be >= 2");
}

inline ExperimentConfig config_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("config root must be a JSON object");
  static const std::set<std::string> known = {
      "n_sites",        "scar_method",       "scar_count",
      "band_fraction",  "ensemble",          "micro_window_fraction",
      "t_max",          "n_points",          "pair_a",
      "pair_b",         "n_sweep",           "factorization_gate",
      "haar_gate_sigmas", "haar_dim",        "haar_samples",
      "haar_typicality_dims", "seed",        "out_dir",
      "cache_dir"};
  for (const auto& item : j.items())
    if (!known.count(item.key()))
      throw ConfigError("unknown config key: " + item.key());

  ExperimentConfig cfg;
  try {
    cfg.n_sites = j.value("n_sites", cfg.n_sites);
    cfg.scar_method = j.value("scar_method", cfg.scar_method);
    cfg.scar_count = j.value("scar_count", cfg.scar_count);
    cfg.band_fraction = j.value("band_fraction", cfg.band_fraction);
    cfg.ensemble = j.value("ensemble", cfg.ensemble);
    cfg.micro_window_fraction =
        j.value("micro_window_fraction", cfg.micro_window_fraction);
    cfg.t_max = j.value("t_max", cfg.t_max);
    cfg.n_points = j.value("n_points", cfg.n_points);
    cfg.pair_a = j.value("pair_a", cfg.pair_a);
    cfg.pair_b = j.value("pair_b", cfg.pair_b);
    cfg.n_sweep = j.value("n_sweep", cfg.n_sweep);
    cfg.factorization_gate = j.value("factorization_gate", cfg.factorization_gate);
    cfg.haar_gate_sigmas = j.value("haar_gate_sigmas", cfg.haar_gate_sigmas);
    cfg.haar_dim = j.value("haar_dim", cfg.haar_dim);
    cfg.haar_samples = j.value("haar_samples", cfg.haar_samples);
    cfg.haar_typicality_dims =
        j.value("haar_typicality_dims", cfg.haar_typicality_dims);
    cfg.seed = j.value("seed", cfg.seed);
    cfg.out_dir = j.value("out_dir", cfg.out_dir);
    cfg.cache_dir = j.value("cache_dir", cfg.cache_dir);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config type error: ") + e.what());
  }
  validate_config(cfg);
  return cfg;
}

inline ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config parse error: ") + e.what());
  }
  return config_from_json(j);
}

}  // namespace scarlab
