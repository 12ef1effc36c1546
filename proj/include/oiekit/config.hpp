#pragma once

#include <cstdint>
#include <istream>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

namespace oiekit::cli {

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Pipeline-wide knobs plus default input paths. Command-line flags override
// anything loaded from a config file. All randomness derives from the single
// seed via rng::derive_seed with the purposes "select" (target-parse
// sampling, keyed by record id), "cluster-init", "train-sample", and "mask"
// (keyed by record id and tuple index).
struct PipelineConfig {
  std::uint64_t seed = 0;
  double tau = 0.7;
  int k_paraphrases = 5;
  int m_sources = 2;
  int prune_height = 3;
  double alpha = 0.9;
  double mask_rate = 0.15;
  int cluster_k = 5;
  int cluster_max_iter = 300;
  int train_sample = 300;

  std::string corpus_path;
  std::string paraphrases_path;
  std::vector<std::string> embedding_paths;
  std::string parse_pairs_path;
  std::string gold_path;
  std::string pred_path;
  std::string train_corpus_path;
  std::string lemmas_path;

  void validate() const {
    if (tau < 0.0) throw ConfigError("tau must be >= 0");
    if (k_paraphrases < 1) throw ConfigError("k must be >= 1");
    if (m_sources < 1) throw ConfigError("m must be >= 1");
    if (prune_height < 1) throw ConfigError("height must be >= 1");
    if (alpha <= 0.0 || alpha > 1.0) throw ConfigError("alpha must be in (0, 1]");
    if (mask_rate < 0.0 || mask_rate > 1.0) throw ConfigError("mask-rate must be in [0, 1]");
    if (cluster_k < 1) throw ConfigError("clusters must be >= 1");
    if (cluster_max_iter < 1) throw ConfigError("max-iter must be >= 1");
    if (train_sample < 1) throw ConfigError("train-sample must be >= 1");
  }
};

inline PipelineConfig load_config(std::istream& in) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("invalid config JSON: ") + e.what());
  }
  PipelineConfig cfg;
  auto get = [&](const char* key, auto& field) {
    if (j.contains(key)) {
      try {
        field = j[key].get<std::decay_t<decltype(field)>>();
      } catch (const nlohmann::json::exception&) {
        throw ConfigError(std::string("config field '") + key + "' has the wrong type");
      }
    }
  };
  get("seed", cfg.seed);
  get("tau", cfg.tau);
  get("k", cfg.k_paraphrases);
  get("m", cfg.m_sources);
  get("height", cfg.prune_height);
  get("alpha", cfg.alpha);
  get("mask_rate", cfg.mask_rate);
  get("clusters", cfg.cluster_k);
  get("max_iter", cfg.cluster_max_iter);
  get("train_sample", cfg.train_sample);
  get("corpus", cfg.corpus_path);
  get("paraphrases", cfg.paraphrases_path);
  get("embeddings", cfg.embedding_paths);
  get("parse_pairs", cfg.parse_pairs_path);
  get("gold", cfg.gold_path);
  get("pred", cfg.pred_path);
  get("train_corpus", cfg.train_corpus_path);
  get("lemmas", cfg.lemmas_path);
  return cfg;
}

}  // namespace oiekit::cli
