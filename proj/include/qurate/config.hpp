#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "qurate/annotation.hpp"
#include "qurate/evaluation.hpp"
#include "qurate/qubo.hpp"
#include "qurate/reliability.hpp"
#include "qurate/softmax.hpp"

namespace qurate::cli {

struct PathsConfig {
  std::string instances = "instances.jsonl";
  std::string annotations = "annotations.jsonl";
  std::string scored = "scored.jsonl";
  std::string gold = "gold.jsonl";
  std::string out = ".";
};

struct MockConfig {
  bool enabled = false;
  double noise = 0.3;
};

struct BackendsConfig {
  annotation::BackendConfig labeler_a;
  annotation::BackendConfig labeler_b;
  annotation::BackendConfig critic;
};

struct ReliabilityConfig {
  double tau_conf = 0.7;
  int tau_rubric = 6;
  double low_cut = 0.33;
  double high_cut = 0.66;
  size_t text_len_cap = 64;
  reliability::TrainConfig train;
};

struct QuboConfig {
  double lambda_rel = 0.7;  // "lambda_conf" accepted as an alias when parsing
  double lambda_red = 0.3;
  size_t budget = 50;
  std::map<std::string, size_t> budgets;  // per-frame overrides
  size_t max_frame_size = 5000;
};

struct SweepConfig {
  std::vector<double> lambda_conf_grid = {0.0, 0.3, 0.5, 0.7, 1.0};
  std::vector<double> lambda_red_grid = {0.0, 0.3, 0.5, 0.7, 1.0};
  std::vector<uint64_t> seeds = {1, 2};
  double split_ratio = 0.8;
};

struct DemoGenConfig {
  size_t instances = 2733;
  size_t gold = 2442;
  double duplicate_rate = 0.25;
  double sentiment_noise = 0.15;
};

struct RunConfig {
  uint64_t seed = 7;
  unsigned workers = 1;
  std::vector<std::string> taxonomy;
  PathsConfig paths;
  MockConfig mock;
  BackendsConfig backends;
  ReliabilityConfig reliability;
  eval::TfidfConfig tfidf;
  QuboConfig qubo;
  qubo::AnnealSchedule anneal;  // seed field is derived per run, not config
  SweepConfig sweep;
  softmax::Config eval_train;
  DemoGenConfig demo;

  // directory the config file was loaded from; relative paths resolve here
  std::string config_dir;

  std::string resolve(const std::string& path) const;
  ingest::FrameTaxonomy frame_taxonomy() const;
};

RunConfig default_config();

// Round-trips with config_to_json: parse(serialize(c)) == c.
RunConfig parse_config_json(const std::string& text);
std::string config_to_json(const RunConfig& config);

RunConfig load_config(const std::string& path);

}  // namespace qurate::cli
