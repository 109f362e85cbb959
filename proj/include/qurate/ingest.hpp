#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace qurate::ingest {

struct FrameTaxonomy {
  std::vector<std::string> frames;  // fixed order, no duplicates

  bool contains(const std::string& name) const;
  size_t index_of(const std::string& name) const;  // throws if unknown
  size_t size() const { return frames.size(); }
};

FrameTaxonomy make_taxonomy(std::vector<std::string> frames);

struct Instance {
  std::string id;
  std::string text;
  std::optional<std::string> frame;  // adjudicated label once present
  std::optional<int> year;
};

struct InstancePool {
  std::vector<Instance> items;

  size_t size() const { return items.size(); }
};

enum class Sentiment { positive, neutral, negative };

const char* to_string(Sentiment s);
Sentiment sentiment_from_string(const std::string& s);  // throws on unknown

struct SentimentExample {
  std::string id;
  std::string text;
  Sentiment sentiment;
};

struct SplitResult {
  std::vector<std::string> train;
  std::vector<std::string> test;
  double ratio = 0.0;
  uint64_t seed = 0;
};

// One record per line, fields id / text / frame (optional) / year (optional).
// Malformed lines, duplicate ids and labels outside the taxonomy abort the
// load with the line number in the error message.
InstancePool load_instances(const std::string& path,
                            const FrameTaxonomy& taxonomy);

// Keeps the first occurrence of each normalized surface form (trimmed,
// whitespace-collapsed, NFC); order otherwise preserved. Idempotent.
InstancePool dedupe(const InstancePool& pool);

// Per-class seeded shuffle, then a largest-remainder proportional cut so the
// train side totals floor(ratio * n). Deterministic in (items, ratio, seed);
// per-class streams are derived from (seed, class) so adding a class leaves
// the other classes' splits unchanged.
SplitResult stratified_split(
    const std::vector<std::pair<std::string, std::string>>& labeled_ids,
    double ratio, uint64_t seed);

std::vector<SentimentExample> load_gold_sentiment(const std::string& path);

std::map<Sentiment, size_t> sentiment_distribution(
    const std::vector<SentimentExample>& examples);

// Serialization used by the CLI stages.
std::string instance_to_json_line(const Instance& x);
std::string sentiment_to_json_line(const SentimentExample& x);
std::string split_to_json(const SplitResult& split);

}  // namespace qurate::ingest
