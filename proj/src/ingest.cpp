#include "qurate/ingest.hpp"

#include <algorithm>
#include <fstream>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

#include <json.hpp>

#include "qurate/rng.hpp"
#include "qurate/text_norm.hpp"

namespace qurate::ingest {

using nlohmann::json;

bool FrameTaxonomy::contains(const std::string& name) const {
  return std::find(frames.begin(), frames.end(), name) != frames.end();
}

size_t FrameTaxonomy::index_of(const std::string& name) const {
  auto it = std::find(frames.begin(), frames.end(), name);
  if (it == frames.end())
    throw std::invalid_argument("unknown frame: " + name);
  return static_cast<size_t>(it - frames.begin());
}

FrameTaxonomy make_taxonomy(std::vector<std::string> frames) {
  std::unordered_set<std::string> seen;
  for (const auto& f : frames) {
    if (f.empty()) throw std::invalid_argument("empty frame name");
    if (!seen.insert(f).second)
      throw std::invalid_argument("duplicate frame name: " + f);
  }
  return FrameTaxonomy{std::move(frames)};
}

const char* to_string(Sentiment s) {
  switch (s) {
    case Sentiment::positive: return "positive";
    case Sentiment::neutral: return "neutral";
    case Sentiment::negative: return "negative";
  }
  throw std::logic_error("bad sentiment value");
}

Sentiment sentiment_from_string(const std::string& s) {
  if (s == "positive") return Sentiment::positive;
  if (s == "neutral") return Sentiment::neutral;
  if (s == "negative") return Sentiment::negative;
  throw std::invalid_argument("unknown sentiment: \"" + s + "\"");
}

namespace {

std::string trimmed(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

json parse_line(const std::string& line, const std::string& path,
                size_t line_no) {
  json j = json::parse(line, nullptr, false);
  if (j.is_discarded() || !j.is_object()) {
    throw std::runtime_error(path + ":" + std::to_string(line_no) +
                             ": malformed record");
  }
  return j;
}

}  // namespace

InstancePool load_instances(const std::string& path,
                            const FrameTaxonomy& taxonomy) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open instance file: " + path);
  InstancePool pool;
  std::unordered_set<std::string> ids;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trimmed(line).empty()) continue;
    json j = parse_line(line, path, line_no);
    Instance x;
    try {
      if (!j.contains("id") || !j["id"].is_string() ||
          !j.contains("text") || !j["text"].is_string()) {
        throw std::runtime_error("record needs string fields id and text");
      }
      x.id = j["id"].get<std::string>();
      x.text = j["text"].get<std::string>();
      if (x.id.empty()) throw std::runtime_error("empty id");
      if (trimmed(x.text).empty())
        throw std::runtime_error("empty text for id " + x.id);
      if (!ids.insert(x.id).second)
        throw std::runtime_error("duplicate id " + x.id);
      if (j.contains("frame") && !j["frame"].is_null()) {
        std::string frame = j["frame"].get<std::string>();
        if (!taxonomy.contains(frame)) {
          throw std::runtime_error("frame \"" + frame +
                                   "\" is not in the taxonomy");
        }
        x.frame = frame;
      }
      if (j.contains("year") && !j["year"].is_null()) {
        x.year = j["year"].get<int>();
      }
    } catch (const std::exception& e) {
      throw std::runtime_error(path + ":" + std::to_string(line_no) + ": " +
                               e.what());
    }
    pool.items.push_back(std::move(x));
  }
  return pool;
}

InstancePool dedupe(const InstancePool& pool) {
  InstancePool out;
  std::unordered_set<std::string> seen;
  for (const auto& x : pool.items) {
    if (seen.insert(normalize_surface(x.text)).second) {
      out.items.push_back(x);
    }
  }
  return out;
}

SplitResult stratified_split(
    const std::vector<std::pair<std::string, std::string>>& labeled_ids,
    double ratio, uint64_t seed) {
  if (labeled_ids.empty())
    throw std::invalid_argument("stratified_split: empty input");
  if (!(ratio > 0.0 && ratio < 1.0))
    throw std::invalid_argument("stratified_split: ratio must be in (0,1)");

  // classes in first-appearance order
  std::vector<std::string> classes;
  std::unordered_map<std::string, std::vector<std::string>> by_class;
  for (const auto& [id, label] : labeled_ids) {
    auto [it, inserted] = by_class.try_emplace(label);
    if (inserted) classes.push_back(label);
    it->second.push_back(id);
  }

  const size_t total = labeled_ids.size();
  const size_t train_target = static_cast<size_t>(ratio * double(total));

  struct ClassCut {
    std::string name;
    size_t base;
    double remainder;
  };
  std::vector<ClassCut> cuts;
  size_t base_total = 0;
  for (const auto& name : classes) {
    double exact = ratio * double(by_class[name].size());
    size_t base = static_cast<size_t>(exact);
    cuts.push_back({name, base, exact - double(base)});
    base_total += base;
  }
  size_t leftover = train_target > base_total ? train_target - base_total : 0;

  // largest remainder first; ties by class name so the bump is reproducible
  std::vector<size_t> order(cuts.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](size_t a, size_t b) {
    if (cuts[a].remainder != cuts[b].remainder)
      return cuts[a].remainder > cuts[b].remainder;
    return cuts[a].name < cuts[b].name;
  });
  for (size_t i = 0; i < order.size() && leftover > 0; ++i) {
    if (cuts[order[i]].remainder <= 0.0) continue;
    ++cuts[order[i]].base;
    --leftover;
  }

  SplitResult result;
  result.ratio = ratio;
  result.seed = seed;
  for (size_t c = 0; c < classes.size(); ++c) {
    auto& members = by_class[classes[c]];
    Rng rng(derive_seed(seed, classes[c]));
    rng.shuffle(members);
    size_t cut = std::min(cuts[c].base, members.size());
    for (size_t i = 0; i < members.size(); ++i) {
      (i < cut ? result.train : result.test).push_back(members[i]);
    }
  }
  return result;
}

std::vector<SentimentExample> load_gold_sentiment(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open sentiment file: " + path);
  std::vector<SentimentExample> out;
  std::unordered_set<std::string> ids;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trimmed(line).empty()) continue;
    json j = parse_line(line, path, line_no);
    SentimentExample x;
    if (!j.contains("id") || !j.contains("text") || !j.contains("sentiment")) {
      throw std::runtime_error(path + ":" + std::to_string(line_no) +
                               ": record needs id, text, sentiment");
    }
    x.id = j["id"].get<std::string>();
    x.text = j["text"].get<std::string>();
    try {
      x.sentiment = sentiment_from_string(j["sentiment"].get<std::string>());
    } catch (const std::invalid_argument& e) {
      throw std::runtime_error(path + ":" + std::to_string(line_no) + ": " +
                               e.what());
    }
    if (!ids.insert(x.id).second)
      throw std::runtime_error(path + ":" + std::to_string(line_no) +
                               ": duplicate id " + x.id);
    out.push_back(std::move(x));
  }
  return out;
}

std::map<Sentiment, size_t> sentiment_distribution(
    const std::vector<SentimentExample>& examples) {
  std::map<Sentiment, size_t> counts;
  for (const auto& x : examples) ++counts[x.sentiment];
  return counts;
}

std::string instance_to_json_line(const Instance& x) {
  json j;
  j["id"] = x.id;
  j["text"] = x.text;
  if (x.frame) j["frame"] = *x.frame;
  if (x.year) j["year"] = *x.year;
  return j.dump();
}

std::string sentiment_to_json_line(const SentimentExample& x) {
  json j;
  j["id"] = x.id;
  j["text"] = x.text;
  j["sentiment"] = to_string(x.sentiment);
  return j.dump();
}

std::string split_to_json(const SplitResult& split) {
  json j;
  j["ratio"] = split.ratio;
  j["seed"] = split.seed;
  j["train"] = split.train;
  j["test"] = split.test;
  return j.dump(2);
}

}  // namespace qurate::ingest
