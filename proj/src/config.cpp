#include "qurate/config.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace qurate::cli {

using nlohmann::json;

std::string RunConfig::resolve(const std::string& path) const {
  if (path.empty() || config_dir.empty()) return path;
  std::filesystem::path p(path);
  if (p.is_absolute()) return path;
  return (std::filesystem::path(config_dir) / p).string();
}

ingest::FrameTaxonomy RunConfig::frame_taxonomy() const {
  return ingest::make_taxonomy(taxonomy);
}

RunConfig default_config() {
  RunConfig c;
  c.taxonomy = {"Identity/Group",       "Moral/Religious",
                "Uncertain",            "Public Health/Safety",
                "Rights/Justice",       "Economic/Cost-Benefit",
                "Security/Threat"};
  c.mock.enabled = true;
  c.backends.labeler_a.endpoint = "http://localhost:8000/v1";
  c.backends.labeler_a.model_name = "labeler-a";
  c.backends.labeler_b.endpoint = "http://localhost:8001/v1";
  c.backends.labeler_b.model_name = "labeler-b";
  c.backends.critic.endpoint = "http://localhost:8002/v1";
  c.backends.critic.model_name = "critic";
  return c;
}

namespace {

template <typename T>
void read_if(const json& j, const char* key, T& out) {
  if (j.contains(key) && !j[key].is_null()) out = j[key].get<T>();
}

json backend_to_json(const annotation::BackendConfig& b) {
  return json{{"endpoint", b.endpoint},
              {"model", b.model_name},
              {"prompt_template", b.prompt_template},
              {"temperature", b.temperature},
              {"max_tokens", b.max_tokens},
              {"timeout_ms", b.timeout_ms},
              {"retries", b.retries},
              {"backoff_ms", b.backoff_ms}};
}

void backend_from_json(const json& j, annotation::BackendConfig& b) {
  read_if(j, "endpoint", b.endpoint);
  read_if(j, "model", b.model_name);
  read_if(j, "prompt_template", b.prompt_template);
  read_if(j, "temperature", b.temperature);
  read_if(j, "max_tokens", b.max_tokens);
  read_if(j, "timeout_ms", b.timeout_ms);
  read_if(j, "retries", b.retries);
  read_if(j, "backoff_ms", b.backoff_ms);
  if (b.timeout_ms <= 0)
    throw std::invalid_argument("backend timeout_ms must be > 0");
  if (b.retries < 0)
    throw std::invalid_argument("backend retries must be >= 0");
}

}  // namespace

RunConfig parse_config_json(const std::string& text) {
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded() || !j.is_object())
    throw std::invalid_argument("config is not a JSON object");

  RunConfig c = default_config();
  read_if(j, "seed", c.seed);
  read_if(j, "workers", c.workers);
  read_if(j, "taxonomy", c.taxonomy);
  if (c.workers == 0) c.workers = 1;

  if (j.contains("paths")) {
    const json& p = j["paths"];
    read_if(p, "instances", c.paths.instances);
    read_if(p, "annotations", c.paths.annotations);
    read_if(p, "scored", c.paths.scored);
    read_if(p, "gold", c.paths.gold);
    read_if(p, "out", c.paths.out);
  }
  if (j.contains("mock")) {
    const json& m = j["mock"];
    read_if(m, "enabled", c.mock.enabled);
    read_if(m, "noise", c.mock.noise);
  }
  if (j.contains("backends")) {
    const json& b = j["backends"];
    if (b.contains("labeler_a"))
      backend_from_json(b["labeler_a"], c.backends.labeler_a);
    if (b.contains("labeler_b"))
      backend_from_json(b["labeler_b"], c.backends.labeler_b);
    if (b.contains("critic")) backend_from_json(b["critic"], c.backends.critic);
  }
  if (j.contains("reliability")) {
    const json& r = j["reliability"];
    read_if(r, "tau_conf", c.reliability.tau_conf);
    read_if(r, "tau_rubric", c.reliability.tau_rubric);
    read_if(r, "low_cut", c.reliability.low_cut);
    read_if(r, "high_cut", c.reliability.high_cut);
    read_if(r, "text_len_cap", c.reliability.text_len_cap);
    read_if(r, "learning_rate", c.reliability.train.learning_rate);
    read_if(r, "l2", c.reliability.train.l2);
    read_if(r, "max_epochs", c.reliability.train.max_epochs);
    read_if(r, "tolerance", c.reliability.train.tolerance);
  }
  if (j.contains("tfidf")) {
    const json& t = j["tfidf"];
    read_if(t, "min_df", c.tfidf.min_df);
    read_if(t, "max_features", c.tfidf.max_features);
  }
  if (j.contains("qubo")) {
    const json& q = j["qubo"];
    if (q.contains("lambda_rel") && q.contains("lambda_conf") &&
        q["lambda_rel"].get<double>() != q["lambda_conf"].get<double>()) {
      throw std::invalid_argument(
          "config sets both lambda_rel and its alias lambda_conf to "
          "different values");
    }
    read_if(q, "lambda_rel", c.qubo.lambda_rel);
    read_if(q, "lambda_conf", c.qubo.lambda_rel);
    read_if(q, "lambda_red", c.qubo.lambda_red);
    read_if(q, "budget", c.qubo.budget);
    read_if(q, "max_frame_size", c.qubo.max_frame_size);
    if (q.contains("budgets")) {
      c.qubo.budgets.clear();
      for (auto it = q["budgets"].begin(); it != q["budgets"].end(); ++it) {
        c.qubo.budgets[it.key()] = it.value().get<size_t>();
      }
    }
    if (c.qubo.lambda_rel < 0.0 || c.qubo.lambda_red < 0.0)
      throw std::invalid_argument("qubo lambda weights must be >= 0");
  }
  if (j.contains("anneal")) {
    const json& a = j["anneal"];
    read_if(a, "initial_temperature", c.anneal.initial_temperature);
    read_if(a, "cooling_factor", c.anneal.cooling_factor);
    read_if(a, "iterations", c.anneal.iterations);
    read_if(a, "log_stride", c.anneal.log_stride);
    if (c.anneal.initial_temperature <= 0.0)
      throw std::invalid_argument("anneal initial_temperature must be > 0");
    if (c.anneal.cooling_factor <= 0.0 || c.anneal.cooling_factor >= 1.0)
      throw std::invalid_argument("anneal cooling_factor must be in (0,1)");
  }
  if (j.contains("sweep")) {
    const json& s = j["sweep"];
    read_if(s, "lambda_conf_grid", c.sweep.lambda_conf_grid);
    read_if(s, "lambda_red_grid", c.sweep.lambda_red_grid);
    read_if(s, "seeds", c.sweep.seeds);
    read_if(s, "split_ratio", c.sweep.split_ratio);
  }
  if (j.contains("eval")) {
    const json& e = j["eval"];
    read_if(e, "learning_rate", c.eval_train.learning_rate);
    read_if(e, "l2", c.eval_train.l2);
    read_if(e, "max_epochs", c.eval_train.max_epochs);
    read_if(e, "tolerance", c.eval_train.tolerance);
  }
  if (j.contains("demo")) {
    const json& d = j["demo"];
    read_if(d, "instances", c.demo.instances);
    read_if(d, "gold", c.demo.gold);
    read_if(d, "duplicate_rate", c.demo.duplicate_rate);
    read_if(d, "sentiment_noise", c.demo.sentiment_noise);
  }

  ingest::make_taxonomy(c.taxonomy);  // validates names
  return c;
}

std::string config_to_json(const RunConfig& c) {
  json j;
  j["seed"] = c.seed;
  j["workers"] = c.workers;
  j["taxonomy"] = c.taxonomy;
  j["paths"] = {{"instances", c.paths.instances},
                {"annotations", c.paths.annotations},
                {"scored", c.paths.scored},
                {"gold", c.paths.gold},
                {"out", c.paths.out}};
  j["mock"] = {{"enabled", c.mock.enabled}, {"noise", c.mock.noise}};
  j["backends"] = {{"labeler_a", backend_to_json(c.backends.labeler_a)},
                   {"labeler_b", backend_to_json(c.backends.labeler_b)},
                   {"critic", backend_to_json(c.backends.critic)}};
  j["reliability"] = {{"tau_conf", c.reliability.tau_conf},
                      {"tau_rubric", c.reliability.tau_rubric},
                      {"low_cut", c.reliability.low_cut},
                      {"high_cut", c.reliability.high_cut},
                      {"text_len_cap", c.reliability.text_len_cap},
                      {"learning_rate", c.reliability.train.learning_rate},
                      {"l2", c.reliability.train.l2},
                      {"max_epochs", c.reliability.train.max_epochs},
                      {"tolerance", c.reliability.train.tolerance}};
  j["tfidf"] = {{"min_df", c.tfidf.min_df},
                {"max_features", c.tfidf.max_features}};
  json budgets = json::object();
  for (const auto& [frame, k] : c.qubo.budgets) budgets[frame] = k;
  j["qubo"] = {{"lambda_rel", c.qubo.lambda_rel},
               {"lambda_red", c.qubo.lambda_red},
               {"budget", c.qubo.budget},
               {"budgets", budgets},
               {"max_frame_size", c.qubo.max_frame_size}};
  j["anneal"] = {{"initial_temperature", c.anneal.initial_temperature},
                 {"cooling_factor", c.anneal.cooling_factor},
                 {"iterations", c.anneal.iterations},
                 {"log_stride", c.anneal.log_stride}};
  j["sweep"] = {{"lambda_conf_grid", c.sweep.lambda_conf_grid},
                {"lambda_red_grid", c.sweep.lambda_red_grid},
                {"seeds", c.sweep.seeds},
                {"split_ratio", c.sweep.split_ratio}};
  j["eval"] = {{"learning_rate", c.eval_train.learning_rate},
               {"l2", c.eval_train.l2},
               {"max_epochs", c.eval_train.max_epochs},
               {"tolerance", c.eval_train.tolerance}};
  j["demo"] = {{"instances", c.demo.instances},
               {"gold", c.demo.gold},
               {"duplicate_rate", c.demo.duplicate_rate},
               {"sentiment_noise", c.demo.sentiment_noise}};
  return j.dump(2) + "\n";
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  RunConfig c = parse_config_json(buf.str());
  c.config_dir = std::filesystem::path(path).parent_path().string();
  return c;
}

}  // namespace qurate::cli
