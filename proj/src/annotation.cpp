#include "qurate/annotation.hpp"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <map>
#include <sstream>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "qurate/parallel.hpp"
#include "qurate/util.hpp"

namespace qurate::annotation {

using nlohmann::json;

const char* kDefaultLabelerTemplate =
    "You assign exactly one frame from the given taxonomy to the statement "
    "and justify it with evidence from the text. Reply with a block "
    "delimited by <<< and >>> containing the lines `label:`, `confidence:` "
    "(a number between 0 and 1) and `evidence:`.";

const char* kDefaultCriticTemplate =
    "You adjudicate between two candidate frame labels for the statement. "
    "Pick the better-supported candidate and rate the winning justification "
    "on four criteria, each 0, 1 or 2. Reply with a block delimited by <<< "
    "and >>> containing the lines `final_label:`, `evidence_quality:`, "
    "`taxonomy_fit:`, `internal_coherence:` and "
    "`justification_sufficiency:`.";

int score_rubric(const RubricScores& r) {
  for (int v : {r.evidence_quality, r.taxonomy_fit, r.internal_coherence,
                r.justification_sufficiency}) {
    if (v < 0 || v > 2)
      throw std::invalid_argument("rubric criterion outside {0,1,2}");
  }
  return r.evidence_quality + r.taxonomy_fit + r.internal_coherence +
         r.justification_sufficiency;
}

namespace {

struct ParsedEndpoint {
  std::string origin;       // scheme://host:port
  std::string path_prefix;  // may be empty
};

ParsedEndpoint parse_endpoint(const std::string& endpoint) {
  auto scheme_end = endpoint.find("://");
  if (scheme_end == std::string::npos)
    throw std::invalid_argument("endpoint needs a scheme: " + endpoint);
  auto path_start = endpoint.find('/', scheme_end + 3);
  if (path_start == std::string::npos) return {endpoint, ""};
  std::string prefix = endpoint.substr(path_start);
  while (!prefix.empty() && prefix.back() == '/') prefix.pop_back();
  return {endpoint.substr(0, path_start), prefix};
}

}  // namespace

ChatResult chat_complete(const BackendConfig& config,
                         const std::vector<ChatMessage>& messages) {
  ParsedEndpoint ep = parse_endpoint(config.endpoint);
  json body;
  body["model"] = config.model_name;
  body["temperature"] = config.temperature;
  body["max_tokens"] = config.max_tokens;
  body["messages"] = json::array();
  for (const auto& m : messages) {
    body["messages"].push_back({{"role", m.role}, {"content", m.content}});
  }
  const std::string payload = body.dump();
  const std::string path = ep.path_prefix + "/chat/completions";

  std::string last_error;
  for (int attempt = 0; attempt <= config.retries; ++attempt) {
    if (attempt > 0) {
      auto delay = std::chrono::milliseconds(
          static_cast<long long>(config.backoff_ms) << (attempt - 1));
      std::this_thread::sleep_for(delay);
    }
    httplib::Client client(ep.origin);
    client.set_connection_timeout(0, config.timeout_ms * 1000LL);
    client.set_read_timeout(0, config.timeout_ms * 1000LL);
    client.set_write_timeout(0, config.timeout_ms * 1000LL);
    auto res = client.Post(path, payload, "application/json");
    if (!res) {
      last_error = "transport failure (" + httplib::to_string(res.error()) +
                   ")";
      continue;
    }
    if (res->status >= 500) {
      last_error = "server status " + std::to_string(res->status);
      continue;
    }
    if (res->status != 200) {
      throw std::runtime_error("chat completion failed with status " +
                               std::to_string(res->status) + " from " +
                               config.endpoint);
    }
    json reply = json::parse(res->body, nullptr, false);
    if (reply.is_discarded() || !reply.contains("choices") ||
        reply["choices"].empty()) {
      throw std::runtime_error("malformed completion body from " +
                               config.endpoint);
    }
    std::string text =
        reply["choices"][0]["message"]["content"].get<std::string>();
    if (text.empty())
      throw std::runtime_error("empty completion from " + config.endpoint);
    return ChatResult{std::move(text), attempt + 1};
  }
  throw std::runtime_error("chat completion failed after " +
                           std::to_string(config.retries + 1) + " attempts: " +
                           last_error);
}

namespace {

// Key/value lines between the first <<< and the following >>>.
std::map<std::string, std::string> parse_block(const std::string& raw) {
  std::istringstream in(raw);
  std::string line;
  bool inside = false;
  std::map<std::string, std::string> fields;
  auto trim = [](std::string s) {
    size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return std::string();
    size_t b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
  };
  while (std::getline(in, line)) {
    std::string t = trim(line);
    if (!inside) {
      if (t == "<<<") inside = true;
      continue;
    }
    if (t == ">>>") break;
    auto colon = t.find(':');
    if (colon == std::string::npos) continue;
    std::string key = trim(t.substr(0, colon));
    std::string value = trim(t.substr(colon + 1));
    if (!key.empty()) fields[key] = value;
  }
  if (!inside) throw ParseError("no <<< ... >>> block in completion");
  return fields;
}

const std::string& require_field(
    const std::map<std::string, std::string>& fields, const char* key) {
  auto it = fields.find(key);
  if (it == fields.end() || it->second.empty())
    throw ParseError(std::string("missing field in completion: ") + key);
  return it->second;
}

double parse_numeric(const std::string& s, const char* key) {
  size_t pos = 0;
  double v;
  try {
    v = std::stod(s, &pos);
  } catch (const std::exception&) {
    throw ParseError(std::string(key) + " is not a numeric literal: \"" + s +
                     "\"");
  }
  while (pos < s.size() && (s[pos] == ' ' || s[pos] == '\t')) ++pos;
  if (pos != s.size())
    throw ParseError(std::string(key) + " is not a numeric literal: \"" + s +
                     "\"");
  return v;
}

int parse_rubric_value(const std::map<std::string, std::string>& fields,
                       const char* key) {
  double v = parse_numeric(require_field(fields, key), key);
  int iv = static_cast<int>(v);
  if (double(iv) != v || iv < 0 || iv > 2)
    throw ParseError(std::string(key) + " must be 0, 1 or 2");
  return iv;
}

}  // namespace

LabelerParse parse_labeler_output(const std::string& raw,
                                  const ingest::FrameTaxonomy& taxonomy) {
  auto fields = parse_block(raw);
  LabelerParse result;
  result.output.label = require_field(fields, "label");
  if (!taxonomy.contains(result.output.label))
    throw ParseError("label outside taxonomy: \"" + result.output.label +
                     "\"");
  double conf = parse_numeric(require_field(fields, "confidence"),
                              "confidence");
  if (conf < 0.0 || conf > 1.0) {
    result.confidence_clamped = true;
    conf = std::clamp(conf, 0.0, 1.0);
  }
  result.output.confidence = conf;
  result.output.evidence = require_field(fields, "evidence");
  return result;
}

CriticAdjudication parse_critic_output(const std::string& raw,
                                       const ingest::FrameTaxonomy& taxonomy) {
  auto fields = parse_block(raw);
  CriticAdjudication out;
  out.final_label = require_field(fields, "final_label");
  if (!taxonomy.contains(out.final_label))
    throw ParseError("final_label outside taxonomy: \"" + out.final_label +
                     "\"");
  out.rubric.evidence_quality = parse_rubric_value(fields, "evidence_quality");
  out.rubric.taxonomy_fit = parse_rubric_value(fields, "taxonomy_fit");
  out.rubric.internal_coherence =
      parse_rubric_value(fields, "internal_coherence");
  out.rubric.justification_sufficiency =
      parse_rubric_value(fields, "justification_sufficiency");
  out.score = score_rubric(out.rubric);
  return out;
}

namespace {

std::string join_frames(const ingest::FrameTaxonomy& taxonomy) {
  std::string out;
  for (size_t i = 0; i < taxonomy.frames.size(); ++i) {
    if (i) out += " | ";
    out += taxonomy.frames[i];
  }
  return out;
}

}  // namespace

std::string render_labeler_prompt(const ingest::Instance& x,
                                  const ingest::FrameTaxonomy& taxonomy) {
  std::string out;
  out += "taxonomy: " + join_frames(taxonomy) + "\n";
  out += "instance-id: " + x.id + "\n";
  out += "text: " + x.text + "\n";
  return out;
}

std::string render_critic_prompt(const ingest::Instance& x,
                                 const ingest::FrameTaxonomy& taxonomy,
                                 const LabelerOutput& a,
                                 const LabelerOutput& b) {
  std::string out;
  out += "taxonomy: " + join_frames(taxonomy) + "\n";
  out += "instance-id: " + x.id + "\n";
  out += "text: " + x.text + "\n";
  out += "candidate_a_label: " + a.label + "\n";
  out += "candidate_a_confidence: " + fmt_double(a.confidence) + "\n";
  out += "candidate_a_evidence: " + a.evidence + "\n";
  out += "candidate_b_label: " + b.label + "\n";
  out += "candidate_b_confidence: " + fmt_double(b.confidence) + "\n";
  out += "candidate_b_evidence: " + b.evidence + "\n";
  return out;
}

AnnotationRecord annotate_instance(const ingest::Instance& x,
                                   ChatBackend& labeler_a,
                                   ChatBackend& labeler_b,
                                   ChatBackend& critic,
                                   const ingest::FrameTaxonomy& taxonomy,
                                   const std::string& system_a,
                                   const std::string& system_b,
                                   const std::string& system_critic) {
  const std::string user_prompt = render_labeler_prompt(x, taxonomy);
  LabelerParse a = parse_labeler_output(
      labeler_a.complete({{"system", system_a}, {"user", user_prompt}}),
      taxonomy);
  LabelerParse b = parse_labeler_output(
      labeler_b.complete({{"system", system_b}, {"user", user_prompt}}),
      taxonomy);
  CriticAdjudication adjudication = parse_critic_output(
      critic.complete(
          {{"system", system_critic},
           {"user", render_critic_prompt(x, taxonomy, a.output, b.output)}}),
      taxonomy);
  return AnnotationRecord{x.id, a.output, b.output, adjudication};
}

AnnotationRun annotate_pool(const std::vector<ingest::Instance>& instances,
                            ChatBackend& labeler_a, ChatBackend& labeler_b,
                            ChatBackend& critic,
                            const ingest::FrameTaxonomy& taxonomy,
                            const std::string& system_a,
                            const std::string& system_b,
                            const std::string& system_critic,
                            unsigned workers) {
  std::vector<std::optional<AnnotationRecord>> slots(instances.size());
  std::vector<std::optional<SkippedInstance>> failures(instances.size());
  parallel_for(instances.size(), workers, [&](size_t i) {
    try {
      slots[i] = annotate_instance(instances[i], labeler_a, labeler_b, critic,
                                   taxonomy, system_a, system_b,
                                   system_critic);
    } catch (const std::exception& e) {
      failures[i] = SkippedInstance{instances[i].id, e.what()};
    }
  });
  AnnotationRun run;
  for (auto& slot : slots) {
    if (slot) run.records.push_back(std::move(*slot));
  }
  for (auto& failure : failures) {
    if (failure) run.skipped.push_back(std::move(*failure));
  }
  std::sort(run.records.begin(), run.records.end(),
            [](const auto& l, const auto& r) {
              return l.instance_id < r.instance_id;
            });
  std::sort(run.skipped.begin(), run.skipped.end(),
            [](const auto& l, const auto& r) { return l.id < r.id; });
  return run;
}

namespace {

json labeler_to_json(const LabelerOutput& o) {
  return json{{"label", o.label},
              {"confidence", o.confidence},
              {"evidence", o.evidence}};
}

LabelerOutput labeler_from_json(const json& j) {
  return LabelerOutput{j.at("label").get<std::string>(),
                       j.at("confidence").get<double>(),
                       j.at("evidence").get<std::string>()};
}

}  // namespace

std::string record_to_json_line(const AnnotationRecord& r) {
  json j;
  j["instance_id"] = r.instance_id;
  j["labeler_a"] = labeler_to_json(r.labeler_a);
  j["labeler_b"] = labeler_to_json(r.labeler_b);
  j["critic"] = {
      {"final_label", r.critic.final_label},
      {"rubric",
       {{"evidence_quality", r.critic.rubric.evidence_quality},
        {"taxonomy_fit", r.critic.rubric.taxonomy_fit},
        {"internal_coherence", r.critic.rubric.internal_coherence},
        {"justification_sufficiency",
         r.critic.rubric.justification_sufficiency}}},
      {"score", r.critic.score}};
  return j.dump();
}

AnnotationRecord record_from_json_line(const std::string& line) {
  json j = json::parse(line);
  AnnotationRecord r;
  r.instance_id = j.at("instance_id").get<std::string>();
  r.labeler_a = labeler_from_json(j.at("labeler_a"));
  r.labeler_b = labeler_from_json(j.at("labeler_b"));
  const json& c = j.at("critic");
  r.critic.final_label = c.at("final_label").get<std::string>();
  const json& rub = c.at("rubric");
  r.critic.rubric.evidence_quality = rub.at("evidence_quality").get<int>();
  r.critic.rubric.taxonomy_fit = rub.at("taxonomy_fit").get<int>();
  r.critic.rubric.internal_coherence =
      rub.at("internal_coherence").get<int>();
  r.critic.rubric.justification_sufficiency =
      rub.at("justification_sufficiency").get<int>();
  r.critic.score = c.at("score").get<int>();
  if (r.critic.score != score_rubric(r.critic.rubric))
    throw std::runtime_error("record for " + r.instance_id +
                             ": score does not equal the rubric sum");
  return r;
}

std::vector<AnnotationRecord> load_records(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open annotation file: " + path);
  std::vector<AnnotationRecord> out;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      out.push_back(record_from_json_line(line));
    } catch (const std::exception& e) {
      throw std::runtime_error(path + ":" + std::to_string(line_no) + ": " +
                               e.what());
    }
  }
  return out;
}

void save_records(const std::string& path,
                  const std::vector<AnnotationRecord>& records) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write annotation file: " + path);
  for (const auto& r : records) {
    out << record_to_json_line(r) << '\n';
  }
}

}  // namespace qurate::annotation
