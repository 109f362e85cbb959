#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "qurate/ingest.hpp"

namespace qurate::annotation {

struct LabelerOutput {
  std::string label;
  double confidence = 0.0;  // in [0,1]
  std::string evidence;
};

struct RubricScores {
  int evidence_quality = 0;
  int taxonomy_fit = 0;
  int internal_coherence = 0;
  int justification_sufficiency = 0;
};

// Sum of the four 0/1/2 criteria, in {0,...,8}. Throws on out-of-range input.
int score_rubric(const RubricScores& r);

struct CriticAdjudication {
  std::string final_label;
  RubricScores rubric;
  int score = 0;  // always equals score_rubric(rubric)
};

struct AnnotationRecord {
  std::string instance_id;
  LabelerOutput labeler_a;
  LabelerOutput labeler_b;
  CriticAdjudication critic;

  // The critic is prompted to pick one of the two proposals; anything else
  // is recorded but worth surfacing in summaries.
  bool out_of_pair() const {
    return critic.final_label != labeler_a.label &&
           critic.final_label != labeler_b.label;
  }
};

struct BackendConfig {
  std::string endpoint;         // e.g. http://localhost:8000/v1
  std::string model_name;
  std::string prompt_template;  // system message; opaque configuration
  double temperature = 0.0;
  int max_tokens = 256;
  int timeout_ms = 30000;
  int retries = 2;
  int backoff_ms = 250;  // doubles per attempt
};

struct ChatMessage {
  std::string role;  // "system" | "user" | "assistant"
  std::string content;
};

struct ChatResult {
  std::string text;
  int attempts = 1;  // 1 means no retry was needed
};

// OpenAI-compatible chat completion with exponential backoff on transport
// failures and 5xx responses. Throws after `retries` extra attempts.
ChatResult chat_complete(const BackendConfig& config,
                         const std::vector<ChatMessage>& messages);

// Completion source; HTTP-backed in production, canned in tests.
class ChatBackend {
 public:
  virtual ~ChatBackend() = default;
  virtual std::string complete(const std::vector<ChatMessage>& messages) = 0;
};

class HttpBackend : public ChatBackend {
 public:
  explicit HttpBackend(BackendConfig config) : config_(std::move(config)) {}
  std::string complete(const std::vector<ChatMessage>& messages) override {
    return chat_complete(config_, messages).text;
  }
  const BackendConfig& config() const { return config_; }

 private:
  BackendConfig config_;
};

struct LabelerParse {
  LabelerOutput output;
  bool confidence_clamped = false;
};

class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Extracts (label, confidence, evidence) from the <<< ... >>> block of a
// completion. Confidence must be a numeric literal and is clamped to [0,1];
// a label outside the taxonomy or a missing field throws ParseError.
LabelerParse parse_labeler_output(const std::string& raw,
                                  const ingest::FrameTaxonomy& taxonomy);

// Extracts final_label plus the four rubric criteria; score is their sum.
CriticAdjudication parse_critic_output(const std::string& raw,
                                       const ingest::FrameTaxonomy& taxonomy);

// Structured user payloads sent alongside each backend's system template.
std::string render_labeler_prompt(const ingest::Instance& x,
                                  const ingest::FrameTaxonomy& taxonomy);
std::string render_critic_prompt(const ingest::Instance& x,
                                 const ingest::FrameTaxonomy& taxonomy,
                                 const LabelerOutput& a,
                                 const LabelerOutput& b);

// Runs labeler A, labeler B, then the critic over one instance. Throws if a
// backend fails or an output cannot be parsed; the caller decides whether to
// skip or abort.
AnnotationRecord annotate_instance(const ingest::Instance& x,
                                   ChatBackend& labeler_a,
                                   ChatBackend& labeler_b,
                                   ChatBackend& critic,
                                   const ingest::FrameTaxonomy& taxonomy,
                                   const std::string& system_a,
                                   const std::string& system_b,
                                   const std::string& system_critic);

struct SkippedInstance {
  std::string id;
  std::string reason;
};

struct AnnotationRun {
  std::vector<AnnotationRecord> records;  // ordered by instance id
  std::vector<SkippedInstance> skipped;   // ordered by instance id
};

// Annotates a pool with up to `workers` instances in flight. Failed
// instances are skipped and logged, never fabricated. Output order is by
// instance id regardless of completion order.
AnnotationRun annotate_pool(const std::vector<ingest::Instance>& instances,
                            ChatBackend& labeler_a, ChatBackend& labeler_b,
                            ChatBackend& critic,
                            const ingest::FrameTaxonomy& taxonomy,
                            const std::string& system_a,
                            const std::string& system_b,
                            const std::string& system_critic,
                            unsigned workers);

std::string record_to_json_line(const AnnotationRecord& r);
AnnotationRecord record_from_json_line(const std::string& line);

std::vector<AnnotationRecord> load_records(const std::string& path);
void save_records(const std::string& path,
                  const std::vector<AnnotationRecord>& records);

// Default system templates, used when the config leaves them empty.
extern const char* kDefaultLabelerTemplate;
extern const char* kDefaultCriticTemplate;

}  // namespace qurate::annotation
