#include "qurate/mock_backend.hpp"

#include <sstream>
#include <stdexcept>

#include "qurate/rng.hpp"
#include "qurate/textfeat.hpp"
#include "qurate/util.hpp"

namespace qurate::annotation {

namespace {

std::string find_line(const std::string& text, const std::string& prefix) {
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (line.rfind(prefix, 0) == 0) {
      std::string value = line.substr(prefix.size());
      size_t a = value.find_first_not_of(" \t\r");
      if (a == std::string::npos) return "";
      size_t b = value.find_last_not_of(" \t\r");
      return value.substr(a, b - a + 1);
    }
  }
  return "";
}

const char* role_salt(MockRole role) {
  switch (role) {
    case MockRole::labeler_a: return "labeler-a";
    case MockRole::labeler_b: return "labeler-b";
    case MockRole::critic: return "critic";
  }
  return "";
}

}  // namespace

MockBackend::MockBackend(uint64_t seed, double noise_level,
                         ingest::FrameTaxonomy taxonomy, MockRole role,
                         std::map<std::string, std::string> planted)
    : seed_(seed),
      noise_(noise_level),
      taxonomy_(std::move(taxonomy)),
      role_(role),
      planted_(std::move(planted)) {
  if (noise_ < 0.0 || noise_ > 1.0)
    throw std::invalid_argument("noise_level must be in [0,1]");
  if (taxonomy_.size() < 2)
    throw std::invalid_argument("mock backend needs >= 2 frames");
}

const std::string& MockBackend::planted_frame(const std::string& id) const {
  auto it = planted_.find(id);
  if (it != planted_.end()) return it->second;
  size_t idx = static_cast<size_t>(derive_seed(seed_, "plant-" + id) %
                                   taxonomy_.size());
  return taxonomy_.frames[idx];
}

std::string MockBackend::complete(const std::vector<ChatMessage>& messages) {
  const std::string* user = nullptr;
  for (const auto& m : messages) {
    if (m.role == "user") user = &m.content;
  }
  if (!user) throw std::runtime_error("mock backend: no user message");
  const std::string id = find_line(*user, "instance-id:");
  if (id.empty())
    throw std::runtime_error("mock backend: no instance-id line in prompt");
  const std::string& plant = planted_frame(id);

  Rng rng(derive_seed(derive_seed(seed_, role_salt(role_)), id));

  if (role_ != MockRole::critic) {
    bool flipped = rng.uniform() < noise_;
    std::string label = plant;
    if (flipped) {
      size_t wrong = rng.uniform_index(taxonomy_.size() - 1);
      size_t plant_idx = taxonomy_.index_of(plant);
      label = taxonomy_.frames[wrong >= plant_idx ? wrong + 1 : wrong];
    }
    double conf = flipped ? 0.35 + 0.40 * rng.uniform()
                          : 0.75 + 0.23 * rng.uniform();
    const std::string text = find_line(*user, "text:");
    auto tokens = textfeat::tokenize(text);
    std::string cue = tokens.empty() ? "statement" : tokens.front();
    std::ostringstream out;
    out << "<<<\n";
    out << "label: " << label << "\n";
    out << "confidence: " << fmt_double(conf) << "\n";
    out << "evidence: the phrasing around \"" << cue
        << "\" matches this frame\n";
    out << ">>>\n";
    return out.str();
  }

  // critic: prefer the planted frame when proposed, otherwise the more
  // confident candidate (ties go to A)
  const std::string a_label = find_line(*user, "candidate_a_label:");
  const std::string b_label = find_line(*user, "candidate_b_label:");
  const std::string a_conf_s = find_line(*user, "candidate_a_confidence:");
  const std::string b_conf_s = find_line(*user, "candidate_b_confidence:");
  if (a_label.empty() || b_label.empty())
    throw std::runtime_error("mock critic: candidate labels missing");
  double a_conf = a_conf_s.empty() ? 0.0 : std::stod(a_conf_s);
  double b_conf = b_conf_s.empty() ? 0.0 : std::stod(b_conf_s);

  std::string final_label;
  if (a_label == plant || b_label == plant) {
    final_label = plant;
  } else {
    final_label = (b_conf > a_conf) ? b_label : a_label;
  }

  const int correct = int(a_label == plant) + int(b_label == plant);
  int rubric[4];
  for (int& criterion : rubric) {
    double u = rng.uniform();
    if (correct == 2) {
      // agreement on the plant: 2 unless noise degrades one criterion
      criterion = (u < 0.30 * noise_) ? 1 : 2;
    } else if (correct == 1) {
      criterion = (u < 0.50) ? 2 : (u < 0.90 ? 1 : 0);
    } else {
      criterion = (u < 0.20) ? 2 : (u < 0.70 ? 1 : 0);
    }
  }
  std::ostringstream out;
  out << "<<<\n";
  out << "final_label: " << final_label << "\n";
  out << "evidence_quality: " << rubric[0] << "\n";
  out << "taxonomy_fit: " << rubric[1] << "\n";
  out << "internal_coherence: " << rubric[2] << "\n";
  out << "justification_sufficiency: " << rubric[3] << "\n";
  out << ">>>\n";
  return out.str();
}

MockBackendSet make_mock_backends(
    uint64_t seed, double noise_level, const ingest::FrameTaxonomy& taxonomy,
    std::map<std::string, std::string> planted) {
  return MockBackendSet{
      MockBackend(seed, noise_level, taxonomy, MockRole::labeler_a, planted),
      MockBackend(seed, noise_level, taxonomy, MockRole::labeler_b, planted),
      MockBackend(seed, noise_level, taxonomy, MockRole::critic,
                  std::move(planted))};
}

}  // namespace qurate::annotation
