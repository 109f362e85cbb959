#pragma once

#include <cstdint>
#include <map>
#include <string>

#include "qurate/annotation.hpp"
#include "qurate/ingest.hpp"

namespace qurate::annotation {

enum class MockRole { labeler_a, labeler_b, critic };

// Deterministic stand-in for an LLM backend. Replies are a pure function of
// (seed, role, instance id): each labeler returns the instance's planted
// frame unless its per-instance draw flips it (probability noise_level), and
// the critic prefers the planted frame when proposed, with rubric scores
// degrading as flips accumulate. Replies use the same <<< ... >>> block
// format real backends are prompted for, so the normal parsers run on them.
class MockBackend : public ChatBackend {
 public:
  MockBackend(uint64_t seed, double noise_level,
              ingest::FrameTaxonomy taxonomy, MockRole role,
              std::map<std::string, std::string> planted = {});

  std::string complete(const std::vector<ChatMessage>& messages) override;

  // Planted frame for an id: the explicit assignment when given, otherwise a
  // seed-keyed hash over the taxonomy.
  const std::string& planted_frame(const std::string& id) const;

 private:
  uint64_t seed_;
  double noise_;
  ingest::FrameTaxonomy taxonomy_;
  MockRole role_;
  std::map<std::string, std::string> planted_;
};

struct MockBackendSet {
  MockBackend labeler_a;
  MockBackend labeler_b;
  MockBackend critic;
};

MockBackendSet make_mock_backends(
    uint64_t seed, double noise_level, const ingest::FrameTaxonomy& taxonomy,
    std::map<std::string, std::string> planted = {});

}  // namespace qurate::annotation
