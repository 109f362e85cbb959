#pragma once

#include <cstdint>
#include <vector>

#include "qurate/config.hpp"
#include "qurate/ingest.hpp"

namespace qurate::demo {

// Synthetic planted-signal corpus: each instance carries a hidden frame that
// drives both its wording (frame-specific vocabulary plus shared filler) and,
// for the gold set, a noisy sentiment. The mock annotation backend reads the
// planted frame back, so the whole pipeline runs offline.

// Skewed long-tail frame distribution; the smallest frames fall under the
// default budget so selection hits the k >= n boundary, like real pools do.
std::vector<size_t> apportion(size_t total, const std::vector<double>& weights);

std::vector<ingest::Instance> generate_instances(
    const cli::DemoGenConfig& config, const ingest::FrameTaxonomy& taxonomy,
    uint64_t seed);

std::vector<ingest::SentimentExample> generate_gold(
    const cli::DemoGenConfig& config, const ingest::FrameTaxonomy& taxonomy,
    uint64_t seed);

// Sentiment a frame leans toward in the generated gold set.
ingest::Sentiment planted_sentiment(size_t frame_index);

}  // namespace qurate::demo
