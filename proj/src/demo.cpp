#include "qurate/demo.hpp"

#include <algorithm>
#include <stdexcept>
#include <unordered_set>

#include "qurate/rng.hpp"
#include "qurate/text_norm.hpp"

namespace qurate::demo {

std::vector<size_t> apportion(size_t total,
                              const std::vector<double>& weights) {
  double weight_sum = 0.0;
  for (double w : weights) weight_sum += w;
  if (weights.empty() || weight_sum <= 0.0)
    throw std::invalid_argument("apportion: bad weights");
  std::vector<size_t> counts(weights.size());
  std::vector<std::pair<double, size_t>> remainders;
  size_t assigned = 0;
  for (size_t i = 0; i < weights.size(); ++i) {
    double exact = double(total) * weights[i] / weight_sum;
    counts[i] = size_t(exact);
    assigned += counts[i];
    remainders.emplace_back(exact - double(counts[i]), i);
  }
  std::sort(remainders.begin(), remainders.end(), [](auto& a, auto& b) {
    if (a.first != b.first) return a.first > b.first;
    return a.second < b.second;
  });
  for (size_t i = 0; assigned < total; ++i, ++assigned) {
    ++counts[remainders[i % remainders.size()].second];
  }
  return counts;
}

namespace {

// long-tail frame mix: the last frames end up below typical budgets
std::vector<double> frame_weights(size_t n_frames) {
  if (n_frames == 7) return {0.502, 0.290, 0.115, 0.033, 0.029, 0.025, 0.006};
  std::vector<double> weights(n_frames);
  double w = 0.5;
  for (size_t i = 0; i < n_frames; ++i) {
    weights[i] = w;
    w *= 0.45;
  }
  return weights;
}

std::string make_word(Rng& rng) {
  static const char* consonants[] = {"b", "d", "f", "g", "h", "j", "k",
                                     "l", "m", "n", "q", "r", "s", "t",
                                     "w", "y", "z"};
  static const char* vowels[] = {"a", "e", "i", "o", "u"};
  size_t syllables = 2 + rng.uniform_index(2);
  std::string word;
  for (size_t s = 0; s < syllables; ++s) {
    word += consonants[rng.uniform_index(17)];
    word += vowels[rng.uniform_index(5)];
  }
  return word;
}

struct PlantedVocab {
  std::vector<std::vector<std::string>> frame_words;  // per frame
  std::vector<std::string> shared_words;
};

PlantedVocab build_vocab(size_t n_frames, uint64_t seed) {
  constexpr size_t kFrameWords = 30;
  constexpr size_t kSharedWords = 60;
  Rng rng(derive_seed(seed, "planted-vocab"));
  std::unordered_set<std::string> used;
  auto fresh_word = [&] {
    for (;;) {
      std::string w = make_word(rng);
      if (used.insert(w).second) return w;
    }
  };
  PlantedVocab vocab;
  vocab.frame_words.resize(n_frames);
  for (auto& words : vocab.frame_words) {
    for (size_t i = 0; i < kFrameWords; ++i) words.push_back(fresh_word());
  }
  for (size_t i = 0; i < kSharedWords; ++i)
    vocab.shared_words.push_back(fresh_word());
  // a few Arabic function words keep the Unicode path exercised end to end
  for (const char* w : {"في", "من", "على", "عن", "هذا", "بين"})
    vocab.shared_words.push_back(w);
  return vocab;
}

std::string compose_text(Rng& rng, const PlantedVocab& vocab,
                         size_t frame_index) {
  const auto& topical = vocab.frame_words[frame_index];
  size_t length = 6 + rng.uniform_index(6);
  std::string text;
  for (size_t t = 0; t < length; ++t) {
    if (t) text += ' ';
    if (rng.uniform() < 0.65) {
      text += topical[rng.uniform_index(topical.size())];
    } else {
      text += vocab.shared_words[rng.uniform_index(vocab.shared_words.size())];
    }
  }
  return text;
}

// swap one word so the near-duplicate is not an exact surface-form copy
std::string perturb_text(Rng& rng, const PlantedVocab& vocab,
                         size_t frame_index, const std::string& original) {
  std::vector<std::string> words;
  std::string word;
  for (char ch : original) {
    if (ch == ' ') {
      words.push_back(word);
      word.clear();
    } else {
      word += ch;
    }
  }
  words.push_back(word);
  const auto& topical = vocab.frame_words[frame_index];
  words[rng.uniform_index(words.size())] =
      topical[rng.uniform_index(topical.size())];
  std::string text;
  for (size_t i = 0; i < words.size(); ++i) {
    if (i) text += ' ';
    text += words[i];
  }
  return text;
}

std::string padded_number(size_t value, size_t width) {
  std::string digits = std::to_string(value);
  return std::string(width > digits.size() ? width - digits.size() : 0, '0') +
         digits;
}

}  // namespace

std::vector<ingest::Instance> generate_instances(
    const cli::DemoGenConfig& config, const ingest::FrameTaxonomy& taxonomy,
    uint64_t seed) {
  const size_t n_frames = taxonomy.size();
  const std::vector<size_t> counts =
      apportion(config.instances, frame_weights(n_frames));

  PlantedVocab vocab = build_vocab(n_frames, seed);
  Rng rng(derive_seed(seed, "weak-corpus"));
  std::unordered_set<std::string> surface_forms;
  std::vector<ingest::Instance> out;
  out.reserve(config.instances);

  for (size_t f = 0; f < n_frames; ++f) {
    std::vector<std::string> frame_texts;
    for (size_t i = 0; i < counts[f]; ++i) {
      std::string text;
      for (;;) {
        if (!frame_texts.empty() && rng.uniform() < config.duplicate_rate) {
          const std::string& base =
              frame_texts[rng.uniform_index(frame_texts.size())];
          text = perturb_text(rng, vocab, f, base);
        } else {
          text = compose_text(rng, vocab, f);
        }
        if (surface_forms.insert(normalize_surface(text)).second) break;
      }
      frame_texts.push_back(text);
      ingest::Instance x;
      x.id = "w-" + padded_number(out.size() + 1, 6);
      x.text = text;
      x.frame = taxonomy.frames[f];
      x.year = 2015 + int(rng.uniform_index(5));
      out.push_back(std::move(x));
    }
  }
  Rng order_rng(derive_seed(seed, "weak-corpus-order"));
  order_rng.shuffle(out);
  return out;
}

ingest::Sentiment planted_sentiment(size_t frame_index) {
  switch (frame_index % 3) {
    case 0: return ingest::Sentiment::positive;
    case 1: return ingest::Sentiment::negative;
    default: return ingest::Sentiment::neutral;
  }
}

std::vector<ingest::SentimentExample> generate_gold(
    const cli::DemoGenConfig& config, const ingest::FrameTaxonomy& taxonomy,
    uint64_t seed) {
  const size_t n_frames = taxonomy.size();
  // the gold label mix of the women-driving corpus
  const std::vector<size_t> counts =
      apportion(config.gold, {0.4103, 0.3735, 0.2162});

  std::vector<std::vector<size_t>> frames_by_sentiment(3);
  for (size_t f = 0; f < n_frames; ++f) {
    frames_by_sentiment[size_t(planted_sentiment(f))].push_back(f);
  }
  for (const auto& frames : frames_by_sentiment) {
    if (frames.empty())
      throw std::invalid_argument(
          "taxonomy too small: a sentiment has no planted frame");
  }

  PlantedVocab vocab = build_vocab(n_frames, seed);
  Rng rng(derive_seed(seed, "gold-corpus"));
  std::unordered_set<std::string> surface_forms;
  std::vector<ingest::SentimentExample> out;
  out.reserve(config.gold);

  for (size_t s = 0; s < 3; ++s) {
    for (size_t i = 0; i < counts[s]; ++i) {
      size_t frame_index;
      if (rng.uniform() < config.sentiment_noise) {
        size_t other = (s + 1 + rng.uniform_index(2)) % 3;
        const auto& frames = frames_by_sentiment[other];
        frame_index = frames[rng.uniform_index(frames.size())];
      } else {
        const auto& frames = frames_by_sentiment[s];
        frame_index = frames[rng.uniform_index(frames.size())];
      }
      std::string text;
      for (;;) {
        text = compose_text(rng, vocab, frame_index);
        if (surface_forms.insert(normalize_surface(text)).second) break;
      }
      ingest::SentimentExample x;
      x.id = "g-" + padded_number(out.size() + 1, 6);
      x.text = std::move(text);
      x.sentiment = static_cast<ingest::Sentiment>(s);
      out.push_back(std::move(x));
    }
  }
  Rng order_rng(derive_seed(seed, "gold-corpus-order"));
  order_rng.shuffle(out);
  return out;
}

}  // namespace qurate::demo
