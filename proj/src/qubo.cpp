#include "qurate/qubo.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "qurate/parallel.hpp"
#include "qurate/rng.hpp"

namespace qurate::qubo {

namespace {

void check_frame(const FrameCandidates& frame) {
  if (frame.ids.size() != frame.reliabilities.size() ||
      frame.ids.size() != frame.similarity.size())
    throw std::invalid_argument("frame candidate arrays out of sync");
}

double mean_of(const std::vector<double>& values,
               const std::vector<size_t>& subset) {
  if (subset.empty()) return 0.0;
  double s = 0.0;
  for (size_t i : subset) s += values[i];
  return s / double(subset.size());
}

}  // namespace

double energy(const std::vector<size_t>& selected,
              const FrameCandidates& frame, const QuboParams& p) {
  check_frame(frame);
  double rel = 0.0;
  for (size_t i : selected) {
    if (i >= frame.size()) throw std::out_of_range("unknown candidate index");
    rel += frame.reliabilities[i];
  }
  double red = 0.0;
  for (size_t a = 0; a < selected.size(); ++a) {
    for (size_t b = a + 1; b < selected.size(); ++b) {
      red += frame.similarity.at(selected[a], selected[b]);
    }
  }
  return -p.lambda_rel * rel + p.lambda_red * red;
}

double delta_energy_swap(const std::vector<size_t>& selected,
                         const FrameCandidates& frame, const QuboParams& p,
                         size_t out_idx, size_t in_idx) {
  check_frame(frame);
  bool out_found = false;
  double sim_diff = 0.0;
  for (size_t m : selected) {
    if (m == out_idx) {
      out_found = true;
      continue;
    }
    if (m == in_idx)
      throw std::invalid_argument("in_idx already selected");
    sim_diff += frame.similarity.at(in_idx, m) - frame.similarity.at(out_idx, m);
  }
  if (!out_found) throw std::invalid_argument("out_idx not selected");
  return -p.lambda_rel *
             (frame.reliabilities[in_idx] - frame.reliabilities[out_idx]) +
         p.lambda_red * sim_diff;
}

namespace {

double hamming_fraction(const std::vector<char>& warm_member,
                        const std::vector<size_t>& current, size_t warm_size) {
  if (warm_size == 0) return 0.0;
  size_t kept = 0;
  for (size_t i : current) {
    if (warm_member[i]) ++kept;
  }
  return double(warm_size - kept) / double(warm_size);
}

TrajectoryPoint make_point(int64_t iteration, double temperature,
                           const std::vector<size_t>& selected,
                           const FrameCandidates& frame, const QuboParams& p,
                           const std::vector<char>& warm_member,
                           size_t warm_size) {
  TrajectoryPoint point;
  point.iteration = iteration;
  point.temperature = temperature;
  point.energy = energy(selected, frame, p);
  point.hamming_frac = hamming_fraction(warm_member, selected, warm_size);
  point.mean_reliability = mean_of(frame.reliabilities, selected);
  point.mean_redundancy =
      textfeat::mean_pairwise_similarity(frame.similarity, selected);
  return point;
}

}  // namespace

AnnealResult anneal(const FrameCandidates& frame, const QuboParams& p,
                    const AnnealSchedule& schedule,
                    const std::vector<size_t>& warm_start,
                    const AnnealObserver* observer) {
  check_frame(frame);
  const size_t n = frame.size();
  const size_t k = std::min<size_t>(p.budget, n);
  if (p.budget == 0) throw std::invalid_argument("budget must be >= 1");
  if (schedule.iterations <= 0 || schedule.log_stride <= 0)
    throw std::invalid_argument("schedule iterations/log_stride must be > 0");

  {
    std::vector<char> seen(n, 0);
    if (warm_start.size() != k)
      throw std::invalid_argument("warm start cardinality must be min(k,n)");
    for (size_t i : warm_start) {
      if (i >= n || seen[i])
        throw std::invalid_argument("warm start is not a valid subset");
      seen[i] = 1;
    }
  }

  std::vector<char> warm_member(n, 0);
  for (size_t i : warm_start) warm_member[i] = 1;

  AnnealResult result;

  if (p.budget >= n) {
    // feasible set is a single point; nothing to optimize
    result.boundary_collapsed = true;
    std::vector<size_t> all(n);
    for (size_t i = 0; i < n; ++i) all[i] = i;
    result.best.selected = all;
    result.best.energy = energy(all, frame, p);
    result.hamming_frac = 0.0;
    result.trajectory.push_back(make_point(0, schedule.initial_temperature,
                                           all, frame, p, warm_member, k));
    return result;
  }

  std::vector<size_t> selected(warm_start);
  std::vector<size_t> unselected;
  unselected.reserve(n - k);
  for (size_t i = 0; i < n; ++i) {
    if (!warm_member[i]) unselected.push_back(i);
  }

  Rng rng(schedule.seed);
  double current_energy = energy(selected, frame, p);
  std::vector<size_t> best = selected;
  double best_energy = current_energy;

  double temperature = schedule.initial_temperature;
  for (int64_t t = 0; t < schedule.iterations; ++t) {
    if (t % schedule.log_stride == 0) {
      result.trajectory.push_back(
          make_point(t, temperature, selected, frame, p, warm_member, k));
      // re-anchor the accumulator so incremental drift cannot build up
      current_energy = result.trajectory.back().energy;
    }
    const size_t sel_pos = size_t(rng.uniform_index(k));
    const size_t unsel_pos = size_t(rng.uniform_index(n - k));
    const size_t out_idx = selected[sel_pos];
    const size_t in_idx = unselected[unsel_pos];
    const double delta = delta_energy_swap(selected, frame, p, out_idx, in_idx);

    bool accept = delta <= 0.0;
    if (!accept && temperature > 0.0) {
      accept = rng.uniform() < std::exp(-delta / temperature);
    }
    if (accept) {
      selected[sel_pos] = in_idx;
      unselected[unsel_pos] = out_idx;
      current_energy += delta;
      if (current_energy < best_energy) {
        best_energy = current_energy;
        best = selected;
      }
    }
    if (observer) {
      (*observer)(ProposalEvent{t, delta, accept, selected.size()});
    }
    temperature *= schedule.cooling_factor;
  }
  result.trajectory.push_back(make_point(schedule.iterations, temperature,
                                         selected, frame, p, warm_member, k));

  std::sort(best.begin(), best.end());
  result.best.selected = std::move(best);
  result.best.energy = energy(result.best.selected, frame, p);
  result.hamming_frac =
      hamming_fraction(warm_member, result.best.selected, k);
  return result;
}

namespace {

uint64_t binomial_capped(size_t n, size_t k, uint64_t cap) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  uint64_t c = 1;
  for (size_t i = 0; i < k; ++i) {
    double next = double(c) * double(n - i) / double(i + 1);
    if (next > double(cap) * 2.0) return cap + 1;
    c = c * (n - i) / (i + 1);
    if (c > cap) return cap + 1;
  }
  return c;
}

}  // namespace

SelectionState brute_force_select(const FrameCandidates& frame,
                                  const QuboParams& p,
                                  uint64_t enumeration_cap) {
  check_frame(frame);
  const size_t n = frame.size();
  const size_t k = std::min<size_t>(p.budget, n);
  if (n == 0) throw std::invalid_argument("empty frame");
  if (binomial_capped(n, k, enumeration_cap) > enumeration_cap)
    throw std::invalid_argument("C(n,k) exceeds the enumeration cap");

  std::vector<size_t> combo(k);
  for (size_t i = 0; i < k; ++i) combo[i] = i;

  SelectionState best;
  best.selected = combo;
  best.energy = energy(combo, frame, p);
  for (;;) {
    // next combination in lexicographic order
    size_t i = k;
    while (i > 0 && combo[i - 1] == n - k + (i - 1)) --i;
    if (i == 0) break;
    ++combo[i - 1];
    for (size_t j = i; j < k; ++j) combo[j] = combo[j - 1] + 1;
    double e = energy(combo, frame, p);
    if (e < best.energy) {
      best.energy = e;
      best.selected = combo;
    }
  }
  return best;
}

std::vector<std::string> CuratedSubset::all_ids() const {
  std::vector<std::string> out;
  for (const auto& f : frames) {
    out.insert(out.end(), f.ids.begin(), f.ids.end());
  }
  return out;
}

const FrameSelection* CuratedSubset::find(const std::string& frame) const {
  for (const auto& f : frames) {
    if (f.frame == frame) return &f;
  }
  return nullptr;
}

std::vector<FrameCandidates> build_frame_candidates(
    const std::vector<reliability::ScoredInstance>& pool,
    const std::map<std::string, std::string>& texts,
    const ingest::FrameTaxonomy& taxonomy, size_t min_df, size_t max_features,
    size_t max_frame_size) {
  std::vector<std::vector<std::string>> corpus;
  corpus.reserve(pool.size());
  for (const auto& row : pool) {
    auto it = texts.find(row.id);
    if (it == texts.end())
      throw std::runtime_error("no text for scored instance " + row.id);
    corpus.push_back(textfeat::tokenize(it->second));
  }
  textfeat::Vocabulary vocab =
      textfeat::fit_tfidf(corpus, min_df, max_features);

  std::vector<FrameCandidates> frames;
  for (const auto& frame_name : taxonomy.frames) {
    FrameCandidates fc;
    fc.frame = frame_name;
    std::vector<textfeat::SparseVector> vectors;
    for (size_t i = 0; i < pool.size(); ++i) {
      if (pool[i].label != frame_name) continue;
      fc.ids.push_back(pool[i].id);
      fc.reliabilities.push_back(pool[i].reliability);
      vectors.push_back(textfeat::transform(vocab, corpus[i]));
    }
    if (fc.ids.empty()) continue;
    if (fc.ids.size() > max_frame_size) {
      throw std::runtime_error(
          "frame \"" + frame_name + "\" has " +
          std::to_string(fc.ids.size()) +
          " candidates, above the configured cap of " +
          std::to_string(max_frame_size) +
          "; the dense similarity matrix would be too large");
    }
    fc.similarity = textfeat::cosine_matrix(vectors);
    frames.push_back(std::move(fc));
  }
  return frames;
}

size_t budget_for(const std::string& frame,
                  const std::map<std::string, size_t>& budgets,
                  const QuboParams& p) {
  auto it = budgets.find(frame);
  return it != budgets.end() ? it->second : p.budget;
}

namespace {

FrameSelection summarize(const FrameCandidates& frame,
                         const std::vector<size_t>& selected, double energy_v,
                         double hamming, bool collapsed,
                         std::vector<TrajectoryPoint> trajectory) {
  FrameSelection out;
  out.frame = frame.frame;
  for (size_t i : selected) out.ids.push_back(frame.ids[i]);
  out.energy = energy_v;
  out.mean_reliability = mean_of(frame.reliabilities, selected);
  out.mean_redundancy =
      textfeat::mean_pairwise_similarity(frame.similarity, selected);
  out.hamming_frac = hamming;
  out.boundary_collapsed = collapsed;
  out.trajectory = std::move(trajectory);
  return out;
}

}  // namespace

CuratedSubset select_all_frames(const std::vector<FrameCandidates>& frames,
                                const std::map<std::string, size_t>& budgets,
                                const QuboParams& p,
                                const AnnealSchedule& schedule,
                                unsigned workers) {
  CuratedSubset result;
  result.frames.resize(frames.size());
  parallel_for(frames.size(), workers, [&](size_t f) {
    const FrameCandidates& frame = frames[f];
    QuboParams local = p;
    local.budget = budget_for(frame.frame, budgets, p);
    const size_t k = std::min<size_t>(local.budget, frame.size());

    const uint64_t frame_seed = derive_seed(schedule.seed, frame.frame);
    Rng warm_rng(derive_seed(frame_seed, "warm-start"));
    std::vector<size_t> warm = warm_rng.sample_indices(frame.size(), k);
    std::sort(warm.begin(), warm.end());

    AnnealSchedule local_schedule = schedule;
    local_schedule.seed = derive_seed(frame_seed, "chain");
    AnnealResult annealed = anneal(frame, local, local_schedule, warm);
    result.frames[f] = summarize(frame, annealed.best.selected,
                                 annealed.best.energy, annealed.hamming_frac,
                                 annealed.boundary_collapsed,
                                 std::move(annealed.trajectory));
  });
  return result;
}

CuratedSubset distmatch_select(const std::vector<FrameCandidates>& frames,
                               const std::map<std::string, size_t>& budgets,
                               const QuboParams& p, uint64_t seed) {
  CuratedSubset result;
  result.frames.reserve(frames.size());
  for (const auto& frame : frames) {
    const size_t k =
        std::min<size_t>(budget_for(frame.frame, budgets, p), frame.size());
    Rng rng(derive_seed(derive_seed(seed, frame.frame), "distmatch"));
    std::vector<size_t> chosen = rng.sample_indices(frame.size(), k);
    std::sort(chosen.begin(), chosen.end());
    result.frames.push_back(summarize(frame, chosen, energy(chosen, frame, p),
                                      0.0, k >= frame.size(), {}));
  }
  return result;
}

}  // namespace qurate::qubo
