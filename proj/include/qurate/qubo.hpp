#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "qurate/ingest.hpp"
#include "qurate/reliability.hpp"
#include "qurate/textfeat.hpp"

namespace qurate::qubo {

// One frame's candidate pool: ids, reliabilities and the within-frame
// cosine similarity matrix, all in the same order.
struct FrameCandidates {
  std::string frame;
  std::vector<std::string> ids;
  std::vector<double> reliabilities;
  textfeat::SimilarityMatrix similarity;

  size_t size() const { return ids.size(); }
};

struct QuboParams {
  double lambda_rel = 1.0;  // reliability reward weight (lambda_conf alias)
  double lambda_red = 1.0;  // redundancy penalty weight
  size_t budget = 50;       // k_c
};

// Geometric schedule: temperature at step t is initial * cooling^t.
struct AnnealSchedule {
  double initial_temperature = 1.0;
  double cooling_factor = 0.9995;
  int64_t iterations = 50000;
  uint64_t seed = 0;
  int64_t log_stride = 100;
};

struct SelectionState {
  std::vector<size_t> selected;  // candidate indices, sorted ascending
  double energy = 0.0;
};

struct TrajectoryPoint {
  int64_t iteration = 0;
  double energy = 0.0;
  double hamming_frac = 0.0;      // fraction of warm-start members replaced
  double mean_reliability = 0.0;
  double mean_redundancy = 0.0;
  double temperature = 0.0;
};

// Per-proposal hook for instrumentation (budget invariant checks, counters).
struct ProposalEvent {
  int64_t iteration;
  double delta;
  bool accepted;
  size_t selected_count;
};
using AnnealObserver = std::function<void(const ProposalEvent&)>;

// E(z) = -lambda_rel * sum_{i in sel} r_i + lambda_red * sum_{i<j in sel} S_ij
double energy(const std::vector<size_t>& selected,
              const FrameCandidates& frame, const QuboParams& p);

// Energy change of swapping out_idx (selected) for in_idx (unselected),
// computed from the reliability terms and the candidates' similarity rows
// against the current selection. Matches full recomputation to 1e-9.
double delta_energy_swap(const std::vector<size_t>& selected,
                         const FrameCandidates& frame, const QuboParams& p,
                         size_t out_idx, size_t in_idx);

struct AnnealResult {
  SelectionState best;
  std::vector<TrajectoryPoint> trajectory;
  double hamming_frac = 0.0;       // of the returned best vs the warm start
  bool boundary_collapsed = false;  // k_c >= n, feasible set is a single point
};

// Budget-preserving simulated annealing with swap-only moves: every proposal
// exchanges one selected and one unselected candidate so the cardinality
// never changes. Accepts when delta <= 0, otherwise with probability
// exp(-delta/T). Returns the lowest-energy state ever visited.
AnnealResult anneal(const FrameCandidates& frame, const QuboParams& p,
                    const AnnealSchedule& schedule,
                    const std::vector<size_t>& warm_start,
                    const AnnealObserver* observer = nullptr);

// Exhaustive minimum over all k-subsets, ties broken by lexicographic
// candidate order. Throws when C(n,k) exceeds the enumeration cap.
SelectionState brute_force_select(const FrameCandidates& frame,
                                  const QuboParams& p,
                                  uint64_t enumeration_cap = 2000000);

struct FrameSelection {
  std::string frame;
  std::vector<std::string> ids;  // in candidate order
  double energy = 0.0;
  double mean_reliability = 0.0;
  double mean_redundancy = 0.0;
  double hamming_frac = 0.0;
  bool boundary_collapsed = false;
  std::vector<TrajectoryPoint> trajectory;
};

struct CuratedSubset {
  std::vector<FrameSelection> frames;

  std::vector<std::string> all_ids() const;
  const FrameSelection* find(const std::string& frame) const;
};

// Groups a scored pool into per-frame candidate sets with within-frame
// similarity matrices. The TF-IDF vocabulary is fitted once over all
// candidate texts; matrices are only ever formed per frame. Frames larger
// than max_frame_size are rejected (the quadratic matrix would thrash).
std::vector<FrameCandidates> build_frame_candidates(
    const std::vector<reliability::ScoredInstance>& pool,
    const std::map<std::string, std::string>& texts,
    const ingest::FrameTaxonomy& taxonomy, size_t min_df = 1,
    size_t max_features = 20000, size_t max_frame_size = 5000);

// Budget for a frame: the per-frame map wins, otherwise params.budget.
size_t budget_for(const std::string& frame,
                  const std::map<std::string, size_t>& budgets,
                  const QuboParams& p);

// Independent per-frame annealing with sub-seeds derived from
// (schedule.seed, frame name); the warm start is a seeded uniform random
// k_c-subset. Frames may run concurrently; results do not depend on the
// schedule order.
CuratedSubset select_all_frames(const std::vector<FrameCandidates>& frames,
                                const std::map<std::string, size_t>& budgets,
                                const QuboParams& p,
                                const AnnealSchedule& schedule,
                                unsigned workers = 1);

// Size-matched baseline: a seeded uniform random min(k_c, n)-subset per
// frame, ignoring reliability and similarity. Summary metrics are still
// reported for comparison.
CuratedSubset distmatch_select(const std::vector<FrameCandidates>& frames,
                               const std::map<std::string, size_t>& budgets,
                               const QuboParams& p, uint64_t seed);

}  // namespace qurate::qubo
