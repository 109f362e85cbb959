#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "qurate/ingest.hpp"
#include "qurate/qubo.hpp"
#include "qurate/softmax.hpp"
#include "qurate/textfeat.hpp"

namespace qurate::eval {

struct TfidfConfig {
  size_t min_df = 1;
  size_t max_features = 20000;
};

// TF-IDF + multinomial logistic head over the frame taxonomy.
struct FramingModel {
  textfeat::Vocabulary vocab;
  softmax::Model head;
  std::vector<std::string> frames;  // taxonomy order
};

// Trains on (text, frame) pairs; requires at least two distinct frames.
FramingModel train_framing_classifier(
    const std::vector<std::pair<std::string, std::string>>& text_and_frame,
    const ingest::FrameTaxonomy& taxonomy, const TfidfConfig& tfidf = {},
    const softmax::Config& train_cfg = {});

// Per-text softmax distribution over the taxonomy, rows summing to 1.
std::vector<std::vector<double>> frame_probabilities(
    const FramingModel& model, const std::vector<std::string>& texts);

std::string predict_frame(const FramingModel& model, const std::string& text);

// Unweighted mean of per-class F1. A zero denominator makes the affected
// precision/recall 0, and a class absent from both sides contributes 0.
double macro_f1(const std::vector<std::string>& predictions,
                const std::vector<std::string>& golds,
                const std::vector<std::string>& classes);

struct DiagnosticResult {
  double macro_f1 = 0.0;
  double redundancy = 0.0;  // mean pairwise TF-IDF cosine within the subset
  size_t subset_size = 0;
  double lambda_rel = 0.0;
  double lambda_red = 0.0;
};

// Trains the framing classifier on the subset, scores Macro-F1 on the
// held-out pool against the adjudicated weak labels, and reports subset
// redundancy, all in one record.
DiagnosticResult diagnostic_eval(
    const std::vector<std::string>& subset_ids,
    const std::map<std::string, std::string>& texts,
    const std::map<std::string, std::string>& weak_labels,
    const std::vector<std::string>& eval_ids,
    const ingest::FrameTaxonomy& taxonomy, const TfidfConfig& tfidf,
    const softmax::Config& train_cfg, const qubo::QuboParams& params);

enum class Method { qubo, distmatch };
const char* to_string(Method m);

struct SweepRow {
  double lambda_conf = 0.0;
  double lambda_red = 0.0;
  Method method = Method::qubo;
  uint64_t seed = 0;
  double macro_f1 = 0.0;
  double redundancy = 0.0;
};

struct SweepTable {
  std::vector<SweepRow> rows;

  SweepTable filtered(Method m) const;
};

struct SweepContext {
  std::vector<qubo::FrameCandidates> frames;       // candidate side
  std::map<std::string, size_t> budgets;
  qubo::AnnealSchedule schedule;                   // seed overridden per row
  std::map<std::string, std::string> texts;        // id -> text
  std::map<std::string, std::string> weak_labels;  // id -> adjudicated frame
  std::vector<std::string> eval_ids;               // held-out pool
  ingest::FrameTaxonomy taxonomy;
  TfidfConfig tfidf;
  softmax::Config train_cfg;
  unsigned workers = 1;
};

// Full cross product of lambda grids x seeds x {QUBO, DistMatch}, in
// canonical grid order regardless of how cells are scheduled.
SweepTable sweep(const SweepContext& ctx,
                 const std::vector<double>& lambda_conf_grid,
                 const std::vector<double>& lambda_red_grid,
                 const std::vector<uint64_t>& seeds);

// Indices of points (macro_f1, redundancy) not dominated in the
// (higher F1, lower redundancy) sense; duplicates of a frontier point are
// all retained.
std::vector<size_t> pareto_frontier(
    const std::vector<std::pair<double, double>>& points);

struct DeltaCell {
  double lambda_conf = 0.0;
  double lambda_red = 0.0;
  double delta_f1 = 0.0;  // mean over seeds of F1_QUBO - F1_DistMatch
};

// Per-(lambda_conf, lambda_red) difference averaged over seeds. Every
// (lambda_conf, lambda_red, seed) cell must exist in both tables.
std::vector<DeltaCell> delta_f1_map(const SweepTable& qubo_table,
                                    const SweepTable& distmatch_table);

enum class ConfigId { S0, SD, SQ, SN, SQshuf, FD, FQ };
const char* to_string(ConfigId c);
const std::vector<ConfigId>& all_configs();

// Feature assembly for the seven downstream configurations. bow rows are
// sparse; the framing blocks are dense n x frame-count matrices aligned to
// the same examples. SN appends seeded standard-normal noise of the framing
// block's width; SQshuf appends the QUBO block with rows permuted by a
// seeded permutation.
std::vector<textfeat::SparseVector> build_features(
    ConfigId config, const std::vector<textfeat::SparseVector>& bow,
    const std::vector<std::vector<double>>& frames_q,
    const std::vector<std::vector<double>>& frames_d, uint64_t seed);

struct TransferResult {
  ConfigId config = ConfigId::S0;
  double accuracy = 0.0;
  double macro_f1 = 0.0;
};

// Trains one sentiment classifier per configuration with the shared
// backbone hyperparameters and scores it on the held-out gold test split.
// The train- and test-side noise/shuffles use seeds derived independently
// from `seed`.
std::vector<TransferResult> downstream_experiment(
    const std::vector<ingest::SentimentExample>& gold_train,
    const std::vector<ingest::SentimentExample>& gold_test,
    const FramingModel& framing_q, const FramingModel& framing_d,
    uint64_t seed, const TfidfConfig& tfidf = {},
    const softmax::Config& backbone = {}, unsigned workers = 1);

// Plain-text exports consumed by external plotting tools.
std::string sweep_to_csv(const SweepTable& table);
std::string delta_map_to_csv(const std::vector<DeltaCell>& cells);
std::string transfer_to_csv(const std::vector<TransferResult>& results);

}  // namespace qurate::eval
