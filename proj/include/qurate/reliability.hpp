#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "qurate/annotation.hpp"

namespace qurate::reliability {

inline constexpr size_t kFeatureCount = 7;

extern const std::array<const char*, kFeatureCount> kFeatureNames;

// Epistemic features of one annotated instance, all in [0,1].
struct ReliabilityFeatures {
  double conf_a = 0.0;
  double conf_b = 0.0;
  double agree_ab = 0.0;
  double agree_a_critic = 0.0;
  double agree_b_critic = 0.0;
  double rubric_norm = 0.0;  // s / 8
  double text_len = 0.0;     // token count / cap, clamped at 1

  std::array<double, kFeatureCount> as_array() const {
    return {conf_a,         conf_b,     agree_ab, agree_a_critic,
            agree_b_critic, rubric_norm, text_len};
  }
};

ReliabilityFeatures extract_features(const annotation::AnnotationRecord& record,
                                     const std::string& text,
                                     size_t text_len_cap = 64);

// stable = 1 iff both labelers and the critic agree AND min confidence and
// the rubric score clear their gates.
bool make_pseudo_label(const annotation::AnnotationRecord& record,
                       double tau_conf, int tau_rubric);

struct TrainConfig {
  double learning_rate = 0.1;
  double l2 = 1e-3;
  int max_epochs = 5000;
  double tolerance = 1e-8;
};

struct ReliabilityModel {
  std::vector<double> weights;  // one per feature
  double bias = 0.0;
  TrainConfig config;
  int epochs_run = 0;
  double final_loss = 0.0;
};

// Mean cross-entropy plus 0.5 * l2 * |w|^2 (bias unpenalized).
double logistic_loss(const std::vector<std::array<double, kFeatureCount>>& x,
                     const std::vector<int>& y,
                     const std::vector<double>& weights, double bias,
                     double l2);

void logistic_gradient(const std::vector<std::array<double, kFeatureCount>>& x,
                       const std::vector<int>& y,
                       const std::vector<double>& weights, double bias,
                       double l2, std::vector<double>& grad_w,
                       double& grad_b);

// Full-batch gradient descent from zero weights; stops when the loss
// improvement drops below the tolerance. Deterministic. Throws on
// single-class labels or non-finite features.
ReliabilityModel train_discriminator(
    const std::vector<ReliabilityFeatures>& features,
    const std::vector<int>& labels, const TrainConfig& config = {});

// sigmoid(w . f + b), strictly inside (0,1) for finite inputs.
double predict_reliability(const ReliabilityModel& model,
                           const ReliabilityFeatures& f);

struct ReliabilityGroups {
  std::vector<std::string> low;   // r <  low_cut
  std::vector<std::string> mid;   // low_cut <= r < high_cut
  std::vector<std::string> high;  // r >= high_cut
};

ReliabilityGroups group_by_reliability(
    const std::map<std::string, double>& scores, double low_cut = 0.33,
    double high_cut = 0.66);

// One row of the scored-pool interchange file consumed by selection and
// evaluation.
struct ScoredInstance {
  std::string id;
  std::string label;  // adjudicated frame
  int critic_score = 0;
  double reliability = 0.0;
  ReliabilityFeatures features;
};

std::string scored_to_json_line(const ScoredInstance& s);
ScoredInstance scored_from_json_line(const std::string& line);
std::vector<ScoredInstance> load_scored(const std::string& path);
void save_scored(const std::string& path,
                 const std::vector<ScoredInstance>& rows);

// Ordered feature names and values, for audit.
std::string export_model(const ReliabilityModel& model);

}  // namespace qurate::reliability
