#include "qurate/reliability.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

#include "qurate/textfeat.hpp"
#include "qurate/util.hpp"

namespace qurate::reliability {

using nlohmann::json;

const std::array<const char*, kFeatureCount> kFeatureNames = {
    "conf_a",         "conf_b",      "agree_ab", "agree_a_critic",
    "agree_b_critic", "rubric_norm", "text_len"};

ReliabilityFeatures extract_features(
    const annotation::AnnotationRecord& record, const std::string& text,
    size_t text_len_cap) {
  ReliabilityFeatures f;
  f.conf_a = record.labeler_a.confidence;
  f.conf_b = record.labeler_b.confidence;
  f.agree_ab = record.labeler_a.label == record.labeler_b.label ? 1.0 : 0.0;
  f.agree_a_critic =
      record.labeler_a.label == record.critic.final_label ? 1.0 : 0.0;
  f.agree_b_critic =
      record.labeler_b.label == record.critic.final_label ? 1.0 : 0.0;
  f.rubric_norm = double(record.critic.score) / 8.0;
  size_t tokens = textfeat::tokenize(text).size();
  f.text_len = std::min(1.0, double(tokens) / double(text_len_cap));
  return f;
}

bool make_pseudo_label(const annotation::AnnotationRecord& record,
                       double tau_conf, int tau_rubric) {
  if (tau_conf < 0.0 || tau_conf > 1.0)
    throw std::invalid_argument("tau_conf must be in [0,1]");
  if (tau_rubric < 0 || tau_rubric > 8)
    throw std::invalid_argument("tau_rubric must be in [0,8]");
  const bool agree = record.labeler_a.label == record.labeler_b.label &&
                     record.labeler_b.label == record.critic.final_label;
  const double min_conf =
      std::min(record.labeler_a.confidence, record.labeler_b.confidence);
  return agree && min_conf >= tau_conf && record.critic.score >= tau_rubric;
}

namespace {

double sigmoid(double z) {
  if (z >= 0.0) {
    return 1.0 / (1.0 + std::exp(-z));
  }
  double e = std::exp(z);
  return e / (1.0 + e);
}

// log(sigmoid(z)) without overflow
double log_sigmoid(double z) {
  if (z >= 0.0) return -std::log1p(std::exp(-z));
  return z - std::log1p(std::exp(z));
}

}  // namespace

double logistic_loss(const std::vector<std::array<double, kFeatureCount>>& x,
                     const std::vector<int>& y,
                     const std::vector<double>& weights, double bias,
                     double l2) {
  const size_t n = x.size();
  double loss = 0.0;
  for (size_t i = 0; i < n; ++i) {
    double z = bias;
    for (size_t j = 0; j < kFeatureCount; ++j) z += weights[j] * x[i][j];
    // -y log(s) - (1-y) log(1-s)
    loss += y[i] ? -log_sigmoid(z) : -log_sigmoid(-z);
  }
  loss /= double(n);
  double reg = 0.0;
  for (double w : weights) reg += w * w;
  return loss + 0.5 * l2 * reg;
}

void logistic_gradient(const std::vector<std::array<double, kFeatureCount>>& x,
                       const std::vector<int>& y,
                       const std::vector<double>& weights, double bias,
                       double l2, std::vector<double>& grad_w,
                       double& grad_b) {
  const size_t n = x.size();
  grad_w.assign(kFeatureCount, 0.0);
  grad_b = 0.0;
  for (size_t i = 0; i < n; ++i) {
    double z = bias;
    for (size_t j = 0; j < kFeatureCount; ++j) z += weights[j] * x[i][j];
    double err = sigmoid(z) - double(y[i]);
    for (size_t j = 0; j < kFeatureCount; ++j) grad_w[j] += err * x[i][j];
    grad_b += err;
  }
  for (size_t j = 0; j < kFeatureCount; ++j) {
    grad_w[j] = grad_w[j] / double(n) + l2 * weights[j];
  }
  grad_b /= double(n);
}

ReliabilityModel train_discriminator(
    const std::vector<ReliabilityFeatures>& features,
    const std::vector<int>& labels, const TrainConfig& config) {
  if (features.empty() || features.size() != labels.size())
    throw std::invalid_argument("features/labels size mismatch");
  size_t positives = 0;
  for (int y : labels) {
    if (y != 0 && y != 1) throw std::invalid_argument("labels must be 0/1");
    positives += size_t(y);
  }
  if (positives == 0 || positives == labels.size())
    throw std::invalid_argument(
        "pseudo-labels are single-class; cannot train the discriminator");

  std::vector<std::array<double, kFeatureCount>> x;
  x.reserve(features.size());
  for (const auto& f : features) {
    auto row = f.as_array();
    for (double v : row) {
      if (!std::isfinite(v))
        throw std::invalid_argument("non-finite feature value");
    }
    x.push_back(row);
  }

  ReliabilityModel model;
  model.config = config;
  model.weights.assign(kFeatureCount, 0.0);
  model.bias = 0.0;

  std::vector<double> grad_w(kFeatureCount, 0.0);
  double grad_b = 0.0;
  double prev_loss =
      logistic_loss(x, labels, model.weights, model.bias, config.l2);
  int epoch = 0;
  for (; epoch < config.max_epochs; ++epoch) {
    logistic_gradient(x, labels, model.weights, model.bias, config.l2, grad_w,
                      grad_b);
    for (size_t j = 0; j < kFeatureCount; ++j)
      model.weights[j] -= config.learning_rate * grad_w[j];
    model.bias -= config.learning_rate * grad_b;
    double loss =
        logistic_loss(x, labels, model.weights, model.bias, config.l2);
    if (std::abs(prev_loss - loss) < config.tolerance) {
      prev_loss = loss;
      ++epoch;
      break;
    }
    prev_loss = loss;
  }
  model.epochs_run = epoch;
  model.final_loss = prev_loss;
  return model;
}

double predict_reliability(const ReliabilityModel& model,
                           const ReliabilityFeatures& f) {
  if (model.weights.size() != kFeatureCount)
    throw std::invalid_argument("model dimension mismatch");
  double z = model.bias;
  auto row = f.as_array();
  for (size_t j = 0; j < kFeatureCount; ++j) z += model.weights[j] * row[j];
  return sigmoid(z);
}

ReliabilityGroups group_by_reliability(
    const std::map<std::string, double>& scores, double low_cut,
    double high_cut) {
  if (!(low_cut < high_cut))
    throw std::invalid_argument("grouping cuts must be ordered");
  ReliabilityGroups groups;
  for (const auto& [id, r] : scores) {
    if (r < low_cut) {
      groups.low.push_back(id);
    } else if (r < high_cut) {
      groups.mid.push_back(id);
    } else {
      groups.high.push_back(id);
    }
  }
  return groups;
}

std::string scored_to_json_line(const ScoredInstance& s) {
  json j;
  j["id"] = s.id;
  j["label"] = s.label;
  j["critic_score"] = s.critic_score;
  j["reliability"] = s.reliability;
  auto row = s.features.as_array();
  j["features"] = std::vector<double>(row.begin(), row.end());
  return j.dump();
}

ScoredInstance scored_from_json_line(const std::string& line) {
  json j = json::parse(line);
  ScoredInstance s;
  s.id = j.at("id").get<std::string>();
  s.label = j.at("label").get<std::string>();
  s.critic_score = j.at("critic_score").get<int>();
  s.reliability = j.at("reliability").get<double>();
  auto values = j.at("features").get<std::vector<double>>();
  if (values.size() != kFeatureCount)
    throw std::runtime_error("scored row for " + s.id +
                             ": wrong feature count");
  s.features.conf_a = values[0];
  s.features.conf_b = values[1];
  s.features.agree_ab = values[2];
  s.features.agree_a_critic = values[3];
  s.features.agree_b_critic = values[4];
  s.features.rubric_norm = values[5];
  s.features.text_len = values[6];
  return s;
}

std::vector<ScoredInstance> load_scored(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open scored pool: " + path);
  std::vector<ScoredInstance> out;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      out.push_back(scored_from_json_line(line));
    } catch (const std::exception& e) {
      throw std::runtime_error(path + ":" + std::to_string(line_no) + ": " +
                               e.what());
    }
  }
  return out;
}

void save_scored(const std::string& path,
                 const std::vector<ScoredInstance>& rows) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write scored pool: " + path);
  for (const auto& s : rows) out << scored_to_json_line(s) << '\n';
}

std::string export_model(const ReliabilityModel& model) {
  std::string out;
  for (size_t j = 0; j < kFeatureCount; ++j) {
    out += kFeatureNames[j];
    out += '\t';
    out += fmt_double(model.weights[j]);
    out += '\n';
  }
  out += "bias\t";
  out += fmt_double(model.bias);
  out += '\n';
  return out;
}

}  // namespace qurate::reliability
