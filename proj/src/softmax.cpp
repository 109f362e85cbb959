#include "qurate/softmax.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace qurate::softmax {

namespace {

void scores_for_row(const textfeat::SparseVector& row,
                    const std::vector<double>& weights,
                    const std::vector<double>& bias, size_t n_classes,
                    size_t n_features, std::vector<double>& scores) {
  scores.assign(bias.begin(), bias.end());
  for (size_t c = 0; c < n_classes; ++c) {
    const double* w = weights.data() + c * n_features;
    double s = 0.0;
    for (const auto& [j, v] : row.entries) s += w[j] * v;
    scores[c] += s;
  }
}

void softmax_inplace(std::vector<double>& scores) {
  double m = *std::max_element(scores.begin(), scores.end());
  double z = 0.0;
  for (double& s : scores) {
    s = std::exp(s - m);
    z += s;
  }
  for (double& s : scores) s /= z;
}

void validate(const std::vector<textfeat::SparseVector>& x,
              const std::vector<size_t>& y, size_t n_classes,
              size_t n_features) {
  if (x.empty() || x.size() != y.size())
    throw std::invalid_argument("softmax: rows/labels size mismatch");
  if (n_classes < 2) throw std::invalid_argument("softmax: need >= 2 classes");
  for (size_t i = 0; i < x.size(); ++i) {
    if (y[i] >= n_classes)
      throw std::invalid_argument("softmax: label out of range");
    if (x[i].dimension != n_features)
      throw std::invalid_argument("softmax: row dimension mismatch");
  }
}

}  // namespace

double loss(const std::vector<textfeat::SparseVector>& x,
            const std::vector<size_t>& y, const std::vector<double>& weights,
            const std::vector<double>& bias, size_t n_classes,
            size_t n_features, double l2) {
  double total = 0.0;
  std::vector<double> scores;
  for (size_t i = 0; i < x.size(); ++i) {
    scores_for_row(x[i], weights, bias, n_classes, n_features, scores);
    double m = *std::max_element(scores.begin(), scores.end());
    double z = 0.0;
    for (double s : scores) z += std::exp(s - m);
    // -log p_y = log(sum exp) - s_y
    total += std::log(z) + m - scores[y[i]];
  }
  total /= double(x.size());
  double reg = 0.0;
  for (double w : weights) reg += w * w;
  return total + 0.5 * l2 * reg;
}

void gradient(const std::vector<textfeat::SparseVector>& x,
              const std::vector<size_t>& y, const std::vector<double>& weights,
              const std::vector<double>& bias, size_t n_classes,
              size_t n_features, double l2, std::vector<double>& grad_w,
              std::vector<double>& grad_b) {
  grad_w.assign(n_classes * n_features, 0.0);
  grad_b.assign(n_classes, 0.0);
  std::vector<double> scores;
  for (size_t i = 0; i < x.size(); ++i) {
    scores_for_row(x[i], weights, bias, n_classes, n_features, scores);
    softmax_inplace(scores);
    for (size_t c = 0; c < n_classes; ++c) {
      double err = scores[c] - (y[i] == c ? 1.0 : 0.0);
      grad_b[c] += err;
      double* g = grad_w.data() + c * n_features;
      for (const auto& [j, v] : x[i].entries) g[j] += err * v;
    }
  }
  const double inv_n = 1.0 / double(x.size());
  for (size_t t = 0; t < grad_w.size(); ++t) {
    grad_w[t] = grad_w[t] * inv_n + l2 * weights[t];
  }
  for (double& g : grad_b) g *= inv_n;
}

Model train(const std::vector<textfeat::SparseVector>& x,
            const std::vector<size_t>& y, size_t n_classes, size_t n_features,
            const Config& config) {
  validate(x, y, n_classes, n_features);
  Model model;
  model.n_features = n_features;
  model.n_classes = n_classes;
  model.weights.assign(n_classes * n_features, 0.0);
  model.bias.assign(n_classes, 0.0);

  std::vector<double> grad_w, grad_b;
  double prev_loss =
      loss(x, y, model.weights, model.bias, n_classes, n_features, config.l2);
  int epoch = 0;
  for (; epoch < config.max_epochs; ++epoch) {
    gradient(x, y, model.weights, model.bias, n_classes, n_features, config.l2,
             grad_w, grad_b);
    for (size_t t = 0; t < model.weights.size(); ++t)
      model.weights[t] -= config.learning_rate * grad_w[t];
    for (size_t c = 0; c < n_classes; ++c)
      model.bias[c] -= config.learning_rate * grad_b[c];
    double cur =
        loss(x, y, model.weights, model.bias, n_classes, n_features, config.l2);
    if (std::abs(prev_loss - cur) < config.tolerance) {
      prev_loss = cur;
      ++epoch;
      break;
    }
    prev_loss = cur;
  }
  model.epochs_run = epoch;
  model.final_loss = prev_loss;
  return model;
}

std::vector<double> predict_proba(const Model& model,
                                  const textfeat::SparseVector& row) {
  if (row.dimension != model.n_features)
    throw std::invalid_argument("softmax: row dimension mismatch");
  std::vector<double> scores;
  scores_for_row(row, model.weights, model.bias, model.n_classes,
                 model.n_features, scores);
  softmax_inplace(scores);
  return scores;
}

size_t predict_class(const Model& model, const textfeat::SparseVector& row) {
  auto p = predict_proba(model, row);
  return size_t(std::max_element(p.begin(), p.end()) - p.begin());
}

}  // namespace qurate::softmax
