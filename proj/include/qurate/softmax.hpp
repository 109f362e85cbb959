#pragma once

#include <cstddef>
#include <vector>

#include "qurate/textfeat.hpp"

namespace qurate::softmax {

struct Config {
  double learning_rate = 0.1;
  double l2 = 1e-3;
  int max_epochs = 2000;
  double tolerance = 1e-8;
};

// Multinomial logistic regression over sparse rows; one implementation is
// shared by the framing classifier and every downstream sentiment head.
struct Model {
  size_t n_features = 0;
  size_t n_classes = 0;
  std::vector<double> weights;  // class-major: weights[c * n_features + j]
  std::vector<double> bias;     // per class
  int epochs_run = 0;
  double final_loss = 0.0;
};

// Mean cross-entropy plus 0.5 * l2 * |W|^2 (biases unpenalized).
double loss(const std::vector<textfeat::SparseVector>& x,
            const std::vector<size_t>& y, const std::vector<double>& weights,
            const std::vector<double>& bias, size_t n_classes,
            size_t n_features, double l2);

void gradient(const std::vector<textfeat::SparseVector>& x,
              const std::vector<size_t>& y, const std::vector<double>& weights,
              const std::vector<double>& bias, size_t n_classes,
              size_t n_features, double l2, std::vector<double>& grad_w,
              std::vector<double>& grad_b);

// Full-batch gradient descent from zero parameters; deterministic.
Model train(const std::vector<textfeat::SparseVector>& x,
            const std::vector<size_t>& y, size_t n_classes, size_t n_features,
            const Config& config = {});

// Softmax distribution over classes; rows sum to 1.
std::vector<double> predict_proba(const Model& model,
                                  const textfeat::SparseVector& row);

// Argmax class; ties resolve to the lowest class index.
size_t predict_class(const Model& model, const textfeat::SparseVector& row);

}  // namespace qurate::softmax
