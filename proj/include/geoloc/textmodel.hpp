// Copyright 2026 The Geoloc Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "geoloc/features.hpp"
#include "geoloc/geo.hpp"
#include "geoloc/grid.hpp"

namespace geoloc {

class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct TrainingInfo {
  std::size_t epochs = 0;
  double final_objective = 0.0;
  bool converged = false;
  // Regularized objective before the first step and after every epoch.
  std::vector<double> objective_history;
};

// Multinomial logistic regression over grid regions. Weights are held
// densely (regions x features, row-major); sparsity comes from the l1 prox
// and is what the serialized form stores.
struct LinearModel {
  std::size_t num_regions = 0;
  std::size_t num_features = 0;
  std::vector<double> weights;
  std::vector<double> bias;
  double l1 = 0.0;
  std::string grid_hash;
  std::string vocab_hash;
  TrainingInfo info;

  static LinearModel zeros(std::size_t num_regions, std::size_t num_features);

  double weight(std::size_t region, std::size_t feature) const {
    return weights[region * num_features + feature];
  }
  double& weight(std::size_t region, std::size_t feature) {
    return weights[region * num_features + feature];
  }

  std::size_t nonzero_weights() const;
  // Fraction of exactly-zero weights.
  double sparsity() const;

  // W x + b.
  std::vector<double> scores(const SparseVector& x) const;

  // Versioned JSON: l1, upstream hashes, bias, and nonzero weights as
  // (region, feature, value) triples.
  std::string serialize() const;
  static LinearModel deserialize(std::string_view json);
  void save(const std::filesystem::path& path) const;
  static LinearModel load(const std::filesystem::path& path);
  std::string hash() const;
};

struct LossAndGradient {
  double objective = 0.0;      // mean cross-entropy + l1 * ||W||_1
  double cross_entropy = 0.0;  // mean cross-entropy alone
  std::vector<double> grad_weights;  // gradient of the smooth term only
  std::vector<double> grad_bias;
};

LossAndGradient loss_and_gradient(const LinearModel& model, std::span<const SparseVector> xs,
                                  std::span<const int> ys, double l1);

// sign(v) * max(|v| - t, 0).
double soft_threshold(double v, double t);

struct TrainOptions {
  std::size_t max_epochs = 500;
  double step = 1.0;
  double tolerance = 1e-6;
  // Full-batch training from a zero start draws no random numbers; the
  // seed is carried so configs stay complete.
  std::uint64_t seed = 0;
};

// Proximal gradient descent: a full-batch step on the cross-entropy, then
// soft-thresholding of every weight by step * l1 (bias unregularized).
// Stops when the relative objective decrease drops below tolerance.
LinearModel train(std::span<const SparseVector> xs, std::span<const int> ys,
                  std::size_t num_regions, double l1, const TrainOptions& opts = {});

// Argmax of W x + b, ties to the lowest region id.
int predict_region(const LinearModel& model, const SparseVector& x);

GeoPoint predict_location(const LinearModel& model, const KdTreeGrid& grid, const SparseVector& x);

}  // namespace geoloc
