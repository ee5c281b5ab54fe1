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

#include "geoloc/textmodel.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include "json.hpp"
#include <sstream>

#include "geoloc/text_io.hpp"

namespace geoloc {

namespace {

constexpr int kModelFormatVersion = 1;

void check_batch(const LinearModel& model, std::span<const SparseVector> xs,
                 std::span<const int> ys) {
  if (xs.size() != ys.size()) {
    throw std::invalid_argument("feature/label count mismatch: " + std::to_string(xs.size()) +
                                " vs " + std::to_string(ys.size()));
  }
  if (model.weights.size() != model.num_regions * model.num_features ||
      model.bias.size() != model.num_regions) {
    throw std::invalid_argument("model parameter shapes are inconsistent");
  }
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (xs[i].dimension != model.num_features) {
      throw std::invalid_argument("example " + std::to_string(i) + " has dimension " +
                                  std::to_string(xs[i].dimension) + ", model expects " +
                                  std::to_string(model.num_features));
    }
    if (ys[i] < 0 || static_cast<std::size_t>(ys[i]) >= model.num_regions) {
      throw std::invalid_argument("example " + std::to_string(i) + " has label " +
                                  std::to_string(ys[i]) + " outside [0, " +
                                  std::to_string(model.num_regions) + ")");
    }
  }
}

double l1_norm(std::span<const double> w) {
  double sum = 0.0;
  for (double v : w) sum += std::abs(v);
  return sum;
}

}  // namespace

LinearModel LinearModel::zeros(std::size_t num_regions, std::size_t num_features) {
  LinearModel model;
  model.num_regions = num_regions;
  model.num_features = num_features;
  model.weights.assign(num_regions * num_features, 0.0);
  model.bias.assign(num_regions, 0.0);
  return model;
}

std::size_t LinearModel::nonzero_weights() const {
  return static_cast<std::size_t>(
      std::count_if(weights.begin(), weights.end(), [](double w) { return w != 0.0; }));
}

double LinearModel::sparsity() const {
  if (weights.empty()) return 1.0;
  return 1.0 - static_cast<double>(nonzero_weights()) / static_cast<double>(weights.size());
}

std::vector<double> LinearModel::scores(const SparseVector& x) const {
  std::vector<double> out(bias);
  for (std::size_t k = 0; k < num_regions; ++k) {
    const double* row = weights.data() + k * num_features;
    double dot = 0.0;
    for (std::size_t j = 0; j < x.nnz(); ++j) dot += row[x.indices[j]] * x.values[j];
    out[k] += dot;
  }
  return out;
}

LossAndGradient loss_and_gradient(const LinearModel& model, std::span<const SparseVector> xs,
                                  std::span<const int> ys, double l1) {
  check_batch(model, xs, ys);
  if (xs.empty()) throw std::invalid_argument("loss over an empty batch");
  const std::size_t k_regions = model.num_regions;
  const std::size_t dim = model.num_features;
  const double inv_n = 1.0 / static_cast<double>(xs.size());

  LossAndGradient out;
  out.grad_weights.assign(k_regions * dim, 0.0);
  out.grad_bias.assign(k_regions, 0.0);

  std::vector<double> prob(k_regions);
  double ce_sum = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const SparseVector& x = xs[i];
    const auto scores = model.scores(x);
    const double max_score = *std::max_element(scores.begin(), scores.end());
    double z = 0.0;
    for (std::size_t k = 0; k < k_regions; ++k) {
      prob[k] = std::exp(scores[k] - max_score);
      z += prob[k];
    }
    const double log_z = std::log(z) + max_score;
    ce_sum += log_z - scores[ys[i]];
    for (std::size_t k = 0; k < k_regions; ++k) {
      const double residual = (prob[k] / z - (static_cast<int>(k) == ys[i] ? 1.0 : 0.0)) * inv_n;
      out.grad_bias[k] += residual;
      double* grow = out.grad_weights.data() + k * dim;
      for (std::size_t j = 0; j < x.nnz(); ++j) grow[x.indices[j]] += residual * x.values[j];
    }
  }
  out.cross_entropy = ce_sum * inv_n;
  out.objective = out.cross_entropy + l1 * l1_norm(model.weights);
  return out;
}

double soft_threshold(double v, double t) {
  if (v > t) return v - t;
  if (v < -t) return v + t;
  return 0.0;
}

LinearModel train(std::span<const SparseVector> xs, std::span<const int> ys,
                  std::size_t num_regions, double l1, const TrainOptions& opts) {
  if (xs.empty()) throw std::invalid_argument("cannot train on zero examples");
  if (num_regions == 0) throw std::invalid_argument("cannot train with zero regions");
  if (!(l1 >= 0.0) || !std::isfinite(l1)) throw std::invalid_argument("l1 must be finite and >= 0");
  if (!(opts.step > 0.0)) throw std::invalid_argument("step size must be positive");

  LinearModel model = LinearModel::zeros(num_regions, xs.front().dimension);
  model.l1 = l1;
  auto state = loss_and_gradient(model, xs, ys, l1);
  model.info.objective_history.push_back(state.objective);

  const double threshold = opts.step * l1;
  for (std::size_t epoch = 0; epoch < opts.max_epochs; ++epoch) {
    for (std::size_t i = 0; i < model.weights.size(); ++i) {
      model.weights[i] = soft_threshold(model.weights[i] - opts.step * state.grad_weights[i],
                                        threshold);
    }
    for (std::size_t k = 0; k < num_regions; ++k) model.bias[k] -= opts.step * state.grad_bias[k];

    const double previous = state.objective;
    state = loss_and_gradient(model, xs, ys, l1);
    model.info.objective_history.push_back(state.objective);
    model.info.epochs = epoch + 1;
    if (!std::isfinite(state.objective)) {
      throw NumericalError("objective became non-finite at epoch " + std::to_string(epoch + 1) +
                           "; the step size is too large");
    }
    const double scale = std::max(std::abs(previous), std::numeric_limits<double>::min());
    if ((previous - state.objective) / scale < opts.tolerance) {
      model.info.converged = true;
      break;
    }
  }
  model.info.final_objective = state.objective;
  return model;
}

int predict_region(const LinearModel& model, const SparseVector& x) {
  if (x.dimension != model.num_features) {
    throw std::invalid_argument("feature dimension " + std::to_string(x.dimension) +
                                " does not match model dimension " +
                                std::to_string(model.num_features));
  }
  const auto scores = model.scores(x);
  // max_element returns the first maximum, i.e. the lowest region id.
  return static_cast<int>(std::max_element(scores.begin(), scores.end()) - scores.begin());
}

GeoPoint predict_location(const LinearModel& model, const KdTreeGrid& grid,
                          const SparseVector& x) {
  return grid.decode(predict_region(model, x));
}

std::string LinearModel::serialize() const {
  nlohmann::ordered_json doc;
  doc["format"] = "geoloc-lr-model";
  doc["version"] = kModelFormatVersion;
  doc["l1"] = l1;
  doc["num_regions"] = num_regions;
  doc["num_features"] = num_features;
  doc["grid_hash"] = grid_hash;
  doc["vocab_hash"] = vocab_hash;
  doc["training"] = {{"epochs", info.epochs},
                     {"final_objective", info.final_objective},
                     {"converged", info.converged},
                     {"objective_history", info.objective_history}};
  doc["bias"] = bias;
  auto& triples = doc["weights"] = nlohmann::ordered_json::array();
  for (std::size_t k = 0; k < num_regions; ++k) {
    for (std::size_t j = 0; j < num_features; ++j) {
      const double w = weight(k, j);
      if (w != 0.0) triples.push_back({k, j, w});
    }
  }
  return doc.dump() + "\n";
}

LinearModel LinearModel::deserialize(std::string_view json) {
  LinearModel model;
  try {
    const auto doc = nlohmann::json::parse(json);
    if (doc.at("format") != "geoloc-lr-model") throw std::runtime_error("not a model artifact");
    if (doc.at("version") != kModelFormatVersion) {
      throw std::runtime_error("unsupported model version " + doc.at("version").dump());
    }
    model = zeros(doc.at("num_regions").get<std::size_t>(),
                  doc.at("num_features").get<std::size_t>());
    model.l1 = doc.at("l1").get<double>();
    model.grid_hash = doc.at("grid_hash").get<std::string>();
    model.vocab_hash = doc.at("vocab_hash").get<std::string>();
    const auto& training = doc.at("training");
    model.info.epochs = training.at("epochs").get<std::size_t>();
    model.info.final_objective = training.at("final_objective").get<double>();
    model.info.converged = training.at("converged").get<bool>();
    model.info.objective_history = training.at("objective_history").get<std::vector<double>>();
    model.bias = doc.at("bias").get<std::vector<double>>();
    if (model.bias.size() != model.num_regions) throw std::runtime_error("bias length mismatch");
    for (const auto& t : doc.at("weights")) {
      const auto k = t.at(0).get<std::size_t>();
      const auto j = t.at(1).get<std::size_t>();
      if (k >= model.num_regions || j >= model.num_features) {
        throw std::runtime_error("weight index out of range");
      }
      model.weight(k, j) = t.at(2).get<double>();
    }
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error(std::string("malformed model artifact: ") + e.what());
  }
  return model;
}

void LinearModel::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write model '" + path.string() + "'");
  out << serialize();
}

LinearModel LinearModel::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open model '" + path.string() + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return deserialize(buf.str());
}

std::string LinearModel::hash() const { return sha256_hex(serialize()); }

}  // namespace geoloc
