// Copyright 2026 The uwbpos Authors
// SPDX-License-Identifier: Apache-2.0
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "uwbpos/nn/model.hpp"

#include <algorithm>
#include <cstring>
#include <istream>
#include <numeric>
#include <ostream>
#include <set>

#include <nlohmann/json.hpp>

#include "uwbpos/error.hpp"
#include "uwbpos/nn/knn.hpp"
#include "uwbpos/nn/loss.hpp"
#include "uwbpos/rng.hpp"

namespace uwbpos::nn {
namespace {

using nlohmann::json;

constexpr char kMagic[8] = {'U', 'W', 'B', 'P', 'N', 'N', '0', '1'};
// Forward passes over the P-NN image path are memory hungry; evaluation runs
// in chunks of this many samples.
constexpr std::size_t kEvalChunk = 64;

Mat targets_for(const TrainingSet& data, std::span<const std::size_t> rows) {
  Mat t(static_cast<Eigen::Index>(rows.size()), 3);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const Vec3& p = data.locations[rows[i]];
    t.row(static_cast<Eigen::Index>(i)) << p.x, p.y, p.z;
  }
  return t;
}

LossResult batch_loss(const TrainedModel& model, const Mat& out, const TrainingSet& data,
                      std::span<const std::size_t> rows) {
  if (model.spec.shape.head == Head::kRegression) return mse(out, targets_for(data, rows));
  std::vector<int> labels(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) labels[i] = data.zones[rows[i]];
  return softmax_xent(out, labels);
}

void check_training_set(const ModelSpec& spec, const TrainingSet& data) {
  if (data.features.empty()) throw InputError("train: empty dataset");
  if (data.zones.size() != data.features.size()) throw InputError("train: one zone per sample");
  if (spec.shape.head == Head::kRegression) {
    if (data.locations.size() != data.features.size()) {
      throw InputError("train: regression needs one location per sample");
    }
  } else {
    const std::set<int> distinct(data.zones.begin(), data.zones.end());
    if (distinct.size() < 2) throw InputError("train: need samples from at least two zones");
    for (int z : distinct) {
      if (z < 0 || z >= spec.shape.outputs) {
        throw InputError("train: zone " + std::to_string(z) + " outside the head width");
      }
    }
  }
}

Matrix flatten_all(std::span<const FeatureSet> features, const NormalizationStats& stats) {
  if (features.empty()) return {};
  const auto first = flatten_features(features[0], stats);
  Matrix m(features.size(), first.size());
  for (std::size_t i = 0; i < features.size(); ++i) {
    const auto v = i == 0 ? first : flatten_features(features[i], stats);
    if (v.size() != first.size()) throw InputError("knn: feature dimensions differ");
    std::copy(v.begin(), v.end(), m.row(i).begin());
  }
  return m;
}

json spec_to_json(const ModelSpec& s) {
  return {{"kind", to_string(s.kind)},
          {"shape",
           {{"num_sensors", s.shape.num_sensors},
            {"num_bins", s.shape.num_bins},
            {"feature_size", s.shape.feature_size},
            {"outputs", s.shape.outputs},
            {"head", to_string(s.shape.head)}}},
          {"pnn",
           {{"si_channels", s.pnn.si_channels},
            {"dp_channels", s.pnn.dp_channels},
            {"kernel", s.pnn.kernel},
            {"key_dim", s.pnn.key_dim},
            {"fc", s.pnn.fc},
            {"use_dp", s.pnn.use_dp},
            {"use_si", s.pnn.use_si},
            {"use_sa", s.pnn.use_sa}}},
          {"fcl", {{"hidden", s.fcl.hidden}}},
          {"knn_k", s.knn_k},
          {"seed", s.seed}};
}

ModelSpec spec_from_json(const json& j) {
  ModelSpec s;
  s.kind = parse_learner(j.at("kind").get<std::string>());
  const auto& sh = j.at("shape");
  s.shape.num_sensors = sh.at("num_sensors");
  s.shape.num_bins = sh.at("num_bins");
  s.shape.feature_size = sh.at("feature_size");
  s.shape.outputs = sh.at("outputs");
  s.shape.head = parse_head(sh.at("head").get<std::string>());
  const auto& p = j.at("pnn");
  s.pnn.si_channels = p.at("si_channels").get<std::vector<int>>();
  s.pnn.dp_channels = p.at("dp_channels").get<std::vector<int>>();
  s.pnn.kernel = p.at("kernel");
  s.pnn.key_dim = p.at("key_dim");
  s.pnn.fc = p.at("fc").get<std::vector<int>>();
  s.pnn.use_dp = p.at("use_dp");
  s.pnn.use_si = p.at("use_si");
  s.pnn.use_sa = p.at("use_sa");
  s.fcl.hidden = j.at("fcl").at("hidden").get<std::vector<int>>();
  s.knn_k = j.at("knn_k");
  s.seed = j.at("seed");
  return s;
}

void write_doubles(std::ostream& out, const double* p, std::size_t n) {
  out.write(reinterpret_cast<const char*>(p), static_cast<std::streamsize>(n * sizeof(double)));
}

void read_doubles(std::istream& in, double* p, std::size_t n) {
  in.read(reinterpret_cast<char*>(p), static_cast<std::streamsize>(n * sizeof(double)));
  if (!in) throw InputError("model file truncated");
}

}  // namespace

std::unique_ptr<Network> make_network(const ModelSpec& spec) {
  switch (spec.kind) {
    case LearnerKind::kPnn: return std::make_unique<Pnn>(spec.shape, spec.pnn, spec.seed);
    case LearnerKind::kFcl: return std::make_unique<Fcl>(spec.shape, spec.fcl, spec.seed);
    case LearnerKind::kKnn: return nullptr;
  }
  return nullptr;
}

TrainedModel train(const ModelSpec& spec, const TrainConfig& config, const TrainingSet& data) {
  spec.shape.validate();
  check_training_set(spec, data);
  if (config.epochs < 0 || config.batch_size < 1) {
    throw InputError("train: epochs must be >= 0 and batch size >= 1");
  }

  TrainedModel model;
  model.spec = spec;
  model.train = config;
  model.stats = compute_normalization(data.features);

  if (spec.kind == LearnerKind::kKnn) {
    if (spec.knn_k < 1 || static_cast<std::size_t>(spec.knn_k) > data.features.size()) {
      throw InputError("knn: k exceeds the training set size");
    }
    model.knn_points = flatten_all(data.features, model.stats);
    model.knn_labels = data.zones;
    return model;
  }

  model.net = make_network(spec);
  Network& net = *model.net;
  Adam opt(net.params(), config.adam);
  model.initial_loss = dataset_loss(model, data);

  std::vector<std::size_t> order(data.features.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  const std::size_t batch = static_cast<std::size_t>(config.batch_size);
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    Rng rng(derive_seed(spec.seed, "epoch", static_cast<std::uint64_t>(epoch)));
    std::shuffle(order.begin(), order.end(), rng);
    double total = 0;
    for (std::size_t start = 0; start < order.size(); start += batch) {
      const std::span<const std::size_t> rows(order.data() + start,
                                              std::min(batch, order.size() - start));
      const Batch b = make_batch(data.features, rows, model.stats, spec.shape, net.uses_image());
      const Mat out = net.forward(b);
      const LossResult loss = batch_loss(model, out, data, rows);
      net.backward(loss.grad);
      opt.step();
      total += loss.loss * static_cast<double>(rows.size());
    }
    model.loss_trace.push_back(total / static_cast<double>(order.size()));
  }
  return model;
}

Mat predict(TrainedModel& model, std::span<const FeatureSet> features) {
  const Eigen::Index n = static_cast<Eigen::Index>(features.size());
  if (model.spec.kind == LearnerKind::kKnn) {
    Mat probs = Mat::Zero(n, model.spec.shape.outputs);
    for (Eigen::Index i = 0; i < n; ++i) {
      const auto q = flatten_features(features[i], model.stats);
      const int z = knn_classify(model.knn_points, model.knn_labels, q, model.spec.knn_k);
      probs(i, z) = 1.0;
    }
    return probs;
  }
  if (!model.net) throw InputError("predict: model has no network");
  Mat out(n, model.spec.shape.outputs);
  std::vector<std::size_t> rows;
  for (std::size_t start = 0; start < features.size(); start += kEvalChunk) {
    rows.resize(std::min(kEvalChunk, features.size() - start));
    std::iota(rows.begin(), rows.end(), start);
    const Batch b =
        make_batch(features, rows, model.stats, model.spec.shape, model.net->uses_image());
    Mat o = model.net->forward(b);
    if (model.spec.shape.head == Head::kClassification) o = softmax_rows(o);
    out.middleRows(static_cast<Eigen::Index>(start), o.rows()) = o;
  }
  return out;
}

std::vector<int> predict_zones(TrainedModel& model, std::span<const FeatureSet> features) {
  if (model.spec.shape.head != Head::kClassification) {
    throw InputError("predict_zones: model has a regression head");
  }
  const Mat p = predict(model, features);
  std::vector<int> z(features.size());
  for (Eigen::Index i = 0; i < p.rows(); ++i) p.row(i).maxCoeff(&z[i]);
  return z;
}

double dataset_loss(TrainedModel& model, const TrainingSet& data) {
  if (!model.net) throw InputError("dataset_loss: model has no network");
  double total = 0;
  std::vector<std::size_t> rows;
  for (std::size_t start = 0; start < data.features.size(); start += kEvalChunk) {
    rows.resize(std::min(kEvalChunk, data.features.size() - start));
    std::iota(rows.begin(), rows.end(), start);
    const Batch b = make_batch(data.features, rows, model.stats, model.spec.shape,
                               model.net->uses_image());
    const Mat out = model.net->forward(b);
    total += batch_loss(model, out, data, rows).loss * static_cast<double>(rows.size());
  }
  return total / static_cast<double>(data.features.size());
}

void save_model(std::ostream& out, TrainedModel& model) {
  json h;
  h["spec"] = spec_to_json(model.spec);
  h["train"] = {{"lr", model.train.adam.lr},
                {"beta1", model.train.adam.beta1},
                {"beta2", model.train.adam.beta2},
                {"eps", model.train.adam.eps},
                {"epochs", model.train.epochs},
                {"batch_size", model.train.batch_size}};
  h["stats"] = {{"power_mean", model.stats.power_mean},
                {"power_std", model.stats.power_std},
                {"bin_mean", model.stats.bin_mean},
                {"bin_std", model.stats.bin_std}};
  h["initial_loss"] = model.initial_loss;
  h["loss_trace"] = model.loss_trace;
  json params = json::array();
  if (model.net) {
    for (Param* p : model.net->params()) {
      params.push_back({{"name", p->name}, {"rows", p->value.rows()}, {"cols", p->value.cols()}});
    }
  } else {
    params.push_back({{"name", "knn.points"},
                      {"rows", model.knn_points.rows()},
                      {"cols", model.knn_points.cols()}});
    h["knn_labels"] = model.knn_labels;
  }
  h["params"] = params;

  const std::string header = h.dump();
  const std::uint64_t len = header.size();
  out.write(kMagic, sizeof kMagic);
  out.write(reinterpret_cast<const char*>(&len), sizeof len);
  out.write(header.data(), static_cast<std::streamsize>(len));
  if (model.net) {
    for (Param* p : model.net->params()) write_doubles(out, p->value.data(), p->value.size());
  } else {
    write_doubles(out, model.knn_points.data(), model.knn_points.size());
  }
}

TrainedModel load_model(std::istream& in) {
  char magic[sizeof kMagic];
  in.read(magic, sizeof magic);
  if (!in || std::memcmp(magic, kMagic, sizeof kMagic) != 0) {
    throw InputError("not a uwbpos model file");
  }
  std::uint64_t len = 0;
  in.read(reinterpret_cast<char*>(&len), sizeof len);
  if (!in || len > (1u << 30)) throw InputError("model file header is corrupt");
  std::string header(len, '\0');
  in.read(header.data(), static_cast<std::streamsize>(len));
  if (!in) throw InputError("model file truncated");

  const json h = json::parse(header);
  TrainedModel m;
  m.spec = spec_from_json(h.at("spec"));
  const auto& t = h.at("train");
  m.train.adam.lr = t.at("lr");
  m.train.adam.beta1 = t.at("beta1");
  m.train.adam.beta2 = t.at("beta2");
  m.train.adam.eps = t.at("eps");
  m.train.epochs = t.at("epochs");
  m.train.batch_size = t.at("batch_size");
  const auto& st = h.at("stats");
  m.stats = {st.at("power_mean"), st.at("power_std"), st.at("bin_mean"), st.at("bin_std")};
  m.initial_loss = h.at("initial_loss");
  m.loss_trace = h.at("loss_trace").get<std::vector<double>>();
  const auto& params = h.at("params");

  if (m.spec.kind == LearnerKind::kKnn) {
    const auto& p = params.at(0);
    m.knn_points = Matrix(p.at("rows").get<std::size_t>(), p.at("cols").get<std::size_t>());
    m.knn_labels = h.at("knn_labels").get<std::vector<int>>();
    if (m.knn_labels.size() != m.knn_points.rows()) throw InputError("knn model: label count mismatch");
    read_doubles(in, m.knn_points.data(), m.knn_points.size());
    return m;
  }

  m.net = make_network(m.spec);
  const auto mine = m.net->params();
  if (params.size() != mine.size()) throw InputError("model file: parameter count mismatch");
  for (std::size_t i = 0; i < mine.size(); ++i) {
    const auto& p = params[i];
    if (p.at("name").get<std::string>() != mine[i]->name ||
        p.at("rows").get<Eigen::Index>() != mine[i]->value.rows() ||
        p.at("cols").get<Eigen::Index>() != mine[i]->value.cols()) {
      throw InputError("model file: parameter " + std::to_string(i) + " (" +
                       p.at("name").get<std::string>() + ") does not match the configured shape");
    }
  }
  for (Param* p : mine) read_doubles(in, p->value.data(), p->value.size());
  return m;
}

std::uint64_t parameter_checksum(TrainedModel& model) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto mix = [&](const double* p, std::size_t n) {
    const auto* bytes = reinterpret_cast<const unsigned char*>(p);
    for (std::size_t i = 0; i < n * sizeof(double); ++i) {
      h ^= bytes[i];
      h *= 0x100000001b3ULL;
    }
  };
  if (model.net) {
    for (Param* p : model.net->params()) mix(p->value.data(), p->value.size());
  } else {
    mix(model.knn_points.data(), model.knn_points.size());
  }
  return h;
}

}  // namespace uwbpos::nn
