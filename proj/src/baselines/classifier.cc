// src/baselines/classifier.cc

// Copyright 2026  The dysarthria-mtl Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#include <fstream>

#include "dmtl/baselines/baselines.h"

namespace dmtl {

namespace {

void RejectUnknown(const nlohmann::json &config, std::initializer_list<const char *> keys,
                   Family family) {
  if (!config.is_object()) throw ValidationError("classifier config must be an object");
  for (const auto &[key, value] : config.items()) {
    bool known = false;
    for (const char *k : keys) known = known || key == k;
    if (!known)
      throw ValidationError("unknown " + std::string(FamilyName(family)) +
                            " hyperparameter '" + key + "'");
  }
}

SvmParams SvmFromConfig(const nlohmann::json &c) {
  RejectUnknown(c, {"C", "gamma"}, Family::kSvm);
  SvmParams p;
  p.c = c.value("C", p.c);
  p.gamma = c.value("gamma", p.gamma);
  return p;
}

MlpParams MlpFromConfig(const nlohmann::json &c, std::uint64_t seed) {
  RejectUnknown(c, {"hidden_layers", "activation", "optimizer", "lr"}, Family::kMlp);
  MlpParams p;
  p.hidden_layers = c.value("hidden_layers", p.hidden_layers);
  if (c.contains("activation")) p.activation = ParseActivation(c["activation"].get<std::string>());
  if (c.contains("optimizer")) p.optimizer = ParseOptimizer(c["optimizer"].get<std::string>());
  p.lr = c.value("lr", p.lr);
  p.seed = seed;
  return p;
}

GbdtParams GbdtFromConfig(const nlohmann::json &c) {
  RejectUnknown(c, {"max_depth"}, Family::kGbdt);
  GbdtParams p;
  p.max_depth = c.value("max_depth", p.max_depth);
  return p;
}

nlohmann::json MatrixJson(const Eigen::MatrixXd &m) {
  std::vector<double> data;
  data.reserve(m.size());
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c) data.push_back(m(r, c));
  return {{"rows", m.rows()}, {"cols", m.cols()}, {"data", data}};
}

Eigen::MatrixXd MatrixFromJson(const nlohmann::json &j) {
  const auto rows = j.at("rows").get<Eigen::Index>(), cols = j.at("cols").get<Eigen::Index>();
  auto data = j.at("data").get<std::vector<double>>();
  if (static_cast<Eigen::Index>(data.size()) != rows * cols)
    throw ValidationError("matrix payload has the wrong size");
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r)
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = data[r * cols + c];
  return m;
}

nlohmann::json VectorJson(const Eigen::VectorXd &v) {
  return std::vector<double>(v.data(), v.data() + v.size());
}

Eigen::VectorXd VectorFromJson(const nlohmann::json &j) {
  auto v = j.get<std::vector<double>>();
  return Eigen::Map<Eigen::VectorXd>(v.data(), v.size());
}

}  // namespace

void ValidateClassifierConfig(Family family, const nlohmann::json &config) {
  try {
    switch (family) {
      case Family::kSvm: {
        SvmParams p = SvmFromConfig(config);
        if (!(p.c > 0) || !(p.gamma > 0)) throw ValidationError("SVM C and gamma must be > 0");
        break;
      }
      case Family::kMlp: MlpFromConfig(config, 0).Validate(); break;
      case Family::kGbdt: GbdtFromConfig(config).Validate(); break;
    }
  } catch (const nlohmann::json::exception &) {
    throw ValidationError("bad " + std::string(FamilyName(family)) + " hyperparameter value in " +
                          config.dump());
  }
}

ClassifierModel TrainClassifier(Family family, const nlohmann::json &config,
                                const LabelledData &train, const LabelledData *valid,
                                std::uint64_t seed) {
  train.Validate();
  ClassifierModel m;
  m.family = family;
  m.config = config;
  // Parse before fitting anything so bad hyperparameters fail fast.
  ValidateClassifierConfig(family, config);
  m.scaler = Scaler::Fit(train.x);
  LabelledData scaled{m.scaler.TransformRows(train.x), train.y};
  LabelledData scaled_valid;
  const LabelledData *v = nullptr;
  if (valid && valid->size() > 0) {
    valid->Validate();
    scaled_valid = {m.scaler.TransformRows(valid->x), valid->y};
    v = &scaled_valid;
  }
  switch (family) {
    case Family::kSvm:
      m.svm = std::make_shared<SvmModel>(TrainSvm(scaled, SvmFromConfig(config)));
      break;
    case Family::kMlp:
      m.mlp = std::make_shared<MlpModel>(TrainMlp(scaled, v, MlpFromConfig(config, seed)));
      break;
    case Family::kGbdt:
      m.gbdt = std::make_shared<GbdtModel>(TrainGbdt(scaled, v, GbdtFromConfig(config)));
      break;
  }
  return m;
}

int Predict(const ClassifierModel &model, const Eigen::VectorXd &features) {
  if (!features.allFinite()) throw ValidationError("features contain NaN or Inf");
  Eigen::VectorXd x = model.scaler.Transform(features);
  Eigen::Index best = 0;
  switch (model.family) {
    case Family::kSvm: {
      SvmDecision(*model.svm, x).maxCoeff(&best);
      return model.svm->classes[best];
    }
    case Family::kMlp: MlpLogits(*model.mlp, x).maxCoeff(&best); break;
    case Family::kGbdt: GbdtScores(*model.gbdt, x).maxCoeff(&best); break;
  }
  return static_cast<int>(best);
}

std::vector<int> PredictRows(const ClassifierModel &model, const Eigen::MatrixXd &features) {
  std::vector<int> out;
  out.reserve(features.rows());
  for (Eigen::Index i = 0; i < features.rows(); ++i)
    out.push_back(Predict(model, Eigen::VectorXd(features.row(i).transpose())));
  return out;
}

void SaveClassifier(const std::string &path, const ClassifierModel &model) {
  nlohmann::json j;
  j["format"] = "dmtl-classifier";
  j["version"] = kClassifierFormatVersion;
  j["family"] = FamilyName(model.family);
  j["config"] = model.config;
  j["scaler"] = model.scaler.ToJson();
  nlohmann::json body;
  switch (model.family) {
    case Family::kSvm: {
      const SvmModel &s = *model.svm;
      body["C"] = s.params.c;
      body["gamma"] = s.params.gamma;
      body["support"] = MatrixJson(s.support);
      body["classes"] = s.classes;
      for (const BinarySvm &b : s.machines)
        body["machines"].push_back({{"coef", VectorJson(b.coef)}, {"rho", b.rho}});
      break;
    }
    case Family::kMlp: {
      const MlpModel &m = *model.mlp;
      body["hidden_layers"] = m.params.hidden_layers;
      body["activation"] = ActivationName(m.params.activation);
      for (std::size_t l = 0; l < m.weights.size(); ++l) {
        body["weights"].push_back(MatrixJson(m.weights[l]));
        body["biases"].push_back(VectorJson(m.biases[l]));
      }
      break;
    }
    case Family::kGbdt: {
      const GbdtModel &g = *model.gbdt;
      body["num_classes"] = g.num_classes;
      body["num_features"] = g.num_features;
      body["rounds"] = nlohmann::json::array();
      for (const auto &round : g.rounds) {
        nlohmann::json trees = nlohmann::json::array();
        for (const RegressionTree &t : round) {
          nlohmann::json nodes = nlohmann::json::array();
          for (const TreeNode &n : t.nodes)
            nodes.push_back({n.feature, n.threshold, n.left, n.right, n.value});
          trees.push_back(nodes);
        }
        body["rounds"].push_back(trees);
      }
      break;
    }
  }
  j["model"] = body;
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path);
  out << j.dump() << "\n";
  if (!out) throw IoError("error writing " + path);
}

ClassifierModel LoadClassifier(const std::string &path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception &e) {
    throw IoError(path + ": not a classifier file (" + e.what() + ")");
  }
  if (j.value("format", "") != "dmtl-classifier")
    throw IoError(path + ": not a classifier file");
  if (j.value("version", 0) != kClassifierFormatVersion)
    throw IoError(path + ": unsupported classifier format version");
  try {
    ClassifierModel m;
    m.family = ParseFamily(j.at("family").get<std::string>());
    m.config = j.at("config");
    m.scaler = Scaler::FromJson(j.at("scaler"));
    const nlohmann::json &body = j.at("model");
    switch (m.family) {
      case Family::kSvm: {
        auto s = std::make_shared<SvmModel>();
        s->params.c = body.at("C").get<double>();
        s->params.gamma = body.at("gamma").get<double>();
        s->support = MatrixFromJson(body.at("support"));
        s->classes = body.at("classes").get<std::vector<int>>();
        for (const auto &mj : body.at("machines")) {
          BinarySvm b;
          b.coef = VectorFromJson(mj.at("coef"));
          b.rho = mj.at("rho").get<double>();
          b.converged = true;
          s->machines.push_back(std::move(b));
        }
        m.svm = s;
        break;
      }
      case Family::kMlp: {
        auto p = std::make_shared<MlpModel>();
        p->params.hidden_layers = body.at("hidden_layers").get<int>();
        p->params.activation = ParseActivation(body.at("activation").get<std::string>());
        for (const auto &w : body.at("weights")) p->weights.push_back(MatrixFromJson(w));
        for (const auto &b : body.at("biases")) p->biases.push_back(VectorFromJson(b));
        m.mlp = p;
        break;
      }
      case Family::kGbdt: {
        auto g = std::make_shared<GbdtModel>();
        g->num_classes = body.at("num_classes").get<int>();
        g->num_features = body.at("num_features").get<int>();
        for (const auto &round : body.at("rounds")) {
          std::vector<RegressionTree> trees;
          for (const auto &nodes : round) {
            RegressionTree t;
            for (const auto &n : nodes)
              t.nodes.push_back({n[0].get<int>(), n[1].get<double>(), n[2].get<int>(),
                                 n[3].get<int>(), n[4].get<double>(), 0.0});
            trees.push_back(std::move(t));
          }
          g->rounds.push_back(std::move(trees));
        }
        g->best_rounds = static_cast<int>(g->rounds.size());
        m.gbdt = g;
        break;
      }
    }
    return m;
  } catch (const nlohmann::json::exception &e) {
    throw IoError(path + ": malformed classifier file (" + e.what() + ")");
  }
}

}  // namespace dmtl
