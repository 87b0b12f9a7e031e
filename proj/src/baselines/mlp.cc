// src/baselines/mlp.cc

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

#include <cmath>
#include <limits>
#include <numeric>

#include "dmtl/baselines/baselines.h"
#include "dmtl/common/rng.h"

namespace dmtl {

const char *ActivationName(Activation a) {
  switch (a) {
    case Activation::kTanh: return "tanh";
    case Activation::kRelu: return "relu";
    case Activation::kLogistic: return "logistic";
    case Activation::kIdentity: return "identity";
  }
  return "?";
}

Activation ParseActivation(const std::string &s) {
  if (s == "tanh") return Activation::kTanh;
  if (s == "relu") return Activation::kRelu;
  if (s == "logistic") return Activation::kLogistic;
  if (s == "identity") return Activation::kIdentity;
  throw ValidationError("unknown activation '" + s + "' (tanh, relu, logistic, identity)");
}

const char *OptimizerName(Optimizer o) { return o == Optimizer::kAdam ? "adam" : "sgd"; }

Optimizer ParseOptimizer(const std::string &s) {
  if (s == "adam") return Optimizer::kAdam;
  if (s == "sgd") return Optimizer::kSgd;
  throw ValidationError("unknown optimizer '" + s + "' (adam, sgd)");
}

void MlpParams::Validate() const {
  if (hidden_layers < 1 || hidden_layers > 10)
    throw ValidationError("MLP hidden layers must lie in [1, 10], got " +
                          std::to_string(hidden_layers));
  if (!(lr > 0)) throw ValidationError("MLP learning rate must be positive");
  if (width < 1 || max_epochs < 1 || batch_size < 1 || patience < 1)
    throw ValidationError("MLP width, epochs, batch size and patience must be positive");
}

namespace {

void Activate(Eigen::MatrixXd &z, Activation a) {
  switch (a) {
    case Activation::kTanh: z = z.array().tanh(); break;
    case Activation::kRelu: z = z.array().max(0.0); break;
    case Activation::kLogistic: z = (1.0 + (-z.array()).exp()).inverse(); break;
    case Activation::kIdentity: break;
  }
}

// Derivative expressed through the activation output.
Eigen::MatrixXd ActivationGrad(const Eigen::MatrixXd &out, Activation a) {
  switch (a) {
    case Activation::kTanh: return (1.0 - out.array().square()).matrix();
    case Activation::kRelu: return (out.array() > 0.0).cast<double>().matrix();
    case Activation::kLogistic: return (out.array() * (1.0 - out.array())).matrix();
    case Activation::kIdentity: break;
  }
  return Eigen::MatrixXd::Ones(out.rows(), out.cols());
}

// Rows are samples. Returns the activations of every layer; the last entry
// holds the logits.
std::vector<Eigen::MatrixXd> Forward(const MlpModel &m, const Eigen::MatrixXd &x) {
  std::vector<Eigen::MatrixXd> acts;
  acts.reserve(m.weights.size() + 1);
  acts.push_back(x);
  for (std::size_t l = 0; l < m.weights.size(); ++l) {
    Eigen::MatrixXd z = acts.back() * m.weights[l].transpose();
    z.rowwise() += m.biases[l].transpose();
    if (l + 1 < m.weights.size()) Activate(z, m.params.activation);
    acts.push_back(std::move(z));
  }
  return acts;
}

// Mean softmax cross-entropy; optionally writes d loss / d logits.
double SoftmaxLoss(const Eigen::MatrixXd &logits, std::span<const int> y,
                   const std::vector<Eigen::Index> *rows, Eigen::MatrixXd *dlogits) {
  const Eigen::Index n = logits.rows();
  double loss = 0.0;
  if (dlogits) dlogits->resize(n, logits.cols());
  for (Eigen::Index i = 0; i < n; ++i) {
    Eigen::RowVectorXd z = logits.row(i);
    double mx = z.maxCoeff();
    Eigen::RowVectorXd e = (z.array() - mx).exp();
    double s = e.sum();
    int label = y[rows ? (*rows)[i] : i];
    loss += std::log(s) + mx - z[label];
    if (dlogits) {
      dlogits->row(i) = e / s;
      (*dlogits)(i, label) -= 1.0;
    }
  }
  if (dlogits) *dlogits /= static_cast<double>(n);
  return loss / static_cast<double>(n);
}

}  // namespace

MlpModel TrainMlp(const LabelledData &train, const LabelledData *valid, const MlpParams &params) {
  params.Validate();
  train.Validate();
  if (train.size() == 0) throw ValidationError("MLP training set is empty");
  if (valid) {
    valid->Validate();
    if (valid->size() == 0) valid = nullptr;
    else if (valid->dim() != train.dim()) throw DimensionError("MLP train/valid dims differ");
  }

  MlpModel m;
  m.params = params;
  std::vector<int> sizes = {static_cast<int>(train.dim())};
  for (int l = 0; l < params.hidden_layers; ++l) sizes.push_back(params.width);
  sizes.push_back(kNumSeverityClasses);
  for (std::size_t l = 0; l + 1 < sizes.size(); ++l) {
    Rng rng(DeriveSeed(params.seed, "mlp.layer", l));
    const double bound = std::sqrt(6.0 / (sizes[l] + sizes[l + 1]));
    Eigen::MatrixXd w(sizes[l + 1], sizes[l]);
    for (Eigen::Index i = 0; i < w.size(); ++i) w.data()[i] = Uniform(rng, -bound, bound);
    m.weights.push_back(std::move(w));
    m.biases.push_back(Eigen::VectorXd::Zero(sizes[l + 1]));
  }

  const std::size_t L = m.weights.size();
  std::vector<Eigen::MatrixXd> mw(L), vw(L);
  std::vector<Eigen::VectorXd> mb(L), vb(L);
  for (std::size_t l = 0; l < L; ++l) {
    mw[l] = Eigen::MatrixXd::Zero(m.weights[l].rows(), m.weights[l].cols());
    vw[l] = mw[l];
    mb[l] = Eigen::VectorXd::Zero(m.biases[l].size());
    vb[l] = mb[l];
  }
  constexpr double kB1 = 0.9, kB2 = 0.999, kEps = 1e-8, kTol = 1e-4;
  long long step = 0;

  std::vector<Eigen::Index> order(train.size());
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  const Eigen::Index batch = std::min<Eigen::Index>(params.batch_size, train.size());
  double best = std::numeric_limits<double>::infinity();
  MlpModel best_model = m;
  int stale = 0;

  for (int epoch = 0; epoch < params.max_epochs; ++epoch) {
    Rng rng(DeriveSeed(params.seed, "mlp.shuffle", epoch));
    Shuffle(order.begin(), order.end(), rng);
    for (Eigen::Index start = 0; start < train.size(); start += batch) {
      const Eigen::Index nb = std::min(batch, train.size() - start);
      std::vector<Eigen::Index> rows(order.begin() + start, order.begin() + start + nb);
      Eigen::MatrixXd xb(nb, train.dim());
      for (Eigen::Index i = 0; i < nb; ++i) xb.row(i) = train.x.row(rows[i]);
      std::vector<Eigen::MatrixXd> acts = Forward(m, xb);
      Eigen::MatrixXd delta;
      SoftmaxLoss(acts.back(), train.y, &rows, &delta);
      ++step;
      for (std::size_t l = L; l-- > 0;) {
        Eigen::MatrixXd gw = delta.transpose() * acts[l] + params.l2 * m.weights[l];
        Eigen::VectorXd gb = delta.colwise().sum().transpose();
        if (l > 0)
          delta = (delta * m.weights[l]).cwiseProduct(ActivationGrad(acts[l], params.activation));
        if (params.optimizer == Optimizer::kAdam) {
          mw[l] = kB1 * mw[l] + (1 - kB1) * gw;
          vw[l] = kB2 * vw[l] + (1 - kB2) * gw.cwiseProduct(gw);
          mb[l] = kB1 * mb[l] + (1 - kB1) * gb;
          vb[l] = kB2 * vb[l] + (1 - kB2) * gb.cwiseProduct(gb);
          const double c1 = 1 - std::pow(kB1, step), c2 = 1 - std::pow(kB2, step);
          m.weights[l].array() -=
              params.lr * (mw[l].array() / c1) / ((vw[l].array() / c2).sqrt() + kEps);
          m.biases[l].array() -=
              params.lr * (mb[l].array() / c1) / ((vb[l].array() / c2).sqrt() + kEps);
        } else {
          mw[l] = params.momentum * mw[l] - params.lr * gw;
          mb[l] = params.momentum * mb[l] - params.lr * gb;
          m.weights[l] += mw[l];
          m.biases[l] += mb[l];
        }
      }
    }
    ++m.epochs_run;
    const LabelledData &mon = valid ? *valid : train;
    double loss = SoftmaxLoss(Forward(m, mon.x).back(), mon.y, nullptr, nullptr);
    m.valid_loss.push_back(loss);
    if (!std::isfinite(loss)) break;
    if (loss < best - kTol) {
      best = loss;
      stale = 0;
      m.best_epoch = m.epochs_run;
      best_model.weights = m.weights;
      best_model.biases = m.biases;
    } else if (++stale >= params.patience) {
      break;
    }
  }
  if (m.best_epoch == 0) throw ValidationError("MLP training diverged");
  best_model.epochs_run = m.epochs_run;
  best_model.best_epoch = m.best_epoch;
  best_model.valid_loss = m.valid_loss;
  return best_model;
}

Eigen::VectorXd MlpLogits(const MlpModel &model, const Eigen::VectorXd &x) {
  if (x.size() != model.weights.front().cols())
    throw DimensionError("MLP expects " + std::to_string(model.weights.front().cols()) +
                         " features, got " + std::to_string(x.size()));
  return Forward(model, x.transpose()).back().row(0).transpose();
}

}  // namespace dmtl
