// include/dmtl/baselines/baselines.h

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

#ifndef DMTL_BASELINES_BASELINES_H_
#define DMTL_BASELINES_BASELINES_H_

#include <cstdint>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "dmtl/common/error.h"
#include "dmtl/evaluation/metrics.h"

namespace dmtl {

// Row-per-sample design matrix with severity labels.
struct LabelledData {
  Eigen::MatrixXd x;
  std::vector<int> y;

  Eigen::Index size() const { return x.rows(); }
  Eigen::Index dim() const { return x.cols(); }
  void Validate() const;
};

class Scaler {
 public:
  Scaler() = default;
  static Scaler Fit(const Eigen::MatrixXd &train);

  Eigen::VectorXd Transform(const Eigen::VectorXd &v) const;
  Eigen::MatrixXd TransformRows(const Eigen::MatrixXd &x) const;
  Eigen::Index dim() const { return mean_.size(); }
  const Eigen::VectorXd &mean() const { return mean_; }
  const Eigen::VectorXd &scale() const { return scale_; }

  nlohmann::json ToJson() const;
  static Scaler FromJson(const nlohmann::json &j);

 private:
  Eigen::VectorXd mean_, scale_;  // scale 0 marks a constant dimension
};

enum class Family { kSvm, kMlp, kGbdt };
const char *FamilyName(Family f);
Family ParseFamily(const std::string &s);

// ---- SVM -------------------------------------------------------------------

struct SvmParams {
  double c = 1.0;
  double gamma = 1.0;
  double tolerance = 1e-3;  // KKT violation bound
  long long max_iterations = 10000000;
};

struct BinarySvm {
  Eigen::VectorXd coef;  // alpha_i * y_i over all training rows
  double rho = 0.0;
  long long iterations = 0;
  bool converged = false;
  double kkt_gap = 0.0;  // m(alpha) - M(alpha) at exit
};

struct SvmModel {
  SvmParams params;
  Eigen::MatrixXd support;   // training rows
  std::vector<int> classes;  // one machine per class, one-vs-rest
  std::vector<BinarySvm> machines;
};

// Dual soft-margin SVM on labels +1/-1 with a precomputed kernel, solved by
// SMO with second-order working-set selection.
BinarySvm SolveBinarySvm(const Eigen::MatrixXd &kernel, std::span<const int> signs,
                         const SvmParams &params);
Eigen::MatrixXd RbfKernel(const Eigen::MatrixXd &a, const Eigen::MatrixXd &b, double gamma);

SvmModel TrainSvm(const LabelledData &train, const SvmParams &params);
Eigen::VectorXd SvmDecision(const SvmModel &model, const Eigen::VectorXd &x);

// ---- MLP -------------------------------------------------------------------

enum class Activation { kTanh, kRelu, kLogistic, kIdentity };
enum class Optimizer { kAdam, kSgd };
const char *ActivationName(Activation a);
Activation ParseActivation(const std::string &s);
const char *OptimizerName(Optimizer o);
Optimizer ParseOptimizer(const std::string &s);

struct MlpParams {
  int hidden_layers = 1;
  Activation activation = Activation::kRelu;
  Optimizer optimizer = Optimizer::kAdam;
  double lr = 1e-3;
  int width = 64;
  int max_epochs = 200;
  int batch_size = 32;
  int patience = 10;  // epochs without validation improvement
  double l2 = 1e-4;
  double momentum = 0.9;  // sgd only
  std::uint64_t seed = 0;

  void Validate() const;
};

struct MlpModel {
  MlpParams params;
  std::vector<Eigen::MatrixXd> weights;  // out x in
  std::vector<Eigen::VectorXd> biases;
  int epochs_run = 0;
  int best_epoch = 0;
  std::vector<double> valid_loss;  // per epoch
};

// Early stopping monitors the validation loss; with no validation set the
// training loss is monitored instead.
MlpModel TrainMlp(const LabelledData &train, const LabelledData *valid, const MlpParams &params);
Eigen::VectorXd MlpLogits(const MlpModel &model, const Eigen::VectorXd &x);

// ---- GBDT ------------------------------------------------------------------

struct GbdtParams {
  int max_depth = 3;
  int rounds = 100;
  double learning_rate = 0.3;
  double lambda = 1.0;             // L2 on leaf weights
  double min_child_weight = 1e-6;  // hessian sum per child
  int patience = 10;               // rounds without validation improvement

  void Validate() const;
};

struct TreeNode {
  int feature = -1;  // -1 marks a leaf
  double threshold = 0.0;  // go left when x[feature] < threshold
  int left = -1, right = -1;
  double value = 0.0;  // leaf weight, already scaled by the learning rate
  double gain = 0.0;
};

struct RegressionTree {
  std::vector<TreeNode> nodes;  // nodes[0] is the root
  double Predict(const Eigen::VectorXd &x) const;
};

struct GbdtModel {
  GbdtParams params;
  int num_classes = kNumSeverityClasses;
  int num_features = 0;
  std::vector<std::vector<RegressionTree>> rounds;  // [round][class]
  std::vector<double> train_loss;  // mean softmax loss after each round
  std::vector<double> valid_loss;
  int best_rounds = 0;
};

// Exact greedy tree on gradients and hessians; thresholds are midpoints
// between consecutive distinct feature values.
RegressionTree FitTree(const Eigen::MatrixXd &x, std::span<const double> grad,
                       std::span<const double> hess, const GbdtParams &params);

GbdtModel TrainGbdt(const LabelledData &train, const LabelledData *valid, const GbdtParams &params);
Eigen::VectorXd GbdtScores(const GbdtModel &model, const Eigen::VectorXd &x);

// ---- Common interface --------------------------------------------------------

struct ClassifierModel {
  Family family = Family::kSvm;
  nlohmann::json config;  // hyperparameters as searched
  Scaler scaler;
  std::shared_ptr<const SvmModel> svm;
  std::shared_ptr<const MlpModel> mlp;
  std::shared_ptr<const GbdtModel> gbdt;

  Eigen::Index dim() const { return scaler.dim(); }
};

// Fits a scaler on train, then the family's classifier with the given
// hyperparameters (keys as in the default grids).
// Throws ValidationError for unknown keys or out-of-range values.
void ValidateClassifierConfig(Family family, const nlohmann::json &config);

ClassifierModel TrainClassifier(Family family, const nlohmann::json &config,
                                const LabelledData &train, const LabelledData *valid,
                                std::uint64_t seed = 0);

int Predict(const ClassifierModel &model, const Eigen::VectorXd &features);
std::vector<int> PredictRows(const ClassifierModel &model, const Eigen::MatrixXd &features);

inline constexpr int kClassifierFormatVersion = 1;
void SaveClassifier(const std::string &path, const ClassifierModel &model);
ClassifierModel LoadClassifier(const std::string &path);

// ---- Grid search -------------------------------------------------------------

enum class GridMetric { kMacroF1, kAccuracy };
GridMetric ParseGridMetric(const std::string &s);

// Named hyperparameter -> candidate values (numbers or strings).
struct GridSpec {
  Family family = Family::kSvm;
  std::map<std::string, std::vector<nlohmann::json>> values;

  std::vector<nlohmann::json> Configs() const;  // cartesian product, key order
  void Validate() const;
};

GridSpec DefaultGrid(Family family);

// Numbers compare numerically, strings lexicographically, key by key.
bool ConfigLess(const nlohmann::json &a, const nlohmann::json &b);

struct GridResult {
  nlohmann::json config;
  bool ok = false;
  std::string error;
  MetricsReport valid;
  double seconds = 0.0;
};

struct GridSearchResult {
  ClassifierModel best;
  nlohmann::json best_config;
  std::vector<GridResult> table;  // in Configs() order
};

GridSearchResult GridSearch(const GridSpec &grid, const LabelledData &train,
                            const LabelledData &valid, GridMetric metric,
                            std::uint64_t seed = 0);

// Tab-separated: family, config, validation metrics (percent), seconds, status.
void WriteGridTable(const std::string &path, Family family, const std::vector<GridResult> &table);

}  // namespace dmtl

#endif  // DMTL_BASELINES_BASELINES_H_
