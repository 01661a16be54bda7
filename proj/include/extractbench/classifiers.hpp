// Copyright 2026 The extractbench Authors.
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

#ifndef EXTRACTBENCH_CLASSIFIERS_HPP_
#define EXTRACTBENCH_CLASSIFIERS_HPP_

#include <memory>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

namespace extractbench {

using RowRef = Eigen::Ref<const Eigen::RowVectorXd>;

// Binary member / non-member classifier. Fitted classifiers are immutable.
class Classifier {
 public:
  virtual ~Classifier() = default;

  virtual std::string kind() const = 0;
  virtual bool has_proba() const = 0;
  // P(member | x). Throws std::logic_error when has_proba() is false.
  virtual double predict_proba(const RowRef& x) const;
  // Real-valued score; member iff positive (or proba >= 0.5).
  virtual bool predict(const RowRef& x) const = 0;
  virtual nlohmann::json to_json() const = 0;

  Eigen::VectorXd predict_proba_rows(const Eigen::MatrixXd& X) const;
  std::vector<bool> predict_rows(const Eigen::MatrixXd& X) const;
};

std::unique_ptr<Classifier> classifier_from_json(const nlohmann::json& j);

// ---------------------------------------------------------------------------
// Logistic regression, full-batch gradient descent from zero weights on
//   J(w, b) = mean_i [softplus(z_i) - y_i z_i] + (l2 / 2) |w|^2,  z = Xw + b.

struct LogRegParams {
  double l2 = 1e-4;
  double lr = 0.1;
  int epochs = 500;
};

class LogisticRegression final : public Classifier {
 public:
  LogisticRegression(Eigen::VectorXd weights, double bias) : w_(std::move(weights)), b_(bias) {}

  std::string kind() const override { return "logreg"; }
  bool has_proba() const override { return true; }
  double predict_proba(const RowRef& x) const override;
  bool predict(const RowRef& x) const override { return predict_proba(x) >= 0.5; }
  nlohmann::json to_json() const override;

  const Eigen::VectorXd& weights() const { return w_; }
  double bias() const { return b_; }

 private:
  Eigen::VectorXd w_;
  double b_;
};

// Objective and its analytic gradient, exposed for finite-difference checks.
// `params` packs [w..., b].
double logreg_objective(const Eigen::VectorXd& params, const Eigen::MatrixXd& X, const Eigen::VectorXi& y, double l2);
Eigen::VectorXd logreg_gradient(const Eigen::VectorXd& params, const Eigen::MatrixXd& X, const Eigen::VectorXi& y,
                                double l2);

LogisticRegression train_logreg(const Eigen::MatrixXd& X, const Eigen::VectorXi& y, const LogRegParams& params = {});

// ---------------------------------------------------------------------------
// Gaussian naive Bayes with per-class priors, means and variances (floored).

class GaussianNB final : public Classifier {
 public:
  static constexpr double kVarianceFloor = 1e-9;

  GaussianNB(Eigen::Vector2d log_prior, Eigen::MatrixXd mean, Eigen::MatrixXd var)
      : log_prior_(log_prior), mean_(std::move(mean)), var_(std::move(var)) {}

  std::string kind() const override { return "gnb"; }
  bool has_proba() const override { return true; }
  double predict_proba(const RowRef& x) const override;
  bool predict(const RowRef& x) const override { return predict_proba(x) >= 0.5; }
  nlohmann::json to_json() const override;

 private:
  Eigen::Vector2d log_prior_;
  Eigen::MatrixXd mean_;  // 2 x d, row = class
  Eigen::MatrixXd var_;   // 2 x d
};

GaussianNB train_gnb(const Eigen::MatrixXd& X, const Eigen::VectorXi& y);

// ---------------------------------------------------------------------------
// Gradient boosting on logistic loss with depth-limited regression trees.

struct GBoostParams {
  int n_trees = 200;
  int depth = 2;
  double lr = 0.1;
};

struct RegressionTree {
  // Flat node array; leaves have feature == -1.
  struct Node {
    int feature = -1;
    double threshold = 0.0;  // go left iff x[feature] <= threshold
    int left = -1, right = -1;
    double value = 0.0;
  };
  std::vector<Node> nodes;

  double eval(const RowRef& x) const;
};

class GradientBoosting final : public Classifier {
 public:
  GradientBoosting(double base_score, double lr, std::vector<RegressionTree> trees)
      : base_(base_score), lr_(lr), trees_(std::move(trees)) {}

  std::string kind() const override { return "gboost"; }
  bool has_proba() const override { return true; }
  double predict_proba(const RowRef& x) const override;
  bool predict(const RowRef& x) const override { return predict_proba(x) >= 0.5; }
  nlohmann::json to_json() const override;

  double raw_score(const RowRef& x) const;
  std::size_t num_trees() const { return trees_.size(); }

 private:
  double base_;  // prior log-odds
  double lr_;
  std::vector<RegressionTree> trees_;
};

GradientBoosting train_gboost(const Eigen::MatrixXd& X, const Eigen::VectorXi& y, const GBoostParams& params = {});

// ---------------------------------------------------------------------------
// Perceptron-loss SGD in fixed sample order. No probability estimate.

struct PerceptronParams {
  int epochs = 50;
  double lr = 1.0;
};

class Perceptron final : public Classifier {
 public:
  Perceptron(Eigen::VectorXd weights, double bias) : w_(std::move(weights)), b_(bias) {}

  std::string kind() const override { return "perceptron"; }
  bool has_proba() const override { return false; }
  bool predict(const RowRef& x) const override { return decision(x) > 0.0; }
  nlohmann::json to_json() const override;

  double decision(const RowRef& x) const { return x.dot(w_.transpose()) + b_; }

 private:
  Eigen::VectorXd w_;
  double b_;
};

Perceptron train_perceptron(const Eigen::MatrixXd& X, const Eigen::VectorXi& y, const PerceptronParams& params = {});

// ---------------------------------------------------------------------------
// Registry of trainable configurations, in fixed order.

struct ClassifierSpec {
  std::string kind;  // logreg | gnb | gboost | perceptron
  LogRegParams logreg;
  GBoostParams gboost;
  PerceptronParams perceptron;

  std::string describe() const;
};

std::unique_ptr<Classifier> fit_classifier(const ClassifierSpec& spec, const Eigen::MatrixXd& X,
                                           const Eigen::VectorXi& y);

// The default grid searched by auto_select.
std::vector<ClassifierSpec> default_grid();
ClassifierSpec default_spec(const std::string& kind);

}  // namespace extractbench

#endif  // EXTRACTBENCH_CLASSIFIERS_HPP_
