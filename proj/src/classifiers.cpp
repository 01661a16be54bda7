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

#include "extractbench/classifiers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "extractbench/types.hpp"

namespace extractbench {

using nlohmann::json;

namespace {

double sigmoid(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

double softplus(double z) { return z > 0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z)); }

void check_xy(const Eigen::MatrixXd& X, const Eigen::VectorXi& y) {
  if (X.rows() != y.size()) throw ArgumentError("X and y have different row counts");
  if (X.rows() == 0) throw FitError("cannot fit on zero samples");
  for (Eigen::Index i = 0; i < y.size(); ++i)
    if (y(i) != 0 && y(i) != 1) throw ArgumentError("labels must be 0 or 1");
}

void require_two_classes(const Eigen::VectorXi& y, const char* who) {
  const auto pos = y.sum();
  if (pos == 0 || pos == y.size()) throw FitError(std::string(who) + ": labels contain a single class");
}

std::vector<double> to_vec(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }

Eigen::VectorXd from_vec(const std::vector<double>& v) {
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

}  // namespace

double Classifier::predict_proba(const RowRef&) const {
  throw std::logic_error(kind() + " has no probability estimate");
}

Eigen::VectorXd Classifier::predict_proba_rows(const Eigen::MatrixXd& X) const {
  Eigen::VectorXd p(X.rows());
  for (Eigen::Index i = 0; i < X.rows(); ++i) p(i) = predict_proba(X.row(i));
  return p;
}

std::vector<bool> Classifier::predict_rows(const Eigen::MatrixXd& X) const {
  std::vector<bool> out(static_cast<std::size_t>(X.rows()));
  for (Eigen::Index i = 0; i < X.rows(); ++i) out[static_cast<std::size_t>(i)] = predict(X.row(i));
  return out;
}

// --- logistic regression ----------------------------------------------------

double LogisticRegression::predict_proba(const RowRef& x) const { return sigmoid(x.dot(w_.transpose()) + b_); }

json LogisticRegression::to_json() const { return {{"kind", kind()}, {"weights", to_vec(w_)}, {"bias", b_}}; }

double logreg_objective(const Eigen::VectorXd& params, const Eigen::MatrixXd& X, const Eigen::VectorXi& y, double l2) {
  const Eigen::Index d = X.cols();
  const auto w = params.head(d);
  const double b = params(d);
  const Eigen::VectorXd z = (X * w).array() + b;
  double loss = 0.0;
  for (Eigen::Index i = 0; i < z.size(); ++i) loss += softplus(z(i)) - y(i) * z(i);
  return loss / static_cast<double>(X.rows()) + 0.5 * l2 * w.squaredNorm();
}

Eigen::VectorXd logreg_gradient(const Eigen::VectorXd& params, const Eigen::MatrixXd& X, const Eigen::VectorXi& y,
                                double l2) {
  const Eigen::Index d = X.cols();
  const auto w = params.head(d);
  const double b = params(d);
  Eigen::VectorXd r = (X * w).array() + b;
  for (Eigen::Index i = 0; i < r.size(); ++i) r(i) = sigmoid(r(i)) - y(i);
  const double n = static_cast<double>(X.rows());
  Eigen::VectorXd g(d + 1);
  g.head(d) = X.transpose() * r / n + l2 * w;
  g(d) = r.sum() / n;
  return g;
}

LogisticRegression train_logreg(const Eigen::MatrixXd& X, const Eigen::VectorXi& y, const LogRegParams& params) {
  check_xy(X, y);
  require_two_classes(y, "logreg");
  Eigen::VectorXd theta = Eigen::VectorXd::Zero(X.cols() + 1);
  for (int e = 0; e < params.epochs; ++e) theta -= params.lr * logreg_gradient(theta, X, y, params.l2);
  return LogisticRegression(theta.head(X.cols()), theta(X.cols()));
}

// --- Gaussian naive Bayes ---------------------------------------------------

double GaussianNB::predict_proba(const RowRef& x) const {
  Eigen::Vector2d log_joint = log_prior_;
  for (int c = 0; c < 2; ++c) {
    const auto diff = x.array() - mean_.row(c).array();
    log_joint(c) += -0.5 * ((diff * diff) / var_.row(c).array() + (2.0 * M_PI * var_.row(c).array()).log()).sum();
  }
  // P(member) = 1 / (1 + exp(l0 - l1)).
  return sigmoid(log_joint(1) - log_joint(0));
}

json GaussianNB::to_json() const {
  json j = {{"kind", kind()}, {"log_prior", {log_prior_(0), log_prior_(1)}}};
  for (int c = 0; c < 2; ++c) {
    j["mean"].push_back(to_vec(mean_.row(c).transpose()));
    j["var"].push_back(to_vec(var_.row(c).transpose()));
  }
  return j;
}

GaussianNB train_gnb(const Eigen::MatrixXd& X, const Eigen::VectorXi& y) {
  check_xy(X, y);
  require_two_classes(y, "gnb");
  const Eigen::Index d = X.cols();
  Eigen::MatrixXd mean = Eigen::MatrixXd::Zero(2, d);
  Eigen::MatrixXd var = Eigen::MatrixXd::Zero(2, d);
  Eigen::Vector2d n = Eigen::Vector2d::Zero();
  for (Eigen::Index i = 0; i < X.rows(); ++i) {
    mean.row(y(i)) += X.row(i);
    n(y(i)) += 1.0;
  }
  for (int c = 0; c < 2; ++c) mean.row(c) /= n(c);
  for (Eigen::Index i = 0; i < X.rows(); ++i) var.row(y(i)).array() += (X.row(i) - mean.row(y(i))).array().square();
  for (int c = 0; c < 2; ++c) var.row(c) = (var.row(c) / n(c)).array().max(GaussianNB::kVarianceFloor).matrix();
  const Eigen::Vector2d log_prior = (n / static_cast<double>(X.rows())).array().log();
  return GaussianNB(log_prior, std::move(mean), std::move(var));
}

// --- gradient boosting ------------------------------------------------------

double RegressionTree::eval(const RowRef& x) const {
  int i = 0;
  while (nodes[static_cast<std::size_t>(i)].feature >= 0) {
    const Node& n = nodes[static_cast<std::size_t>(i)];
    i = x(n.feature) <= n.threshold ? n.left : n.right;
  }
  return nodes[static_cast<std::size_t>(i)].value;
}

double GradientBoosting::raw_score(const RowRef& x) const {
  double s = base_;
  for (const auto& t : trees_) s += lr_ * t.eval(x);
  return s;
}

double GradientBoosting::predict_proba(const RowRef& x) const { return sigmoid(raw_score(x)); }

json GradientBoosting::to_json() const {
  json trees = json::array();
  for (const auto& t : trees_) {
    json nodes = json::array();
    for (const auto& n : t.nodes) nodes.push_back({n.feature, n.threshold, n.left, n.right, n.value});
    trees.push_back(std::move(nodes));
  }
  return {{"kind", kind()}, {"base", base_}, {"lr", lr_}, {"trees", std::move(trees)}};
}

namespace {

struct TreeBuilder {
  const Eigen::MatrixXd& X;
  const Eigen::VectorXd& residual;
  const Eigen::VectorXd& hessian;
  int max_depth;
  RegressionTree tree;

  int build(std::vector<Eigen::Index> rows, int depth) {
    const int id = static_cast<int>(tree.nodes.size());
    tree.nodes.emplace_back();
    double sum_r = 0.0, sum_h = 0.0;
    for (auto r : rows) {
      sum_r += residual(r);
      sum_h += hessian(r);
    }
    // Newton step on the logistic loss.
    tree.nodes[static_cast<std::size_t>(id)].value = std::abs(sum_h) < 1e-150 ? 0.0 : sum_r / sum_h;
    if (depth >= max_depth || rows.size() < 2) return id;

    // Best squared-error split on the residuals; earlier feature and lower
    // threshold win ties.
    const double n = static_cast<double>(rows.size());
    double best_gain = -std::numeric_limits<double>::infinity();
    int best_feature = -1;
    double best_threshold = 0.0;
    std::vector<Eigen::Index> order = rows;
    for (Eigen::Index f = 0; f < X.cols(); ++f) {
      std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) { return X(a, f) < X(b, f); });
      double left = 0.0;
      for (std::size_t i = 0; i + 1 < order.size(); ++i) {
        left += residual(order[i]);
        const double a = X(order[i], f), b = X(order[i + 1], f);
        if (!(a < b)) continue;
        const double nl = static_cast<double>(i + 1), nr = n - nl;
        const double right = sum_r - left;
        const double gain = left * left / nl + right * right / nr - sum_r * sum_r / n;
        if (gain > best_gain) {
          best_gain = gain;
          best_feature = static_cast<int>(f);
          best_threshold = a + (b - a) / 2.0;
        }
      }
    }
    if (best_feature < 0) return id;

    std::vector<Eigen::Index> lhs, rhs;
    for (auto r : rows) (X(r, best_feature) <= best_threshold ? lhs : rhs).push_back(r);
    tree.nodes[static_cast<std::size_t>(id)].feature = best_feature;
    tree.nodes[static_cast<std::size_t>(id)].threshold = best_threshold;
    const int l = build(std::move(lhs), depth + 1);
    const int r = build(std::move(rhs), depth + 1);
    tree.nodes[static_cast<std::size_t>(id)].left = l;
    tree.nodes[static_cast<std::size_t>(id)].right = r;
    return id;
  }
};

}  // namespace

GradientBoosting train_gboost(const Eigen::MatrixXd& X, const Eigen::VectorXi& y, const GBoostParams& params) {
  check_xy(X, y);
  if (params.n_trees < 0 || params.depth < 0) throw ConfigError("gboost: n_trees and depth must be >= 0");
  // Single-class labels are allowed here: the clamped prior plus boosting
  // drives the estimate to the observed class.
  constexpr double kPriorClamp = 1e-6;
  const double rate = std::clamp(y.cast<double>().mean(), kPriorClamp, 1.0 - kPriorClamp);
  const double base = std::log(rate / (1.0 - rate));

  Eigen::VectorXd score = Eigen::VectorXd::Constant(X.rows(), base);
  Eigen::VectorXd residual(X.rows()), hessian(X.rows());
  std::vector<Eigen::Index> all(static_cast<std::size_t>(X.rows()));
  std::iota(all.begin(), all.end(), Eigen::Index{0});
  std::vector<RegressionTree> trees;
  trees.reserve(static_cast<std::size_t>(params.n_trees));
  for (int t = 0; t < params.n_trees; ++t) {
    for (Eigen::Index i = 0; i < X.rows(); ++i) {
      const double p = sigmoid(score(i));
      residual(i) = y(i) - p;
      hessian(i) = p * (1.0 - p);
    }
    TreeBuilder builder{X, residual, hessian, params.depth, {}};
    builder.build(all, 0);
    for (Eigen::Index i = 0; i < X.rows(); ++i) score(i) += params.lr * builder.tree.eval(X.row(i));
    trees.push_back(std::move(builder.tree));
  }
  return GradientBoosting(base, params.lr, std::move(trees));
}

// --- perceptron -------------------------------------------------------------

json Perceptron::to_json() const { return {{"kind", kind()}, {"weights", to_vec(w_)}, {"bias", b_}}; }

Perceptron train_perceptron(const Eigen::MatrixXd& X, const Eigen::VectorXi& y, const PerceptronParams& params) {
  check_xy(X, y);
  require_two_classes(y, "perceptron");
  Eigen::VectorXd w = Eigen::VectorXd::Zero(X.cols());
  double b = 0.0;
  for (int e = 0; e < params.epochs; ++e) {
    for (Eigen::Index i = 0; i < X.rows(); ++i) {
      const double sign = y(i) == 1 ? 1.0 : -1.0;
      if (sign * (X.row(i).dot(w.transpose()) + b) <= 0.0) {
        w += params.lr * sign * X.row(i).transpose();
        b += params.lr * sign;
      }
    }
  }
  return Perceptron(std::move(w), b);
}

// --- registry ---------------------------------------------------------------

std::unique_ptr<Classifier> classifier_from_json(const json& j) {
  try {
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "logreg") return std::make_unique<LogisticRegression>(from_vec(j.at("weights")), j.at("bias").get<double>());
    if (kind == "perceptron") return std::make_unique<Perceptron>(from_vec(j.at("weights")), j.at("bias").get<double>());
    if (kind == "gnb") {
      const auto lp = j.at("log_prior").get<std::vector<double>>();
      if (lp.size() != 2) throw FormatError("gnb: log_prior must have two entries");
      const auto m0 = j.at("mean").at(0).get<std::vector<double>>();
      Eigen::MatrixXd mean(2, static_cast<Eigen::Index>(m0.size())), var(2, static_cast<Eigen::Index>(m0.size()));
      for (int c = 0; c < 2; ++c) {
        const auto m = j.at("mean").at(static_cast<std::size_t>(c)).get<std::vector<double>>();
        const auto v = j.at("var").at(static_cast<std::size_t>(c)).get<std::vector<double>>();
        if (m.size() != m0.size() || v.size() != m0.size()) throw FormatError("gnb: ragged parameters");
        mean.row(c) = from_vec(m).transpose();
        var.row(c) = from_vec(v).transpose();
      }
      return std::make_unique<GaussianNB>(Eigen::Vector2d(lp[0], lp[1]), std::move(mean), std::move(var));
    }
    if (kind == "gboost") {
      std::vector<RegressionTree> trees;
      for (const auto& t : j.at("trees")) {
        RegressionTree tree;
        for (const auto& n : t)
          tree.nodes.push_back({n.at(0).get<int>(), n.at(1).get<double>(), n.at(2).get<int>(), n.at(3).get<int>(),
                                n.at(4).get<double>()});
        trees.push_back(std::move(tree));
      }
      return std::make_unique<GradientBoosting>(j.at("base").get<double>(), j.at("lr").get<double>(), std::move(trees));
    }
    throw FormatError("unknown classifier kind '" + kind + "'");
  } catch (const json::exception& e) {
    throw FormatError(std::string("classifier artifact: ") + e.what());
  }
}

std::string ClassifierSpec::describe() const {
  if (kind == "logreg")
    return "logreg(l2=" + std::to_string(logreg.l2) + ",lr=" + std::to_string(logreg.lr) +
           ",epochs=" + std::to_string(logreg.epochs) + ")";
  if (kind == "gboost")
    return "gboost(trees=" + std::to_string(gboost.n_trees) + ",depth=" + std::to_string(gboost.depth) +
           ",lr=" + std::to_string(gboost.lr) + ")";
  if (kind == "perceptron")
    return "perceptron(epochs=" + std::to_string(perceptron.epochs) + ",lr=" + std::to_string(perceptron.lr) + ")";
  return kind;
}

std::unique_ptr<Classifier> fit_classifier(const ClassifierSpec& spec, const Eigen::MatrixXd& X,
                                           const Eigen::VectorXi& y) {
  if (spec.kind == "logreg") return std::make_unique<LogisticRegression>(train_logreg(X, y, spec.logreg));
  if (spec.kind == "gnb") return std::make_unique<GaussianNB>(train_gnb(X, y));
  if (spec.kind == "gboost") return std::make_unique<GradientBoosting>(train_gboost(X, y, spec.gboost));
  if (spec.kind == "perceptron") return std::make_unique<Perceptron>(train_perceptron(X, y, spec.perceptron));
  throw ConfigError("unknown classifier '" + spec.kind + "'");
}

ClassifierSpec default_spec(const std::string& kind) {
  ClassifierSpec s;
  s.kind = kind;
  if (kind != "logreg" && kind != "gnb" && kind != "gboost" && kind != "perceptron")
    throw ConfigError("unknown classifier '" + kind + "'");
  return s;
}

std::vector<ClassifierSpec> default_grid() {
  std::vector<ClassifierSpec> grid;
  for (double l2 : {1e-4, 1e-2}) {
    ClassifierSpec s = default_spec("logreg");
    s.logreg.l2 = l2;
    grid.push_back(s);
  }
  grid.push_back(default_spec("gnb"));
  for (int depth : {2, 3}) {
    for (int n : {100, 200}) {
      ClassifierSpec s = default_spec("gboost");
      s.gboost.depth = depth;
      s.gboost.n_trees = n;
      grid.push_back(s);
    }
  }
  grid.push_back(default_spec("perceptron"));
  return grid;
}

}  // namespace extractbench
