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

#include "extractbench/mia.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>

#include <fmt/format.h>

#include "extractbench/metrics.hpp"
#include "extractbench/parallel.hpp"
#include "extractbench/random.hpp"

namespace extractbench {

std::string candidate_text(const Candidate& c) {
  if (c.prefix.empty()) return join_tokens(c.suffix);
  if (c.suffix.empty()) return join_tokens(c.prefix);
  return join_tokens(c.prefix) + " " + join_tokens(c.suffix);
}

Eigen::MatrixXd build_features(const std::vector<Candidate>& candidates, const TfidfVectorizer& vectorizer) {
  const auto n = static_cast<Eigen::Index>(candidates.size());
  Eigen::MatrixXd X = Eigen::MatrixXd::Zero(n, kTextOffset + static_cast<Eigen::Index>(vectorizer.size()));
  for (Eigen::Index i = 0; i < n; ++i) {
    const Candidate& c = candidates[static_cast<std::size_t>(i)];
    X(i, kLossColumn) = c.loss;
    X(i, kCountColumn) = c.count;
    const auto row = vectorizer.transform(candidate_text(c));
    for (Eigen::SparseVector<double>::InnerIterator it(row); it; ++it) X(i, kTextOffset + it.index()) = it.value();
  }
  return X;
}

Eigen::VectorXi labels_of(const std::vector<Candidate>& candidates) {
  Eigen::VectorXi y(static_cast<Eigen::Index>(candidates.size()));
  for (std::size_t i = 0; i < candidates.size(); ++i) y(static_cast<Eigen::Index>(i)) = candidates[i].is_correct ? 1 : 0;
  return y;
}

Selection auto_select(const Eigen::MatrixXd& X_train, const Eigen::VectorXi& y_train, const Eigen::MatrixXd& X_val,
                      const Eigen::VectorXi& y_val, const std::vector<ClassifierSpec>& grid, std::size_t threads) {
  if (grid.empty()) throw ConfigError("auto_select needs a non-empty grid");
  std::vector<Selection> fitted(grid.size());
  std::vector<bool> labels(static_cast<std::size_t>(y_val.size()));
  for (Eigen::Index i = 0; i < y_val.size(); ++i) labels[static_cast<std::size_t>(i)] = y_val(i) == 1;
  parallel_for(grid.size(), threads, [&](std::size_t g) {
    Selection& s = fitted[g];
    s.spec = grid[g];
    s.classifier = fit_classifier(grid[g], X_train, y_train);
    const std::vector<bool> pred = s.classifier->predict_rows(X_val);
    const ConfusionMatrix cm = confusion(pred, labels);
    s.val_precision = precision(cm);
    s.val_recall = cm.tp + cm.fn == 0 ? 0.0 : static_cast<double>(cm.tp) / static_cast<double>(cm.tp + cm.fn);
  });
  std::size_t best = 0;
  for (std::size_t g = 1; g < fitted.size(); ++g) {
    const auto& a = fitted[g];
    const auto& b = fitted[best];
    if (a.val_precision > b.val_precision || (a.val_precision == b.val_precision && a.val_recall > b.val_recall))
      best = g;
  }
  return std::move(fitted[best]);
}

std::vector<RankedPrediction> order_predictions(const Classifier& classifier, const std::vector<Candidate>& candidates,
                                                const Eigen::MatrixXd& features) {
  if (features.rows() != static_cast<Eigen::Index>(candidates.size()))
    throw ArgumentError("order_predictions: features and candidates differ in length");
  std::vector<RankedPrediction> out;
  if (classifier.has_proba()) {
    for (std::size_t i = 0; i < candidates.size(); ++i)
      out.push_back({candidates[i].sample_id, candidates[i].suffix,
                     classifier.predict_proba(features.row(static_cast<Eigen::Index>(i)))});
  } else {
    for (std::size_t i = 0; i < candidates.size(); ++i)
      if (classifier.predict(features.row(static_cast<Eigen::Index>(i))))
        out.push_back({candidates[i].sample_id, candidates[i].suffix, -candidates[i].loss});
  }
  std::stable_sort(out.begin(), out.end(), [](const RankedPrediction& a, const RankedPrediction& b) {
    return a.confidence != b.confidence ? a.confidence > b.confidence : a.sample_id < b.sample_id;
  });
  return out;
}

std::vector<RankedPrediction> order_by_loss(const std::vector<Candidate>& candidates) {
  std::vector<RankedPrediction> out;
  for (const auto& c : candidates) out.push_back({c.sample_id, c.suffix, -c.loss});
  std::stable_sort(out.begin(), out.end(), [](const RankedPrediction& a, const RankedPrediction& b) {
    return a.confidence != b.confidence ? a.confidence > b.confidence : a.sample_id < b.sample_id;
  });
  return out;
}

double accuracy_metric(const Classifier& c, const Eigen::MatrixXd& X, const Eigen::VectorXi& y) {
  if (y.size() == 0) return 0.0;
  const std::vector<bool> pred = c.predict_rows(X);
  Eigen::Index hits = 0;
  for (Eigen::Index i = 0; i < y.size(); ++i) hits += (pred[static_cast<std::size_t>(i)] == (y(i) == 1)) ? 1 : 0;
  return static_cast<double>(hits) / static_cast<double>(y.size());
}

FeatureImportance permutation_importance(const Classifier& classifier, const Eigen::MatrixXd& X,
                                         const Eigen::VectorXi& y, const Metric& metric, int n_repeats,
                                         std::uint64_t seed) {
  if (X.rows() != y.size()) throw ArgumentError("permutation_importance: X and y differ in length");
  if (n_repeats < 1) throw ArgumentError("permutation_importance needs n_repeats >= 1");

  std::vector<Eigen::Index> canon(static_cast<std::size_t>(X.rows()));
  std::iota(canon.begin(), canon.end(), Eigen::Index{0});
  std::stable_sort(canon.begin(), canon.end(), [&](Eigen::Index a, Eigen::Index b) {
    for (Eigen::Index c = 0; c < X.cols(); ++c)
      if (X(a, c) != X(b, c)) return X(a, c) < X(b, c);
    return y(a) < y(b);
  });
  Eigen::MatrixXd Xc(X.rows(), X.cols());
  Eigen::VectorXi yc(y.size());
  for (std::size_t i = 0; i < canon.size(); ++i) {
    Xc.row(static_cast<Eigen::Index>(i)) = X.row(canon[i]);
    yc(static_cast<Eigen::Index>(i)) = y(canon[i]);
  }

  const double reference = metric(classifier, Xc, yc);
  auto group_drop = [&](Eigen::Index first, Eigen::Index cols, std::uint64_t group) {
    if (cols <= 0) return 0.0;
    double total = 0.0;
    for (int r = 0; r < n_repeats; ++r) {
      Rng rng(derive_seed(seed, {group, static_cast<std::uint64_t>(r)}));
      std::vector<Eigen::Index> perm(canon.size());
      std::iota(perm.begin(), perm.end(), Eigen::Index{0});
      rng.shuffle(perm.begin(), perm.end());
      Eigen::MatrixXd shuffled = Xc;
      for (std::size_t i = 0; i < perm.size(); ++i)
        shuffled.block(static_cast<Eigen::Index>(i), first, 1, cols) = Xc.block(perm[i], first, 1, cols);
      total += metric(classifier, shuffled, yc);
    }
    return reference - total / n_repeats;
  };
  FeatureImportance imp;
  imp.loss = group_drop(kLossColumn, 1, 0);
  imp.count = group_drop(kCountColumn, 1, 1);
  imp.text = group_drop(kTextOffset, X.cols() - kTextOffset, 2);
  return imp;
}

void write_features_csv(const std::vector<Candidate>& candidates, const Eigen::MatrixXd& features,
                        const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot write " + path.string());
  out << "sample_id,loss,count";
  for (Eigen::Index c = kTextOffset; c < features.cols(); ++c) out << ",tfidf_" << (c - kTextOffset);
  out << '\n';
  for (Eigen::Index i = 0; i < features.rows(); ++i) {
    out << candidates[static_cast<std::size_t>(i)].sample_id;
    for (Eigen::Index c = 0; c < features.cols(); ++c) out << ',' << fmt::format("{}", features(i, c));
    out << '\n';
  }
}

}  // namespace extractbench
