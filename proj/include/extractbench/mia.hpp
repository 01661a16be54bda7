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

#ifndef EXTRACTBENCH_MIA_HPP_
#define EXTRACTBENCH_MIA_HPP_

#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "extractbench/classifiers.hpp"
#include "extractbench/tfidf.hpp"
#include "extractbench/types.hpp"

namespace extractbench {

// One distinct generated suffix for a prefix.
struct Candidate {
  std::int64_t sample_id = 0;
  TokenSeq prefix;
  TokenSeq suffix;
  double loss = 0.0;    // mean per-token NLL of suffix given prefix
  int count = 1;        // distinct suffixes generated for this prefix
  bool is_correct = false;
  friend bool operator==(const Candidate&, const Candidate&) = default;
};

// prefix followed by suffix, space-joined token ids.
std::string candidate_text(const Candidate& c);

// Columns: [loss, count, tfidf(prefix + suffix)...]; one row per candidate.
Eigen::MatrixXd build_features(const std::vector<Candidate>& candidates, const TfidfVectorizer& vectorizer);

constexpr Eigen::Index kLossColumn = 0;
constexpr Eigen::Index kCountColumn = 1;
constexpr Eigen::Index kTextOffset = 2;

Eigen::VectorXi labels_of(const std::vector<Candidate>& candidates);

struct Selection {
  ClassifierSpec spec;
  std::unique_ptr<Classifier> classifier;
  double val_precision = 0.0;
  double val_recall = 0.0;
};

// Fits every grid entry on the training split and keeps the best validation
// precision; ties go to higher validation recall, then to the earlier entry.
Selection auto_select(const Eigen::MatrixXd& X_train, const Eigen::VectorXi& y_train, const Eigen::MatrixXd& X_val,
                      const Eigen::VectorXi& y_val, const std::vector<ClassifierSpec>& grid = default_grid(),
                      std::size_t threads = 1);

struct RankedPrediction {
  std::int64_t sample_id = 0;
  TokenSeq suffix;
  double confidence = 0.0;
  friend bool operator==(const RankedPrediction&, const RankedPrediction&) = default;
};

// With a probability estimate: every candidate, by descending P(member).
// Without: predicted members only, by ascending loss (confidence = -loss).
// Ties are broken by sample id.
std::vector<RankedPrediction> order_predictions(const Classifier& classifier, const std::vector<Candidate>& candidates,
                                                const Eigen::MatrixXd& features);

// Baseline ordering: every candidate by ascending loss, confidence = -loss.
std::vector<RankedPrediction> order_by_loss(const std::vector<Candidate>& candidates);

using Metric = std::function<double(const Classifier&, const Eigen::MatrixXd&, const Eigen::VectorXi&)>;
double accuracy_metric(const Classifier& c, const Eigen::MatrixXd& X, const Eigen::VectorXi& y);

struct FeatureImportance {
  double loss = 0.0;
  double count = 0.0;
  double text = 0.0;
};

// metric(original) minus the mean metric with one feature group's columns
// jointly shuffled across rows. Rows are put into a canonical order first, so
// the result does not depend on the input sample order.
FeatureImportance permutation_importance(const Classifier& classifier, const Eigen::MatrixXd& X,
                                         const Eigen::VectorXi& y, const Metric& metric, int n_repeats,
                                         std::uint64_t seed);

// CSV with header sample_id,loss,count,tfidf_0,...
void write_features_csv(const std::vector<Candidate>& candidates, const Eigen::MatrixXd& features,
                        const std::filesystem::path& path);

}  // namespace extractbench

#endif  // EXTRACTBENCH_MIA_HPP_
