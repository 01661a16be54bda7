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

#ifndef EXTRACTBENCH_TFIDF_HPP_
#define EXTRACTBENCH_TFIDF_HPP_

#include <map>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SparseCore>
#include <json.hpp>

namespace extractbench {

// Smoothed TF-IDF over whitespace-separated terms:
//   idf(t) = ln((1 + N) / (1 + df(t))) + 1,  w(t) = tf(t) * idf(t),
// rows L2-normalized, unseen terms ignored.
class TfidfVectorizer {
 public:
  // Throws FitError on an empty document list.
  static TfidfVectorizer fit(const std::vector<std::string>& docs);

  Eigen::SparseVector<double> transform(const std::string& doc) const;
  // Dense row-per-document form.
  Eigen::MatrixXd transform_dense(const std::vector<std::string>& docs) const;

  std::size_t size() const { return terms_.size(); }
  // Sorted vocabulary; column i corresponds to terms()[i].
  const std::vector<std::string>& terms() const { return terms_; }
  const Eigen::VectorXd& idf() const { return idf_; }
  double idf(const std::string& term) const;

  nlohmann::json to_json() const;
  static TfidfVectorizer from_json(const nlohmann::json& j);

 private:
  std::vector<std::string> terms_;
  std::map<std::string, Eigen::Index> column_;
  Eigen::VectorXd idf_;
};

std::vector<std::string> split_whitespace(const std::string& doc);

}  // namespace extractbench

#endif  // EXTRACTBENCH_TFIDF_HPP_
