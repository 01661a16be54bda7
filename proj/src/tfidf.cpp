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

#include "extractbench/tfidf.hpp"

#include <cmath>
#include <set>
#include <sstream>

#include "extractbench/types.hpp"

namespace extractbench {

std::vector<std::string> split_whitespace(const std::string& doc) {
  std::istringstream in(doc);
  std::vector<std::string> out;
  std::string term;
  while (in >> term) out.push_back(std::move(term));
  return out;
}

TfidfVectorizer TfidfVectorizer::fit(const std::vector<std::string>& docs) {
  if (docs.empty()) throw FitError("tfidf_fit needs at least one document");
  std::map<std::string, std::size_t> df;
  for (const auto& doc : docs) {
    const auto terms = split_whitespace(doc);
    for (const auto& t : std::set<std::string>(terms.begin(), terms.end())) ++df[t];
  }
  TfidfVectorizer v;
  v.idf_.resize(static_cast<Eigen::Index>(df.size()));
  const double n = static_cast<double>(docs.size());
  Eigen::Index col = 0;
  for (const auto& [term, count] : df) {
    v.terms_.push_back(term);
    v.column_.emplace(term, col);
    v.idf_(col) = std::log((1.0 + n) / (1.0 + static_cast<double>(count))) + 1.0;
    ++col;
  }
  return v;
}

double TfidfVectorizer::idf(const std::string& term) const {
  auto it = column_.find(term);
  if (it == column_.end()) throw ArgumentError("term not in vocabulary: " + term);
  return idf_(it->second);
}

Eigen::SparseVector<double> TfidfVectorizer::transform(const std::string& doc) const {
  std::map<Eigen::Index, double> tf;
  for (const auto& t : split_whitespace(doc)) {
    auto it = column_.find(t);
    if (it != column_.end()) tf[it->second] += 1.0;
  }
  Eigen::SparseVector<double> row(static_cast<Eigen::Index>(terms_.size()));
  double norm2 = 0.0;
  for (auto& [c, w] : tf) {
    w *= idf_(c);
    norm2 += w * w;
  }
  const double norm = std::sqrt(norm2);
  row.reserve(static_cast<Eigen::Index>(tf.size()));
  for (const auto& [c, w] : tf) row.insertBack(c) = w / norm;
  return row;
}

Eigen::MatrixXd TfidfVectorizer::transform_dense(const std::vector<std::string>& docs) const {
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(docs.size()), static_cast<Eigen::Index>(size()));
  for (std::size_t i = 0; i < docs.size(); ++i) {
    const auto row = transform(docs[i]);
    for (Eigen::SparseVector<double>::InnerIterator it(row); it; ++it) out(static_cast<Eigen::Index>(i), it.index()) = it.value();
  }
  return out;
}

nlohmann::json TfidfVectorizer::to_json() const {
  return {{"terms", terms_}, {"idf", std::vector<double>(idf_.data(), idf_.data() + idf_.size())}};
}

TfidfVectorizer TfidfVectorizer::from_json(const nlohmann::json& j) {
  TfidfVectorizer v;
  v.terms_ = j.at("terms").get<std::vector<std::string>>();
  const auto idf = j.at("idf").get<std::vector<double>>();
  if (idf.size() != v.terms_.size()) throw FormatError("tfidf: terms/idf length mismatch");
  v.idf_ = Eigen::Map<const Eigen::VectorXd>(idf.data(), static_cast<Eigen::Index>(idf.size()));
  for (std::size_t i = 0; i < v.terms_.size(); ++i) v.column_.emplace(v.terms_[i], static_cast<Eigen::Index>(i));
  return v;
}

}  // namespace extractbench
