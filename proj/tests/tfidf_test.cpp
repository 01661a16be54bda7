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


#include <gtest/gtest.h>

#include <cmath>

#include "extractbench/tfidf.hpp"
#include "extractbench/types.hpp"

namespace extractbench {
namespace {

TEST(Tfidf, SingleDocSingleTerm) {
  const auto v = TfidfVectorizer::fit({"x"});
  EXPECT_DOUBLE_EQ(v.idf("x"), 1.0);
}

TEST(Tfidf, SmoothedIdfByHand) {
  const auto v = TfidfVectorizer::fit({"a b", "a"});
  EXPECT_DOUBLE_EQ(v.idf("a"), 1.0);
  EXPECT_NEAR(v.idf("b"), std::log(1.5) + 1.0, 1e-15);
  EXPECT_NEAR(v.idf("b"), 1.4055, 1e-4);
  EXPECT_THROW(v.idf("c"), ArgumentError);
}

TEST(Tfidf, TransformByHand) {
  const auto v = TfidfVectorizer::fit({"a b", "a"});
  const Eigen::VectorXd row = v.transform("a b");
  const double b = std::log(1.5) + 1.0, norm = std::sqrt(1.0 + b * b);
  EXPECT_NEAR(row(0), 1.0 / norm, 1e-12);
  EXPECT_NEAR(row(1), b / norm, 1e-12);
  EXPECT_NEAR(row(0), 0.5797, 1e-4);
  EXPECT_NEAR(row(1), 0.8148, 1e-4);
}

TEST(Tfidf, TermFrequencyAndUnseenTerms) {
  const auto v = TfidfVectorizer::fit({"a b", "a"});
  const Eigen::VectorXd row = v.transform("b a a zzz");
  const double b = std::log(1.5) + 1.0, norm = std::sqrt(4.0 + b * b);
  EXPECT_NEAR(row(0), 2.0 / norm, 1e-12);
  EXPECT_NEAR(row(1), b / norm, 1e-12);
  EXPECT_EQ(v.transform("").nonZeros(), 0);
  EXPECT_EQ(Eigen::VectorXd(v.transform("q r")).norm(), 0.0);
}

TEST(Tfidf, RowsUnitNorm) {
  const std::vector<std::string> docs{"1 2 3 4", "4 4 5", "10 2 2 2 9", "7"};
  const auto v = TfidfVectorizer::fit(docs);
  const Eigen::MatrixXd m = v.transform_dense(docs);
  ASSERT_EQ(m.cols(), static_cast<Eigen::Index>(v.size()));
  for (Eigen::Index r = 0; r < m.rows(); ++r) EXPECT_NEAR(m.row(r).norm(), 1.0, 1e-9);
  EXPECT_EQ(v.transform_dense(docs), m);
}

TEST(Tfidf, VocabularySortedAndDeterministic) {
  const std::vector<std::string> docs{"10 2 33", "2 1 10"};
  const auto v = TfidfVectorizer::fit(docs);
  EXPECT_EQ(v.terms(), (std::vector<std::string>{"1", "10", "2", "33"}));
  EXPECT_EQ(TfidfVectorizer::fit(docs).terms(), v.terms());
}

TEST(Tfidf, WhitespaceSplit) {
  EXPECT_EQ(split_whitespace("  a\tb \n c "), (std::vector<std::string>{"a", "b", "c"}));
  EXPECT_TRUE(split_whitespace("   ").empty());
}

TEST(Tfidf, EmptyFitThrows) { EXPECT_THROW(TfidfVectorizer::fit({}), FitError); }

TEST(Tfidf, JsonRoundTrip) {
  const std::vector<std::string> docs{"1 2 3", "3 4", "5 1 1"};
  const auto v = TfidfVectorizer::fit(docs);
  const auto r = TfidfVectorizer::from_json(v.to_json());
  EXPECT_EQ(r.terms(), v.terms());
  EXPECT_EQ(r.idf(), v.idf());
  EXPECT_EQ(r.transform_dense(docs), v.transform_dense(docs));
  EXPECT_EQ(r.to_json().dump(), v.to_json().dump());
}

}  // namespace
}  // namespace extractbench
