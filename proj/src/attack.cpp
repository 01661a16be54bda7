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

#include "extractbench/attack.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <unordered_map>

#include "extractbench/parallel.hpp"
#include "extractbench/random.hpp"

namespace extractbench {

bool exact_match(TokenSpan a, TokenSpan b) {
  if (a.size() != b.size()) throw ArgumentError("exact_match: length mismatch");
  return std::equal(a.begin(), a.end(), b.begin());
}

GenerationMap generate(const LanguageModel& model, const std::vector<ExtractionSample>& samples,
                       const DecodeParams& decode, std::size_t threads) {
  decode.validate();
  std::vector<std::vector<Generation>> out(samples.size());
  parallel_for(samples.size(), threads, [&](std::size_t i) {
    const auto& s = samples[i];
    out[i] = extractbench::decode(model, s.prefix, decode,
                                  derive_seed(decode.seed, {static_cast<std::uint64_t>(s.sample_id)}));
  });
  GenerationMap result;
  for (std::size_t i = 0; i < samples.size(); ++i) result.emplace(samples[i].sample_id, std::move(out[i]));
  return result;
}

CandidateMap build_candidates(const LanguageModel& model, const std::vector<ExtractionSample>& samples,
                              const GenerationMap& generations, std::size_t threads) {
  std::vector<std::vector<Candidate>> out(samples.size());
  parallel_for(samples.size(), threads, [&](std::size_t i) {
    const auto& s = samples[i];
    const auto it = generations.find(s.sample_id);
    if (it == generations.end()) throw ArgumentError("no generations for sample " + std::to_string(s.sample_id));
    std::set<TokenSeq> seen;
    for (const Generation& g : it->second) {
      if (!seen.insert(g.suffix).second) continue;
      Candidate c;
      c.sample_id = s.sample_id;
      c.prefix = s.prefix;
      c.suffix = g.suffix;
      c.loss = sequence_loss(model, s.prefix, g.suffix);
      c.is_correct = g.suffix.size() == s.suffix.size() && exact_match(g.suffix, s.suffix);
      out[i].push_back(std::move(c));
    }
    for (auto& c : out[i]) c.count = static_cast<int>(out[i].size());
  });
  CandidateMap result;
  for (std::size_t i = 0; i < samples.size(); ++i) result.emplace(samples[i].sample_id, std::move(out[i]));
  return result;
}

CandidateMap generate_candidates(const LanguageModel& model, const std::vector<ExtractionSample>& samples,
                                 const DecodeParams& decode, std::size_t threads) {
  return build_candidates(model, samples, generate(model, samples, decode, threads), threads);
}

std::vector<Candidate> filter_lowest_loss(const CandidateMap& candidates) {
  std::vector<Candidate> out;
  for (const auto& [id, list] : candidates) {
    if (list.empty()) continue;
    const auto best = std::min_element(list.begin(), list.end(), [](const Candidate& a, const Candidate& b) {
      return a.loss != b.loss ? a.loss < b.loss : a.suffix < b.suffix;
    });
    out.push_back(*best);
  }
  return out;
}

double stage1_recall(const CandidateMap& candidates, std::size_t n_samples) {
  if (n_samples == 0) return 0.0;
  std::size_t hits = 0;
  for (const auto& [id, list] : candidates)
    hits += std::any_of(list.begin(), list.end(), [](const Candidate& c) { return c.is_correct; }) ? 1 : 0;
  return static_cast<double>(hits) / static_cast<double>(n_samples);
}

double stage1_recall(const std::vector<Candidate>& filtered, std::size_t n_samples) {
  if (n_samples == 0) return 0.0;
  const auto hits = std::count_if(filtered.begin(), filtered.end(), [](const Candidate& c) { return c.is_correct; });
  return static_cast<double>(hits) / static_cast<double>(n_samples);
}

std::string to_string(ClassifierChoice c) {
  switch (c) {
    case ClassifierChoice::kAuto: return "auto";
    case ClassifierChoice::kLogReg: return "logreg";
    case ClassifierChoice::kGnb: return "gnb";
    case ClassifierChoice::kGBoost: return "gboost";
    case ClassifierChoice::kPerceptron: return "perceptron";
    case ClassifierChoice::kNone: return "none";
  }
  return "unknown";
}

ClassifierChoice parse_classifier_choice(const std::string& name) {
  for (auto c : {ClassifierChoice::kAuto, ClassifierChoice::kLogReg, ClassifierChoice::kGnb, ClassifierChoice::kGBoost,
                 ClassifierChoice::kPerceptron, ClassifierChoice::kNone})
    if (to_string(c) == name) return c;
  throw ConfigError("unknown classifier choice '" + name + "'");
}

void AttackConfig::validate() const {
  decode.validate();
  if (!(fpr > 0.0 && fpr < 1.0)) throw ConfigError("fpr must be in (0, 1)");
  if (!(validation_frac > 0.0 && validation_frac < 1.0)) throw ConfigError("validation_frac must be in (0, 1)");
  if (importance_repeats < 1) throw ConfigError("importance_repeats must be >= 1");
}

namespace {

std::vector<std::string> texts_of(const std::vector<Candidate>& candidates) {
  std::vector<std::string> out;
  out.reserve(candidates.size());
  for (const auto& c : candidates) out.push_back(candidate_text(c));
  return out;
}

std::vector<Candidate> slice(const std::vector<Candidate>& v, std::size_t first, std::size_t last) {
  return {v.begin() + static_cast<std::ptrdiff_t>(first), v.begin() + static_cast<std::ptrdiff_t>(last)};
}

}  // namespace

AttackReport run_attack_on(const LanguageModel& model, const std::vector<ExtractionSample>& train,
                           const std::vector<ExtractionSample>& test, const GenerationMap& train_generations,
                           const GenerationMap& test_generations, const AttackConfig& config, std::size_t threads,
                           AttackArtifacts* artifacts) {
  config.validate();
  {
    std::set<std::int64_t> ids;
    for (const auto& s : train) ids.insert(s.sample_id);
    for (const auto& s : test)
      if (ids.count(s.sample_id)) throw ArgumentError("train and test samples overlap");
  }

  AttackReport report;
  report.config = config;
  report.n_test = test.size();
  report.metrics.fpr = config.fpr;

  const CandidateMap train_cands = build_candidates(model, train, train_generations, threads);
  const CandidateMap test_cands = build_candidates(model, test, test_generations, threads);
  const std::vector<Candidate> train_f = filter_lowest_loss(train_cands);
  const std::vector<Candidate> test_f = filter_lowest_loss(test_cands);
  report.metrics.stage1_recall = stage1_recall(test_cands, test.size());
  report.metrics.stage1_recall_post_filter = stage1_recall(test_f, test.size());

  std::unordered_map<std::int64_t, const ExtractionSample*> truth;
  for (const auto& s : test) truth.emplace(s.sample_id, &s);
  {
    std::vector<std::vector<TokenSeq>> ranked_lists;
    std::vector<TokenSeq> truths;
    for (const auto& [id, list] : test_cands) {
      std::vector<const Candidate*> sorted;
      for (const auto& c : list) sorted.push_back(&c);
      std::stable_sort(sorted.begin(), sorted.end(), [](const Candidate* a, const Candidate* b) {
        return a->loss != b->loss ? a->loss < b->loss : a->suffix < b->suffix;
      });
      std::vector<TokenSeq> suffixes;
      for (const auto* c : sorted) suffixes.push_back(c->suffix);
      ranked_lists.push_back(std::move(suffixes));
      truths.push_back(truth.at(id)->suffix);
    }
    report.rank_histogram = rank_histogram(ranked_lists, truths);
  }

  std::vector<bool> predicted(test_f.size(), true);
  Eigen::MatrixXd X_train, X_test;
  if (config.classifier == ClassifierChoice::kNone || test_f.empty()) {
    report.classifier_name = config.classifier == ClassifierChoice::kNone ? "none" : to_string(config.classifier);
    report.predictions = order_by_loss(test_f);
  } else {
    const TfidfVectorizer vectorizer = TfidfVectorizer::fit(texts_of(train_f));
    X_train = build_features(train_f, vectorizer);
    X_test = build_features(test_f, vectorizer);
    const Eigen::VectorXi y_train = labels_of(train_f);
    const Eigen::VectorXi y_test = labels_of(test_f);

    ClassifierSpec spec;
    if (config.classifier == ClassifierChoice::kAuto) {
      const auto n_fit = static_cast<std::size_t>(
          std::floor((1.0 - config.validation_frac) * static_cast<double>(train_f.size())));
      const auto fit_part = slice(train_f, 0, n_fit);
      const auto val_part = slice(train_f, n_fit, train_f.size());
      const Eigen::Index nf = static_cast<Eigen::Index>(n_fit);
      const Eigen::Index nv = X_train.rows() - nf;
      spec = auto_select(X_train.topRows(nf), y_train.head(nf), X_train.bottomRows(nv), y_train.tail(nv),
                         default_grid(), threads)
                 .spec;
    } else {
      spec = default_spec(to_string(config.classifier));
    }
    // The selected configuration is refit on the whole training split.
    const std::unique_ptr<Classifier> classifier = fit_classifier(spec, X_train, y_train);
    report.classifier_name = spec.describe();
    report.classifier_artifact = {{"spec", spec.describe()},
                                  {"vectorizer", vectorizer.to_json()},
                                  {"classifier", classifier->to_json()}};
    report.predictions = order_predictions(*classifier, test_f, X_test);
    predicted = classifier->predict_rows(X_test);
    report.importance = permutation_importance(*classifier, X_test, y_test, accuracy_metric,
                                               config.importance_repeats, derive_seed(config.seed, {0x696d70ULL}));
  }

  std::size_t emitted_correct = 0;
  for (const auto& p : report.predictions) {
    const bool ok = exact_match(p.suffix, truth.at(p.sample_id)->suffix);
    emitted_correct += ok ? 1 : 0;
    report.ranked.push_back({p.sample_id, ok, p.confidence});
  }
  std::vector<bool> labels;
  for (const auto& c : test_f) labels.push_back(c.is_correct);
  report.metrics.confusion = confusion(predicted, labels);
  report.metrics.precision = precision(report.metrics.confusion);
  report.metrics.recall = test.empty() ? 0.0 : static_cast<double>(emitted_correct) / static_cast<double>(test.size());
  report.metrics.recall_at_fpr = recall_at_fpr(report.ranked, test.size(), config.fpr, config.budget);

  if (artifacts) {
    artifacts->train_generations = train_generations;
    artifacts->test_generations = test_generations;
    artifacts->train_filtered = train_f;
    artifacts->test_filtered = test_f;
    artifacts->train_features = std::move(X_train);
    artifacts->test_features = std::move(X_test);
  }
  return report;
}

AttackReport run_attack(const LanguageModel& model, const std::vector<ExtractionSample>& train,
                        const std::vector<ExtractionSample>& test, const AttackConfig& config, std::size_t threads,
                        AttackArtifacts* artifacts) {
  config.validate();
  const GenerationMap train_gen = generate(model, train, config.decode, threads);
  const GenerationMap test_gen = generate(model, test, config.decode, threads);
  return run_attack_on(model, train, test, train_gen, test_gen, config, threads, artifacts);
}

}  // namespace extractbench
