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

#include "extractbench/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <tuple>

#include <json.hpp>

#include "extractbench/random.hpp"

namespace extractbench {

using nlohmann::json;

std::string join_tokens(TokenSpan tokens) {
  std::string out;
  out.reserve(tokens.size() * 4);
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i) out.push_back(' ');
    out += std::to_string(tokens[i]);
  }
  return out;
}

Vocab::Vocab(std::vector<std::string> tokens) : tokens_(std::move(tokens)) {
  ids_.reserve(tokens_.size());
  for (std::size_t i = 0; i < tokens_.size(); ++i) {
    if (!ids_.emplace(tokens_[i], static_cast<TokenId>(i)).second)
      throw ConfigError("duplicate vocabulary token '" + tokens_[i] + "'");
  }
}

Vocab Vocab::numeric(std::size_t size) {
  std::vector<std::string> tokens(size);
  for (std::size_t i = 0; i < size; ++i) tokens[i] = std::to_string(i);
  return Vocab(std::move(tokens));
}

const std::string& Vocab::token(TokenId id) const {
  if (id < 0 || static_cast<std::size_t>(id) >= tokens_.size())
    throw ArgumentError("token id out of range: " + std::to_string(id));
  return tokens_[static_cast<std::size_t>(id)];
}

TokenId Vocab::lookup(const std::string& token) const {
  auto it = ids_.find(token);
  if (it == ids_.end()) throw ArgumentError("unknown token '" + token + "'");
  return it->second;
}

void CorpusSpec::validate() const {
  if (vocab_size < 16) throw ConfigError("vocab_size must be >= 16");
  if (n_canaries > 0 && n_background_docs == 0)
    throw ConfigError("canaries need at least one background document");
  if (n_canaries > 0 && canary_len > doc_len)
    throw ConfigError("canary_len exceeds doc_len");
  if (canary_len == 0) throw ConfigError("canary_len must be positive");
  if (dup_counts.size() != n_canaries)
    throw ConfigError("dup_counts must have one entry per canary");
  for (int d : dup_counts)
    if (d < 1) throw ConfigError("dup_counts entries must be >= 1");
  if (markov_branching == 0 || markov_branching > vocab_size)
    throw ConfigError("markov_branching must be in [1, vocab_size]");
  if (!(markov_concentration > 0.0)) throw ConfigError("markov_concentration must be positive");
  if (!(markov_zipf >= 0.0)) throw ConfigError("markov_zipf must be non-negative");
}

std::vector<int> cycled_dup_counts(std::size_t n, const std::vector<int>& levels) {
  std::vector<int> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = levels[i % levels.size()];
  return out;
}

CorpusSpec default_corpus_spec(std::uint64_t seed) {
  CorpusSpec spec;
  spec.seed = seed;
  spec.dup_counts = cycled_dup_counts(spec.n_canaries, {1, 2, 5, 10, 25});
  return spec;
}

namespace {

// Sparse order-2 transition table: row (a * V + b) holds `branching`
// successors and their cumulative weights.
struct MarkovTable {
  std::size_t vocab = 0;
  std::size_t branching = 0;
  std::vector<TokenId> successors;
  std::vector<double> weights;

  TokenId step(TokenId a, TokenId b, Rng& rng) const {
    const std::size_t row = (static_cast<std::size_t>(a) * vocab + static_cast<std::size_t>(b)) * branching;
    const std::size_t pick = rng.categorical(std::span<const double>(weights).subspan(row, branching));
    return successors[row + pick];
  }
};

MarkovTable make_markov_table(const CorpusSpec& spec, Rng& rng) {
  MarkovTable t;
  t.vocab = spec.vocab_size;
  t.branching = spec.markov_branching;
  const std::size_t rows = spec.vocab_size * spec.vocab_size;
  t.successors.resize(rows * t.branching);
  t.weights.resize(rows * t.branching);
  // Zipf preference over a seeded ranking of the vocabulary.
  std::vector<double> pref(spec.vocab_size);
  std::vector<TokenId> ranking(spec.vocab_size);
  for (std::size_t i = 0; i < ranking.size(); ++i) ranking[i] = static_cast<TokenId>(i);
  rng.shuffle(ranking.begin(), ranking.end());
  for (std::size_t i = 0; i < ranking.size(); ++i)
    pref[static_cast<std::size_t>(ranking[i])] = std::pow(static_cast<double>(i + 1), -spec.markov_zipf);
  std::vector<double> cumulative(pref.size());
  std::partial_sum(pref.begin(), pref.end(), cumulative.begin());
  const bool sparse = 2 * t.branching <= spec.vocab_size;
  std::vector<std::pair<double, TokenId>> keys(spec.vocab_size);
  for (std::size_t r = 0; r < rows; ++r) {
    TokenId* succ = t.successors.data() + r * t.branching;
    if (sparse) {
      // Successive weighted draws, rejecting repeats.
      for (std::size_t i = 0; i < t.branching;) {
        const double u = rng.uniform() * cumulative.back();
        const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
        const auto tok = static_cast<TokenId>(std::min<std::ptrdiff_t>(it - cumulative.begin(),
                                                                       static_cast<std::ptrdiff_t>(pref.size()) - 1));
        if (std::find(succ, succ + i, tok) == succ + i) succ[i++] = tok;
      }
    } else {
      // Same distribution via exponential keys; cheaper when most tokens are kept.
      for (std::size_t i = 0; i < keys.size(); ++i)
        keys[i] = {-std::log(1.0 - rng.uniform()) / pref[i], static_cast<TokenId>(i)};
      std::partial_sort(keys.begin(), keys.begin() + static_cast<std::ptrdiff_t>(t.branching), keys.end());
      for (std::size_t i = 0; i < t.branching; ++i) succ[i] = keys[i].second;
    }
    for (std::size_t i = 0; i < t.branching; ++i)
      t.weights[r * t.branching + i] = rng.gamma(spec.markov_concentration) + 1e-12;
  }
  return t;
}

}  // namespace

World synth_world(const CorpusSpec& spec) {
  spec.validate();
  Rng rng(derive_seed(spec.seed, {0x776f726c64ULL}));
  World world;
  world.vocab = Vocab::numeric(spec.vocab_size);
  const auto v = spec.vocab_size;

  const MarkovTable table = make_markov_table(spec, rng);
  world.background.resize(spec.n_background_docs);
  for (auto& doc : world.background) {
    doc.reserve(spec.doc_len);
    for (std::size_t i = 0; i < spec.doc_len; ++i) {
      if (i < 2) {
        doc.push_back(static_cast<TokenId>(rng.below(v)));
      } else {
        doc.push_back(table.step(doc[i - 2], doc[i - 1], rng));
      }
    }
  }

  for (std::size_t c = 0; c < spec.n_canaries; ++c) {
    Canary canary;
    canary.dup_count = spec.dup_counts[c];
    canary.tokens.resize(spec.canary_len);
    for (auto& t : canary.tokens) t = static_cast<TokenId>(rng.below(v));
    world.canaries.emplace(static_cast<std::int64_t>(c), std::move(canary));
  }
  return world;
}

Corpus inject_canaries(const World& world, const std::vector<std::int64_t>& canary_ids, std::uint64_t seed) {
  Corpus corpus;
  corpus.vocab = world.vocab;
  for (std::int64_t id : canary_ids) corpus.canary_index.emplace(id, world.canaries.at(id));
  if (!corpus.canary_index.empty() && world.background.empty())
    throw ConfigError("canaries need at least one background document");

  Rng rng(seed);
  // (doc, position in background doc, draw order, canary id). Insertions only
  // happen between background tokens, so no canary is ever split.
  std::vector<std::tuple<std::size_t, std::size_t, std::size_t, std::int64_t>> plan;
  for (const auto& [id, canary] : corpus.canary_index) {
    for (int d = 0; d < canary.dup_count; ++d) {
      const std::size_t doc = rng.below(world.background.size());
      const std::size_t pos = rng.below(world.background[doc].size() + 1);
      plan.emplace_back(doc, pos, plan.size(), id);
    }
  }
  std::sort(plan.begin(), plan.end());

  corpus.docs.resize(world.background.size());
  std::size_t next = 0;
  for (std::size_t d = 0; d < world.background.size(); ++d) {
    TokenSeq& out = corpus.docs[d];
    const TokenSeq& bg = world.background[d];
    for (std::size_t pos = 0; pos <= bg.size(); ++pos) {
      while (next < plan.size() && std::get<0>(plan[next]) == d && std::get<1>(plan[next]) == pos) {
        const auto& tokens = corpus.canary_index.at(std::get<3>(plan[next])).tokens;
        out.insert(out.end(), tokens.begin(), tokens.end());
        ++next;
      }
      if (pos < bg.size()) out.push_back(bg[pos]);
    }
  }
  return corpus;
}

Corpus synth_corpus(const CorpusSpec& spec) {
  World world = synth_world(spec);
  std::vector<std::int64_t> ids;
  for (const auto& [id, canary] : world.canaries) ids.push_back(id);
  return inject_canaries(world, ids, derive_seed(spec.seed, {0x696e6a656374ULL}));
}

namespace {

constexpr std::uint64_t kHashBase = 0x100000001b3ULL;

std::uint64_t window_hash(const TokenId* first, std::size_t n) {
  std::uint64_t h = 0;
  for (std::size_t i = 0; i < n; ++i) h = h * kHashBase + static_cast<std::uint64_t>(first[i]) + 1;
  return h;
}

}  // namespace

std::vector<ExtractionSample> extract_samples(const Corpus& corpus, std::size_t prefix_len,
                                              std::size_t suffix_len) {
  std::vector<ExtractionSample> samples;
  if (prefix_len == 0) throw ArgumentError("prefix_len must be positive");
  std::unordered_multimap<std::uint64_t, std::int64_t> by_hash;
  for (const auto& [id, canary] : corpus.canary_index) {
    if (prefix_len + suffix_len > canary.tokens.size())
      throw ArgumentError("prefix_len + suffix_len exceeds canary length");
    by_hash.emplace(window_hash(canary.tokens.data(), prefix_len), id);
  }

  std::map<std::int64_t, bool> ambiguous;
  std::uint64_t top = 1;  // kHashBase^(prefix_len - 1)
  for (std::size_t i = 1; i < prefix_len; ++i) top *= kHashBase;

  for (const TokenSeq& doc : corpus.docs) {
    if (doc.size() < prefix_len) continue;
    std::uint64_t h = window_hash(doc.data(), prefix_len);
    for (std::size_t start = 0;; ++start) {
      auto [lo, hi] = by_hash.equal_range(h);
      for (auto it = lo; it != hi; ++it) {
        const Canary& canary = corpus.canary_index.at(it->second);
        if (!std::equal(canary.tokens.begin(), canary.tokens.begin() + static_cast<std::ptrdiff_t>(prefix_len),
                        doc.begin() + static_cast<std::ptrdiff_t>(start)))
          continue;
        // Compare whatever continuation the document has (truncated at the end).
        const std::size_t avail = std::min(suffix_len, doc.size() - start - prefix_len);
        const auto cont = doc.begin() + static_cast<std::ptrdiff_t>(start + prefix_len);
        const auto truth = canary.tokens.begin() + static_cast<std::ptrdiff_t>(prefix_len);
        if (!std::equal(cont, cont + static_cast<std::ptrdiff_t>(avail), truth)) ambiguous[it->second] = true;
      }
      if (start + prefix_len >= doc.size()) break;
      h = (h - (static_cast<std::uint64_t>(doc[start]) + 1) * top) * kHashBase +
          static_cast<std::uint64_t>(doc[start + prefix_len]) + 1;
    }
  }

  for (const auto& [id, canary] : corpus.canary_index) {
    if (ambiguous.count(id)) continue;
    ExtractionSample s;
    s.sample_id = id;
    s.prefix.assign(canary.tokens.begin(), canary.tokens.begin() + static_cast<std::ptrdiff_t>(prefix_len));
    s.suffix.assign(canary.tokens.begin() + static_cast<std::ptrdiff_t>(prefix_len),
                    canary.tokens.begin() + static_cast<std::ptrdiff_t>(prefix_len + suffix_len));
    s.dup_count = canary.dup_count;
    samples.push_back(std::move(s));
  }
  return samples;
}

SampleSplit split_samples(const std::vector<ExtractionSample>& samples, double train_frac) {
  if (!(train_frac > 0.0 && train_frac < 1.0)) throw ArgumentError("train_frac must be in (0, 1)");
  const double exact = train_frac * static_cast<double>(samples.size());
  auto n_train = static_cast<std::size_t>(std::floor(exact));
  // 14/15 * 15000 lands a hair below 14000 in binary floating point.
  if (n_train < samples.size() && static_cast<double>(n_train + 1) - exact < 1e-9 * (1.0 + exact)) ++n_train;
  SampleSplit split;
  split.train.assign(samples.begin(), samples.begin() + static_cast<std::ptrdiff_t>(n_train));
  split.test.assign(samples.begin() + static_cast<std::ptrdiff_t>(n_train), samples.end());
  return split;
}

std::size_t count_occurrences(const Corpus& corpus, TokenSpan needle) {
  if (needle.empty()) return 0;
  std::size_t n = 0;
  for (const TokenSeq& doc : corpus.docs) {
    auto it = doc.begin();
    while (true) {
      it = std::search(it, doc.end(), needle.begin(), needle.end());
      if (it == doc.end()) break;
      ++n;
      ++it;
    }
  }
  return n;
}

void write_corpus(const Corpus& corpus, const std::filesystem::path& text_path,
                  const std::filesystem::path& meta_path) {
  {
    std::ofstream out(text_path, std::ios::binary);
    if (!out) throw FormatError("cannot write " + text_path.string());
    for (const TokenSeq& doc : corpus.docs) out << join_tokens(doc) << '\n';
  }
  json meta;
  meta["vocab"] = corpus.vocab.tokens();
  json canaries = json::array();
  for (const auto& [id, canary] : corpus.canary_index)
    canaries.push_back({{"id", id}, {"dup_count", canary.dup_count}, {"tokens", canary.tokens}});
  meta["canaries"] = std::move(canaries);
  std::ofstream out(meta_path, std::ios::binary);
  if (!out) throw FormatError("cannot write " + meta_path.string());
  out << meta.dump(1) << '\n';
}

Corpus read_corpus(const std::filesystem::path& text_path, const std::filesystem::path& meta_path) {
  std::ifstream text(text_path);
  if (!text) throw FormatError("cannot read corpus file " + text_path.string());
  std::ifstream meta_in(meta_path);
  if (!meta_in) throw FormatError("cannot read corpus metadata " + meta_path.string());
  Corpus corpus;
  try {
    const json meta = json::parse(meta_in);
    corpus.vocab = Vocab(meta.at("vocab").get<std::vector<std::string>>());
    for (const auto& c : meta.at("canaries")) {
      Canary canary;
      canary.dup_count = c.at("dup_count").get<int>();
      canary.tokens = c.at("tokens").get<TokenSeq>();
      corpus.canary_index.emplace(c.at("id").get<std::int64_t>(), std::move(canary));
    }
  } catch (const json::exception& e) {
    throw FormatError(meta_path.string() + ": " + e.what());
  }
  std::string line;
  const auto v = static_cast<TokenId>(corpus.vocab.size());
  while (std::getline(text, line)) {
    std::istringstream ss(line);
    TokenSeq doc;
    TokenId t;
    while (ss >> t) {
      if (t < 0 || t >= v) throw FormatError("token id out of vocabulary in " + text_path.string());
      doc.push_back(t);
    }
    corpus.docs.push_back(std::move(doc));
  }
  return corpus;
}

void write_samples(const std::vector<ExtractionSample>& samples, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot write " + path.string());
  for (const auto& s : samples) {
    json j = {{"sample_id", s.sample_id}, {"prefix", s.prefix}, {"suffix", s.suffix}, {"dup_count", s.dup_count}};
    out << j.dump() << '\n';
  }
}

std::vector<ExtractionSample> read_samples(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot read samples file " + path.string());
  std::vector<ExtractionSample> samples;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    try {
      const json j = json::parse(line);
      ExtractionSample s;
      s.sample_id = j.at("sample_id").get<std::int64_t>();
      s.prefix = j.at("prefix").get<TokenSeq>();
      s.suffix = j.at("suffix").get<TokenSeq>();
      s.dup_count = j.at("dup_count").get<int>();
      samples.push_back(std::move(s));
    } catch (const json::exception& e) {
      throw FormatError(path.string() + ": " + e.what());
    }
  }
  return samples;
}

}  // namespace extractbench
