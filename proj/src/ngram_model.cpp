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

#include "extractbench/ngram_model.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numeric>
#include <string>

#include "extractbench/random.hpp"

namespace extractbench {

std::vector<double> default_lambdas(int order) {
  std::vector<double> l(static_cast<std::size_t>(order));
  double w = 1.0, total = 0.0;
  for (auto& x : l) {
    x = w;
    total += w;
    w *= 2.0;
  }
  for (auto& x : l) x /= total;
  return l;
}

namespace {

std::uint64_t pack(const TokenId* first, std::size_t len, unsigned bits) {
  std::uint64_t key = 0;
  for (std::size_t i = 0; i < len; ++i) key = (key << bits) | static_cast<std::uint64_t>(first[i]);
  return key;
}

}  // namespace

void NGramModel::Table::rebuild_index() {
  index.clear();
  index.reserve(keys.size());
  for (std::size_t s = 0; s < keys.size(); ++s) index.emplace(keys[s], static_cast<std::uint32_t>(s));
}

Eigen::MatrixXd ppmi_matrix(std::span<const TokenSeq> docs, std::size_t vocab_size, int window) {
  const auto v = static_cast<Eigen::Index>(vocab_size);
  Eigen::MatrixXd counts = Eigen::MatrixXd::Zero(v, v);
  for (const TokenSeq& doc : docs) {
    const auto n = static_cast<std::ptrdiff_t>(doc.size());
    for (std::ptrdiff_t i = 0; i < n; ++i) {
      for (std::ptrdiff_t j = std::max<std::ptrdiff_t>(0, i - window); j <= std::min(n - 1, i + window); ++j) {
        if (j != i) counts(doc[static_cast<std::size_t>(i)], doc[static_cast<std::size_t>(j)]) += 1.0;
      }
    }
  }
  const double total = counts.sum();
  Eigen::MatrixXd ppmi = Eigen::MatrixXd::Zero(v, v);
  if (total <= 0) return ppmi;
  const Eigen::VectorXd row = counts.rowwise().sum();
  const Eigen::RowVectorXd col = counts.colwise().sum();
  for (Eigen::Index w = 0; w < v; ++w) {
    for (Eigen::Index c = 0; c < v; ++c) {
      if (counts(w, c) > 0) ppmi(w, c) = std::max(0.0, std::log(counts(w, c) * total / (row(w) * col(c))));
    }
  }
  return ppmi;
}

NGramModel train_ngram(std::span<const TokenSeq> docs, std::size_t vocab_size, const NGramOptions& options) {
  if (options.order < 1) throw ConfigError("n-gram order must be >= 1");
  if (!(options.add_k > 0.0)) throw ConfigError("add_k must be positive");
  if (options.embed_dim < 1) throw ConfigError("embed_dim must be >= 1");
  if (!std::isfinite(options.projection_mean)) throw ConfigError("projection_mean must be finite");
  if (vocab_size == 0) throw ConfigError("vocabulary is empty");
  std::vector<double> lambdas = options.lambdas.empty() ? default_lambdas(options.order) : options.lambdas;
  if (lambdas.size() != static_cast<std::size_t>(options.order))
    throw ConfigError("need one interpolation weight per order");
  double lsum = 0.0;
  for (double l : lambdas) {
    if (!(l >= 0.0)) throw ConfigError("interpolation weights must be non-negative");
    lsum += l;
  }
  if (std::abs(lsum - 1.0) > 1e-9) throw ConfigError("interpolation weights must sum to 1");

  std::size_t n_tokens = 0;
  for (const auto& d : docs) n_tokens += d.size();
  if (n_tokens == 0) throw FitError("cannot train on an empty corpus");
  for (const auto& d : docs)
    for (TokenId t : d)
      if (t < 0 || static_cast<std::size_t>(t) >= vocab_size) throw FitError("corpus token outside vocabulary");

  NGramModel model;
  model.vocab_size_ = vocab_size;
  model.bits_ = std::max(1u, static_cast<unsigned>(std::bit_width(vocab_size - 1)));
  if (static_cast<unsigned>(options.order) * model.bits_ > 64)
    throw ConfigError("order too high for this vocabulary size (n-gram keys exceed 64 bits)");
  model.add_k_ = options.add_k;
  model.lambdas_ = std::move(lambdas);
  model.tables_.resize(static_cast<std::size_t>(options.order));

  const unsigned bits = model.bits_;
  const std::uint64_t token_mask = (bits == 64) ? ~0ULL : ((1ULL << bits) - 1);
  std::vector<std::uint64_t> grams;
  grams.reserve(n_tokens);
  for (std::size_t len = 0; len < model.tables_.size(); ++len) {
    grams.clear();
    for (const auto& doc : docs) {
      for (std::size_t t = len; t < doc.size(); ++t) grams.push_back(pack(doc.data() + t - len, len + 1, bits));
    }
    std::sort(grams.begin(), grams.end());

    NGramModel::Table& table = model.tables_[len];
    table.offsets.push_back(0);
    for (std::size_t i = 0; i < grams.size();) {
      std::size_t j = i;
      while (j < grams.size() && grams[j] == grams[i]) ++j;
      const std::uint64_t ctx = len == 0 ? 0 : grams[i] >> bits;
      if (table.keys.empty() || table.keys.back() != ctx) {
        if (!table.keys.empty()) table.offsets.push_back(static_cast<std::uint32_t>(table.next_tokens.size()));
        table.keys.push_back(ctx);
        table.totals.push_back(0);
      }
      table.next_tokens.push_back(static_cast<TokenId>(grams[i] & token_mask));
      table.next_counts.push_back(static_cast<std::uint32_t>(j - i));
      table.totals.back() += j - i;
      i = j;
    }
    table.offsets.push_back(static_cast<std::uint32_t>(table.next_tokens.size()));
    if (table.keys.empty()) table.offsets.assign(1, 0);
    table.rebuild_index();
  }

  // Token representations: PPMI rows through a seeded Gaussian projection.
  const auto v = static_cast<Eigen::Index>(vocab_size);
  const Eigen::Index d = options.embed_dim;
  RowMatrixXd projection(v, d);
  Rng rng(derive_seed(options.seed, {0x656d626564ULL}));
  for (Eigen::Index r = 0; r < v; ++r)
    for (Eigen::Index c = 0; c < d; ++c) projection(r, c) = (rng.normal() + options.projection_mean) / std::sqrt(static_cast<double>(d));
  model.embeddings_ = ppmi_matrix(docs, vocab_size, options.cooccurrence_window) * projection;
  for (Eigen::Index r = 0; r < v; ++r) {
    // Tokens without co-occurrence mass fall back to their own projection row.
    if (!(model.embeddings_.row(r).norm() > 1e-12)) model.embeddings_.row(r) = projection.row(r);
  }
  normalize_rows(model.embeddings_);
  return model;
}

NGramModel train_ngram(const Corpus& corpus, const NGramOptions& options) {
  return train_ngram(corpus.docs, corpus.vocab.size(), options);
}

std::int64_t NGramModel::find_slot(const Table& table, TokenSpan context, std::size_t len) const {
  if (context.size() < len) return -1;
  const std::uint64_t key = pack(context.data() + (context.size() - len), len, bits_);
  auto it = table.index.find(key);
  return it == table.index.end() ? -1 : static_cast<std::int64_t>(it->second);
}

void NGramModel::next_dist(TokenSpan context, std::span<double> out) const {
  if (out.size() != vocab_size_) throw ArgumentError("next_dist output has wrong size");
  const double kv = add_k_ * static_cast<double>(vocab_size_);
  double base = 0.0;
  std::fill(out.begin(), out.end(), 0.0);
  for (std::size_t len = 0; len < tables_.size(); ++len) {
    const double lambda = lambdas_[len];
    if (lambda == 0.0) continue;
    const Table& table = tables_[len];
    const std::int64_t slot = find_slot(table, context, len);
    if (slot < 0) {
      base += lambda / static_cast<double>(vocab_size_);
      continue;
    }
    const auto s = static_cast<std::size_t>(slot);
    const double denom = static_cast<double>(table.totals[s]) + kv;
    base += lambda * add_k_ / denom;
    const double scale = lambda / denom;
    for (std::uint32_t i = table.offsets[s]; i < table.offsets[s + 1]; ++i)
      out[static_cast<std::size_t>(table.next_tokens[i])] += scale * static_cast<double>(table.next_counts[i]);
  }
  for (double& x : out) x += base;
}

double NGramModel::prob(TokenSpan context, TokenId token) const {
  if (token < 0 || static_cast<std::size_t>(token) >= vocab_size_)
    throw ArgumentError("token id out of range: " + std::to_string(token));
  const double kv = add_k_ * static_cast<double>(vocab_size_);
  double p = 0.0;
  for (std::size_t len = 0; len < tables_.size(); ++len) {
    const double lambda = lambdas_[len];
    if (lambda == 0.0) continue;
    const Table& table = tables_[len];
    const std::int64_t slot = find_slot(table, context, len);
    if (slot < 0) {
      p += lambda / static_cast<double>(vocab_size_);
      continue;
    }
    const auto s = static_cast<std::size_t>(slot);
    const auto first = table.next_tokens.begin() + table.offsets[s];
    const auto last = table.next_tokens.begin() + table.offsets[s + 1];
    const auto it = std::lower_bound(first, last, token);
    const double c =
        (it != last && *it == token) ? static_cast<double>(table.next_counts[static_cast<std::size_t>(it - table.next_tokens.begin())]) : 0.0;
    p += lambda * (c + add_k_) / (static_cast<double>(table.totals[s]) + kv);
  }
  return p;
}

std::uint64_t NGramModel::count(TokenSpan context, TokenId token) const {
  const std::size_t len = context.size();
  if (len >= tables_.size()) throw ArgumentError("context longer than model order - 1");
  const Table& table = tables_[len];
  const std::int64_t slot = find_slot(table, context, len);
  if (slot < 0) return 0;
  const auto s = static_cast<std::size_t>(slot);
  for (std::uint32_t i = table.offsets[s]; i < table.offsets[s + 1]; ++i)
    if (table.next_tokens[i] == token) return table.next_counts[i];
  return 0;
}

std::uint64_t NGramModel::context_total(TokenSpan context) const {
  const std::size_t len = context.size();
  if (len >= tables_.size()) throw ArgumentError("context longer than model order - 1");
  const std::int64_t slot = find_slot(tables_[len], context, len);
  return slot < 0 ? 0 : tables_[len].totals[static_cast<std::size_t>(slot)];
}

namespace {

constexpr char kMagic[8] = {'X', 'B', 'N', 'G', 'R', 'M', '0', '1'};

template <typename T>
void put(std::ostream& out, const T& value) {
  static_assert(std::is_trivially_copyable_v<T>);
  char buf[sizeof(T)];
  std::memcpy(buf, &value, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(buf, buf + sizeof(T));
  out.write(buf, sizeof(T));
}

template <typename T>
T get(std::istream& in) {
  char buf[sizeof(T)];
  if (!in.read(buf, sizeof(T))) throw FormatError("truncated model file");
  if constexpr (std::endian::native == std::endian::big) std::reverse(buf, buf + sizeof(T));
  T value;
  std::memcpy(&value, buf, sizeof(T));
  return value;
}

template <typename T>
void put_vec(std::ostream& out, const std::vector<T>& v) {
  put<std::uint64_t>(out, v.size());
  for (const T& x : v) put(out, x);
}

template <typename T>
std::vector<T> get_vec(std::istream& in, std::uint64_t limit) {
  const auto n = get<std::uint64_t>(in);
  if (n > limit) throw FormatError("corrupt model file (array length)");
  std::vector<T> v(n);
  for (auto& x : v) x = get<T>(in);
  return v;
}

}  // namespace

void NGramModel::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot write model file " + path.string());
  out.write(kMagic, sizeof(kMagic));
  put<std::uint64_t>(out, vocab_size_);
  put<std::uint32_t>(out, bits_);
  put<double>(out, add_k_);
  put_vec(out, lambdas_);
  for (const Table& t : tables_) {
    put_vec(out, t.keys);
    put_vec(out, t.totals);
    put_vec(out, t.offsets);
    put_vec(out, t.next_tokens);
    put_vec(out, t.next_counts);
  }
  put<std::uint64_t>(out, static_cast<std::uint64_t>(embeddings_.rows()));
  put<std::uint64_t>(out, static_cast<std::uint64_t>(embeddings_.cols()));
  for (Eigen::Index i = 0; i < embeddings_.size(); ++i) put<double>(out, embeddings_.data()[i]);
  if (!out) throw FormatError("failed writing model file " + path.string());
}

NGramModel NGramModel::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot read model file " + path.string());
  char magic[sizeof(kMagic)];
  if (!in.read(magic, sizeof(magic)) || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0)
    throw FormatError(path.string() + " is not an n-gram model file");
  constexpr std::uint64_t kLimit = 1ULL << 34;
  NGramModel m;
  m.vocab_size_ = get<std::uint64_t>(in);
  m.bits_ = get<std::uint32_t>(in);
  m.add_k_ = get<double>(in);
  m.lambdas_ = get_vec<double>(in, 64);
  m.tables_.resize(m.lambdas_.size());
  for (Table& t : m.tables_) {
    t.keys = get_vec<std::uint64_t>(in, kLimit);
    t.totals = get_vec<std::uint64_t>(in, kLimit);
    t.offsets = get_vec<std::uint32_t>(in, kLimit);
    t.next_tokens = get_vec<TokenId>(in, kLimit);
    t.next_counts = get_vec<std::uint32_t>(in, kLimit);
    if (t.totals.size() != t.keys.size() || t.offsets.size() != t.keys.size() + 1 ||
        t.offsets.back() != t.next_tokens.size() || t.next_counts.size() != t.next_tokens.size())
      throw FormatError("corrupt model file (table shape)");
    t.rebuild_index();
  }
  const auto rows = get<std::uint64_t>(in);
  const auto cols = get<std::uint64_t>(in);
  if (rows != m.vocab_size_ || cols > 4096) throw FormatError("corrupt model file (embedding shape)");
  m.embeddings_.resize(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (Eigen::Index i = 0; i < m.embeddings_.size(); ++i) m.embeddings_.data()[i] = get<double>(in);
  return m;
}

}  // namespace extractbench
