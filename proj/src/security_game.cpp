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

#include "extractbench/security_game.hpp"

#include <algorithm>
#include <cmath>

#include "extractbench/parallel.hpp"
#include "extractbench/random.hpp"

namespace extractbench {

void LossThresholdAdversary::calibrate(const ModelOracle& oracle, const std::vector<ExtractionSample>& members,
                                       const std::vector<ExtractionSample>& non_members) {
  // (loss, is_member)
  std::vector<std::pair<double, bool>> points;
  for (const auto& s : members) points.emplace_back(oracle.loss(s.prefix, s.suffix), true);
  for (const auto& s : non_members) points.emplace_back(oracle.loss(s.prefix, s.suffix), false);
  if (points.empty()) {
    tau_ = 0.0;
    return;
  }
  std::sort(points.begin(), points.end());
  // Threshold below everything: all guessed non-member.
  std::size_t correct = non_members.size();
  std::size_t best_correct = correct;
  tau_ = points.front().first - 1.0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    correct += points[i].second ? 1 : 0;
    correct -= points[i].second ? 0 : 1;
    const bool boundary = i + 1 == points.size() || points[i + 1].first > points[i].first;
    if (boundary && correct > best_correct) {
      best_correct = correct;
      tau_ = i + 1 == points.size() ? points[i].first + 1.0 : (points[i].first + points[i + 1].first) / 2.0;
    }
  }
}

int LossThresholdAdversary::guess(const ModelOracle& oracle, const ExtractionSample& x) const {
  return oracle.loss(x.prefix, x.suffix) < tau_ ? 0 : 1;
}

std::unique_ptr<Adversary> make_adversary(const std::string& name) {
  if (name == "constant") return std::make_unique<ConstantAdversary>(0);
  if (name == "loss_threshold") return std::make_unique<LossThresholdAdversary>();
  throw ConfigError("unknown adversary '" + name + "'");
}

GameConfig default_game_config(std::uint64_t seed) {
  GameConfig cfg;
  cfg.seed = seed;
  cfg.world.vocab_size = 256;
  cfg.world.n_background_docs = 100;
  cfg.world.doc_len = 200;
  cfg.world.n_canaries = 16;
  cfg.world.canary_len = 100;
  cfg.world.dup_counts.assign(cfg.world.n_canaries, 25);
  cfg.world.seed = seed;
  return cfg;
}

std::size_t GameResult::wins() const {
  return static_cast<std::size_t>(
      std::count_if(transcripts.begin(), transcripts.end(), [](const GameTranscript& t) { return t.win; }));
}

double GameResult::win_rate() const {
  return transcripts.empty() ? 0.0 : static_cast<double>(wins()) / static_cast<double>(transcripts.size());
}

std::pair<double, double> GameResult::confidence_interval(double z) const {
  const double n = static_cast<double>(transcripts.size());
  if (n == 0) return {0.0, 1.0};
  const double p = win_rate();
  const double denom = 1.0 + z * z / n;
  const double centre = (p + z * z / (2 * n)) / denom;
  const double half = z * std::sqrt(p * (1 - p) / n + z * z / (4 * n * n)) / denom;
  return {std::max(0.0, centre - half), std::min(1.0, centre + half)};
}

namespace {

ExtractionSample to_sample(std::int64_t id, const Canary& c, std::size_t prefix_len, std::size_t suffix_len) {
  ExtractionSample s;
  s.sample_id = id;
  s.prefix.assign(c.tokens.begin(), c.tokens.begin() + static_cast<std::ptrdiff_t>(prefix_len));
  s.suffix.assign(c.tokens.begin() + static_cast<std::ptrdiff_t>(prefix_len),
                  c.tokens.begin() + static_cast<std::ptrdiff_t>(prefix_len + suffix_len));
  s.dup_count = c.dup_count;
  return s;
}

}  // namespace

GameResult security_game(const GameConfig& config, const std::function<std::unique_ptr<Adversary>()>& make,
                         std::size_t trials, std::size_t threads) {
  if (trials == 0) throw ArgumentError("security_game needs at least one trial");
  if (config.prefix_len + config.suffix_len > config.world.canary_len)
    throw ConfigError("prefix_len + suffix_len exceeds canary_len");
  if (config.suffix_len == 0) throw ConfigError("suffix_len must be positive");
  if (!(config.calibration_frac >= 0.0 && config.calibration_frac < 1.0))
    throw ConfigError("calibration_frac must be in [0, 1)");
  config.world.validate();
  {
    // Each half of the universe must leave a non-empty challenge pool.
    const std::size_t half = config.world.n_canaries / 2;
    const auto calib = static_cast<std::size_t>(std::floor(config.calibration_frac * static_cast<double>(half)));
    if (half == 0 || half - calib == 0) throw ConfigError("world has too few canaries for the security game");
  }

  GameResult result;
  result.adversary = make()->name();
  result.transcripts.resize(trials);
  parallel_for(trials, threads, [&](std::size_t t) {
    const std::uint64_t trial_seed = derive_seed(config.seed, {t});
    CorpusSpec spec = config.world;
    spec.seed = trial_seed;
    const World world = synth_world(spec);

    // Step 1: D is a random half of the universe; train on it.
    std::vector<std::int64_t> ids;
    for (const auto& [id, c] : world.canaries) ids.push_back(id);
    Rng rng(derive_seed(trial_seed, {1}));
    rng.shuffle(ids.begin(), ids.end());
    const std::size_t n_members = ids.size() / 2;
    std::vector<std::int64_t> member_ids(ids.begin(), ids.begin() + static_cast<std::ptrdiff_t>(n_members));
    std::vector<std::int64_t> other_ids(ids.begin() + static_cast<std::ptrdiff_t>(n_members), ids.end());
    std::sort(member_ids.begin(), member_ids.end());

    std::unique_ptr<LanguageModel> model;
    if (config.untrained) {
      model = std::make_unique<UniformModel>(spec.vocab_size, static_cast<std::size_t>(config.lm.embed_dim), trial_seed);
    } else {
      const Corpus corpus = inject_canaries(world, member_ids, derive_seed(trial_seed, {2}));
      NGramOptions lm = config.lm;
      lm.seed = trial_seed;
      model = std::make_unique<NGramModel>(train_ngram(corpus, lm));
    }

    auto samples_of = [&](const std::vector<std::int64_t>& list) {
      std::vector<ExtractionSample> out;
      for (auto id : list) out.push_back(to_sample(id, world.canaries.at(id), config.prefix_len, config.suffix_len));
      return out;
    };
    std::vector<ExtractionSample> members = samples_of(member_ids);
    std::vector<ExtractionSample> non_members = samples_of(other_ids);
    rng.shuffle(members.begin(), members.end());
    rng.shuffle(non_members.begin(), non_members.end());
    auto cut = [&](std::vector<ExtractionSample>& pool) {
      const auto n = static_cast<std::size_t>(std::floor(config.calibration_frac * static_cast<double>(pool.size())));
      std::vector<ExtractionSample> calib(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(n));
      pool.erase(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(n));
      return calib;
    };
    const auto calib_members = cut(members);
    const auto calib_non_members = cut(non_members);

    const ModelOracle oracle(*model);
    auto adversary = make();
    adversary->calibrate(oracle, calib_members, calib_non_members);

    // Steps 2-5: fair bit, challenge point, guess.
    GameTranscript& tr = result.transcripts[t];
    tr.b = static_cast<int>(rng.below(2));
    const auto& pool = tr.b == 0 ? members : non_members;
    const ExtractionSample& x = pool[rng.below(pool.size())];
    tr.x = x.sample_id;
    tr.b_hat = adversary->guess(oracle, x);
    tr.win = tr.b == tr.b_hat;
  });
  return result;
}

}  // namespace extractbench
