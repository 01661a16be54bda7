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


// extractbench command-line driver: corpus, train, attack, game, report, run.

#include <CLI11.hpp>
#include <fmt/core.h>

#include <cmath>
#include <cstdint>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <json.hpp>

#include "extractbench/attack.hpp"
#include "extractbench/config.hpp"
#include "extractbench/corpus.hpp"
#include "extractbench/ngram_model.hpp"
#include "extractbench/report.hpp"
#include "extractbench/security_game.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace extractbench;

namespace {

struct CliError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct CommonOptions {
  std::string config;
  std::size_t threads = 1;
  std::string out;
  std::optional<double> fpr;
  std::optional<std::uint64_t> seed;
};

void add_common(CLI::App* cmd, CommonOptions& o) {
  cmd->add_option("--config", o.config, "Run configuration file (key = value)")->required();
  cmd->add_option("--threads", o.threads, "Worker threads; outputs do not depend on it")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--out", o.out, "Output directory (overrides out_dir)");
  cmd->add_option("--fpr", o.fpr, "False-positive budget for recall@FPR (default 0.10)");
  cmd->add_option("--seed", o.seed, "Master seed (overrides the config)");
}

RunConfig resolve(const CommonOptions& o) {
  RunConfig cfg = load_run_config(o.config);
  if (o.seed) cfg.apply_seed(*o.seed);
  if (o.fpr) cfg.attack.fpr = *o.fpr;
  if (!o.out.empty()) cfg.out_dir = o.out;
  cfg.validate();
  return cfg;
}

void write_json(const fs::path& path, const json& j) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw CliError("cannot write " + path.string());
  out << j.dump(2) << "\n";
}

json read_json(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CliError("cannot read " + path.string() + " (run the earlier pipeline stage first)");
  return json::parse(in);
}

void require_file(const fs::path& path, const std::string& stage) {
  if (!fs::exists(path)) throw CliError("missing " + path.string() + "; run `extractbench " + stage + "` first");
}

std::vector<std::int64_t> ids_of(const std::vector<ExtractionSample>& s) {
  std::vector<std::int64_t> out;
  for (const auto& x : s) out.push_back(x.sample_id);
  return out;
}

int cmd_corpus(const RunConfig& cfg) {
  fs::create_directories(cfg.out_dir);
  const Corpus corpus = synth_corpus(cfg.corpus);
  const auto samples = extract_samples(corpus, cfg.prefix_len, cfg.suffix_len);
  const SampleSplit split = split_samples(samples, cfg.train_frac);
  write_corpus(corpus, cfg.out_dir / "corpus.txt", cfg.out_dir / "corpus.meta.json");
  write_samples(samples, cfg.out_dir / "samples.jsonl");
  write_json(cfg.out_dir / "split.json", {{"seed", cfg.seed},
                                           {"train_frac", cfg.train_frac},
                                           {"n_samples", samples.size()},
                                           {"excluded", corpus.canary_index.size() - samples.size()},
                                           {"train", ids_of(split.train)},
                                           {"test", ids_of(split.test)}});
  std::size_t tokens = 0;
  for (const auto& d : corpus.docs) tokens += d.size();
  fmt::print("corpus: {} docs, {} tokens, {} canaries, {} samples ({} train / {} test)\n", corpus.docs.size(), tokens,
             corpus.canary_index.size(), samples.size(), split.train.size(), split.test.size());
  return 0;
}

Corpus load_corpus(const RunConfig& cfg) {
  require_file(cfg.out_dir / "corpus.txt", "corpus");
  require_file(cfg.out_dir / "corpus.meta.json", "corpus");
  return read_corpus(cfg.out_dir / "corpus.txt", cfg.out_dir / "corpus.meta.json");
}

int cmd_train(const RunConfig& cfg) {
  const Corpus corpus = load_corpus(cfg);
  const NGramModel model = train_ngram(corpus, cfg.lm);
  model.save(cfg.out_dir / "model.bin");
  double nll = 0.0;
  std::size_t n = 0;
  for (const auto& doc : corpus.docs) {
    if (doc.empty()) continue;
    nll += sequence_loss(model, TokenSpan{}, doc) * static_cast<double>(doc.size());
    n += doc.size();
  }
  fmt::print("train: order {} over {} tokens, training perplexity {:.4f}\n", cfg.lm.order, n,
             std::exp(nll / static_cast<double>(n)));
  return 0;
}

SampleSplit load_split(const RunConfig& cfg) {
  require_file(cfg.out_dir / "samples.jsonl", "corpus");
  const auto samples = read_samples(cfg.out_dir / "samples.jsonl");
  const json manifest = read_json(cfg.out_dir / "split.json");
  std::map<std::int64_t, const ExtractionSample*> by_id;
  for (const auto& s : samples) by_id.emplace(s.sample_id, &s);
  SampleSplit split;
  for (const char* part : {"train", "test"}) {
    auto& dst = std::string(part) == "train" ? split.train : split.test;
    for (std::int64_t id : manifest.at(part).get<std::vector<std::int64_t>>()) {
      const auto it = by_id.find(id);
      if (it == by_id.end()) throw CliError(fmt::format("split.json names unknown sample {}", id));
      dst.push_back(*it->second);
    }
  }
  return split;
}

// Generations are cached on disk next to the decode settings that produced them.
GenerationMap load_or_generate(const LanguageModel& model, const std::vector<ExtractionSample>& samples,
                               const RunConfig& cfg, std::size_t threads) {
  const fs::path gen_path = cfg.out_dir / "generations.jsonl";
  const fs::path key_path = cfg.out_dir / "generations.key.json";
  const json key = {{"decode", attack_config_json(cfg.attack)["decode"]},
                    {"model_bytes", fs::file_size(cfg.out_dir / "model.bin")},
                    {"samples", ids_of(samples)}};
  if (fs::exists(gen_path) && fs::exists(key_path) && read_json(key_path) == key) {
    fmt::print("attack: reusing {}\n", gen_path.string());
    return read_generations(gen_path);
  }
  GenerationMap gens = generate(model, samples, cfg.attack.decode, threads);
  write_generations(gens, gen_path);
  write_json(key_path, key);
  return gens;
}

int cmd_attack(const RunConfig& cfg, std::size_t threads) {
  require_file(cfg.out_dir / "model.bin", "train");
  const NGramModel model = NGramModel::load(cfg.out_dir / "model.bin");
  const SampleSplit split = load_split(cfg);
  std::vector<ExtractionSample> all = split.train;
  all.insert(all.end(), split.test.begin(), split.test.end());
  GenerationMap gens = load_or_generate(model, all, cfg, threads);
  GenerationMap train_gens, test_gens;
  for (const auto& s : split.train) train_gens[s.sample_id] = gens.at(s.sample_id);
  for (const auto& s : split.test) test_gens[s.sample_id] = gens.at(s.sample_id);

  AttackArtifacts art;
  const AttackReport report = run_attack_on(model, split.train, split.test, train_gens, test_gens, cfg.attack, threads, &art);
  std::vector<Candidate> rows = art.train_filtered;
  rows.insert(rows.end(), art.test_filtered.begin(), art.test_filtered.end());
  Eigen::MatrixXd features(art.train_features.rows() + art.test_features.rows(),
                           std::max(art.train_features.cols(), art.test_features.cols()));
  if (features.size() > 0) features << art.train_features, art.test_features;
  write_features_csv(rows, features, cfg.out_dir / "features.csv");
  write_report(report, cfg.out_dir);

  const auto& m = report.metrics;
  fmt::print("attack: classifier={} recall@{:.0f}%FPR={:.4f} precision={:.4f} stage1_recall={:.4f} "
             "stage1_recall_post_filter={:.4f} n_test={}\n",
             report.classifier_name, m.fpr * 100.0, m.recall_at_fpr, m.precision, m.stage1_recall,
             m.stage1_recall_post_filter, report.n_test);
  return 0;
}

int cmd_game(const RunConfig& cfg, std::size_t threads) {
  fs::create_directories(cfg.out_dir);
  json out = json::array();
  for (const std::string& name : cfg.game_adversaries) {
    const GameResult r = security_game(cfg.game, [&] { return make_adversary(name); }, cfg.game_trials, threads);
    const auto [lo, hi] = r.confidence_interval();
    fmt::print("game: adversary={} trials={} wins={} win_rate={:.4f} ci95=[{:.4f}, {:.4f}]{}\n", name,
               r.transcripts.size(), r.wins(), r.win_rate(), lo, hi, cfg.game.untrained ? " (untrained model)" : "");
    json transcripts = json::array();
    for (const auto& t : r.transcripts)
      transcripts.push_back({{"b", t.b}, {"x", t.x}, {"b_hat", t.b_hat}, {"win", t.win}});
    out.push_back({{"adversary", name},
                   {"trials", r.transcripts.size()},
                   {"wins", r.wins()},
                   {"win_rate", r.win_rate()},
                   {"ci95", {lo, hi}},
                   {"untrained", cfg.game.untrained},
                   {"transcripts", transcripts}});
  }
  write_json(cfg.out_dir / "game.json", out);
  return 0;
}

int cmd_report(const RunConfig& cfg) {
  const AttackReport report = report_from_json(read_json(cfg.out_dir / "report.json"));
  write_report(report, cfg.out_dir);
  fmt::print("report: rewrote {} (recall@FPR={:.4f})\n", cfg.out_dir.string(), report.metrics.recall_at_fpr);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"extractbench: targeted training-data extraction benchmark"};
  app.require_subcommand(1);
  CommonOptions opts;
  auto* corpus = app.add_subcommand("corpus", "Synthesize the corpus, samples and split manifest");
  auto* train = app.add_subcommand("train", "Train the n-gram model on the corpus");
  auto* attack = app.add_subcommand("attack", "Generate suffixes, run membership inference, write the report");
  auto* game = app.add_subcommand("game", "Play the membership security game");
  auto* report = app.add_subcommand("report", "Re-render report files from report.json");
  auto* run = app.add_subcommand("run", "corpus, train, attack and report in one go");
  for (auto* cmd : {corpus, train, attack, game, report, run}) add_common(cmd, opts);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    const RunConfig cfg = resolve(opts);
    if (*corpus) return cmd_corpus(cfg);
    if (*train) return cmd_train(cfg);
    if (*attack) return cmd_attack(cfg, opts.threads);
    if (*game) return cmd_game(cfg, opts.threads);
    if (*report) return cmd_report(cfg);
    if (*run) {
      cmd_corpus(cfg);
      cmd_train(cfg);
      return cmd_attack(cfg, opts.threads);
    }
  } catch (const std::exception& e) {
    std::cerr << "extractbench: error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
