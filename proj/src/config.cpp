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

#include "extractbench/config.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "extractbench/random.hpp"

namespace extractbench {

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return "";
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string> split_list(const std::string& v) {
  std::vector<std::string> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

template <typename T>
T parse_number(const std::string& key, const std::string& v) {
  T out{};
  const char* first = v.data();
  const char* last = v.data() + v.size();
  std::from_chars_result r;
  if constexpr (std::is_floating_point_v<T>) {
    // libstdc++ 11 has floating from_chars; keep strtod semantics for "1e-4".
    char* end = nullptr;
    out = static_cast<T>(std::strtod(v.c_str(), &end));
    if (end != last || v.empty()) throw ConfigError("config key '" + key + "': expected a number, got '" + v + "'");
    return out;
  } else {
    r = std::from_chars(first, last, out);
    if (r.ec != std::errc() || r.ptr != last)
      throw ConfigError("config key '" + key + "': expected an integer, got '" + v + "'");
    return out;
  }
}

bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ConfigError("config key '" + key + "': expected true or false, got '" + v + "'");
}

using Setter = std::function<void(RunConfig&, const std::string& key, const std::string& value)>;

const std::vector<std::pair<std::string, Setter>>& setters() {
  static const std::vector<std::pair<std::string, Setter>> table = {
      {"seed", [](RunConfig& c, auto& k, auto& v) { c.seed = parse_number<std::uint64_t>(k, v); }},
      {"out_dir", [](RunConfig& c, auto&, auto& v) { c.out_dir = v; }},
      // corpus
      {"vocab_size", [](RunConfig& c, auto& k, auto& v) { c.corpus.vocab_size = parse_number<std::size_t>(k, v); }},
      {"n_background_docs",
       [](RunConfig& c, auto& k, auto& v) { c.corpus.n_background_docs = parse_number<std::size_t>(k, v); }},
      {"doc_len", [](RunConfig& c, auto& k, auto& v) { c.corpus.doc_len = parse_number<std::size_t>(k, v); }},
      {"n_canaries", [](RunConfig& c, auto& k, auto& v) { c.corpus.n_canaries = parse_number<std::size_t>(k, v); }},
      {"canary_len", [](RunConfig& c, auto& k, auto& v) { c.corpus.canary_len = parse_number<std::size_t>(k, v); }},
      {"dup_levels",
       [](RunConfig& c, auto& k, auto& v) {
         c.dup_levels.clear();
         for (const auto& item : split_list(v)) c.dup_levels.push_back(parse_number<int>(k, item));
         if (c.dup_levels.empty()) throw ConfigError("config key 'dup_levels' is empty");
       }},
      {"markov_branching",
       [](RunConfig& c, auto& k, auto& v) { c.corpus.markov_branching = parse_number<std::size_t>(k, v); }},
      {"markov_concentration",
       [](RunConfig& c, auto& k, auto& v) { c.corpus.markov_concentration = parse_number<double>(k, v); }},
      {"markov_zipf", [](RunConfig& c, auto& k, auto& v) { c.corpus.markov_zipf = parse_number<double>(k, v); }},
      {"prefix_len", [](RunConfig& c, auto& k, auto& v) { c.prefix_len = parse_number<std::size_t>(k, v); }},
      {"suffix_len", [](RunConfig& c, auto& k, auto& v) { c.suffix_len = parse_number<std::size_t>(k, v); }},
      {"train_frac", [](RunConfig& c, auto& k, auto& v) { c.train_frac = parse_number<double>(k, v); }},
      // language model
      {"lm_order", [](RunConfig& c, auto& k, auto& v) { c.lm.order = parse_number<int>(k, v); }},
      {"lm_add_k", [](RunConfig& c, auto& k, auto& v) { c.lm.add_k = parse_number<double>(k, v); }},
      {"lm_lambdas",
       [](RunConfig& c, auto& k, auto& v) {
         c.lm.lambdas.clear();
         for (const auto& item : split_list(v)) c.lm.lambdas.push_back(parse_number<double>(k, item));
       }},
      {"lm_embed_dim", [](RunConfig& c, auto& k, auto& v) { c.lm.embed_dim = parse_number<int>(k, v); }},
      {"lm_projection_mean",
       [](RunConfig& c, auto& k, auto& v) { c.lm.projection_mean = parse_number<double>(k, v); }},
      // decoding
      {"decode_strategy", [](RunConfig& c, auto&, auto& v) { c.attack.decode.strategy = parse_strategy(v); }},
      {"num_generations",
       [](RunConfig& c, auto& k, auto& v) { c.attack.decode.num_generations = parse_number<std::size_t>(k, v); }},
      {"alpha", [](RunConfig& c, auto& k, auto& v) { c.attack.decode.alpha = parse_number<double>(k, v); }},
      {"top_k", [](RunConfig& c, auto& k, auto& v) { c.attack.decode.k = parse_number<std::size_t>(k, v); }},
      {"beam_width",
       [](RunConfig& c, auto& k, auto& v) { c.attack.decode.beam_width = parse_number<std::size_t>(k, v); }},
      // membership inference
      {"classifier", [](RunConfig& c, auto&, auto& v) { c.attack.classifier = parse_classifier_choice(v); }},
      {"fpr", [](RunConfig& c, auto& k, auto& v) { c.attack.fpr = parse_number<double>(k, v); }},
      {"error_budget", [](RunConfig& c, auto&, auto& v) { c.attack.budget = parse_error_budget(v); }},
      {"validation_frac",
       [](RunConfig& c, auto& k, auto& v) { c.attack.validation_frac = parse_number<double>(k, v); }},
      {"importance_repeats",
       [](RunConfig& c, auto& k, auto& v) { c.attack.importance_repeats = parse_number<int>(k, v); }},
      // security game
      {"game_trials", [](RunConfig& c, auto& k, auto& v) { c.game_trials = parse_number<std::size_t>(k, v); }},
      {"game_docs",
       [](RunConfig& c, auto& k, auto& v) { c.game.world.n_background_docs = parse_number<std::size_t>(k, v); }},
      {"game_canaries",
       [](RunConfig& c, auto& k, auto& v) { c.game.world.n_canaries = parse_number<std::size_t>(k, v); }},
      {"game_dup_count",
       [](RunConfig& c, auto& k, auto& v) {
         const int d = parse_number<int>(k, v);
         c.game.world.dup_counts.assign(1, d);
       }},
      {"game_calibration_frac",
       [](RunConfig& c, auto& k, auto& v) { c.game.calibration_frac = parse_number<double>(k, v); }},
      {"game_untrained", [](RunConfig& c, auto& k, auto& v) { c.game.untrained = parse_bool(k, v); }},
      {"game_adversaries",
       [](RunConfig& c, auto&, auto& v) {
         c.game_adversaries = split_list(v);
         for (const auto& a : c.game_adversaries) make_adversary(a);
       }},
  };
  return table;
}

}  // namespace

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys = [] {
    std::vector<std::string> k;
    for (const auto& [name, fn] : setters()) k.push_back(name);
    return k;
  }();
  return keys;
}

void RunConfig::apply_seed(std::uint64_t s) {
  seed = s;
  corpus.seed = s;
  lm.seed = s;
  attack.seed = s;
  attack.decode.seed = derive_seed(s, {0x6465636f6465ULL});
  game.seed = derive_seed(s, {0x67616d65ULL});
  game.world.seed = game.seed;
}

void RunConfig::validate() const {
  CorpusSpec spec = corpus;
  spec.dup_counts = cycled_dup_counts(spec.n_canaries, dup_levels);
  spec.validate();
  if (prefix_len == 0 || suffix_len == 0) throw ConfigError("prefix_len and suffix_len must be positive");
  if (prefix_len + suffix_len > corpus.canary_len) throw ConfigError("prefix_len + suffix_len exceeds canary_len");
  if (!(train_frac > 0.0 && train_frac < 1.0)) throw ConfigError("train_frac must be in (0, 1)");
  if (attack.decode.suffix_len != suffix_len) throw ConfigError("decode suffix_len out of sync");
  attack.validate();
  game.world.validate();
  if (game_trials == 0) throw ConfigError("game_trials must be >= 1");
}

RunConfig parse_run_config(const std::string& text, const std::filesystem::path& base_dir) {
  RunConfig cfg;
  cfg.game = default_game_config(0);
  std::map<std::string, const Setter*> by_name;
  for (const auto& [name, fn] : setters()) by_name.emplace(name, &fn);

  std::set<std::string> seen;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(lineno) + ": expected key=value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    const auto it = by_name.find(key);
    if (it == by_name.end()) throw ConfigError("unknown config key '" + key + "' (line " + std::to_string(lineno) + ")");
    if (!seen.insert(key).second) throw ConfigError("duplicate config key '" + key + "'");
    (*it->second)(cfg, key, value);
  }
  if (!seen.count("seed")) throw ConfigError("config key 'seed' is required");

  cfg.corpus.dup_counts = cycled_dup_counts(cfg.corpus.n_canaries, cfg.dup_levels);
  cfg.attack.decode.suffix_len = cfg.suffix_len;
  if (cfg.game.world.dup_counts.size() != cfg.game.world.n_canaries) {
    const int d = cfg.game.world.dup_counts.empty() ? 25 : cfg.game.world.dup_counts.front();
    cfg.game.world.dup_counts.assign(cfg.game.world.n_canaries, d);
  }
  // The game world shares the benchmark's vocabulary and background process.
  cfg.game.world.vocab_size = cfg.corpus.vocab_size;
  cfg.game.world.doc_len = cfg.corpus.doc_len;
  cfg.game.world.canary_len = cfg.corpus.canary_len;
  cfg.game.world.markov_branching = cfg.corpus.markov_branching;
  cfg.game.world.markov_concentration = cfg.corpus.markov_concentration;
  cfg.game.world.markov_zipf = cfg.corpus.markov_zipf;
  cfg.game.lm = cfg.lm;
  cfg.game.prefix_len = cfg.prefix_len;
  cfg.game.suffix_len = cfg.suffix_len;
  if (cfg.out_dir.is_relative()) cfg.out_dir = base_dir / cfg.out_dir;
  cfg.apply_seed(cfg.seed);
  cfg.validate();
  return cfg;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_run_config(ss.str(), path.parent_path().empty() ? std::filesystem::path(".") : path.parent_path());
}

}  // namespace extractbench
