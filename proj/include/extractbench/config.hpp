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

#ifndef EXTRACTBENCH_CONFIG_HPP_
#define EXTRACTBENCH_CONFIG_HPP_

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "extractbench/attack.hpp"
#include "extractbench/corpus.hpp"
#include "extractbench/ngram_model.hpp"
#include "extractbench/security_game.hpp"

namespace extractbench {

// Experiment configuration read from a key=value file. Blank lines and lines
// starting with '#' are ignored; unknown keys are rejected.
struct RunConfig {
  std::uint64_t seed = 0;
  CorpusSpec corpus;
  std::vector<int> dup_levels{1, 2, 5, 10, 25};
  std::size_t prefix_len = 50;
  std::size_t suffix_len = 50;
  double train_frac = 0.7;
  NGramOptions lm;
  AttackConfig attack;
  GameConfig game;
  std::size_t game_trials = 200;
  std::vector<std::string> game_adversaries{"constant", "loss_threshold"};
  std::filesystem::path out_dir = "out";

  // Re-derives every component seed from `seed`.
  void apply_seed(std::uint64_t s);
  void validate() const;
};

// Every key accepted in a config file, in documentation order.
const std::vector<std::string>& config_keys();

RunConfig parse_run_config(const std::string& text, const std::filesystem::path& base_dir = ".");
RunConfig load_run_config(const std::filesystem::path& path);

}  // namespace extractbench

#endif  // EXTRACTBENCH_CONFIG_HPP_
