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

#include "extractbench/report.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

namespace extractbench {

using nlohmann::json;

std::string format_double(double v) { return fmt::format("{:.6f}", v); }

namespace {

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot write " + path.string());
  out << text;
  if (!out) throw FormatError("failed writing " + path.string());
}

std::string escape_xml(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

}  // namespace

json metrics_json(const AttackMetrics& m) {
  return {{"recall_at_fpr", m.recall_at_fpr},
          {"fpr", m.fpr},
          {"precision", m.precision},
          {"recall", m.recall},
          {"confusion", {{"tp", m.confusion.tp}, {"fp", m.confusion.fp}, {"tn", m.confusion.tn}, {"fn", m.confusion.fn}}},
          {"stage1_recall", m.stage1_recall},
          {"stage1_recall_post_filter", m.stage1_recall_post_filter}};
}

json attack_config_json(const AttackConfig& c) {
  return {{"decode",
           {{"strategy", to_string(c.decode.strategy)},
            {"suffix_len", c.decode.suffix_len},
            {"num_generations", c.decode.num_generations},
            {"alpha", c.decode.alpha},
            {"k", c.decode.k},
            {"beam_width", c.decode.beam_width},
            {"seed", c.decode.seed}}},
          {"classifier", to_string(c.classifier)},
          {"fpr", c.fpr},
          {"error_budget", to_string(c.budget)},
          {"validation_frac", c.validation_frac},
          {"importance_repeats", c.importance_repeats},
          {"seed", c.seed}};
}

json report_json(const AttackReport& r) {
  json preds = json::array();
  for (std::size_t i = 0; i < r.predictions.size(); ++i) {
    preds.push_back({{"rank", i + 1},
                     {"sample_id", r.predictions[i].sample_id},
                     {"suffix", r.predictions[i].suffix},
                     {"confidence", r.predictions[i].confidence},
                     {"correct", r.ranked[i].correct}});
  }
  json hist = json::array();
  for (const auto& [rank, n] : r.rank_histogram) hist.push_back({{"rank", rank}, {"count", n}});
  json j = {{"config", attack_config_json(r.config)},
            {"classifier", r.classifier_name},
            {"n_test", r.n_test},
            {"predictions", std::move(preds)},
            {"metrics", metrics_json(r.metrics)},
            {"rank_histogram", std::move(hist)},
            {"classifier_artifact", r.classifier_artifact}};
  if (r.importance)
    j["feature_importance"] = {{"loss", r.importance->loss}, {"count", r.importance->count}, {"text", r.importance->text}};
  return j;
}

AttackReport report_from_json(const json& j) {
  try {
    AttackReport r;
    const auto& c = j.at("config");
    const auto& d = c.at("decode");
    r.config.decode.strategy = parse_strategy(d.at("strategy").get<std::string>());
    r.config.decode.suffix_len = d.at("suffix_len").get<std::size_t>();
    r.config.decode.num_generations = d.at("num_generations").get<std::size_t>();
    r.config.decode.alpha = d.at("alpha").get<double>();
    r.config.decode.k = d.at("k").get<std::size_t>();
    r.config.decode.beam_width = d.at("beam_width").get<std::size_t>();
    r.config.decode.seed = d.at("seed").get<std::uint64_t>();
    r.config.classifier = parse_classifier_choice(c.at("classifier").get<std::string>());
    r.config.fpr = c.at("fpr").get<double>();
    r.config.budget = parse_error_budget(c.at("error_budget").get<std::string>());
    r.config.validation_frac = c.at("validation_frac").get<double>();
    r.config.importance_repeats = c.at("importance_repeats").get<int>();
    r.config.seed = c.at("seed").get<std::uint64_t>();
    r.classifier_name = j.at("classifier").get<std::string>();
    r.n_test = j.at("n_test").get<std::size_t>();
    for (const auto& p : j.at("predictions")) {
      RankedPrediction rp{p.at("sample_id").get<std::int64_t>(), p.at("suffix").get<TokenSeq>(),
                          p.at("confidence").get<double>()};
      r.ranked.push_back({rp.sample_id, p.at("correct").get<bool>(), rp.confidence});
      r.predictions.push_back(std::move(rp));
    }
    const auto& m = j.at("metrics");
    r.metrics.recall_at_fpr = m.at("recall_at_fpr").get<double>();
    r.metrics.fpr = m.at("fpr").get<double>();
    r.metrics.precision = m.at("precision").get<double>();
    r.metrics.recall = m.at("recall").get<double>();
    r.metrics.confusion = {m.at("confusion").at("tp").get<std::size_t>(), m.at("confusion").at("fp").get<std::size_t>(),
                           m.at("confusion").at("tn").get<std::size_t>(), m.at("confusion").at("fn").get<std::size_t>()};
    r.metrics.stage1_recall = m.at("stage1_recall").get<double>();
    r.metrics.stage1_recall_post_filter = m.at("stage1_recall_post_filter").get<double>();
    for (const auto& h : j.at("rank_histogram"))
      r.rank_histogram[h.at("rank").get<std::size_t>()] = h.at("count").get<std::size_t>();
    if (j.contains("feature_importance")) {
      const auto& fi = j.at("feature_importance");
      r.importance = FeatureImportance{fi.at("loss").get<double>(), fi.at("count").get<double>(),
                                       fi.at("text").get<double>()};
    }
    r.classifier_artifact = j.at("classifier_artifact");
    return r;
  } catch (const json::exception& e) {
    throw FormatError(std::string("attack report: ") + e.what());
  }
}

std::string bar_chart_svg(const std::string& title, const std::vector<std::pair<std::string, double>>& bars) {
  constexpr int kWidth = 480, kHeight = 300, kMargin = 40;
  double top = 0.0;
  for (const auto& b : bars) top = std::max(top, b.second);
  if (top <= 0.0) top = 1.0;
  const int plot_h = kHeight - 2 * kMargin;
  const double slot = bars.empty() ? 0.0 : static_cast<double>(kWidth - 2 * kMargin) / static_cast<double>(bars.size());
  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight << "\">\n";
  svg << "<text x=\"" << kWidth / 2 << "\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">" << escape_xml(title)
      << "</text>\n";
  svg << "<line x1=\"" << kMargin << "\" y1=\"" << kHeight - kMargin << "\" x2=\"" << kWidth - kMargin << "\" y2=\""
      << kHeight - kMargin << "\" stroke=\"black\"/>\n";
  for (std::size_t i = 0; i < bars.size(); ++i) {
    const double h = std::max(0.0, bars[i].second) / top * plot_h;
    const double x = kMargin + slot * static_cast<double>(i) + slot * 0.1;
    svg << fmt::format("<rect x=\"{:.2f}\" y=\"{:.2f}\" width=\"{:.2f}\" height=\"{:.2f}\" fill=\"steelblue\"/>\n", x,
                       kHeight - kMargin - h, slot * 0.8, h);
    svg << fmt::format("<text x=\"{:.2f}\" y=\"{}\" text-anchor=\"middle\" font-size=\"10\">{}</text>\n",
                       x + slot * 0.4, kHeight - kMargin + 14, escape_xml(bars[i].first));
    svg << fmt::format("<text x=\"{:.2f}\" y=\"{:.2f}\" text-anchor=\"middle\" font-size=\"10\">{}</text>\n",
                       x + slot * 0.4, kHeight - kMargin - h - 4, format_double(bars[i].second));
  }
  svg << "</svg>\n";
  return svg.str();
}

void write_predictions_csv(const std::vector<RankedEntry>& ranked, const std::filesystem::path& path) {
  std::ostringstream out;
  out << "rank,sample_id,confidence,correct\n";
  for (std::size_t i = 0; i < ranked.size(); ++i)
    out << i + 1 << ',' << ranked[i].sample_id << ',' << fmt::format("{}", ranked[i].confidence) << ','
        << (ranked[i].correct ? 1 : 0) << '\n';
  write_text(path, out.str());
}

std::vector<RankedEntry> read_predictions_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot read " + path.string());
  std::string line;
  std::getline(in, line);
  if (line != "rank,sample_id,confidence,correct") throw FormatError(path.string() + ": unexpected header");
  std::vector<RankedEntry> out;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ss(line);
    std::string rank, id, conf, correct;
    if (!std::getline(ss, rank, ',') || !std::getline(ss, id, ',') || !std::getline(ss, conf, ',') ||
        !std::getline(ss, correct, ','))
      throw FormatError(path.string() + ": malformed row");
    out.push_back({std::stoll(id), correct == "1", std::stod(conf)});
  }
  return out;
}

void write_generations(const GenerationMap& generations, const std::filesystem::path& path) {
  std::ostringstream out;
  for (const auto& [id, gens] : generations) {
    for (std::size_t g = 0; g < gens.size(); ++g) {
      json j = {{"sample_id", id}, {"gen_index", g}, {"suffix", gens[g].suffix}, {"score", gens[g].score}};
      out << j.dump() << '\n';
    }
  }
  write_text(path, out.str());
}

GenerationMap read_generations(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot read " + path.string());
  GenerationMap out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    try {
      const json j = json::parse(line);
      auto& list = out[j.at("sample_id").get<std::int64_t>()];
      const auto idx = j.at("gen_index").get<std::size_t>();
      if (idx != list.size()) throw FormatError(path.string() + ": gen_index out of order");
      list.push_back({j.at("suffix").get<TokenSeq>(), j.at("score").get<double>()});
    } catch (const json::exception& e) {
      throw FormatError(path.string() + ": " + e.what());
    }
  }
  return out;
}

void write_report(const AttackReport& report, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  write_text(dir / "metrics.json", metrics_json(report.metrics).dump(2) + "\n");
  write_text(dir / "report.json", report_json(report).dump(1) + "\n");
  write_predictions_csv(report.ranked, dir / "predictions.csv");

  std::ostringstream hist_csv;
  hist_csv << "rank,count\n";
  std::vector<std::pair<std::string, double>> hist_bars;
  for (const auto& [rank, n] : report.rank_histogram) {
    hist_csv << rank << ',' << n << '\n';
    hist_bars.emplace_back(std::to_string(rank), static_cast<double>(n));
  }
  write_text(dir / "rank_histogram.csv", hist_csv.str());
  write_text(dir / "rank_histogram.svg", bar_chart_svg("Rank of correct suffix by loss", hist_bars));

  std::ostringstream imp_csv;
  imp_csv << "feature,importance\n";
  std::vector<std::pair<std::string, double>> imp_bars;
  if (report.importance) {
    imp_bars = {{"loss", report.importance->loss}, {"count", report.importance->count}, {"text", report.importance->text}};
    for (const auto& [name, v] : imp_bars) imp_csv << name << ',' << format_double(v) << '\n';
  }
  write_text(dir / "feature_importance.csv", imp_csv.str());
  write_text(dir / "feature_importance.svg", bar_chart_svg("Permutation importance", imp_bars));

  const auto& cm = report.metrics.confusion;
  std::ostringstream cm_csv;
  cm_csv << "actual,predicted_member,predicted_non_member\n"
         << "member," << cm.tp << ',' << cm.fn << '\n'
         << "non_member," << cm.fp << ',' << cm.tn << '\n';
  write_text(dir / "confusion.csv", cm_csv.str());
  write_text(dir / "confusion.svg",
             bar_chart_svg("Confusion matrix", {{"TP", static_cast<double>(cm.tp)},
                                                {"FP", static_cast<double>(cm.fp)},
                                                {"TN", static_cast<double>(cm.tn)},
                                                {"FN", static_cast<double>(cm.fn)}}));
}

}  // namespace extractbench
