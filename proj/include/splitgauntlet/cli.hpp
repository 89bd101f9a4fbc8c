// Copyright 2026 The splitgauntlet Authors.
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
//
// Command-line surface: gen, split, diagnose, evaluate, drift. Manifests
// and reports are files so that exact splits can be archived and recombined;
// no subcommand mutates its inputs, and every output is deterministic in
// (inputs, flags, seed). Exit codes: 0 success, 1 usage error, 2 data error.

#ifndef SPLITGAUNTLET_CLI_HPP
#define SPLITGAUNTLET_CLI_HPP

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "splitgauntlet/corpus.hpp"
#include "splitgauntlet/diagnostics.hpp"
#include "splitgauntlet/evalharness.hpp"
#include "splitgauntlet/features.hpp"
#include "splitgauntlet/jsonutil.hpp"
#include "splitgauntlet/splitters.hpp"

namespace splitgauntlet::cli {

inline const std::vector<std::string>& strategy_names() {
  static const std::vector<std::string> names = {
      "standard",   "random_cv",  "bootstrap",        "length_threshold",
      "random_length", "rare_words", "temporal_holdout", "adversarial"};
  return names;
}

namespace detail {

inline CorpusFormat format_from_string(const std::string& name) {
  if (name == "jsonl") return CorpusFormat::kJsonl;
  if (name == "tsv") return CorpusFormat::kTsv;
  throw CLI::ValidationError("--format", "expected jsonl or tsv");
}

inline std::string manifest_filename(const std::string& strategy, int run_index) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%03d", run_index);
  return "manifest_" + strategy + "_" + buf + ".json";
}

/// Produces the manifests for one strategy. Deterministic strategies yield
/// a single manifest; seeded ones yield `repeats` (random_cv yields whole
/// 1/test_fraction-sized folds and keeps the first `repeats`).
inline std::vector<SplitManifest> make_manifests(const std::string& strategy, const Corpus& corpus,
                                                 const SplitterConfig& config,
                                                 const FeatureConfig& features) {
  if (strategy == "standard") {
    const double test_prop = config.test_fraction;
    const double dev_prop = (1.0 - config.test_fraction) * config.dev_fraction;
    return {standard_split(corpus, 1.0 - test_prop - dev_prop, dev_prop, test_prop)};
  }
  if (strategy == "random_cv") {
    std::size_t folds = static_cast<std::size_t>(std::llround(1.0 / config.test_fraction));
    folds = std::clamp<std::size_t>(folds, 2, corpus.size());
    std::vector<SplitManifest> manifests = random_cv_splits(corpus, folds, config);
    if (manifests.size() > config.repeats) manifests.resize(config.repeats);
    return manifests;
  }
  if (strategy == "bootstrap") {
    std::vector<SplitManifest> manifests;
    for (std::size_t r = 0; r < config.repeats; ++r) {
      manifests.push_back(bootstrap_split(corpus, config, static_cast<int>(r)));
    }
    return manifests;
  }
  if (strategy == "length_threshold") return {length_threshold_split(corpus, config, features)};
  if (strategy == "random_length") return random_length_splits(corpus, config, features);
  if (strategy == "rare_words") {
    return {rare_words_split(corpus, build_vocabulary(corpus, features), config, features)};
  }
  if (strategy == "temporal_holdout") return {temporal_holdout_split(corpus, config)};
  if (strategy == "adversarial") {
    return adversarial_splits(corpus, build_vocabulary(corpus, features), config, features);
  }
  throw std::logic_error("unhandled strategy: " + strategy);
}

inline nlohmann::json divergence_to_json(const DivergenceReport& report) {
  return {
      {"wasserstein_train_test", report.wasserstein_train_test},
      {"train_lengths",
       {{"min", report.train_lengths.min}, {"mean", report.train_lengths.mean}, {"max", report.train_lengths.max}}},
      {"test_lengths",
       {{"min", report.test_lengths.min}, {"mean", report.test_lengths.mean}, {"max", report.test_lengths.max}}},
      {"test_fraction_realized", report.test_fraction_realized},
  };
}

inline nlohmann::json separability_to_json(const SeparabilityReport& report) {
  return {
      {"accuracy", report.accuracy},
      {"a_distance_proxy", report.a_distance_proxy},
      {"n_features", report.n_features},
      {"per_fold", report.per_fold},
  };
}

inline nlohmann::json evaluation_report_to_json(const EvaluationReport& report) {
  return {
      {"strategy", report.strategy}, {"p_s", report.p_s},
      {"p_b", report.p_b},           {"error_reduction", report.error_reduction_mean},
      {"per_run", report.per_run},   {"metric", report.metric},
      {"warnings", report.warnings},
  };
}

struct SplitFlags {
  std::string strategy;
  std::string input, format = "jsonl", out_dir;
  SplitterConfig config;
  FeatureConfig features;
  bool lowercase_off = false;
  std::size_t max_vocab = 0;
  std::size_t min_count = 1;
};

}  // namespace detail

/// Entry point shared by the binary and the tests. Streams are injectable
/// so in-process invocations can capture output.
inline int run(const std::vector<std::string>& args, std::ostream& out = std::cout,
               std::ostream& err = std::cerr) {
  CLI::App app{"Dataset splitting, divergence diagnostics, and split-quality evaluation"};
  app.require_subcommand(1);

  // --- gen ---
  auto* gen = app.add_subcommand("gen", "Generate a synthetic labeled corpus (JSONL)");
  SyntheticConfig gen_config;
  std::string gen_out;
  std::string gen_holdout;
  gen->add_option("--n", gen_config.n_records, "Number of records")->default_val(1000);
  gen->add_option("--vocab", gen_config.vocab_size, "Base vocabulary size")->default_val(200);
  gen->add_option("--labels", gen_config.n_labels, "Number of labels")->default_val(2);
  gen->add_option("--correlation", gen_config.length_label_correlation,
                  "Strength of the planted length->label signal in [0,1]")
      ->default_val(0.0);
  gen->add_option("--drift", gen_config.temporal_drift_rate,
                  "Token-variant drift rate in [0,1]")
      ->default_val(0.0);
  gen->add_option("--periods", gen_config.n_periods, "Number of one-day periods")->default_val(1);
  gen->add_option("--seed", gen_config.seed, "Generator seed")->required();
  gen->add_option("--out", gen_out, "Output corpus path")->required();
  gen->add_option("--holdout-final-period", gen_holdout,
                  "Write the final period to this path as a separate new-sample corpus");

  // --- split ---
  auto* split = app.add_subcommand("split", "Write split manifests for one strategy");
  detail::SplitFlags sf;
  bool split_seed_given = false;
  split->add_option("--strategy", sf.strategy, "One of: " + CLI::detail::join(strategy_names(), ", "))
      ->required();
  split->add_option("--in", sf.input, "Input corpus")->required();
  split->add_option("--format", sf.format, "Corpus format: jsonl or tsv")->default_val("jsonl");
  split->add_option("--out", sf.out_dir, "Output directory for manifests")->required();
  split->add_option("--test-fraction", sf.config.test_fraction)->default_val(0.10);
  split->add_option("--dev-fraction", sf.config.dev_fraction)->default_val(0.10);
  split->add_option("--repeats", sf.config.repeats)->default_val(5);
  auto* split_seed_opt = split->add_option("--seed", sf.config.seed, "Seed (required for stochastic strategies)");
  split->add_flag("--no-lowercase", sf.lowercase_off, "Disable tokenizer lowercasing");
  split->add_option("--max-vocab", sf.max_vocab, "Vocabulary cap (0 = unbounded)")->default_val(0);
  split->add_option("--min-count", sf.min_count, "Minimum token count kept in the vocabulary")->default_val(1);
  split->callback([&] { split_seed_given = split_seed_opt->count() > 0; });

  // --- diagnose ---
  auto* diagnose = app.add_subcommand("diagnose", "Divergence + separability reports for manifests");
  std::string diag_input, diag_format = "jsonl", diag_out;
  std::vector<std::string> diag_manifests;
  ProbeConfig probe;
  bool no_probe = false;
  bool diag_seed_given = false;
  diagnose->add_option("--in", diag_input, "Input corpus")->required();
  diagnose->add_option("--format", diag_format)->default_val("jsonl");
  diagnose->add_option("--manifest", diag_manifests, "Manifest JSON file (repeatable)")
      ->required()
      ->take_all();
  diagnose->add_option("--out", diag_out, "Output report JSON")->required();
  diagnose->add_option("--top-n", probe.top_n_unigrams, "Probe feature count")->default_val(1000);
  diagnose->add_option("--folds", probe.folds, "Probe cross-validation folds")->default_val(5);
  auto* diag_seed_opt = diagnose->add_option("--seed", probe.seed, "Probe seed");
  diagnose->add_flag("--no-probe", no_probe, "Skip the separability probe");
  diagnose->callback([&] { diag_seed_given = diag_seed_opt->count() > 0; });

  // --- evaluate ---
  auto* evaluate = app.add_subcommand("evaluate", "Train/score per strategy and against a new sample");
  std::string eval_input, eval_format = "jsonl", eval_new_sample, eval_out_dir;
  std::vector<std::string> eval_strategies;
  SplitterConfig eval_split_config;
  EvaluateOptions eval_options;
  bool eval_no_lowercase = false;
  evaluate->add_option("--in", eval_input, "Input corpus")->required();
  evaluate->add_option("--format", eval_format)->default_val("jsonl");
  evaluate->add_option("--strategies", eval_strategies, "Comma-separated strategy list")
      ->required()
      ->delimiter(',');
  evaluate->add_option("--new-sample", eval_new_sample, "New-sample corpus path")->required();
  evaluate->add_option("--out", eval_out_dir, "Output directory")->required();
  evaluate->add_option("--seed", eval_split_config.seed, "Seed for splits and the reference run")
      ->required();
  evaluate->add_option("--test-fraction", eval_split_config.test_fraction)->default_val(0.10);
  evaluate->add_option("--dev-fraction", eval_split_config.dev_fraction)->default_val(0.10);
  evaluate->add_option("--repeats", eval_split_config.repeats)->default_val(5);
  evaluate->add_option("--l2", eval_options.model.l2_strength)->default_val(0.01);
  evaluate->add_option("--max-iters", eval_options.model.max_iters)->default_val(500);
  evaluate->add_option("--learning-rate", eval_options.model.learning_rate)->default_val(0.1);
  evaluate->add_option("--min-count", eval_options.features.min_count)->default_val(1);
  evaluate->add_option("--max-vocab", eval_options.features.max_vocab)->default_val(0);
  evaluate->add_flag("--no-lowercase", eval_no_lowercase);

  // --- drift ---
  auto* drift = app.add_subcommand("drift", "Day-sliced training against the final day");
  std::string drift_input, drift_format = "jsonl", drift_out_dir;
  std::size_t drift_min_day = 100;
  ModelConfig drift_model;
  drift->add_option("--in", drift_input, "Input corpus (timestamps required)")->required();
  drift->add_option("--format", drift_format)->default_val("jsonl");
  drift->add_option("--out", drift_out_dir, "Output directory")->required();
  drift->add_option("--min-day-size", drift_min_day, "Minimum records per day slice")->default_val(100);
  drift->add_option("--l2", drift_model.l2_strength)->default_val(0.01);
  drift->add_option("--max-iters", drift_model.max_iters)->default_val(500);
  drift->add_option("--learning-rate", drift_model.learning_rate)->default_val(0.1);

  std::vector<const char*> argv;
  argv.push_back("splitgauntlet");
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n";
    return 1;
  }

  try {
    namespace fs = std::filesystem;
    if (app.got_subcommand(gen)) {
      const Corpus corpus = generate_synthetic(gen_config);
      if (!gen_holdout.empty()) {
        const CivilDay last = *std::max_element(
            corpus.records.begin(), corpus.records.end(),
            [](const Record& a, const Record& b) { return *a.timestamp < *b.timestamp; })
            ->timestamp;
        std::vector<int> base_ids, holdout_ids;
        for (const Record& r : corpus.records) {
          (*r.timestamp == last ? holdout_ids : base_ids).push_back(r.id);
        }
        if (base_ids.empty() || holdout_ids.empty()) {
          throw std::invalid_argument("--holdout-final-period requires at least 2 periods of data");
        }
        atomic_write_file(gen_out, serialize_corpus(subset_corpus(corpus, base_ids), CorpusFormat::kJsonl));
        atomic_write_file(gen_holdout,
                          serialize_corpus(subset_corpus(corpus, holdout_ids), CorpusFormat::kJsonl));
        out << "wrote " << base_ids.size() << " records to " << gen_out << ", " << holdout_ids.size()
            << " final-period records to " << gen_holdout << "\n";
      } else {
        atomic_write_file(gen_out, serialize_corpus(corpus, CorpusFormat::kJsonl));
        out << "wrote " << corpus.size() << " records to " << gen_out << "\n";
      }
      return 0;
    }

    if (app.got_subcommand(split)) {
      const auto& names = strategy_names();
      if (std::find(names.begin(), names.end(), sf.strategy) == names.end()) {
        err << "usage error: unknown strategy '" << sf.strategy
            << "'; valid strategies: " << CLI::detail::join(names, ", ") << "\n";
        return 1;
      }
      if (sf.strategy != "standard" && !split_seed_given) {
        err << "usage error: --seed is required for stochastic strategy '" << sf.strategy << "'\n";
        return 1;
      }
      sf.features.lowercase = !sf.lowercase_off;
      sf.features.max_vocab = sf.max_vocab;
      sf.features.min_count = sf.min_count;
      const Corpus corpus = load_corpus(sf.input, detail::format_from_string(sf.format));
      const std::vector<SplitManifest> manifests =
          detail::make_manifests(sf.strategy, corpus, sf.config, sf.features);
      fs::create_directories(sf.out_dir);
      nlohmann::json summary;
      summary["strategy"] = sf.strategy;
      summary["corpus"] = sf.input;
      summary["n_records"] = corpus.size();
      summary["manifests"] = nlohmann::json::array();
      for (const SplitManifest& m : manifests) {
        const std::string name = detail::manifest_filename(sf.strategy, m.run_index);
        write_json_file((fs::path(sf.out_dir) / name).string(), manifest_to_json(m));
        summary["manifests"].push_back(
            {{"file", name},
             {"run_index", m.run_index},
             {"test_fraction_realized", m.stats.value("test_fraction_realized", 0.0)}});
      }
      write_json_file((fs::path(sf.out_dir) / "summary.json").string(), summary);
      out << "wrote " << manifests.size() << " manifest(s) to " << sf.out_dir << "\n";
      return 0;
    }

    if (app.got_subcommand(diagnose)) {
      if (!no_probe && !diag_seed_given) {
        err << "usage error: --seed is required unless --no-probe is given\n";
        return 1;
      }
      const Corpus corpus = load_corpus(diag_input, detail::format_from_string(diag_format));
      const Vocabulary vocab = build_vocabulary(corpus, probe.features);
      nlohmann::json reports = nlohmann::json::array();
      std::vector<nlohmann::json> slots(diag_manifests.size());
      parallel_for_index(diag_manifests.size(), [&](std::size_t i) {
        std::ifstream in(diag_manifests[i]);
        if (!in) throw std::runtime_error("cannot open manifest: " + diag_manifests[i]);
        nlohmann::json mj;
        in >> mj;
        const SplitManifest manifest = manifest_from_json(mj);
        validate_manifest(manifest, corpus.size());
        nlohmann::json entry;
        entry["manifest"] = diag_manifests[i];
        entry["strategy"] = manifest.strategy;
        entry["run_index"] = manifest.run_index;
        entry["divergence"] = detail::divergence_to_json(
            split_divergence(corpus, manifest, vocab, probe.features));
        if (!no_probe) {
          entry["separability"] = detail::separability_to_json(separability_probe(corpus, manifest, probe));
        }
        slots[i] = std::move(entry);
      });
      for (auto& entry : slots) reports.push_back(std::move(entry));
      write_json_file(diag_out, reports);
      out << "wrote diagnostics for " << diag_manifests.size() << " manifest(s) to " << diag_out << "\n";
      return 0;
    }

    if (app.got_subcommand(evaluate)) {
      const auto& names = strategy_names();
      for (const auto& s : eval_strategies) {
        if (std::find(names.begin(), names.end(), s) == names.end()) {
          err << "usage error: unknown strategy '" << s
              << "'; valid strategies: " << CLI::detail::join(names, ", ") << "\n";
          return 1;
        }
      }
      eval_options.features.lowercase = !eval_no_lowercase;
      eval_options.dev_fraction = eval_split_config.dev_fraction;
      eval_options.test_fraction = eval_split_config.test_fraction;
      eval_options.seed = derive_seed(eval_split_config.seed, 0x5eedULL);
      const Corpus corpus = load_corpus(eval_input, detail::format_from_string(eval_format));
      const Corpus new_sample = load_corpus(eval_new_sample, detail::format_from_string(eval_format));
      std::vector<std::pair<std::string, std::vector<SplitManifest>>> runs;
      for (const auto& s : eval_strategies) {
        runs.emplace_back(s, detail::make_manifests(s, corpus, eval_split_config, eval_options.features));
      }
      const EvaluationSuite suite = evaluate_strategies(corpus, runs, new_sample, eval_options);

      nlohmann::json j;
      j["strategies"] = nlohmann::json::array();
      for (const auto& report : suite.strategies) {
        j["strategies"].push_back(detail::evaluation_report_to_json(report));
      }
      j["new_sample"] = detail::evaluation_report_to_json(suite.new_sample);
      j["mse_vs_new_sample"] = nlohmann::json::object();
      for (const auto& [name, mse] : suite.mse_vs_new_sample) j["mse_vs_new_sample"][name] = mse;
      fs::create_directories(eval_out_dir);
      write_json_file((fs::path(eval_out_dir) / "evaluation.json").string(), j);
      const std::string table = render_evaluation_table(suite);
      atomic_write_file((fs::path(eval_out_dir) / "evaluation.txt").string(), table);
      out << table;
      return 0;
    }

    if (app.got_subcommand(drift)) {
      const Corpus corpus = load_corpus(drift_input, detail::format_from_string(drift_format));
      const std::vector<DaySlice> slices = day_slices(corpus, drift_min_day);
      if (slices.size() < 4) {
        throw std::invalid_argument("drift analysis needs at least 4 qualifying day slices (3 training + test)");
      }
      const DaySlice& test_slice = slices.back();
      FeatureConfig features;
      std::vector<double> gaps(slices.size() - 1), scores(slices.size() - 1);
      std::vector<nlohmann::json> pairs(slices.size() - 1);
      parallel_for_index(slices.size() - 1, [&](std::size_t i) {
        const DaySlice& train_slice = slices[i];
        const Corpus train_corpus = subset_corpus(corpus, train_slice.ids);
        const Vocabulary vocab = build_vocabulary(train_corpus, features);
        std::vector<SparseRow> rows;
        std::vector<std::string> labels;
        for (const Record& r : train_corpus.records) {
          try {
            rows.push_back(sparse_row_from(featurize(r, vocab, features)));
            labels.push_back(r.label);
          } catch (const std::invalid_argument&) {
          }
        }
        const LinearModel model =
            train_linear_model(rows, labels, drift_model, nullptr, nullptr, vocab.size());
        const splitgauntlet::detail::ScoredSet scored =
            splitgauntlet::detail::score_records(model, vocab, features, corpus, test_slice.ids);
        gaps[i] = static_cast<double>(test_slice.day.minus(train_slice.day));
        scores[i] = scored.accuracy;
        pairs[i] = {{"train_day", format_civil_day(train_slice.day)},
                    {"gap_days", gaps[i]},
                    {"accuracy", scores[i]},
                    {"n_train", train_slice.ids.size()}};
      });
      const PearsonResult pearson = drift_correlation(gaps, scores);
      nlohmann::json j;
      j["test_day"] = format_civil_day(test_slice.day);
      j["n_test"] = test_slice.ids.size();
      j["pairs"] = pairs;
      j["pearson_r"] = pearson.r;
      j["t_statistic"] = pearson.t_statistic;
      j["p_value"] = pearson.p_value;
      fs::create_directories(drift_out_dir);
      write_json_file((fs::path(drift_out_dir) / "drift.json").string(), j);
      char line[128];
      std::snprintf(line, sizeof(line), "pearson_r=%.4f p_value=%.6g over %zu day pairs\n", pearson.r,
                    pearson.p_value, gaps.size());
      out << line;
      return 0;
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
  return 1;
}

}  // namespace splitgauntlet::cli

#endif  // SPLITGAUNTLET_CLI_HPP
