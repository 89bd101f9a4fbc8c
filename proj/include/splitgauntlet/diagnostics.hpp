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
// Split diagnostics: how different are a manifest's train and test sides?
// Reports the Wasserstein distance between side-mean rank distributions,
// per-side length statistics, and a linear separability probe whose
// held-out accuracy approximates the A-distance between the sides.

#ifndef SPLITGAUNTLET_DIAGNOSTICS_HPP
#define SPLITGAUNTLET_DIAGNOSTICS_HPP

#include <algorithm>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "splitgauntlet/corpus.hpp"
#include "splitgauntlet/evalharness.hpp"
#include "splitgauntlet/features.hpp"
#include "splitgauntlet/metricspace.hpp"
#include "splitgauntlet/random.hpp"
#include "splitgauntlet/splitters.hpp"

namespace splitgauntlet {

struct LengthStats {
  std::size_t min = 0;
  double mean = 0.0;
  std::size_t max = 0;
};

struct DivergenceReport {
  double wasserstein_train_test = 0.0;
  LengthStats train_lengths, test_lengths;
  double test_fraction_realized = 0.0;
};

namespace detail {

inline LengthStats length_stats_of(const Corpus& corpus, const std::vector<int>& ids,
                                   const FeatureConfig& features) {
  LengthStats stats;
  stats.min = static_cast<std::size_t>(-1);
  double total = 0.0;
  for (int id : ids) {
    const std::size_t len = sentence_length(corpus.records[static_cast<std::size_t>(id)], features);
    stats.min = std::min(stats.min, len);
    stats.max = std::max(stats.max, len);
    total += static_cast<double>(len);
  }
  stats.mean = total / static_cast<double>(ids.size());
  return stats;
}

// Side mean over featurizable members; bootstrap multiplicities become
// weights. Throws if no member featurizes.
inline TokenDistribution side_mean(const Corpus& corpus, const std::vector<int>& ids,
                                   const std::vector<int>& counts, const Vocabulary& vocab,
                                   const FeatureConfig& features, const char* side) {
  std::vector<TokenDistribution> dists;
  std::vector<double> weights;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    try {
      dists.push_back(featurize(corpus.records[static_cast<std::size_t>(ids[i])], vocab, features));
      weights.push_back(counts.empty() ? 1.0 : static_cast<double>(counts[i]));
    } catch (const std::invalid_argument&) {
    }
  }
  if (dists.empty()) {
    throw std::invalid_argument(std::string("split_divergence: ") + side +
                                " side has no featurizable records");
  }
  return mean_distribution(dists, weights);
}

}  // namespace detail

/// Wasserstein divergence between the train-side and test-side mean rank
/// distributions, plus per-side length statistics.
inline DivergenceReport split_divergence(const Corpus& corpus, const SplitManifest& manifest,
                                         const Vocabulary& vocab, const FeatureConfig& features = {}) {
  validate_manifest(manifest, corpus.size());
  DivergenceReport report;
  const TokenDistribution train_mean = detail::side_mean(
      corpus, manifest.train, manifest.with_multiplicity ? manifest.train_counts : std::vector<int>{},
      vocab, features, "train");
  const TokenDistribution test_mean =
      detail::side_mean(corpus, manifest.test, {}, vocab, features, "test");
  report.wasserstein_train_test = wasserstein_1d(train_mean, test_mean);
  report.train_lengths = detail::length_stats_of(corpus, manifest.train, features);
  report.test_lengths = detail::length_stats_of(corpus, manifest.test, features);
  report.test_fraction_realized =
      static_cast<double>(manifest.test.size()) / static_cast<double>(corpus.size());
  return report;
}

struct SeparabilityReport {
  double accuracy = 0.0;          // mean held-out side-membership accuracy
  double a_distance_proxy = 0.0;  // 2 * (2 * accuracy - 1)
  std::size_t n_features = 0;
  std::vector<double> per_fold;
};

struct ProbeConfig {
  std::size_t top_n_unigrams = 1000;
  std::size_t folds = 5;
  std::uint64_t seed = 0;
  ModelConfig model;
  FeatureConfig features;
};

/// Trains a linear classifier to tell train-side from test-side records
/// (count features over the most frequent unigrams, balanced by seeded
/// downsampling, stratified cross-validation). Held-out accuracy near 0.5
/// means the sides are indistinguishable; the proxy rescales it to the
/// [-2, 2] A-distance range.
inline SeparabilityReport separability_probe(const Corpus& corpus, const SplitManifest& manifest,
                                             const ProbeConfig& config = {}) {
  validate_manifest(manifest, corpus.size());
  if (config.folds < 2) throw std::invalid_argument("separability_probe: folds must be at least 2");
  if (manifest.train.size() < config.folds || manifest.test.size() < config.folds) {
    throw std::invalid_argument("separability_probe: each side must have at least `folds` records");
  }

  Rng rng(config.seed);
  std::vector<int> side0 = manifest.train;
  std::vector<int> side1 = manifest.test;
  // Balance class priors so chance level is pinned at 0.5.
  auto downsample = [&](std::vector<int>& ids, std::size_t target) {
    if (ids.size() <= target) return;
    std::vector<int> kept;
    kept.reserve(target);
    for (std::size_t pos : rng.sample_without_replacement(ids.size(), target)) {
      kept.push_back(ids[pos]);
    }
    std::sort(kept.begin(), kept.end());
    ids = std::move(kept);
  };
  const std::size_t per_side = std::min(side0.size(), side1.size());
  downsample(side0, per_side);
  downsample(side1, per_side);

  FeatureConfig probe_features = config.features;
  probe_features.max_vocab = config.top_n_unigrams;
  const Vocabulary vocab = build_vocabulary(corpus, probe_features);

  auto count_row = [&](int id) {
    std::map<std::int32_t, double> counts;
    for (auto& token : tokenize(corpus.records[static_cast<std::size_t>(id)].text, probe_features)) {
      if (auto rank = vocab.rank(token)) counts[static_cast<std::int32_t>(*rank)] += 1.0;
    }
    return SparseRow(counts.begin(), counts.end());
  };

  // Stratified fold assignment: shuffle within each class, deal round-robin.
  std::vector<std::vector<int>> fold_ids(config.folds);
  std::vector<std::vector<std::string>> fold_labels(config.folds);
  auto deal = [&](std::vector<int>& ids, const std::string& label) {
    rng.shuffle(ids);
    for (std::size_t i = 0; i < ids.size(); ++i) {
      fold_ids[i % config.folds].push_back(ids[i]);
      fold_labels[i % config.folds].push_back(label);
    }
  };
  deal(side0, "side0");
  deal(side1, "side1");

  SeparabilityReport report;
  report.n_features = vocab.size();
  for (std::size_t f = 0; f < config.folds; ++f) {
    std::vector<SparseRow> train_rows, test_rows;
    std::vector<std::string> train_labels;
    for (std::size_t g = 0; g < config.folds; ++g) {
      for (std::size_t i = 0; i < fold_ids[g].size(); ++i) {
        if (g == f) {
          test_rows.push_back(count_row(fold_ids[g][i]));
        } else {
          train_rows.push_back(count_row(fold_ids[g][i]));
          train_labels.push_back(fold_labels[g][i]);
        }
      }
    }
    const LinearModel model =
        train_linear_model(train_rows, train_labels, config.model, nullptr, nullptr, vocab.size());
    std::size_t correct = 0;
    for (std::size_t i = 0; i < test_rows.size(); ++i) {
      if (predict_label(model, test_rows[i]) == fold_labels[f][i]) ++correct;
    }
    report.per_fold.push_back(static_cast<double>(correct) / static_cast<double>(test_rows.size()));
  }
  report.accuracy = std::accumulate(report.per_fold.begin(), report.per_fold.end(), 0.0) /
                    static_cast<double>(config.folds);
  report.a_distance_proxy = 2.0 * (2.0 * report.accuracy - 1.0);
  return report;
}

}  // namespace splitgauntlet

#endif  // SPLITGAUNTLET_DIAGNOSTICS_HPP
