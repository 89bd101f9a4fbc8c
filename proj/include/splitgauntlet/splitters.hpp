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
// Split strategies. Every strategy is a pure function of (corpus, vocab
// where applicable, config) and produces SplitManifests with sorted id
// lists, so repeated invocations serialize byte-identically.

#ifndef SPLITGAUNTLET_SPLITTERS_HPP
#define SPLITGAUNTLET_SPLITTERS_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "splitgauntlet/corpus.hpp"
#include "splitgauntlet/features.hpp"
#include "splitgauntlet/jsonutil.hpp"
#include "splitgauntlet/metricspace.hpp"
#include "splitgauntlet/random.hpp"

namespace splitgauntlet {

/// Train/dev/test membership plus strategy provenance. For bootstrap splits
/// train/dev carry per-id multiplicities; everywhere else the count vectors
/// stay empty and every id counts once.
struct SplitManifest {
  std::string strategy;
  nlohmann::json params = nlohmann::json::object();
  std::optional<std::uint64_t> seed;
  int run_index = 0;
  std::vector<int> train, dev, test;        // sorted ascending, disjoint
  std::vector<int> train_counts, dev_counts;  // parallel to train/dev when multiplicities apply
  bool with_multiplicity = false;
  nlohmann::json stats = nlohmann::json::object();
};

struct SplitterConfig {
  double test_fraction = 0.10;
  double dev_fraction = 0.10;  // of the non-test remainder
  std::size_t repeats = 5;
  std::uint64_t seed = 0;

  void validate() const {
    if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
      throw std::invalid_argument("test_fraction must be in (0, 1)");
    }
    if (!(dev_fraction >= 0.0 && dev_fraction < 1.0)) {
      throw std::invalid_argument("dev_fraction must be in [0, 1)");
    }
    if (!(test_fraction + (1.0 - test_fraction) * dev_fraction < 1.0)) {
      throw std::invalid_argument("test and dev fractions leave no training data");
    }
    if (repeats == 0) throw std::invalid_argument("repeats must be positive");
  }
};

inline void validate_manifest(const SplitManifest& m, std::size_t corpus_size) {
  auto check_part = [&](const std::vector<int>& ids, const char* name) {
    for (std::size_t i = 0; i < ids.size(); ++i) {
      if (ids[i] < 0 || static_cast<std::size_t>(ids[i]) >= corpus_size) {
        throw std::logic_error(std::string("manifest ") + name + ": id out of range");
      }
      if (i > 0 && ids[i] <= ids[i - 1]) {
        throw std::logic_error(std::string("manifest ") + name + ": ids must be sorted and distinct");
      }
    }
  };
  check_part(m.train, "train");
  check_part(m.dev, "dev");
  check_part(m.test, "test");
  if (m.train.empty()) throw std::logic_error("manifest train set is empty");
  if (m.test.empty()) throw std::logic_error("manifest test set is empty");
  std::vector<int> all;
  all.reserve(m.train.size() + m.dev.size() + m.test.size());
  all.insert(all.end(), m.train.begin(), m.train.end());
  all.insert(all.end(), m.dev.begin(), m.dev.end());
  all.insert(all.end(), m.test.begin(), m.test.end());
  std::sort(all.begin(), all.end());
  if (std::adjacent_find(all.begin(), all.end()) != all.end()) {
    throw std::logic_error("manifest parts are not disjoint");
  }
  if (m.with_multiplicity) {
    if (m.train_counts.size() != m.train.size() || m.dev_counts.size() != m.dev.size()) {
      throw std::logic_error("manifest multiplicity vectors must parallel the id vectors");
    }
    for (int c : m.train_counts) {
      if (c <= 0) throw std::logic_error("manifest multiplicities must be positive");
    }
    for (int c : m.dev_counts) {
      if (c <= 0) throw std::logic_error("manifest multiplicities must be positive");
    }
  }
}

inline nlohmann::json manifest_to_json(const SplitManifest& m) {
  nlohmann::json j;
  j["strategy"] = m.strategy;
  j["params"] = m.params;
  if (m.seed) j["seed"] = *m.seed; else j["seed"] = nullptr;
  j["run_index"] = m.run_index;
  auto part = [&](const std::vector<int>& ids, const std::vector<int>& counts) -> nlohmann::json {
    if (!m.with_multiplicity) return ids;
    nlohmann::json arr = nlohmann::json::array();
    for (std::size_t i = 0; i < ids.size(); ++i) arr.push_back({{"id", ids[i]}, {"count", counts[i]}});
    return arr;
  };
  j["train"] = part(m.train, m.train_counts);
  j["dev"] = part(m.dev, m.dev_counts);
  j["test"] = m.test;
  j["stats"] = m.stats;
  round_json_floats(j);
  return j;
}

inline SplitManifest manifest_from_json(const nlohmann::json& j) {
  SplitManifest m;
  m.strategy = j.at("strategy").get<std::string>();
  m.params = j.value("params", nlohmann::json::object());
  if (j.contains("seed") && !j["seed"].is_null()) m.seed = j["seed"].get<std::uint64_t>();
  m.run_index = j.value("run_index", 0);
  auto part = [&](const nlohmann::json& arr, std::vector<int>& ids, std::vector<int>& counts) {
    for (const auto& item : arr) {
      if (item.is_object()) {
        ids.push_back(item.at("id").get<int>());
        counts.push_back(item.at("count").get<int>());
        m.with_multiplicity = true;
      } else {
        ids.push_back(item.get<int>());
      }
    }
  };
  part(j.at("train"), m.train, m.train_counts);
  part(j.at("dev"), m.dev, m.dev_counts);
  std::vector<int> unused;
  part(j.at("test"), m.test, unused);
  if (m.with_multiplicity) {
    if (m.train_counts.empty()) m.train_counts.assign(m.train.size(), 1);
    if (m.dev_counts.empty()) m.dev_counts.assign(m.dev.size(), 1);
  }
  m.stats = j.value("stats", nlohmann::json::object());
  return m;
}

namespace detail {

inline std::vector<int> sorted_ids(std::vector<int> ids) {
  std::sort(ids.begin(), ids.end());
  return ids;
}

// Carves a seeded dev sample out of `remainder` (which must be sorted).
// Always leaves at least one training record.
inline void carve_dev(const std::vector<int>& remainder, double dev_fraction, Rng& rng,
                      std::vector<int>& train, std::vector<int>& dev) {
  std::size_t dev_size = static_cast<std::size_t>(
      std::llround(dev_fraction * static_cast<double>(remainder.size())));
  if (dev_size >= remainder.size()) dev_size = remainder.size() - 1;
  std::vector<bool> in_dev(remainder.size(), false);
  for (std::size_t pos : rng.sample_without_replacement(remainder.size(), dev_size)) in_dev[pos] = true;
  train.clear();
  dev.clear();
  for (std::size_t i = 0; i < remainder.size(); ++i) {
    (in_dev[i] ? dev : train).push_back(remainder[i]);
  }
}

inline std::vector<int> complement_of(const std::vector<int>& sorted_part, std::size_t n) {
  std::vector<int> out;
  out.reserve(n - sorted_part.size());
  std::size_t j = 0;
  for (std::size_t id = 0; id < n; ++id) {
    if (j < sorted_part.size() && sorted_part[j] == static_cast<int>(id)) {
      ++j;
    } else {
      out.push_back(static_cast<int>(id));
    }
  }
  return out;
}

inline double fraction_of(std::size_t part, std::size_t whole) {
  return static_cast<double>(part) / static_cast<double>(whole);
}

}  // namespace detail

/// Standard split: mirrors pre-assigned split tags when the corpus carries
/// them; otherwise cuts contiguous prefix/middle/suffix blocks in id order
/// with sizes rounded to nearest (train absorbs the remainder).
inline SplitManifest standard_split(const Corpus& corpus, double train_prop = 0.8, double dev_prop = 0.1,
                                    double test_prop = 0.1) {
  const std::size_t n = corpus.size();
  SplitManifest m;
  m.strategy = "standard";
  if (corpus.has_split_tags) {
    for (const Record& r : corpus.records) {
      switch (*r.split_tag) {
        case SplitTag::kTrain: m.train.push_back(r.id); break;
        case SplitTag::kDev: m.dev.push_back(r.id); break;
        case SplitTag::kTest: m.test.push_back(r.id); break;
      }
    }
    if (m.train.empty() || m.dev.empty() || m.test.empty()) {
      throw std::invalid_argument("standard_split: tagged corpus has an empty part");
    }
    m.params["source"] = "split_tags";
  } else {
    if (std::abs(train_prop + dev_prop + test_prop - 1.0) > 1e-9) {
      throw std::invalid_argument("standard_split: proportions must sum to 1");
    }
    const std::size_t dev_n = static_cast<std::size_t>(std::llround(dev_prop * static_cast<double>(n)));
    const std::size_t test_n = static_cast<std::size_t>(std::llround(test_prop * static_cast<double>(n)));
    if (dev_n == 0 || test_n == 0 || dev_n + test_n >= n) {
      throw std::invalid_argument("standard_split: a part is empty after rounding");
    }
    const std::size_t train_n = n - dev_n - test_n;
    for (std::size_t i = 0; i < n; ++i) {
      if (i < train_n) m.train.push_back(static_cast<int>(i));
      else if (i < train_n + dev_n) m.dev.push_back(static_cast<int>(i));
      else m.test.push_back(static_cast<int>(i));
    }
    m.params["proportions"] = {round_sig(train_prop), round_sig(dev_prop), round_sig(test_prop)};
  }
  m.stats["test_fraction_realized"] = round_sig(detail::fraction_of(m.test.size(), n));
  validate_manifest(m, n);
  return m;
}

/// Seeded k-fold cross-validation: fold f's test set is the f-th contiguous
/// block of one shuffle (larger blocks first), so the test sets partition
/// the corpus. Dev is a seeded fraction of each fold's remainder.
inline std::vector<SplitManifest> random_cv_splits(const Corpus& corpus, std::size_t folds,
                                                   const SplitterConfig& config) {
  config.validate();
  const std::size_t n = corpus.size();
  if (folds < 2) throw std::invalid_argument("random_cv_splits: folds must be at least 2");
  if (folds > n) throw std::invalid_argument("random_cv_splits: folds exceed corpus size");
  std::vector<int> perm(n);
  for (std::size_t i = 0; i < n; ++i) perm[i] = static_cast<int>(i);
  Rng shuffle_rng(config.seed);
  shuffle_rng.shuffle(perm);

  std::vector<SplitManifest> manifests;
  manifests.reserve(folds);
  std::size_t offset = 0;
  for (std::size_t f = 0; f < folds; ++f) {
    const std::size_t block = n / folds + (f < n % folds ? 1 : 0);
    SplitManifest m;
    m.strategy = "random_cv";
    m.seed = config.seed;
    m.run_index = static_cast<int>(f);
    m.test = detail::sorted_ids({perm.begin() + static_cast<std::ptrdiff_t>(offset),
                                 perm.begin() + static_cast<std::ptrdiff_t>(offset + block)});
    offset += block;
    const std::vector<int> remainder = detail::complement_of(m.test, n);
    Rng dev_rng(derive_seed(config.seed, f));
    detail::carve_dev(remainder, config.dev_fraction, dev_rng, m.train, m.dev);
    m.params["folds"] = folds;
    m.params["dev_fraction"] = round_sig(config.dev_fraction);
    m.stats["test_fraction_realized"] = round_sig(detail::fraction_of(m.test.size(), n));
    validate_manifest(m, n);
    manifests.push_back(std::move(m));
  }
  return manifests;
}

/// Bootstrap resample: a seeded test fraction is held out without
/// replacement; the remainder is split into disjoint train/dev pools and
/// each pool is resampled with replacement to its own size, so train/dev
/// carry multiplicities while staying disjoint as id sets.
inline SplitManifest bootstrap_split(const Corpus& corpus, const SplitterConfig& config, int run_index = 0) {
  config.validate();
  const std::size_t n = corpus.size();
  if (n < 10) throw std::invalid_argument("bootstrap_split: corpus must have at least 10 records");
  Rng rng(derive_seed(config.seed, static_cast<std::uint64_t>(run_index)));

  std::size_t test_size = static_cast<std::size_t>(
      std::llround(config.test_fraction * static_cast<double>(n)));
  test_size = std::clamp<std::size_t>(test_size, 1, n - 2);
  std::vector<int> test_ids;
  test_ids.reserve(test_size);
  for (std::size_t pos : rng.sample_without_replacement(n, test_size)) {
    test_ids.push_back(static_cast<int>(pos));
  }

  SplitManifest m;
  m.strategy = "bootstrap";
  m.seed = config.seed;
  m.run_index = run_index;
  m.with_multiplicity = true;
  m.test = detail::sorted_ids(std::move(test_ids));

  std::vector<int> remainder = detail::complement_of(m.test, n);
  rng.shuffle(remainder);
  std::size_t dev_pool = static_cast<std::size_t>(
      std::llround(config.dev_fraction * static_cast<double>(remainder.size())));
  if (dev_pool >= remainder.size()) dev_pool = remainder.size() - 1;

  auto resample = [&](std::size_t begin, std::size_t end, std::vector<int>& ids, std::vector<int>& counts) {
    std::map<int, int> tally;
    const std::size_t m_size = end - begin;
    for (std::size_t draw = 0; draw < m_size; ++draw) {
      ++tally[remainder[begin + rng.next_index(m_size)]];
    }
    for (auto& [id, count] : tally) {
      ids.push_back(id);
      counts.push_back(count);
    }
  };
  resample(dev_pool, remainder.size(), m.train, m.train_counts);
  resample(0, dev_pool, m.dev, m.dev_counts);

  m.params["test_fraction"] = round_sig(config.test_fraction);
  m.params["dev_fraction"] = round_sig(config.dev_fraction);
  m.stats["test_fraction_realized"] = round_sig(detail::fraction_of(m.test.size(), n));
  validate_manifest(m, n);
  return m;
}

/// Length-threshold heuristic: finds the sentence-length threshold whose
/// over-threshold tail is closest to the test fraction (ties toward the
/// larger test set) and puts every longer sentence in test.
inline SplitManifest length_threshold_split(const Corpus& corpus, const SplitterConfig& config,
                                            const FeatureConfig& feature_config = {}) {
  config.validate();
  const std::size_t n = corpus.size();
  std::vector<std::size_t> lengths(n);
  std::map<std::size_t, std::size_t> length_counts;
  for (std::size_t i = 0; i < n; ++i) {
    lengths[i] = sentence_length(corpus.records[i], feature_config);
    ++length_counts[lengths[i]];
  }
  if (length_counts.size() < 2) {
    throw std::invalid_argument("length_threshold_split: all sentence lengths are equal");
  }

  // Candidate thresholds are the distinct lengths except the largest (which
  // would leave test empty). Iterating ascending keeps ties on the larger
  // test side.
  double best_diff = 0.0;
  std::size_t best_threshold = 0;
  bool have_best = false;
  std::size_t longer = n;
  for (auto it = length_counts.begin(); std::next(it) != length_counts.end(); ++it) {
    longer -= it->second;  // count of records with length > it->first
    const double diff = std::abs(detail::fraction_of(longer, n) - config.test_fraction);
    if (!have_best || diff < best_diff - 1e-9) {
      best_diff = diff;
      best_threshold = it->first;
      have_best = true;
    }
  }

  SplitManifest m;
  m.strategy = "length_threshold";
  m.seed = config.seed;
  for (std::size_t i = 0; i < n; ++i) {
    if (lengths[i] > best_threshold) m.test.push_back(static_cast<int>(i));
  }
  const std::vector<int> remainder = detail::complement_of(m.test, n);
  Rng rng(config.seed);
  detail::carve_dev(remainder, config.dev_fraction, rng, m.train, m.dev);
  m.params["test_fraction"] = round_sig(config.test_fraction);
  m.params["dev_fraction"] = round_sig(config.dev_fraction);
  m.stats["length_threshold"] = best_threshold;
  m.stats["test_fraction_realized"] = round_sig(detail::fraction_of(m.test.size(), n));
  validate_manifest(m, n);
  return m;
}

/// Random-length heuristic: sample distinct sentence lengths without
/// replacement and move whole length classes into test until the test
/// fraction is reached. Overshoot is inherent to the whole-length
/// granularity and is recorded, not corrected.
inline std::vector<SplitManifest> random_length_splits(const Corpus& corpus, const SplitterConfig& config,
                                                       const FeatureConfig& feature_config = {}) {
  config.validate();
  const std::size_t n = corpus.size();
  std::vector<std::size_t> lengths(n);
  std::map<std::size_t, std::vector<int>> by_length;
  for (std::size_t i = 0; i < n; ++i) {
    lengths[i] = sentence_length(corpus.records[i], feature_config);
    by_length[lengths[i]].push_back(static_cast<int>(i));
  }
  if (by_length.size() < 2) {
    throw std::invalid_argument("random_length_splits: all sentence lengths are equal");
  }
  std::vector<std::size_t> distinct;
  distinct.reserve(by_length.size());
  for (auto& [len, ids] : by_length) distinct.push_back(len);

  std::vector<SplitManifest> manifests;
  manifests.reserve(config.repeats);
  for (std::size_t r = 0; r < config.repeats; ++r) {
    Rng rng(derive_seed(config.seed, r));
    std::vector<std::size_t> order = distinct;
    rng.shuffle(order);
    SplitManifest m;
    m.strategy = "random_length";
    m.seed = config.seed;
    m.run_index = static_cast<int>(r);
    std::vector<std::size_t> chosen;
    std::size_t test_count = 0;
    for (std::size_t len : order) {
      const std::size_t class_size = by_length[len].size();
      if (test_count + class_size >= n) continue;  // never empty the remainder
      chosen.push_back(len);
      test_count += class_size;
      for (int id : by_length[len]) m.test.push_back(id);
      if (detail::fraction_of(test_count, n) >= config.test_fraction - 1e-12) break;
    }
    std::sort(m.test.begin(), m.test.end());
    const std::vector<int> remainder = detail::complement_of(m.test, n);
    detail::carve_dev(remainder, config.dev_fraction, rng, m.train, m.dev);
    std::sort(chosen.begin(), chosen.end());
    m.params["test_fraction"] = round_sig(config.test_fraction);
    m.params["dev_fraction"] = round_sig(config.dev_fraction);
    m.stats["lengths_in_test"] = chosen;
    m.stats["test_fraction_realized"] = round_sig(detail::fraction_of(m.test.size(), n));
    validate_manifest(m, n);
    manifests.push_back(std::move(m));
  }
  return manifests;
}

/// Rare-words heuristic: walk tokens from rarest upward (count ascending,
/// lexicographic tie-break) moving every record containing the token into
/// test, until the test fraction is reached. Test membership is
/// deterministic; only the dev carve is seeded.
inline SplitManifest rare_words_split(const Corpus& corpus, const Vocabulary& vocab,
                                      const SplitterConfig& config, const FeatureConfig& feature_config = {}) {
  config.validate();
  const std::size_t n = corpus.size();
  if (vocab.size() < 2) {
    throw std::invalid_argument("rare_words_split: vocabulary must contain at least 2 tokens");
  }
  // Ranks are (count desc, token asc); rare-first order is (count asc,
  // token asc), which is not simply the reverse.
  std::vector<std::size_t> order(vocab.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (vocab.counts[a] != vocab.counts[b]) return vocab.counts[a] < vocab.counts[b];
    return vocab.tokens_by_rank[a] < vocab.tokens_by_rank[b];
  });

  std::vector<std::vector<int>> records_with_rank(vocab.size());
  for (const Record& r : corpus.records) {
    std::set<std::size_t> seen;
    for (auto& token : tokenize(r.text, feature_config)) {
      if (auto rank = vocab.rank(token)) seen.insert(*rank);
    }
    for (std::size_t rank : seen) records_with_rank[rank].push_back(r.id);
  }

  std::vector<bool> in_test(n, false);
  std::size_t test_count = 0;
  std::vector<std::string> rare_words;
  for (std::size_t rank : order) {
    std::size_t added = 0;
    for (int id : records_with_rank[rank]) {
      if (!in_test[static_cast<std::size_t>(id)]) ++added;
    }
    if (added == 0) continue;
    if (test_count + added >= n) continue;  // never empty the remainder
    rare_words.push_back(vocab.tokens_by_rank[rank]);
    for (int id : records_with_rank[rank]) {
      if (!in_test[static_cast<std::size_t>(id)]) {
        in_test[static_cast<std::size_t>(id)] = true;
        ++test_count;
      }
    }
    if (detail::fraction_of(test_count, n) >= config.test_fraction - 1e-12) break;
  }
  if (test_count == 0) {
    throw std::invalid_argument("rare_words_split: could not form a non-empty test set");
  }

  SplitManifest m;
  m.strategy = "rare_words";
  m.seed = config.seed;
  for (std::size_t i = 0; i < n; ++i) {
    if (in_test[i]) m.test.push_back(static_cast<int>(i));
  }
  const std::vector<int> remainder = detail::complement_of(m.test, n);
  Rng rng(config.seed);
  detail::carve_dev(remainder, config.dev_fraction, rng, m.train, m.dev);
  m.params["test_fraction"] = round_sig(config.test_fraction);
  m.params["dev_fraction"] = round_sig(config.dev_fraction);
  m.stats["rare_words"] = rare_words;
  m.stats["test_fraction_realized"] = round_sig(detail::fraction_of(m.test.size(), n));
  validate_manifest(m, n);
  return m;
}

/// Temporal holdout: test is the most recent whole days until the test
/// fraction is covered. A day is never split across sides, so every test
/// date is strictly later than every train/dev date.
inline SplitManifest temporal_holdout_split(const Corpus& corpus, const SplitterConfig& config) {
  config.validate();
  const std::size_t n = corpus.size();
  if (!corpus.has_timestamps) throw std::invalid_argument("temporal split requires timestamps");
  std::map<CivilDay, std::vector<int>> by_day;
  for (const Record& r : corpus.records) by_day[*r.timestamp].push_back(r.id);
  if (by_day.size() < 2) throw std::invalid_argument("temporal split requires at least 2 distinct days");

  SplitManifest m;
  m.strategy = "temporal_holdout";
  m.seed = config.seed;
  std::size_t test_count = 0;
  std::optional<CivilDay> cut;
  for (auto it = by_day.rbegin(); it != by_day.rend(); ++it) {
    if (std::next(it) == by_day.rend()) break;  // keep the earliest day in train
    test_count += it->second.size();
    for (int id : it->second) m.test.push_back(id);
    cut = it->first;
    if (static_cast<double>(test_count) >= config.test_fraction * static_cast<double>(n) - 1e-9) break;
  }
  std::sort(m.test.begin(), m.test.end());
  const std::vector<int> remainder = detail::complement_of(m.test, n);
  Rng rng(config.seed);
  detail::carve_dev(remainder, config.dev_fraction, rng, m.train, m.dev);
  m.params["test_fraction"] = round_sig(config.test_fraction);
  m.params["dev_fraction"] = round_sig(config.dev_fraction);
  m.stats["date_cut"] = format_civil_day(*cut);
  m.stats["test_fraction_realized"] = round_sig(detail::fraction_of(m.test.size(), n));
  validate_manifest(m, n);
  return m;
}

struct DaySlice {
  CivilDay day;
  std::vector<int> ids;
};

/// One sub-corpus per calendar day, ascending, keeping only days with at
/// least min_day_size records. The default minimum is a desk-scale stand-in;
/// production-sized corpora warrant minimums in the tens of thousands.
inline std::vector<DaySlice> day_slices(const Corpus& corpus, std::size_t min_day_size = 100) {
  if (!corpus.has_timestamps) throw std::invalid_argument("temporal split requires timestamps");
  std::map<CivilDay, std::vector<int>> by_day;
  for (const Record& r : corpus.records) by_day[*r.timestamp].push_back(r.id);
  if (by_day.size() < 2) throw std::invalid_argument("temporal split requires at least 2 distinct days");
  std::vector<DaySlice> slices;
  for (auto& [day, ids] : by_day) {
    if (ids.size() >= min_day_size) slices.push_back(DaySlice{day, detail::sorted_ids(ids)});
  }
  return slices;
}

struct AdversarialOptions {
  std::size_t leaf_size = 16;
};

namespace detail {

struct FeaturizedCorpus {
  std::vector<TokenDistribution> points;
  std::vector<int> record_ids;   // parallel to points
  std::vector<int> excluded_ids;  // records with no in-vocabulary tokens
};

inline FeaturizedCorpus featurize_corpus(const Corpus& corpus, const Vocabulary& vocab,
                                         const FeatureConfig& feature_config) {
  FeaturizedCorpus out;
  out.points.reserve(corpus.size());
  for (const Record& r : corpus.records) {
    try {
      out.points.push_back(featurize(r, vocab, feature_config));
      out.record_ids.push_back(r.id);
    } catch (const std::invalid_argument&) {
      out.excluded_ids.push_back(r.id);
    }
  }
  return out;
}

inline SplitManifest adversarial_from_centroid(const Corpus& corpus, const FeaturizedCorpus& fc,
                                               const BallTree& tree, std::size_t centroid_pos,
                                               std::size_t k, const SplitterConfig& config, Rng& rng) {
  SplitManifest m;
  m.strategy = "adversarial";
  m.seed = config.seed;
  const int centroid_id = fc.record_ids[centroid_pos];
  m.test.push_back(centroid_id);
  if (k > 0) {
    // Query k+1 and drop the centroid itself; the (distance, index) order
    // makes the survivors exactly the k nearest among the other points.
    const auto neighbors = tree.knn(fc.points[centroid_pos], k + 1);
    std::size_t taken = 0;
    for (const Neighbor& nb : neighbors) {
      if (static_cast<std::size_t>(nb.index) == centroid_pos) continue;
      if (taken == k) break;
      m.test.push_back(fc.record_ids[static_cast<std::size_t>(nb.index)]);
      ++taken;
    }
  } else {
    m.stats["warnings"] = {"test_fraction yields k = 0; test set is the centroid alone"};
  }
  std::sort(m.test.begin(), m.test.end());

  std::vector<int> remainder;
  remainder.reserve(fc.record_ids.size() - m.test.size());
  for (int id : fc.record_ids) {
    if (!std::binary_search(m.test.begin(), m.test.end(), id)) remainder.push_back(id);
  }
  std::sort(remainder.begin(), remainder.end());
  carve_dev(remainder, config.dev_fraction, rng, m.train, m.dev);

  // Realized divergence between side means, over featurized members.
  std::vector<TokenDistribution> train_dists, test_dists;
  std::map<int, std::size_t> pos_of;
  for (std::size_t i = 0; i < fc.record_ids.size(); ++i) pos_of[fc.record_ids[i]] = i;
  for (int id : m.train) train_dists.push_back(fc.points[pos_of.at(id)]);
  for (int id : m.test) test_dists.push_back(fc.points[pos_of.at(id)]);
  const double divergence = wasserstein_1d(mean_distribution(train_dists), mean_distribution(test_dists));

  m.params["test_fraction"] = round_sig(config.test_fraction);
  m.params["dev_fraction"] = round_sig(config.dev_fraction);
  m.params["k"] = k;
  m.stats["centroid_id"] = centroid_id;
  m.stats["train_test_divergence"] = round_sig(divergence);
  if (!fc.excluded_ids.empty()) m.stats["excluded_ids"] = fc.excluded_ids;
  m.stats["test_fraction_realized"] = round_sig(
      fraction_of(m.test.size(), corpus.size()));
  validate_manifest(m, corpus.size());
  return m;
}

}  // namespace detail

/// Adversarial splits: one ball tree is built over all featurizable
/// records, then each repeat seeds a random test centroid and takes it plus
/// its k = round(test_fraction * n) - 1 exact nearest neighbors as the test
/// set; the rest is split into train and a seeded dev.
inline std::vector<SplitManifest> adversarial_splits(const Corpus& corpus, const Vocabulary& vocab,
                                                     const SplitterConfig& config,
                                                     const FeatureConfig& feature_config = {},
                                                     const AdversarialOptions& options = {}) {
  config.validate();
  const std::size_t n = corpus.size();
  if (n < 3) throw std::invalid_argument("adversarial_splits: corpus must have at least 3 records");
  const long k_signed = std::llround(config.test_fraction * static_cast<double>(n)) - 1;
  const std::size_t k = k_signed < 0 ? 0 : static_cast<std::size_t>(k_signed);
  if (k >= n - 1) throw std::invalid_argument("adversarial_splits: test fraction leaves no training data");

  detail::FeaturizedCorpus fc = detail::featurize_corpus(corpus, vocab, feature_config);
  if (fc.points.size() < 2 || k + 1 >= fc.points.size()) {
    throw std::invalid_argument("adversarial_splits: not enough featurizable records");
  }
  const BallTree tree(fc.points, options.leaf_size);

  std::vector<SplitManifest> manifests;
  manifests.reserve(config.repeats);
  for (std::size_t r = 0; r < config.repeats; ++r) {
    Rng rng(derive_seed(config.seed, r));
    const std::size_t centroid_pos = rng.next_index(fc.points.size());
    SplitManifest m = detail::adversarial_from_centroid(corpus, fc, tree, centroid_pos, k, config, rng);
    m.run_index = static_cast<int>(r);
    m.params["repeats"] = config.repeats;
    manifests.push_back(std::move(m));
  }
  return manifests;
}

/// Single adversarial split around an explicit centroid record. The seeded
/// strategy above is equivalent to calling this with a random centroid.
inline SplitManifest adversarial_split_at(const Corpus& corpus, const Vocabulary& vocab, int centroid_id,
                                          const SplitterConfig& config,
                                          const FeatureConfig& feature_config = {},
                                          const AdversarialOptions& options = {}) {
  config.validate();
  const std::size_t n = corpus.size();
  if (n < 3) throw std::invalid_argument("adversarial_splits: corpus must have at least 3 records");
  const long k_signed = std::llround(config.test_fraction * static_cast<double>(n)) - 1;
  const std::size_t k = k_signed < 0 ? 0 : static_cast<std::size_t>(k_signed);
  if (k >= n - 1) throw std::invalid_argument("adversarial_splits: test fraction leaves no training data");

  detail::FeaturizedCorpus fc = detail::featurize_corpus(corpus, vocab, feature_config);
  if (fc.points.size() < 2 || k + 1 >= fc.points.size()) {
    throw std::invalid_argument("adversarial_splits: not enough featurizable records");
  }
  const auto pos_it = std::find(fc.record_ids.begin(), fc.record_ids.end(), centroid_id);
  if (pos_it == fc.record_ids.end()) {
    throw std::invalid_argument("adversarial_split_at: centroid record is not featurizable");
  }
  const BallTree tree(fc.points, options.leaf_size);
  Rng rng(config.seed);
  return detail::adversarial_from_centroid(
      corpus, fc, tree, static_cast<std::size_t>(pos_it - fc.record_ids.begin()), k, config, rng);
}

}  // namespace splitgauntlet

#endif  // SPLITGAUNTLET_SPLITTERS_HPP
