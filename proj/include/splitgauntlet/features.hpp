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
// Tokenization, frequency-ranked vocabularies, and the conversion of records
// into normalized distributions over vocabulary ranks.
//
// The rank distribution is this library's point representation for all
// divergence geometry: each record becomes a discrete distribution on the
// integer line of frequency ranks (rank 0 = most frequent token), so the
// ground distance |i - j| compares tokens within similar frequency regimes.
// Divergence numbers are only meaningful relative to this representation.

#ifndef SPLITGAUNTLET_FEATURES_HPP
#define SPLITGAUNTLET_FEATURES_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "splitgauntlet/corpus.hpp"

namespace splitgauntlet {

struct FeatureConfig {
  bool lowercase = true;
  // 0 means unbounded.
  std::size_t max_vocab = 0;
  std::size_t min_count = 1;
};

namespace detail {

inline bool is_unicode_whitespace(char32_t cp) {
  switch (cp) {
    case 0x09: case 0x0A: case 0x0B: case 0x0C: case 0x0D:
    case 0x20: case 0x85: case 0xA0: case 0x1680:
    case 0x2028: case 0x2029: case 0x202F: case 0x205F: case 0x3000:
      return true;
    default:
      return cp >= 0x2000 && cp <= 0x200A;
  }
}

// Decodes one UTF-8 code point at `i`, advancing `i`. Invalid bytes are
// consumed one at a time and returned verbatim (never treated as spaces).
inline char32_t decode_utf8(std::string_view s, std::size_t& i) {
  const unsigned char b0 = static_cast<unsigned char>(s[i]);
  std::size_t len = 1;
  char32_t cp = b0;
  if (b0 >= 0xF0) { len = 4; cp = b0 & 0x07u; }
  else if (b0 >= 0xE0) { len = 3; cp = b0 & 0x0Fu; }
  else if (b0 >= 0xC0) { len = 2; cp = b0 & 0x1Fu; }
  if (len == 1 || i + len > s.size()) { ++i; return b0; }
  for (std::size_t k = 1; k < len; ++k) {
    const unsigned char bk = static_cast<unsigned char>(s[i + k]);
    if ((bk & 0xC0u) != 0x80u) { ++i; return b0; }
    cp = (cp << 6) | (bk & 0x3Fu);
  }
  i += len;
  return cp;
}

}  // namespace detail

/// Splits on Unicode whitespace; optional ASCII lowercasing. Sentence length
/// throughout the library is the size of this list.
inline std::vector<std::string> tokenize(std::string_view text, const FeatureConfig& config = {}) {
  std::vector<std::string> tokens;
  std::string current;
  std::size_t i = 0;
  while (i < text.size()) {
    const std::size_t start = i;
    const char32_t cp = detail::decode_utf8(text, i);
    if (detail::is_unicode_whitespace(cp)) {
      if (!current.empty()) tokens.push_back(std::move(current));
      current.clear();
    } else {
      for (std::size_t k = start; k < i; ++k) {
        char c = text[k];
        if (config.lowercase && c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
        current += c;
      }
    }
  }
  if (!current.empty()) tokens.push_back(std::move(current));
  return tokens;
}

inline std::size_t sentence_length(const Record& record, const FeatureConfig& config = {}) {
  return tokenize(record.text, config).size();
}

/// Frequency-ranked vocabulary. Ranks are assigned by descending corpus
/// count with lexicographic tie-break, so construction is independent of
/// record order.
struct Vocabulary {
  std::unordered_map<std::string, std::size_t> rank_of_token;
  std::vector<std::string> tokens_by_rank;
  std::vector<std::size_t> counts;  // parallel to tokens_by_rank, non-increasing

  std::size_t size() const { return tokens_by_rank.size(); }

  std::optional<std::size_t> rank(const std::string& token) const {
    auto it = rank_of_token.find(token);
    if (it == rank_of_token.end()) return std::nullopt;
    return it->second;
  }
};

inline Vocabulary build_vocabulary(const Corpus& corpus, const FeatureConfig& config = {}) {
  if (corpus.records.empty()) throw std::invalid_argument("build_vocabulary: empty corpus");
  std::map<std::string, std::size_t> counts;  // ordered: lexicographic tie-break for free
  for (const Record& r : corpus.records) {
    for (auto& token : tokenize(r.text, config)) ++counts[token];
  }
  std::vector<std::pair<std::string, std::size_t>> kept;
  kept.reserve(counts.size());
  for (auto& [token, count] : counts) {
    if (count >= config.min_count) kept.emplace_back(token, count);
  }
  if (kept.empty()) throw std::invalid_argument("build_vocabulary: no token meets min_count");
  std::stable_sort(kept.begin(), kept.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  if (config.max_vocab > 0 && kept.size() > config.max_vocab) kept.resize(config.max_vocab);

  Vocabulary vocab;
  vocab.tokens_by_rank.reserve(kept.size());
  vocab.counts.reserve(kept.size());
  for (std::size_t rank = 0; rank < kept.size(); ++rank) {
    vocab.rank_of_token.emplace(kept[rank].first, rank);
    vocab.tokens_by_rank.push_back(kept[rank].first);
    vocab.counts.push_back(kept[rank].second);
  }
  return vocab;
}

/// A normalized discrete distribution over vocabulary ranks: strictly
/// increasing support, positive weights summing to 1.
struct TokenDistribution {
  std::vector<std::int32_t> support;
  std::vector<double> weights;

  void validate(std::size_t vocab_size = std::numeric_limits<std::int32_t>::max()) const {
    if (support.size() != weights.size()) {
      throw std::invalid_argument("TokenDistribution: support/weights size mismatch");
    }
    if (support.empty()) throw std::invalid_argument("TokenDistribution: empty support");
    double total = 0.0;
    for (std::size_t i = 0; i < support.size(); ++i) {
      if (i > 0 && support[i] <= support[i - 1]) {
        throw std::invalid_argument("TokenDistribution: support must be strictly increasing");
      }
      if (support[i] < 0 || static_cast<std::size_t>(support[i]) >= vocab_size) {
        throw std::invalid_argument("TokenDistribution: support value out of vocabulary range");
      }
      if (!(weights[i] > 0.0)) throw std::invalid_argument("TokenDistribution: weights must be positive");
      total += weights[i];
    }
    if (std::abs(total - 1.0) > 1e-12) {
      throw std::invalid_argument("TokenDistribution: weights must sum to 1");
    }
  }

  friend bool operator==(const TokenDistribution& a, const TokenDistribution& b) {
    return a.support == b.support && a.weights == b.weights;
  }
};

/// Converts a record into its rank distribution: weight of each rank is
/// proportional to the count of that token among the record's in-vocabulary
/// tokens. Throws if the record has no in-vocabulary token.
inline TokenDistribution featurize(const Record& record, const Vocabulary& vocab,
                                   const FeatureConfig& config = {}) {
  std::map<std::int32_t, std::size_t> counts;
  std::size_t total = 0;
  for (auto& token : tokenize(record.text, config)) {
    if (auto rank = vocab.rank(token)) {
      ++counts[static_cast<std::int32_t>(*rank)];
      ++total;
    }
  }
  if (total == 0) {
    throw std::invalid_argument("featurize: record " + std::to_string(record.id) +
                                " has no in-vocabulary tokens");
  }
  TokenDistribution dist;
  dist.support.reserve(counts.size());
  dist.weights.reserve(counts.size());
  for (auto& [rank, count] : counts) {
    dist.support.push_back(rank);
    dist.weights.push_back(static_cast<double>(count) / static_cast<double>(total));
  }
  return dist;
}

/// Weighted mean of distributions (weights default to uniform). Used for
/// side-mean divergence; bootstrap multiplicities enter as weights.
inline TokenDistribution mean_distribution(const std::vector<TokenDistribution>& dists,
                                           const std::vector<double>& weights = {}) {
  if (dists.empty()) throw std::invalid_argument("mean_distribution: no distributions");
  if (!weights.empty() && weights.size() != dists.size()) {
    throw std::invalid_argument("mean_distribution: weights size mismatch");
  }
  std::map<std::int32_t, double> mass;
  double total = 0.0;
  for (std::size_t i = 0; i < dists.size(); ++i) {
    const double w = weights.empty() ? 1.0 : weights[i];
    if (w < 0.0) throw std::invalid_argument("mean_distribution: negative weight");
    if (w == 0.0) continue;
    total += w;
    for (std::size_t j = 0; j < dists[i].support.size(); ++j) {
      mass[dists[i].support[j]] += w * dists[i].weights[j];
    }
  }
  if (total == 0.0) throw std::invalid_argument("mean_distribution: zero total weight");
  TokenDistribution mean;
  mean.support.reserve(mass.size());
  mean.weights.reserve(mass.size());
  for (auto& [rank, m] : mass) {
    mean.support.push_back(rank);
    mean.weights.push_back(m / total);
  }
  return mean;
}

}  // namespace splitgauntlet

#endif  // SPLITGAUNTLET_FEATURES_HPP
