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
// Labeled text corpora: loading/saving (JSONL, TSV), validation, and a
// seeded synthetic generator with a planted length->label signal and a
// token-variant drift timeline.

#ifndef SPLITGAUNTLET_CORPUS_HPP
#define SPLITGAUNTLET_CORPUS_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "splitgauntlet/calendar.hpp"
#include "splitgauntlet/random.hpp"

namespace splitgauntlet {

enum class SplitTag { kTrain, kDev, kTest };

inline std::string to_string(SplitTag tag) {
  switch (tag) {
    case SplitTag::kTrain: return "train";
    case SplitTag::kDev: return "dev";
    case SplitTag::kTest: return "test";
  }
  throw std::logic_error("unreachable");
}

inline SplitTag split_tag_from_string(const std::string& s) {
  if (s == "train") return SplitTag::kTrain;
  if (s == "dev") return SplitTag::kDev;
  if (s == "test") return SplitTag::kTest;
  throw std::invalid_argument("invalid split tag: '" + s + "' (expected train/dev/test)");
}

/// One labeled example. `id` equals the record's position in its corpus.
struct Record {
  int id = 0;
  std::string text;
  std::string label;
  std::optional<CivilDay> timestamp;
  std::optional<SplitTag> split_tag;

  friend bool operator==(const Record& a, const Record& b) {
    return a.id == b.id && a.text == b.text && a.label == b.label && a.timestamp == b.timestamp &&
           a.split_tag == b.split_tag;
  }
};

/// An immutable ordered collection of records. ids are always 0..n-1 in
/// order; has_timestamps/has_split_tags are true only when every record
/// carries the field (presence is all-or-none, enforced at load).
struct Corpus {
  std::vector<Record> records;
  std::set<std::string> label_set;
  bool has_timestamps = false;
  bool has_split_tags = false;

  std::size_t size() const { return records.size(); }

  friend bool operator==(const Corpus& a, const Corpus& b) {
    return a.records == b.records && a.label_set == b.label_set && a.has_timestamps == b.has_timestamps &&
           a.has_split_tags == b.has_split_tags;
  }
};

/// Builds a Corpus from records, assigning ids by position and validating
/// the corpus invariants (non-empty text/label, all-or-none optional fields).
inline Corpus make_corpus(std::vector<Record> records) {
  if (records.empty()) throw std::invalid_argument("corpus must contain at least one record");
  Corpus corpus;
  std::size_t with_timestamp = 0;
  std::size_t with_tag = 0;
  for (std::size_t i = 0; i < records.size(); ++i) {
    Record& r = records[i];
    r.id = static_cast<int>(i);
    if (r.text.empty()) throw std::invalid_argument("row " + std::to_string(i) + ": empty text");
    if (r.label.empty()) throw std::invalid_argument("row " + std::to_string(i) + ": empty label");
    if (r.timestamp) ++with_timestamp;
    if (r.split_tag) ++with_tag;
    corpus.label_set.insert(r.label);
  }
  if (with_timestamp != 0 && with_timestamp != records.size()) {
    throw std::invalid_argument("timestamp present on some rows only");
  }
  if (with_tag != 0 && with_tag != records.size()) {
    throw std::invalid_argument("split tag present on some rows only");
  }
  corpus.has_timestamps = with_timestamp == records.size();
  corpus.has_split_tags = with_tag == records.size();
  corpus.records = std::move(records);
  return corpus;
}

/// New corpus holding the given records (by id, in the given order), with
/// ids reassigned to 0..m-1.
inline Corpus subset_corpus(const Corpus& corpus, const std::vector<int>& ids) {
  std::vector<Record> records;
  records.reserve(ids.size());
  for (int id : ids) {
    if (id < 0 || static_cast<std::size_t>(id) >= corpus.size()) {
      throw std::out_of_range("subset_corpus: id " + std::to_string(id) + " out of range");
    }
    records.push_back(corpus.records[static_cast<std::size_t>(id)]);
  }
  return make_corpus(std::move(records));
}

enum class CorpusFormat { kJsonl, kTsv };

namespace detail {

inline Record record_from_json_row(const nlohmann::json& row, std::size_t row_index) {
  auto fail = [&](const std::string& what) {
    throw std::invalid_argument("row " + std::to_string(row_index) + ": " + what);
  };
  if (!row.is_object()) fail("expected a JSON object");
  Record r;
  if (!row.contains("text")) fail("missing field 'text'");
  if (!row["text"].is_string()) fail("field 'text' must be a string");
  r.text = row["text"].get<std::string>();
  if (!row.contains("label")) fail("missing field 'label'");
  if (!row["label"].is_string()) fail("field 'label' must be a string");
  r.label = row["label"].get<std::string>();
  if (r.text.empty()) fail("empty text");
  if (r.label.empty()) fail("empty label");
  if (row.contains("timestamp")) {
    if (!row["timestamp"].is_string()) fail("field 'timestamp' must be a string");
    try {
      r.timestamp = parse_civil_day(row["timestamp"].get<std::string>());
    } catch (const std::invalid_argument& e) {
      fail(e.what());
    }
  }
  if (row.contains("split")) {
    if (!row["split"].is_string()) fail("field 'split' must be a string");
    try {
      r.split_tag = split_tag_from_string(row["split"].get<std::string>());
    } catch (const std::invalid_argument& e) {
      fail(e.what());
    }
  }
  return r;
}

inline std::vector<std::string> split_on_tab(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t tab = line.find('\t', start);
    if (tab == std::string::npos) {
      fields.push_back(line.substr(start));
      break;
    }
    fields.push_back(line.substr(start, tab - start));
    start = tab + 1;
  }
  return fields;
}

}  // namespace detail

/// Loads a corpus from a JSONL or TSV file. Rows are numbered from 0
/// (excluding the TSV header); errors name the offending row and field.
inline Corpus load_corpus(const std::string& path, CorpusFormat format) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open corpus file: " + path);
  std::vector<Record> records;
  std::string line;
  if (format == CorpusFormat::kJsonl) {
    std::size_t row = 0;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      nlohmann::json parsed;
      try {
        parsed = nlohmann::json::parse(line);
      } catch (const nlohmann::json::parse_error&) {
        throw std::invalid_argument("row " + std::to_string(row) + ": malformed JSON");
      }
      records.push_back(detail::record_from_json_row(parsed, row));
      ++row;
    }
  } else {
    if (!std::getline(in, line)) throw std::invalid_argument("no records in " + path);
    const std::vector<std::string> header = detail::split_on_tab(line);
    int text_col = -1, label_col = -1, timestamp_col = -1, split_col = -1;
    for (std::size_t c = 0; c < header.size(); ++c) {
      if (header[c] == "text") text_col = static_cast<int>(c);
      else if (header[c] == "label") label_col = static_cast<int>(c);
      else if (header[c] == "timestamp") timestamp_col = static_cast<int>(c);
      else if (header[c] == "split") split_col = static_cast<int>(c);
      else throw std::invalid_argument("unknown TSV column: '" + header[c] + "'");
    }
    if (text_col < 0) throw std::invalid_argument("TSV header missing column 'text'");
    if (label_col < 0) throw std::invalid_argument("TSV header missing column 'label'");
    std::size_t row = 0;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      const std::vector<std::string> fields = detail::split_on_tab(line);
      auto fail = [&](const std::string& what) {
        throw std::invalid_argument("row " + std::to_string(row) + ": " + what);
      };
      if (fields.size() != header.size()) fail("expected " + std::to_string(header.size()) + " columns, found " +
                                               std::to_string(fields.size()));
      Record r;
      r.text = fields[static_cast<std::size_t>(text_col)];
      r.label = fields[static_cast<std::size_t>(label_col)];
      if (r.text.empty()) fail("empty text");
      if (r.label.empty()) fail("empty label");
      // Empty optional cells mean "absent", so presence stays all-or-none.
      if (timestamp_col >= 0 && !fields[static_cast<std::size_t>(timestamp_col)].empty()) {
        try {
          r.timestamp = parse_civil_day(fields[static_cast<std::size_t>(timestamp_col)]);
        } catch (const std::invalid_argument& e) {
          fail(e.what());
        }
      }
      if (split_col >= 0 && !fields[static_cast<std::size_t>(split_col)].empty()) {
        try {
          r.split_tag = split_tag_from_string(fields[static_cast<std::size_t>(split_col)]);
        } catch (const std::invalid_argument& e) {
          fail(e.what());
        }
      }
      records.push_back(std::move(r));
      ++row;
    }
  }
  if (records.empty()) throw std::invalid_argument("no records in " + path);
  return make_corpus(std::move(records));
}

inline std::string serialize_corpus(const Corpus& corpus, CorpusFormat format) {
  std::ostringstream out;
  if (format == CorpusFormat::kJsonl) {
    for (const Record& r : corpus.records) {
      nlohmann::json row;
      row["text"] = r.text;
      row["label"] = r.label;
      if (r.timestamp) row["timestamp"] = format_civil_day(*r.timestamp);
      if (r.split_tag) row["split"] = to_string(*r.split_tag);
      out << row.dump() << '\n';
    }
  } else {
    auto check_field = [](const std::string& value) {
      if (value.find('\t') != std::string::npos || value.find('\n') != std::string::npos) {
        throw std::invalid_argument("TSV fields may not contain tabs or newlines");
      }
    };
    out << "text\tlabel";
    if (corpus.has_timestamps) out << "\ttimestamp";
    if (corpus.has_split_tags) out << "\tsplit";
    out << '\n';
    for (const Record& r : corpus.records) {
      check_field(r.text);
      check_field(r.label);
      out << r.text << '\t' << r.label;
      if (corpus.has_timestamps) out << '\t' << format_civil_day(*r.timestamp);
      if (corpus.has_split_tags) out << '\t' << to_string(*r.split_tag);
      out << '\n';
    }
  }
  return out.str();
}

inline void save_corpus(const Corpus& corpus, const std::string& path, CorpusFormat format) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write corpus file: " + path);
  out << serialize_corpus(corpus, format);
}

/// Knobs for the synthetic corpus generator.
///
/// length_label_correlation plants a label signal in sentence length: with
/// probability equal to the correlation the label is the record's
/// length-quantile bucket, otherwise it is drawn uniformly.
/// temporal_drift_rate drives old-form/new-form token substitution: the
/// probability that a label-signal token is emitted in its new form ramps
/// from 0 in the first period to the configured rate in the final period.
struct SyntheticConfig {
  std::size_t n_records = 1000;
  std::size_t vocab_size = 200;
  std::size_t n_labels = 2;
  double length_label_correlation = 0.0;
  double temporal_drift_rate = 0.0;
  std::size_t n_periods = 1;
  std::uint64_t seed = 0;
};

namespace detail {

// Generator texture constants. Lengths are 1 + Geometric(kLengthP).
//
// Every record belongs to one of kSyntheticTopics topic cells. A topic is a
// register: its background tokens come from a dedicated segment of the
// background vocabulary, and segments have geometrically graded sizes, so
// different topics' tokens sit at different corpus frequencies and therefore
// in different bands of the frequency-rank line. Rank-distribution
// neighborhoods align with topic cells as a result, and a neighborhood moved
// wholesale into a test set takes the training evidence for its
// label-and-topic-specific signal tokens with it.
//
// Signal tokens make up kSignalShare of emissions and split between a
// label-wide shared pool and per-(label, topic) pools.
//
// Form drift is per token pair: every signal token has an old form and a
// new "x" form, and each pair switches over at its own period, after which
// only the new form is emitted. Adoption thresholds are evenly spaced
// within each pool ((j + 0.5) / pool size), and a pair has switched once
// drift * (t / (P-1))^kSyntheticAdoptionPower exceeds its threshold, so
// most pairs flip close to the final period and their new forms never occur
// in earlier periods.
inline constexpr double kSyntheticLengthP = 0.08;
inline constexpr double kSyntheticSignalShare = 0.35;
inline constexpr double kSyntheticTopicShare = 0.4;  // of signal emissions
inline constexpr std::size_t kSyntheticTopics = 10;
inline constexpr double kSyntheticSegmentRatio = 1.15;
inline constexpr std::size_t kSyntheticSharedCap = 12;  // keeps the shared band compact
inline constexpr double kSyntheticAdoptionPower = 4.0;
inline constexpr std::int64_t kSyntheticEpochDays = 18262;  // 2020-01-01

inline double new_form_fraction(double drift_rate, std::size_t period, std::size_t n_periods) {
  if (n_periods < 2) return 0.0;
  const double t = static_cast<double>(period) / static_cast<double>(n_periods - 1);
  return drift_rate * std::pow(t, kSyntheticAdoptionPower);
}

inline double adoption_threshold(std::size_t index_in_pool, std::size_t pool_size) {
  return (static_cast<double>(index_in_pool) + 0.5) / static_cast<double>(pool_size);
}

// Smallest length whose geometric CDF reaches each j/L quantile; bucket(len)
// counts the boundaries at or below len.
inline std::vector<std::size_t> length_bucket_boundaries(std::size_t n_labels) {
  std::vector<std::size_t> bounds;
  bounds.reserve(n_labels - 1);
  const double log_q = std::log1p(-kSyntheticLengthP);
  for (std::size_t j = 1; j < n_labels; ++j) {
    const double target = static_cast<double>(j) / static_cast<double>(n_labels);
    const double len = std::log1p(-target) / log_q;
    bounds.push_back(static_cast<std::size_t>(std::ceil(len)));
  }
  return bounds;
}

inline std::size_t length_bucket(std::size_t length, const std::vector<std::size_t>& bounds) {
  std::size_t b = 0;
  for (std::size_t bound : bounds) {
    if (length >= bound) ++b;
  }
  return b;
}

}  // namespace detail

/// Deterministically generates a labeled, timestamped corpus from the config.
/// Records come out sorted by timestamp (ties keep draw order), so contiguous
/// prefix splits follow the corpus timeline.
inline Corpus generate_synthetic(const SyntheticConfig& config) {
  if (config.n_records == 0) throw std::invalid_argument("n_records must be positive");
  if (config.n_labels < 2) throw std::invalid_argument("n_labels must be at least 2");
  if (config.vocab_size < 10 * config.n_labels) {
    throw std::invalid_argument("vocab_size must be at least 10 * n_labels");
  }
  if (config.n_periods == 0) throw std::invalid_argument("n_periods must be positive");
  if (config.length_label_correlation < 0.0 || config.length_label_correlation > 1.0) {
    throw std::invalid_argument("length_label_correlation must be in [0, 1]");
  }
  if (config.temporal_drift_rate < 0.0 || config.temporal_drift_rate > 1.0) {
    throw std::invalid_argument("temporal_drift_rate must be in [0, 1]");
  }

  const std::size_t n_background = config.vocab_size / 2;
  const std::size_t n_signal_per_label = (config.vocab_size - n_background) / config.n_labels;

  // Background segments, one per topic, geometrically graded in size. Each
  // topic spreads roughly the same emission volume over its own segment, so
  // smaller segments mean more frequent tokens.
  std::vector<std::size_t> segment_begin(detail::kSyntheticTopics + 1, 0);
  {
    const double ratio = detail::kSyntheticSegmentRatio;
    const double first = static_cast<double>(n_background) * (ratio - 1.0) /
                         (std::pow(ratio, static_cast<double>(detail::kSyntheticTopics)) - 1.0);
    std::size_t used = 0;
    for (std::size_t t = 0; t < detail::kSyntheticTopics; ++t) {
      std::size_t size = static_cast<std::size_t>(std::llround(first * std::pow(ratio, static_cast<double>(t))));
      size = std::max<std::size_t>(1, size);
      if (t + 1 == detail::kSyntheticTopics || used + size > n_background) {
        size = std::max<std::size_t>(1, n_background - std::min(n_background - 1, used));
      }
      segment_begin[t] = std::min(used, n_background - 1);
      used = std::min(n_background, segment_begin[t] + size);
      segment_begin[t + 1] = used;
    }
    segment_begin[detail::kSyntheticTopics] = n_background;
  }

  // Per-(label, topic) signal pools sized so their per-token frequency
  // matches the topic's background tokens; that keeps all of a record's
  // mass inside one frequency band of the rank line.
  std::vector<std::size_t> topic_pool(detail::kSyntheticTopics);
  std::size_t topic_budget = 0;
  {
    const double align = detail::kSyntheticSignalShare * detail::kSyntheticTopicShare /
                         ((1.0 - detail::kSyntheticSignalShare) * static_cast<double>(config.n_labels));
    for (std::size_t t = 0; t < detail::kSyntheticTopics; ++t) {
      const double seg = static_cast<double>(segment_begin[t + 1] - segment_begin[t]);
      topic_pool[t] = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(seg * align)));
      topic_budget += topic_pool[t];
    }
  }
  const std::size_t n_shared = std::clamp<std::size_t>(
      n_signal_per_label > topic_budget ? n_signal_per_label - topic_budget : 1, 1,
      detail::kSyntheticSharedCap);

  const std::vector<std::size_t> bounds = detail::length_bucket_boundaries(config.n_labels);

  Rng rng(config.seed);
  std::vector<Record> records;
  records.reserve(config.n_records);
  for (std::size_t i = 0; i < config.n_records; ++i) {
    const std::size_t length = 1 + static_cast<std::size_t>(rng.next_geometric(detail::kSyntheticLengthP));
    std::size_t label;
    if (rng.next_bernoulli(config.length_label_correlation)) {
      label = detail::length_bucket(length, bounds);
    } else {
      label = rng.next_index(config.n_labels);
    }
    const std::size_t topic = rng.next_index(detail::kSyntheticTopics);
    const std::size_t period = rng.next_index(config.n_periods);
    const double adopted =
        detail::new_form_fraction(config.temporal_drift_rate, period, config.n_periods);

    std::string text;
    for (std::size_t pos = 0; pos < length; ++pos) {
      if (pos > 0) text += ' ';
      if (rng.next_bernoulli(detail::kSyntheticSignalShare)) {
        std::string token;
        double threshold;
        if (rng.next_bernoulli(detail::kSyntheticTopicShare)) {
          const std::size_t j = rng.next_index(topic_pool[topic]);
          token = 't' + std::to_string(label) + '_' + std::to_string(topic) + '_' + std::to_string(j);
          threshold = detail::adoption_threshold(j, topic_pool[topic]);
        } else {
          const std::size_t j = rng.next_index(n_shared);
          token = 's' + std::to_string(label) + '_' + std::to_string(j);
          threshold = detail::adoption_threshold(j, n_shared);
        }
        if (adopted > threshold) token += 'x';  // pair has switched forms
        text += token;
      } else {
        const std::size_t lo = segment_begin[topic];
        const std::size_t hi = std::max(lo + 1, segment_begin[topic + 1]);
        text += 'w' + std::to_string(lo + rng.next_index(hi - lo));
      }
    }

    Record r;
    r.text = std::move(text);
    r.label = 'L' + std::to_string(label);
    r.timestamp = CivilDay{detail::kSyntheticEpochDays + static_cast<std::int64_t>(period)};
    records.push_back(std::move(r));
  }
  std::stable_sort(records.begin(), records.end(),
                   [](const Record& a, const Record& b) { return *a.timestamp < *b.timestamp; });
  return make_corpus(std::move(records));
}

}  // namespace splitgauntlet

#endif  // SPLITGAUNTLET_CORPUS_HPP
