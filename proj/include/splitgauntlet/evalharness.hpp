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
// Evaluation harness: a from-scratch L2-regularized multinomial logistic
// regression trained by deterministic full-batch gradient descent, the
// multinomial random baseline, error-reduction and MSE metrics, and
// significance tests (McNemar, paired bootstrap, Pearson drift correlation).
//
// The model consumes sparse feature rows. When the harness evaluates split
// strategies it featurizes records as normalized rank distributions, so
// absolute sentence length never enters the model and shifts in token usage
// are exactly what the evaluation measures.

#ifndef SPLITGAUNTLET_EVALHARNESS_HPP
#define SPLITGAUNTLET_EVALHARNESS_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "splitgauntlet/corpus.hpp"
#include "splitgauntlet/features.hpp"
#include "splitgauntlet/parallel.hpp"
#include "splitgauntlet/random.hpp"
#include "splitgauntlet/splitters.hpp"

namespace splitgauntlet {

// ---------------------------------------------------------------------------
// Linear model
// ---------------------------------------------------------------------------

/// Sparse feature row: (feature index, value) pairs, indices strictly
/// increasing.
using SparseRow = std::vector<std::pair<std::int32_t, double>>;

inline SparseRow sparse_row_from(const TokenDistribution& dist) {
  SparseRow row;
  row.reserve(dist.support.size());
  for (std::size_t i = 0; i < dist.support.size(); ++i) {
    row.emplace_back(dist.support[i], dist.weights[i]);
  }
  return row;
}

struct ModelConfig {
  double l2_strength = 0.01;
  std::size_t max_iters = 500;
  double learning_rate = 0.1;
  double tolerance = 1e-6;  // gradient infinity-norm stop
  std::uint64_t seed = 0;   // unused by the deterministic full-batch trainer

  void validate() const {
    if (l2_strength < 0.0) throw std::invalid_argument("l2_strength must be non-negative");
    if (max_iters == 0) throw std::invalid_argument("max_iters must be positive");
    if (!(learning_rate > 0.0)) throw std::invalid_argument("learning_rate must be positive");
    if (!(tolerance > 0.0)) throw std::invalid_argument("tolerance must be positive");
  }
};

struct LinearModel {
  std::vector<double> weights;  // n_labels x n_features, row-major
  std::vector<double> bias;     // n_labels
  std::vector<std::string> label_order;
  std::size_t n_features = 0;
  bool converged = false;

  std::size_t n_labels() const { return label_order.size(); }
  double weight(std::size_t label, std::size_t feature) const {
    return weights[label * n_features + feature];
  }
};

namespace detail {

inline std::vector<double> softmax(std::vector<double> logits) {
  const double max_logit = *std::max_element(logits.begin(), logits.end());
  double total = 0.0;
  for (double& z : logits) {
    z = std::exp(z - max_logit);
    total += z;
  }
  for (double& z : logits) z /= total;
  return logits;
}

inline std::vector<double> row_logits(const LinearModel& model, const SparseRow& row) {
  std::vector<double> logits(model.bias);
  for (const auto& [j, v] : row) {
    if (j < 0 || static_cast<std::size_t>(j) >= model.n_features) {
      throw std::invalid_argument("feature index out of range for model dimensionality");
    }
    for (std::size_t c = 0; c < model.n_labels(); ++c) {
      logits[c] += model.weights[c * model.n_features + static_cast<std::size_t>(j)] * v;
    }
  }
  return logits;
}

// Total cross-entropy plus (alpha/2)*||W||^2; bias is not penalized.
struct Objective {
  const std::vector<SparseRow>& rows;
  const std::vector<std::size_t>& labels;
  std::size_t n_features;
  std::size_t n_labels;
  double alpha;

  double loss(const std::vector<double>& weights, const std::vector<double>& bias) const {
    double total = 0.0;
    std::vector<double> logits(n_labels);
    for (std::size_t i = 0; i < rows.size(); ++i) {
      logits.assign(bias.begin(), bias.end());
      for (const auto& [j, v] : rows[i]) {
        for (std::size_t c = 0; c < n_labels; ++c) {
          logits[c] += weights[c * n_features + static_cast<std::size_t>(j)] * v;
        }
      }
      const double max_logit = *std::max_element(logits.begin(), logits.end());
      double z = 0.0;
      for (double l : logits) z += std::exp(l - max_logit);
      total += -(logits[labels[i]] - max_logit - std::log(z));
    }
    double penalty = 0.0;
    for (double w : weights) penalty += w * w;
    return total + 0.5 * alpha * penalty;
  }

  void gradient(const std::vector<double>& weights, const std::vector<double>& bias,
                std::vector<double>& grad_w, std::vector<double>& grad_b) const {
    grad_w.assign(weights.size(), 0.0);
    grad_b.assign(bias.size(), 0.0);
    std::vector<double> logits(n_labels);
    for (std::size_t i = 0; i < rows.size(); ++i) {
      logits.assign(bias.begin(), bias.end());
      for (const auto& [j, v] : rows[i]) {
        for (std::size_t c = 0; c < n_labels; ++c) {
          logits[c] += weights[c * n_features + static_cast<std::size_t>(j)] * v;
        }
      }
      std::vector<double> probs = softmax(std::move(logits));
      probs[labels[i]] -= 1.0;
      for (std::size_t c = 0; c < n_labels; ++c) {
        grad_b[c] += probs[c];
        for (const auto& [j, v] : rows[i]) {
          grad_w[c * n_features + static_cast<std::size_t>(j)] += probs[c] * v;
        }
      }
      logits = std::move(probs);  // reuse storage
    }
    for (std::size_t k = 0; k < grad_w.size(); ++k) grad_w[k] += alpha * weights[k];
  }
};

inline std::vector<std::string> distinct_sorted_labels(const std::vector<std::string>& labels) {
  std::set<std::string> s(labels.begin(), labels.end());
  return {s.begin(), s.end()};
}

}  // namespace detail

/// Trains multinomial logistic regression by full-batch gradient descent
/// from zero initialization. Steps that would increase the objective are
/// halved until they do not, so the loss trace is non-increasing. When
/// dev rows are supplied, dev accuracy is checked periodically and the
/// best-scoring parameters are restored on plateau.
inline LinearModel train_linear_model(const std::vector<SparseRow>& rows,
                                      const std::vector<std::string>& labels, const ModelConfig& config,
                                      const std::vector<SparseRow>* dev_rows = nullptr,
                                      const std::vector<std::string>* dev_labels = nullptr,
                                      std::size_t n_features_hint = 0) {
  config.validate();
  if (rows.empty()) throw std::invalid_argument("train_linear_model: no training rows");
  if (rows.size() != labels.size()) {
    throw std::invalid_argument("train_linear_model: rows/labels size mismatch");
  }

  LinearModel model;
  model.label_order = detail::distinct_sorted_labels(labels);
  if (model.label_order.size() < 2) {
    throw std::invalid_argument("train_linear_model: need at least 2 distinct labels");
  }
  std::int32_t max_index = -1;
  for (const SparseRow& row : rows) {
    for (const auto& [j, v] : row) {
      if (!std::isfinite(v)) throw std::invalid_argument("train_linear_model: non-finite feature value");
      max_index = std::max(max_index, j);
    }
  }
  model.n_features = std::max(static_cast<std::size_t>(max_index + 1), n_features_hint);

  std::map<std::string, std::size_t> label_index;
  for (std::size_t c = 0; c < model.label_order.size(); ++c) label_index[model.label_order[c]] = c;
  std::vector<std::size_t> y(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) y[i] = label_index.at(labels[i]);

  std::vector<std::size_t> dev_y;
  if (dev_rows && dev_labels) {
    for (const std::string& label : *dev_labels) {
      auto it = label_index.find(label);
      // Dev labels unseen in training can never be predicted; they still
      // count against dev accuracy.
      dev_y.push_back(it == label_index.end() ? model.label_order.size() : it->second);
    }
  }

  const detail::Objective objective{rows, y, model.n_features, model.label_order.size(),
                                    config.l2_strength};
  model.weights.assign(model.label_order.size() * model.n_features, 0.0);
  model.bias.assign(model.label_order.size(), 0.0);

  auto dev_accuracy = [&]() {
    std::size_t correct = 0;
    for (std::size_t i = 0; i < dev_rows->size(); ++i) {
      const auto logits = detail::row_logits(model, (*dev_rows)[i]);
      const std::size_t argmax = static_cast<std::size_t>(
          std::max_element(logits.begin(), logits.end()) - logits.begin());
      if (dev_y[i] == argmax) ++correct;
    }
    return static_cast<double>(correct) / static_cast<double>(dev_rows->size());
  };

  const bool early_stop = dev_rows && dev_labels && !dev_rows->empty();
  constexpr std::size_t kCheckEvery = 20;
  constexpr std::size_t kPatience = 5;
  double best_dev = -1.0;
  std::size_t checks_since_best = 0;
  std::vector<double> best_weights, best_bias;

  double step = config.learning_rate;
  double current_loss = objective.loss(model.weights, model.bias);
  std::vector<double> grad_w, grad_b, trial_w, trial_b;
  for (std::size_t iter = 0; iter < config.max_iters; ++iter) {
    objective.gradient(model.weights, model.bias, grad_w, grad_b);
    double grad_norm = 0.0;
    for (double g : grad_w) grad_norm = std::max(grad_norm, std::abs(g));
    for (double g : grad_b) grad_norm = std::max(grad_norm, std::abs(g));
    if (grad_norm <= config.tolerance) {
      model.converged = true;
      break;
    }
    // Backtracking: halve the step until the objective does not increase;
    // grow it again after clean steps so convergence speed does not hinge
    // on the feature scale.
    double trial_loss;
    bool halved = false;
    while (true) {
      trial_w = model.weights;
      trial_b = model.bias;
      for (std::size_t k = 0; k < trial_w.size(); ++k) trial_w[k] -= step * grad_w[k];
      for (std::size_t k = 0; k < trial_b.size(); ++k) trial_b[k] -= step * grad_b[k];
      trial_loss = objective.loss(trial_w, trial_b);
      if (trial_loss <= current_loss || step <= 1e-12) break;
      step *= 0.5;
      halved = true;
    }
    if (trial_loss > current_loss) break;  // step underflow: no descent direction left
    model.weights.swap(trial_w);
    model.bias.swap(trial_b);
    current_loss = trial_loss;
    if (!halved && step < 1e6) step *= 2.0;

    if (early_stop && (iter + 1) % kCheckEvery == 0) {
      const double acc = dev_accuracy();
      if (acc > best_dev + 1e-12) {
        best_dev = acc;
        best_weights = model.weights;
        best_bias = model.bias;
        checks_since_best = 0;
      } else if (++checks_since_best >= kPatience) {
        model.weights = best_weights;
        model.bias = best_bias;
        model.converged = true;
        return model;
      }
    }
  }
  if (early_stop && best_dev >= 0.0 && dev_accuracy() < best_dev) {
    model.weights = best_weights;
    model.bias = best_bias;
  }
  return model;
}

struct Prediction {
  std::size_t label_index = 0;
  std::vector<double> probabilities;
};

/// Softmax probabilities and argmax label; probability ties go to the
/// earlier label_order position.
inline Prediction predict(const LinearModel& model, const SparseRow& row) {
  Prediction p;
  p.probabilities = detail::softmax(detail::row_logits(model, row));
  p.label_index = static_cast<std::size_t>(
      std::max_element(p.probabilities.begin(), p.probabilities.end()) - p.probabilities.begin());
  return p;
}

inline const std::string& predict_label(const LinearModel& model, const SparseRow& row) {
  return model.label_order[predict(model, row).label_index];
}

// ---------------------------------------------------------------------------
// Scores and baselines
// ---------------------------------------------------------------------------

/// Expected accuracy of guessing labels from the training label
/// distribution q against the test label distribution t: sum_c q_c * t_c.
inline double multinomial_baseline(const std::vector<std::string>& train_labels,
                                   const std::vector<std::string>& test_labels) {
  if (train_labels.empty() || test_labels.empty()) {
    throw std::invalid_argument("multinomial_baseline: label lists must be non-empty");
  }
  std::map<std::string, double> q, t;
  for (const auto& label : train_labels) q[label] += 1.0;
  for (const auto& label : test_labels) t[label] += 1.0;
  double p_b = 0.0;
  for (auto& [label, count] : q) {
    auto it = t.find(label);
    if (it == t.end()) continue;
    p_b += (count / static_cast<double>(train_labels.size())) *
           (it->second / static_cast<double>(test_labels.size()));
  }
  return p_b;
}

/// r = (p_s - p_b) / (1 - p_b). Negative when the system underperforms the
/// baseline.
inline double error_reduction(double p_s, double p_b) {
  if (p_b >= 1.0) throw std::invalid_argument("error_reduction: baseline score must be below 1");
  return (p_s - p_b) / (1.0 - p_b);
}

inline double mse_of_estimates(const std::vector<std::pair<double, double>>& pairs) {
  if (pairs.empty()) throw std::invalid_argument("mse_of_estimates: empty list");
  double total = 0.0;
  for (auto& [estimate, reference] : pairs) {
    total += (estimate - reference) * (estimate - reference);
  }
  return total / static_cast<double>(pairs.size());
}

inline double rmse(const std::vector<double>& predictions, const std::vector<double>& targets) {
  if (predictions.size() != targets.size() || predictions.empty()) {
    throw std::invalid_argument("rmse: vectors must be equal-length and non-empty");
  }
  double total = 0.0;
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    total += (predictions[i] - targets[i]) * (predictions[i] - targets[i]);
  }
  return std::sqrt(total / static_cast<double>(predictions.size()));
}

/// Error reduction for real-valued tasks, defined on 1 - normalized RMSE:
/// the baseline predicts the training mean, so its own reduction is 0 and a
/// perfect system scores 1. This mirrors the classification convention.
inline double regression_error_reduction(double rmse_system, double rmse_baseline) {
  if (!(rmse_baseline > 0.0)) {
    throw std::invalid_argument("regression_error_reduction: baseline RMSE must be positive");
  }
  return 1.0 - rmse_system / rmse_baseline;
}

// ---------------------------------------------------------------------------
// Significance tests
// ---------------------------------------------------------------------------

struct SystemComparison {
  double delta = 0.0;  // score_1 - score_2 (McNemar: discordant-count difference)
  std::string test_name;
  double statistic = 0.0;
  double p_value = 1.0;
};

namespace detail {

// Regularized incomplete beta I_x(a, b) by Lentz's continued fraction.
inline double ibeta_continued_fraction(double a, double b, double x) {
  constexpr double kTiny = 1e-300;
  constexpr double kEps = 1e-14;
  double qab = a + b, qap = a + 1.0, qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::abs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= 300; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < kEps) break;
  }
  return h;
}

inline double ibeta_regularized(double a, double b, double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double ln_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                          a * std::log(x) + b * std::log1p(-x);
  const double front = std::exp(ln_front);
  if (x < (a + 1.0) / (a + b + 2.0)) {
    return front * ibeta_continued_fraction(a, b, x) / a;
  }
  return 1.0 - front * ibeta_continued_fraction(b, a, 1.0 - x) / b;
}

inline double chi_square_1df_sf(double x) { return std::erfc(std::sqrt(x / 2.0)); }

inline double student_t_two_sided_p(double t, double dof) {
  return ibeta_regularized(dof / 2.0, 0.5, dof / (dof + t * t));
}

}  // namespace detail

/// McNemar's test on discordant counts b (system-1-only correct) and c
/// (system-2-only correct). Uses the continuity-corrected chi-square for
/// b + c >= 25 and the exact two-sided binomial below that.
inline SystemComparison mcnemar_test(std::size_t b, std::size_t c) {
  if (b + c == 0) throw std::invalid_argument("mcnemar_test: no discordant pairs");
  SystemComparison result;
  result.test_name = "mcnemar";
  result.delta = static_cast<double>(b) - static_cast<double>(c);
  const std::size_t n = b + c;
  if (n >= 25) {
    const double diff = std::abs(result.delta) - 1.0;
    result.statistic = diff * diff / static_cast<double>(n);
    result.p_value = detail::chi_square_1df_sf(result.statistic);
  } else {
    const std::size_t m = std::min(b, c);
    result.statistic = static_cast<double>(m);
    long double tail = 0.0L;
    long double coeff = 1.0L;  // C(n, 0)
    for (std::size_t i = 0; i <= m; ++i) {
      tail += coeff;
      coeff = coeff * static_cast<long double>(n - i) / static_cast<long double>(i + 1);
    }
    tail *= std::pow(0.5L, static_cast<long double>(n));
    result.p_value = std::min(1.0, 2.0 * static_cast<double>(tail));
  }
  return result;
}

/// Paired bootstrap over per-example scores (0/1 correctness or losses).
/// Two-sided p from the fraction of resamples won by each side; when every
/// resample ties (identical score vectors) the p-value is 1 by convention.
inline SystemComparison paired_bootstrap_test(const std::vector<double>& scores1,
                                              const std::vector<double>& scores2,
                                              std::size_t resamples = 1000, std::uint64_t seed = 0) {
  if (scores1.size() != scores2.size()) {
    throw std::invalid_argument("paired_bootstrap_test: score vectors differ in length");
  }
  if (scores1.size() < 2) throw std::invalid_argument("paired_bootstrap_test: need at least 2 examples");
  if (resamples == 0) throw std::invalid_argument("paired_bootstrap_test: resamples must be positive");
  const std::size_t n = scores1.size();
  SystemComparison result;
  result.test_name = "paired_bootstrap";
  double mean1 = 0.0, mean2 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mean1 += scores1[i];
    mean2 += scores2[i];
  }
  result.delta = (mean1 - mean2) / static_cast<double>(n);

  Rng rng(seed);
  std::size_t wins1 = 0, wins2 = 0;
  for (std::size_t rep = 0; rep < resamples; ++rep) {
    double sum1 = 0.0, sum2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t pick = rng.next_index(n);
      sum1 += scores1[pick];
      sum2 += scores2[pick];
    }
    if (sum1 > sum2) ++wins1;
    else if (sum2 > sum1) ++wins2;
  }
  result.statistic = static_cast<double>(wins1) / static_cast<double>(resamples);
  if (wins1 == 0 && wins2 == 0) {
    result.p_value = 1.0;  // all resamples tied
  } else {
    const double f1 = static_cast<double>(wins1) / static_cast<double>(resamples);
    const double f2 = static_cast<double>(wins2) / static_cast<double>(resamples);
    result.p_value = std::clamp(2.0 * std::min(f1, f2), 0.0, 1.0);
  }
  return result;
}

struct PearsonResult {
  double r = 0.0;
  double t_statistic = 0.0;
  double p_value = 1.0;
};

/// Pearson correlation between temporal gaps and scores, with a two-sided
/// Student-t p-value on n-2 degrees of freedom.
inline PearsonResult drift_correlation(const std::vector<double>& gaps, const std::vector<double>& scores) {
  if (gaps.size() != scores.size()) throw std::invalid_argument("drift_correlation: length mismatch");
  const std::size_t n = gaps.size();
  if (n < 3) throw std::invalid_argument("drift_correlation: need at least 3 points");
  const double mean_g = std::accumulate(gaps.begin(), gaps.end(), 0.0) / static_cast<double>(n);
  const double mean_s = std::accumulate(scores.begin(), scores.end(), 0.0) / static_cast<double>(n);
  double sgg = 0.0, sss = 0.0, sgs = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dg = gaps[i] - mean_g;
    const double ds = scores[i] - mean_s;
    sgg += dg * dg;
    sss += ds * ds;
    sgs += dg * ds;
  }
  if (sgg == 0.0) throw std::invalid_argument("drift_correlation: gaps have zero variance");
  if (sss == 0.0) throw std::invalid_argument("drift_correlation: scores have zero variance");
  PearsonResult result;
  result.r = std::clamp(sgs / std::sqrt(sgg * sss), -1.0, 1.0);
  const double dof = static_cast<double>(n - 2);
  if (std::abs(result.r) >= 1.0) {
    result.t_statistic = std::numeric_limits<double>::infinity();
    result.p_value = 0.0;
  } else {
    result.t_statistic = result.r * std::sqrt(dof / (1.0 - result.r * result.r));
    result.p_value = detail::student_t_two_sided_p(result.t_statistic, dof);
  }
  return result;
}

// ---------------------------------------------------------------------------
// Strategy evaluation
// ---------------------------------------------------------------------------

struct EvaluationReport {
  std::string strategy;
  double p_s = 0.0;  // mean system score over runs
  double p_b = 0.0;  // mean baseline score over runs
  double error_reduction_mean = 0.0;
  std::vector<double> per_run;  // per-manifest error reductions
  std::string metric = "accuracy";
  std::vector<std::string> warnings;
};

struct EvaluationSuite {
  std::vector<EvaluationReport> strategies;
  EvaluationReport new_sample;  // reference: random-split training scored on the new sample
  std::vector<std::pair<std::string, double>> mse_vs_new_sample;  // per strategy, input order
};

struct EvaluateOptions {
  ModelConfig model;
  FeatureConfig features;
  double dev_fraction = 0.10;   // dev carve of the reference split
  double test_fraction = 0.10;  // sizing of the reference split
  std::uint64_t seed = 0;       // reference-split seed
};

namespace detail {

struct PreparedSplit {
  std::vector<SparseRow> train_rows, dev_rows;
  std::vector<std::string> train_labels, dev_labels;
  Vocabulary vocab;
  std::size_t skipped_train = 0;
};

inline std::vector<int> expand_with_counts(const std::vector<int>& ids, const std::vector<int>& counts) {
  if (counts.empty()) return ids;
  std::vector<int> out;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    for (int k = 0; k < counts[i]; ++k) out.push_back(ids[i]);
  }
  return out;
}

// Builds the training-side view of a manifest: vocabulary from the training
// multiset only, then sparse rows for train and dev. Records left with no
// in-vocabulary tokens are dropped from training and counted.
inline PreparedSplit prepare_split(const Corpus& corpus, const SplitManifest& manifest,
                                   const FeatureConfig& features) {
  PreparedSplit prep;
  const std::vector<int> train_ids =
      expand_with_counts(manifest.train, manifest.with_multiplicity ? manifest.train_counts
                                                                    : std::vector<int>{});
  const std::vector<int> dev_ids =
      expand_with_counts(manifest.dev, manifest.with_multiplicity ? manifest.dev_counts
                                                                  : std::vector<int>{});
  prep.vocab = build_vocabulary(subset_corpus(corpus, train_ids), features);
  for (int id : train_ids) {
    const Record& r = corpus.records[static_cast<std::size_t>(id)];
    try {
      prep.train_rows.push_back(sparse_row_from(featurize(r, prep.vocab, features)));
      prep.train_labels.push_back(r.label);
    } catch (const std::invalid_argument&) {
      ++prep.skipped_train;
    }
  }
  for (int id : dev_ids) {
    const Record& r = corpus.records[static_cast<std::size_t>(id)];
    try {
      prep.dev_rows.push_back(sparse_row_from(featurize(r, prep.vocab, features)));
    } catch (const std::invalid_argument&) {
      prep.dev_rows.push_back({});  // all-OOV dev record scores as the prior argmax
    }
    prep.dev_labels.push_back(r.label);
  }
  return prep;
}

struct ScoredSet {
  double accuracy = 0.0;
  std::vector<std::string> labels;
  std::vector<std::string> warnings;
};

inline ScoredSet score_records(const LinearModel& model, const Vocabulary& vocab,
                               const FeatureConfig& features, const Corpus& corpus,
                               const std::vector<int>& ids) {
  ScoredSet scored;
  std::set<std::string> unseen;
  std::size_t correct = 0, oov = 0;
  std::set<std::string> train_label_set(model.label_order.begin(), model.label_order.end());
  for (int id : ids) {
    const Record& r = corpus.records[static_cast<std::size_t>(id)];
    scored.labels.push_back(r.label);
    SparseRow row;
    try {
      row = sparse_row_from(featurize(r, vocab, features));
    } catch (const std::invalid_argument&) {
      ++oov;  // empty row: the model falls back to its bias argmax
    }
    if (!train_label_set.count(r.label)) unseen.insert(r.label);
    if (predict_label(model, row) == r.label) ++correct;
  }
  scored.accuracy = static_cast<double>(correct) / static_cast<double>(ids.size());
  for (const auto& label : unseen) {
    scored.warnings.push_back("label '" + label + "' appears in test but never in training; scored as wrong");
  }
  if (oov > 0) {
    scored.warnings.push_back(std::to_string(oov) + " test record(s) had no in-vocabulary tokens");
  }
  return scored;
}

}  // namespace detail

struct ManifestEvaluation {
  double p_s = 0.0;
  double p_b = 0.0;
  double error_reduction_value = 0.0;
  std::vector<std::string> warnings;
};

/// Trains on a manifest's train side (dev drives early stopping only) and
/// scores its test side.
inline ManifestEvaluation evaluate_manifest(const Corpus& corpus, const SplitManifest& manifest,
                                            const EvaluateOptions& options) {
  validate_manifest(manifest, corpus.size());
  detail::PreparedSplit prep = detail::prepare_split(corpus, manifest, options.features);
  const LinearModel model =
      train_linear_model(prep.train_rows, prep.train_labels, options.model,
                         prep.dev_rows.empty() ? nullptr : &prep.dev_rows,
                         prep.dev_rows.empty() ? nullptr : &prep.dev_labels, prep.vocab.size());
  detail::ScoredSet scored =
      detail::score_records(model, prep.vocab, options.features, corpus, manifest.test);
  ManifestEvaluation eval;
  eval.p_s = scored.accuracy;
  eval.p_b = multinomial_baseline(prep.train_labels, scored.labels);
  eval.error_reduction_value = error_reduction(eval.p_s, eval.p_b);
  eval.warnings = std::move(scored.warnings);
  if (prep.skipped_train > 0) {
    eval.warnings.push_back(std::to_string(prep.skipped_train) +
                            " training record(s) had no in-vocabulary tokens and were dropped");
  }
  return eval;
}

/// Trains on a seeded random split of `corpus` and scores every record of
/// `new_sample`: the reference against which split-based estimates are
/// judged.
inline ManifestEvaluation evaluate_on_new_sample(const Corpus& corpus, const Corpus& new_sample,
                                                 const EvaluateOptions& options) {
  SplitterConfig ref;
  ref.test_fraction = options.test_fraction;
  ref.dev_fraction = options.dev_fraction;
  ref.seed = options.seed;
  std::size_t folds = static_cast<std::size_t>(std::llround(1.0 / options.test_fraction));
  folds = std::clamp<std::size_t>(folds, 2, corpus.size());
  const SplitManifest reference = random_cv_splits(corpus, folds, ref).front();

  detail::PreparedSplit prep = detail::prepare_split(corpus, reference, options.features);
  const LinearModel model =
      train_linear_model(prep.train_rows, prep.train_labels, options.model,
                         prep.dev_rows.empty() ? nullptr : &prep.dev_rows,
                         prep.dev_rows.empty() ? nullptr : &prep.dev_labels, prep.vocab.size());
  std::vector<int> all_ids(new_sample.size());
  for (std::size_t i = 0; i < all_ids.size(); ++i) all_ids[i] = static_cast<int>(i);
  detail::ScoredSet scored =
      detail::score_records(model, prep.vocab, options.features, new_sample, all_ids);
  ManifestEvaluation eval;
  eval.p_s = scored.accuracy;
  eval.p_b = multinomial_baseline(prep.train_labels, scored.labels);
  eval.error_reduction_value = error_reduction(eval.p_s, eval.p_b);
  eval.warnings = std::move(scored.warnings);
  return eval;
}

/// Evaluates each strategy's manifests and the new-sample reference, then
/// reports per-strategy MSE of the per-run error reductions against the
/// reference error reduction.
inline EvaluationSuite evaluate_strategies(
    const Corpus& corpus,
    const std::vector<std::pair<std::string, std::vector<SplitManifest>>>& strategy_runs,
    const Corpus& new_sample, const EvaluateOptions& options) {
  for (const auto& new_label : new_sample.label_set) {
    if (!corpus.label_set.count(new_label)) {
      throw std::invalid_argument("new sample contains label '" + new_label +
                                  "' absent from the corpus label set");
    }
  }
  EvaluationSuite suite;
  const ManifestEvaluation reference = evaluate_on_new_sample(corpus, new_sample, options);
  suite.new_sample.strategy = "new_sample";
  suite.new_sample.p_s = reference.p_s;
  suite.new_sample.p_b = reference.p_b;
  suite.new_sample.error_reduction_mean = reference.error_reduction_value;
  suite.new_sample.per_run = {reference.error_reduction_value};
  suite.new_sample.warnings = reference.warnings;

  // Evaluate every (strategy, manifest) pair in parallel, each writing only
  // its own slot, then merge in input order.
  std::vector<const SplitManifest*> flat;
  for (const auto& [name, manifests] : strategy_runs) {
    if (manifests.empty()) throw std::invalid_argument("strategy '" + name + "' has no manifests");
    for (const SplitManifest& manifest : manifests) flat.push_back(&manifest);
  }
  std::vector<ManifestEvaluation> evals(flat.size());
  parallel_for_index(flat.size(),
                     [&](std::size_t i) { evals[i] = evaluate_manifest(corpus, *flat[i], options); });

  std::size_t cursor = 0;
  for (const auto& [name, manifests] : strategy_runs) {
    EvaluationReport report;
    report.strategy = name;
    std::vector<std::pair<double, double>> pairs;
    for (std::size_t j = 0; j < manifests.size(); ++j) {
      const ManifestEvaluation& eval = evals[cursor++];
      report.per_run.push_back(eval.error_reduction_value);
      report.p_s += eval.p_s;
      report.p_b += eval.p_b;
      for (const auto& w : eval.warnings) report.warnings.push_back(w);
      pairs.emplace_back(eval.error_reduction_value, reference.error_reduction_value);
    }
    const double runs = static_cast<double>(manifests.size());
    report.p_s /= runs;
    report.p_b /= runs;
    report.error_reduction_mean =
        std::accumulate(report.per_run.begin(), report.per_run.end(), 0.0) / runs;
    suite.mse_vs_new_sample.emplace_back(name, mse_of_estimates(pairs));
    suite.strategies.push_back(std::move(report));
  }
  return suite;
}

/// Plain-text table: strategies as columns in the canonical order
/// (standard, random, biased, adversarial, then the new-sample reference),
/// one row of error reductions and one row of MSE against the reference.
inline std::string render_evaluation_table(const EvaluationSuite& suite) {
  const std::vector<std::string> canonical = {"standard",     "random_cv",      "bootstrap",
                                              "random_length", "rare_words",    "temporal_holdout",
                                              "length_threshold", "adversarial"};
  std::vector<const EvaluationReport*> columns;
  for (const auto& name : canonical) {
    for (const auto& report : suite.strategies) {
      if (report.strategy == name) columns.push_back(&report);
    }
  }
  for (const auto& report : suite.strategies) {  // anything non-canonical keeps input order
    if (std::find(canonical.begin(), canonical.end(), report.strategy) == canonical.end()) {
      columns.push_back(&report);
    }
  }

  std::ostringstream out;
  auto cell = [&](const std::string& s) {
    out << s;
    for (std::size_t i = s.size(); i < 18; ++i) out << ' ';
  };
  auto num = [&](double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.3f", v);
    cell(buf);
  };
  cell("");
  for (const auto* report : columns) cell(report->strategy);
  cell("new_sample");
  out << '\n';
  cell("error_reduction");
  for (const auto* report : columns) num(report->error_reduction_mean);
  num(suite.new_sample.error_reduction_mean);
  out << '\n';
  cell("mse_vs_new");
  for (const auto* report : columns) {
    auto it = std::find_if(suite.mse_vs_new_sample.begin(), suite.mse_vs_new_sample.end(),
                           [&](const auto& entry) { return entry.first == report->strategy; });
    num(it->second);
  }
  cell("-");
  out << '\n';
  return out.str();
}

}  // namespace splitgauntlet

#endif  // SPLITGAUNTLET_EVALHARNESS_HPP
