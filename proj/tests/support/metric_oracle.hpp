#pragma once

// Brute-force metric definitions used as oracles for the eval module.

#include <algorithm>
#include <cstdint>
#include <random>
#include <vector>

#include "lanet/eval/metrics.hpp"

namespace lanet::testing::oracle {

struct PairwiseAuc {
  bool defined = false;
  double value = 0.0;
};

inline PairwiseAuc pairwise_auc(const std::vector<double>& s, const std::vector<double>& y) {
  std::uint64_t wins = 0, ties = 0, P = 0, N = 0;
  for (std::size_t i = 0; i < s.size(); ++i) (y[i] == 1.0 ? P : N) += 1;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (y[i] != 1.0) continue;
    for (std::size_t j = 0; j < s.size(); ++j) {
      if (y[j] != 0.0) continue;
      if (s[i] > s[j]) ++wins;
      else if (s[i] == s[j]) ++ties;
    }
  }
  if (P == 0 || N == 0) return {};
  return {true, static_cast<double>(2 * wins + ties) / static_cast<double>(2 * P * N)};
}

struct MicroMacro {
  double micro = 0.0;
  double macro = 0.0;
  std::size_t skipped = 0;
};

inline MicroMacro auc(const eval::ScoreMatrix& sm) {
  MicroMacro r;
  r.micro = pairwise_auc(sm.scores, sm.targets).value;
  double total = 0.0;
  std::size_t used = 0;
  for (std::size_t k = 0; k < sm.cols; ++k) {
    std::vector<double> s, y;
    for (std::size_t i = 0; i < sm.rows; ++i) {
      s.push_back(sm.scores[i * sm.cols + k]);
      y.push_back(sm.targets[i * sm.cols + k]);
    }
    auto a = pairwise_auc(s, y);
    if (a.defined) {
      total += a.value;
      ++used;
    } else {
      ++r.skipped;
    }
  }
  r.macro = total / static_cast<double>(used);
  return r;
}

inline double f1_from_counts(std::size_t tp, std::size_t fp, std::size_t fn) {
  return tp + fp + fn == 0 ? 0.0 : static_cast<double>(2 * tp) / static_cast<double>(2 * tp + fp + fn);
}

inline double label_f1(const std::vector<double>& s, const std::vector<double>& y, double beta) {
  std::size_t tp = 0, fp = 0, fn = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const int pred = s[i] > beta ? 1 : 0, truth = y[i] == 1.0 ? 1 : 0;
    tp += pred & truth;
    fp += pred & (1 - truth);
    fn += (1 - pred) & truth;
  }
  return f1_from_counts(tp, fp, fn);
}

inline MicroMacro f1(const eval::ScoreMatrix& sm, const std::vector<double>& beta) {
  std::size_t tp = 0, fp = 0, fn = 0;
  double total = 0.0;
  for (std::size_t k = 0; k < sm.cols; ++k) {
    std::size_t ltp = 0, lfp = 0, lfn = 0;
    for (std::size_t i = 0; i < sm.rows; ++i) {
      const bool pred = sm.scores[i * sm.cols + k] > beta[k];
      const bool truth = sm.targets[i * sm.cols + k] == 1.0;
      if (pred && truth) ++ltp;
      if (pred && !truth) ++lfp;
      if (!pred && truth) ++lfn;
    }
    tp += ltp;
    fp += lfp;
    fn += lfn;
    total += f1_from_counts(ltp, lfp, lfn);
  }
  return {f1_from_counts(tp, fp, fn), total / static_cast<double>(sm.cols), 0};
}

/// Candidate thresholds built independently: {0, 1} and midpoints of
/// adjacent distinct scores.
inline std::vector<double> candidates(std::vector<double> s) {
  std::sort(s.begin(), s.end());
  std::vector<double> c{0.0, 1.0};
  for (std::size_t i = 1; i < s.size(); ++i) {
    if (s[i] != s[i - 1]) c.push_back((s[i - 1] + s[i]) / 2.0);
  }
  return c;
}

/// Random matrix; scores come from a coarse grid half of the time so ties
/// are common.
inline eval::ScoreMatrix random_matrix(std::mt19937_64& rng, std::size_t max_rows = 20,
                                       std::size_t max_cols = 10) {
  const std::size_t rows = 2 + rng() % (max_rows - 1), cols = 1 + rng() % max_cols;
  eval::ScoreMatrix sm(rows, cols);
  const bool coarse = rng() % 2 == 0;
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double rate = 0.1 + 0.8 * u(rng);
  for (std::size_t i = 0; i < rows * cols; ++i) {
    sm.scores[i] = coarse ? static_cast<double>(rng() % 6) / 5.0 : u(rng);
    sm.targets[i] = u(rng) < rate ? 1.0 : 0.0;
  }
  // guarantee a defined micro-AUC
  sm.targets[0] = 1.0;
  sm.targets[1] = 0.0;
  return sm;
}

}  // namespace lanet::testing::oracle
