#pragma once

#include <algorithm>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "lace/equiv_rel.hpp"

namespace lace {

struct Scores {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

inline double f1_score(double precision, double recall) {
  if (precision + recall <= 0.0) return 0.0;
  return 2.0 * precision * recall / (precision + recall);
}

/// Unordered pairs, each stored smaller member first.
template <typename T>
using PairSet = std::set<std::pair<T, T>>;

template <typename T>
std::pair<T, T> unordered(T a, T b) {
  return a < b ? std::make_pair(std::move(a), std::move(b)) : std::make_pair(std::move(b), std::move(a));
}

/// Non-reflexive unordered pairs of the same class.
template <typename T>
PairSet<T> predicted_pairs(const EquivRel<T>& rel) {
  PairSet<T> out;
  const auto& u = *rel.universe();
  for (const auto& cls : rel.classes())
    for (std::size_t i = 0; i < cls.size(); ++i)
      for (std::size_t j = i + 1; j < cls.size(); ++j) out.insert(unordered(u[cls[i]], u[cls[j]]));
  return out;
}

/// Precision, recall and F1 of `predicted` against `truth`. An empty
/// prediction has precision 1 when the truth is empty as well and 0
/// otherwise; an empty truth has recall 1.
template <typename T>
Scores score_pairs(const PairSet<T>& predicted, const PairSet<T>& truth) {
  std::size_t hit = 0;
  for (const auto& p : predicted) hit += truth.count(p);
  Scores s;
  if (predicted.empty()) s.precision = truth.empty() ? 1.0 : 0.0;
  else s.precision = static_cast<double>(hit) / static_cast<double>(predicted.size());
  if (truth.empty()) s.recall = 1.0;
  else s.recall = static_cast<double>(hit) / static_cast<double>(truth.size());
  s.f1 = f1_score(s.precision, s.recall);
  return s;
}

template <typename T>
Scores score(const EquivRel<T>& rel, const PairSet<T>& truth) {
  PairSet<T> normalized;
  for (const auto& [a, b] : truth)
    if (!(a == b)) normalized.insert(unordered(a, b));
  return score_pairs(predicted_pairs(rel), normalized);
}

}  // namespace lace
