#pragma once

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace lace {

// ---------------------------------------------------------------------------
// Measures
// ---------------------------------------------------------------------------

/// Edit distance with unit-cost insert, delete and substitute (byte-wise).
inline std::size_t levenshtein(std::string_view a, std::string_view b) {
  if (a.size() < b.size()) std::swap(a, b);
  std::vector<std::size_t> row(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) row[j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    std::size_t diag = row[0];
    row[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      std::size_t up = row[j];
      std::size_t sub = diag + (a[i - 1] == b[j - 1] ? 0 : 1);
      row[j] = std::min({row[j] + 1, row[j - 1] + 1, sub});
      diag = up;
    }
  }
  return row[b.size()];
}

/// Jaro similarity in [0, 1].
inline double jaro(std::string_view a, std::string_view b) {
  if (a.empty() && b.empty()) return 1.0;
  if (a.empty() || b.empty()) return 0.0;
  std::size_t window = std::max(a.size(), b.size()) / 2;
  window = window > 0 ? window - 1 : 0;
  std::vector<bool> ma(a.size(), false), mb(b.size(), false);
  std::size_t matches = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    std::size_t lo = i > window ? i - window : 0;
    std::size_t hi = std::min(b.size(), i + window + 1);
    for (std::size_t j = lo; j < hi; ++j) {
      if (mb[j] || a[i] != b[j]) continue;
      ma[i] = mb[j] = true;
      ++matches;
      break;
    }
  }
  if (matches == 0) return 0.0;
  std::size_t half_transpositions = 0;
  for (std::size_t i = 0, j = 0; i < a.size(); ++i) {
    if (!ma[i]) continue;
    while (!mb[j]) ++j;
    if (a[i] != b[j]) ++half_transpositions;
    ++j;
  }
  double m = static_cast<double>(matches);
  double t = static_cast<double>(half_transpositions / 2);
  return (m / static_cast<double>(a.size()) + m / static_cast<double>(b.size()) + (m - t) / m) / 3.0;
}

/// Jaro-Winkler similarity: Jaro boosted by a common prefix of up to four
/// characters with scaling factor 0.1.
inline double jaro_winkler(std::string_view a, std::string_view b) {
  double j = jaro(a, b);
  std::size_t prefix = 0;
  while (prefix < 4 && prefix < a.size() && prefix < b.size() && a[prefix] == b[prefix]) ++prefix;
  return j + static_cast<double>(prefix) * 0.1 * (1.0 - j);
}

/// Lowercased whitespace tokens.
inline std::vector<std::string> tokenize(std::string_view s) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      if (!cur.empty()) out.push_back(std::move(cur));
      cur.clear();
    } else {
      cur += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

/// Document frequencies over a corpus of strings.
class TfIdfCorpus {
 public:
  TfIdfCorpus() = default;

  explicit TfIdfCorpus(const std::vector<std::string>& docs) : size_(docs.size()) {
    for (const auto& d : docs) {
      auto toks = tokenize(d);
      std::set<std::string> uniq(toks.begin(), toks.end());
      for (const auto& t : uniq) ++df_[t];
    }
  }

  std::size_t size() const { return size_; }

  /// log(N / df); tokens unseen in the corpus count as occurring once.
  double idf(const std::string& token) const {
    auto it = df_.find(token);
    std::size_t df = it == df_.end() ? 1 : it->second;
    if (size_ == 0) return 0.0;
    return std::log(static_cast<double>(size_) / static_cast<double>(df));
  }

  std::map<std::string, double> vector_of(std::string_view s) const {
    std::map<std::string, double> v;
    for (auto& t : tokenize(s)) v[t] += 1.0;
    for (auto& [t, w] : v) w *= idf(t);
    return v;
  }

 private:
  std::size_t size_ = 0;
  std::unordered_map<std::string, std::size_t> df_;
};

/// Cosine of TF-IDF vectors; 0 when either vector is all zero.
inline double tfidf_cosine(std::string_view a, std::string_view b, const TfIdfCorpus& corpus) {
  auto va = corpus.vector_of(a);
  auto vb = corpus.vector_of(b);
  double dot = 0, na = 0, nb = 0;
  for (const auto& [t, w] : va) {
    na += w * w;
    auto it = vb.find(t);
    if (it != vb.end()) dot += w * it->second;
  }
  for (const auto& [t, w] : vb) nb += w * w;
  if (na == 0.0 || nb == 0.0) return 0.0;
  return std::clamp(dot / (std::sqrt(na) * std::sqrt(nb)), 0.0, 1.0);
}

inline double tfidf_cosine(std::string_view a, std::string_view b, const std::vector<std::string>& corpus) {
  return tfidf_cosine(a, b, TfIdfCorpus(corpus));
}

// ---------------------------------------------------------------------------
// Score routing
// ---------------------------------------------------------------------------

struct SimConfig {
  std::size_t short_len_threshold = 25;
};

inline bool looks_numeric(std::string_view s) {
  std::size_t i = 0;
  if (i < s.size() && (s[i] == '+' || s[i] == '-')) ++i;
  bool digits = false, dot = false;
  for (; i < s.size(); ++i) {
    if (std::isdigit(static_cast<unsigned char>(s[i]))) digits = true;
    else if (s[i] == '.' && !dot) dot = true;
    else return false;
  }
  return digits;
}

/// Unit-interval score scaled to [0, 100], rounding halves up.
inline int to_score(double unit) {
  double scaled = std::floor(unit * 100.0 + 0.5 + 1e-9);
  return static_cast<int>(std::clamp(scaled, 0.0, 100.0));
}

inline double normalized_levenshtein(std::string_view a, std::string_view b) {
  std::size_t longest = std::max(a.size(), b.size());
  if (longest == 0) return 1.0;
  return 1.0 - static_cast<double>(levenshtein(a, b)) / static_cast<double>(longest);
}

/// Routed score: numeric pairs use normalized Levenshtein, short strings
/// Jaro-Winkler, longer text TF-IDF cosine.
inline int routed_score(std::string_view a, std::string_view b, const TfIdfCorpus& corpus, const SimConfig& cfg = {}) {
  if (a == b) return 100;
  if (looks_numeric(a) && looks_numeric(b)) return to_score(normalized_levenshtein(a, b));
  if (std::max(a.size(), b.size()) < cfg.short_len_threshold) return to_score(jaro_winkler(a, b));
  return to_score(tfidf_cosine(a, b, corpus));
}

// ---------------------------------------------------------------------------
// Store
// ---------------------------------------------------------------------------

/// Symmetric text-keyed scores in [0, 100]. Missing pairs score 0, except
/// that a non-empty value is always 100-similar to itself.
class SimilarityStore {
 public:
  void set(const std::string& a, const std::string& b, int score) {
    scores_[key(a, b)] = std::clamp(score, 0, 100);
  }

  int score(const std::string& a, const std::string& b) const {
    if (a == b) return 100;
    auto it = scores_.find(key(a, b));
    return it == scores_.end() ? 0 : it->second;
  }

  bool contains(const std::string& a, const std::string& b) const { return scores_.count(key(a, b)) > 0; }

  /// Entries in key order, first member not greater than the second.
  const std::map<std::pair<std::string, std::string>, int>& entries() const { return scores_; }
  std::size_t size() const { return scores_.size(); }

  /// Entries of `other` replace ours.
  void overlay(const SimilarityStore& other) {
    for (const auto& [k, v] : other.scores_) scores_[k] = v;
  }

 private:
  static std::pair<std::string, std::string> key(const std::string& a, const std::string& b) {
    return a <= b ? std::make_pair(a, b) : std::make_pair(b, a);
  }

  std::map<std::pair<std::string, std::string>, int> scores_;
};

/// Scores every unordered pair of distinct values with the routed measure;
/// zero scores are omitted. The TF-IDF corpus is the value list itself.
inline SimilarityStore score_all_pairs(std::vector<std::string> values, const SimConfig& cfg = {}) {
  std::sort(values.begin(), values.end());
  values.erase(std::unique(values.begin(), values.end()), values.end());
  TfIdfCorpus corpus(values);
  SimilarityStore store;
  for (std::size_t i = 0; i < values.size(); ++i)
    for (std::size_t j = i + 1; j < values.size(); ++j) {
      int s = routed_score(values[i], values[j], corpus, cfg);
      if (s > 0) store.set(values[i], values[j], s);
    }
  return store;
}

}  // namespace lace
