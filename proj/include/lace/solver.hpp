#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <thread>
#include <unordered_set>
#include <utility>
#include <vector>

#include "lace/semantics.hpp"

namespace lace {

struct SearchConfig {
  std::size_t max_solutions = std::numeric_limits<std::size_t>::max();
  /// Cap on (state, pair) expansions tried during the search.
  std::size_t pair_budget = 5'000'000;
  unsigned threads = 1;
};

/// Raised when a search budget runs out before a verdict is certain.
class InconclusiveError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class UnsupportedSettingError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class UnsupportedCriterionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct RecognitionResult {
  bool optimal = false;
  bool is_solution = false;
  std::optional<Candidate> witness;
};

struct SolutionRecord {
  Candidate candidate;
  CriterionSets sets;
};

struct EnumerationResult {
  std::vector<Candidate> solutions;  // canonical order
  bool complete = true;
  std::size_t states = 0;
};

/// The reachable candidate space of an instance, explored breadth-first from
/// the identity by adding one active pair at a time. Every candidate is
/// reachable this way, so the solutions found are exactly Sol(D, Σ) when the
/// exploration completes.
class SolutionSpace {
 public:
  /// Throws InconclusiveError if the pair budget runs out.
  static SolutionSpace explore(const Engine& engine, const SearchConfig& cfg = {}) {
    SolutionSpace space;
    space.complete_ = space.run(engine, cfg, /*stop_at=*/std::numeric_limits<std::size_t>::max());
    if (!space.complete_) throw InconclusiveError("pair budget exhausted after " + std::to_string(space.states_) +
                                                  " states");
    return space;
  }

  static EnumerationResult enumerate(const Engine& engine, const SearchConfig& cfg = {}) {
    SolutionSpace space;
    bool complete = space.run(engine, cfg, cfg.max_solutions);
    EnumerationResult out;
    for (const auto& r : space.records_) out.solutions.push_back(r.candidate);
    if (out.solutions.size() > cfg.max_solutions) {
      out.solutions.resize(cfg.max_solutions);
      complete = false;
    }
    out.complete = complete;
    out.states = space.states_;
    return out;
  }

  const std::vector<SolutionRecord>& solutions() const { return records_; }
  std::size_t states() const { return states_; }

  std::optional<std::size_t> find(const Candidate& c) const {
    auto it = std::lower_bound(records_.begin(), records_.end(), c,
                               [](const SolutionRecord& r, const Candidate& x) { return r.candidate < x; });
    if (it == records_.end() || !(it->candidate == c)) return std::nullopt;
    return static_cast<std::size_t>(it - records_.begin());
  }

  /// Indices of the criterion-optimal solutions, in canonical order.
  std::vector<std::size_t> optimal(Criterion c) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < records_.size(); ++i) {
      bool dominated = false;
      for (std::size_t j = 0; j < records_.size() && !dominated; ++j)
        dominated = j != i && better(j, records_[i].candidate, records_[i].sets, c);
      if (!dominated) out.push_back(i);
    }
    return out;
  }

  /// Brute-force recognition against the explored space.
  RecognitionResult recognize(const Engine& engine, const Candidate& cand, Criterion c) const {
    RecognitionResult out;
    out.is_solution = engine.is_solution(cand);
    if (!out.is_solution) return out;
    CriterionSets sets = engine.criterion_sets(cand);
    std::optional<std::size_t> witness;
    for (auto i : optimal(c))
      if (better(i, cand, sets, c)) {
        witness = i;
        break;
      }
    if (!witness)
      for (std::size_t i = 0; i < records_.size() && !witness; ++i)
        if (better(i, cand, sets, c)) witness = i;
    out.optimal = !witness;
    if (witness) out.witness = records_[*witness].candidate;
    return out;
  }

 private:
  bool better(std::size_t j, const Candidate& cand, const CriterionSets& sets, Criterion c) const {
    return compare(records_[j].candidate, records_[j].sets, cand, sets, c) == Comparison::ABetter;
  }

  struct Expanded {
    StateEval eval;
    std::vector<Candidate> successors;
  };

  static Expanded expand(const Engine& engine, const Candidate& state) {
    Expanded out;
    out.eval = engine.evaluate(state);
    const MergePair* last = nullptr;
    for (const auto& e : out.eval.active) {
      if (last && *last == e.pair) continue;
      last = &e.pair;
      if (!state.contains(e.pair)) out.successors.push_back(state.with(e.pair));
    }
    return out;
  }

  /// Returns false when the budget ran out or `stop_at` solutions were found.
  bool run(const Engine& engine, const SearchConfig& cfg, std::size_t stop_at) {
    std::unordered_set<Candidate, CandidateHash> seen;
    std::vector<Candidate> frontier{engine.identity()};
    seen.insert(frontier.front());
    std::size_t expansions = 0;
    bool complete = true;
    unsigned threads = std::max(1u, cfg.threads);

    while (!frontier.empty() && complete) {
      std::vector<Expanded> results(frontier.size());
      if (threads == 1 || frontier.size() < 2) {
        for (std::size_t i = 0; i < frontier.size(); ++i) results[i] = expand(engine, frontier[i]);
      } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> pool;
        for (unsigned t = 0; t < std::min<std::size_t>(threads, frontier.size()); ++t)
          pool.emplace_back([&] {
            for (std::size_t i = next++; i < frontier.size(); i = next++) results[i] = expand(engine, frontier[i]);
          });
        for (auto& th : pool) th.join();
      }

      std::vector<Candidate> next_frontier;
      for (std::size_t i = 0; i < frontier.size(); ++i) {
        ++states_;
        auto& r = results[i];
        if (r.eval.violated.empty() && r.eval.missing_hard(frontier[i], engine.hard_flags()).empty()) {
          records_.push_back({frontier[i], Engine::criterion_sets(frontier[i], r.eval.active)});
          if (records_.size() >= stop_at) complete = false;
        }
        for (auto& s : r.successors) {
          if (++expansions > cfg.pair_budget) complete = false;
          if (seen.insert(s).second) next_frontier.push_back(std::move(s));
        }
      }
      frontier = std::move(next_frontier);
    }
    std::sort(records_.begin(), records_.end(),
              [](const SolutionRecord& a, const SolutionRecord& b) { return a.candidate < b.candidate; });
    return complete;
  }

  std::vector<SolutionRecord> records_;
  std::size_t states_ = 0;
  bool complete_ = true;
};

inline EnumerationResult enumerate_solutions(const Engine& engine, const SearchConfig& cfg = {}) {
  return SolutionSpace::enumerate(engine, cfg);
}

/// Criterion-optimal solutions in canonical order. Throws InconclusiveError
/// when the search budget runs out.
inline std::vector<Candidate> optimal_solutions(const Engine& engine, Criterion c, const SearchConfig& cfg = {}) {
  auto space = SolutionSpace::explore(engine, cfg);
  std::vector<Candidate> out;
  for (auto i : space.optimal(c)) out.push_back(space.solutions()[i].candidate);
  return out;
}

inline RecognitionResult recognize_optimal_bruteforce(const Engine& engine, const Candidate& cand, Criterion c,
                                                      const SearchConfig& cfg = {}) {
  if (!engine.is_solution(cand)) return {};
  return SolutionSpace::explore(engine, cfg).recognize(engine, cand, c);
}

/// Polynomial recognition for inequality-free denial constraints and the
/// set criteria maxES, maxSS, minAS and minVS.
///
/// For each absent pair p, ⟨E, V⟩ is extended by p and then saturated with
/// every hard-rule active pair and, for minAS (minVS), every pair (entry)
/// newly absent (violated) compared with ⟨E, V⟩. The input is optimal iff no
/// saturated extension is a solution.
inline RecognitionResult recognize_optimal_restricted(const Engine& engine, const Candidate& cand, Criterion c) {
  if (!engine.spec().restricted())
    throw UnsupportedSettingError("restricted recognition needs denial constraints without inequalities");
  if (c != Criterion::maxES && c != Criterion::maxSS && c != Criterion::minAS && c != Criterion::minVS)
    throw UnsupportedCriterionError(std::string("restricted recognition does not support ") +
                                    std::string(criterion_name(c)));
  RecognitionResult out;
  out.is_solution = engine.is_solution(cand);
  if (!out.is_solution) return out;

  const auto base_active = engine.active_pairs(cand);
  const auto base = Engine::criterion_sets(cand, base_active);
  const auto& hard = engine.hard_flags();

  for (const auto& p : base.abs) {
    Candidate cur = cand.with(p);
    while (true) {
      auto ev = engine.evaluate(cur);
      std::vector<MergePair> add = ev.missing_hard(cur, hard);
      if (c == Criterion::minAS || c == Criterion::minVS) {
        for (const auto& e : ev.active) {
          if (cur.contains(e.pair)) continue;
          bool fresh = c == Criterion::minAS ? !std::binary_search(base.abs.begin(), base.abs.end(), e.pair)
                                             : !std::binary_search(base.viol.begin(), base.viol.end(), e);
          if (fresh) add.push_back(e.pair);
        }
      }
      if (add.empty()) {
        if (ev.violated.empty()) {
          out.optimal = false;
          out.witness = cur;
          return out;
        }
        break;
      }
      cur = cur.with(add);
    }
  }
  out.optimal = true;
  return out;
}

}  // namespace lace
