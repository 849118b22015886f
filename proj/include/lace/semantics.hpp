#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "lace/core.hpp"
#include "lace/dsl.hpp"
#include "lace/query.hpp"

namespace lace {

// ---------------------------------------------------------------------------
// Merge pairs and candidates
// ---------------------------------------------------------------------------

/// An unordered, non-reflexive pair of objects or of cells, stored as
/// universe indices with a < b. Object pairs order before cell pairs.
struct MergePair {
  bool cell = false;
  std::uint32_t a = 0;
  std::uint32_t b = 0;

  static MergePair objects(std::uint32_t x, std::uint32_t y) { return {false, std::min(x, y), std::max(x, y)}; }
  static MergePair cells(std::uint32_t x, std::uint32_t y) { return {true, std::min(x, y), std::max(x, y)}; }

  auto operator<=>(const MergePair&) const = default;
};

/// A pair ⟨E, V⟩ of merge relations over one database.
struct Candidate {
  ObjRel E;
  CellRel V;

  static Candidate identity(const Database& db) { return {db.identity_objects(), db.identity_cells()}; }

  bool contains(const MergePair& p) const { return p.cell ? V.related(p.a, p.b) : E.related(p.a, p.b); }

  Candidate with(const std::vector<MergePair>& pairs) const {
    std::vector<ObjRel::IndexPair> o;
    std::vector<CellRel::IndexPair> c;
    for (const auto& p : pairs) (p.cell ? c : o).emplace_back(p.a, p.b);
    return {E.with(o), V.with(c)};
  }

  Candidate with(const MergePair& p) const { return with(std::vector<MergePair>{p}); }

  /// E ∪ V ⊆ other.E ∪ other.V.
  bool subset_of(const Candidate& other) const { return E.subset_of(other.E) && V.subset_of(other.V); }

  /// |E| + |V|, ordered pairs including reflexive ones.
  std::uint64_t pair_count() const { return E.pair_count() + V.pair_count(); }

  std::size_t hash() const { return E.hash() * 31u ^ V.hash(); }

  bool operator==(const Candidate& o) const { return E == o.E && V == o.V; }
  auto operator<=>(const Candidate& o) const {
    if (auto c = E <=> o.E; c != 0) return c;
    return V <=> o.V;
  }
};

struct CandidateHash {
  std::size_t operator()(const Candidate& c) const { return c.hash(); }
};

struct ActiveEntry {
  MergePair pair;
  std::uint32_t rule = 0;

  auto operator<=>(const ActiveEntry&) const = default;
};

/// Sorted, duplicate-free.
using ActiveSet = std::vector<ActiveEntry>;

struct CriterionSets {
  std::uint64_t eq_count = 0;    // |E| + |V|
  ActiveSet supp;                // active entries whose pair is merged
  std::vector<MergePair> abs;    // active pairs not merged
  ActiveSet viol;                // active entries whose pair is not merged
};

// ---------------------------------------------------------------------------
// Criteria
// ---------------------------------------------------------------------------

enum class Criterion : std::uint8_t { maxES, maxEC, maxSS, maxSC, minAS, minAC, minVS, minVC };

inline constexpr Criterion kAllCriteria[] = {Criterion::maxES, Criterion::maxEC, Criterion::maxSS, Criterion::maxSC,
                                             Criterion::minAS, Criterion::minAC, Criterion::minVS, Criterion::minVC};

/// The seven distinct criteria (maxSS omitted).
inline constexpr Criterion kDistinctCriteria[] = {Criterion::maxES, Criterion::maxEC, Criterion::maxSC,
                                                  Criterion::minAS, Criterion::minAC, Criterion::minVS,
                                                  Criterion::minVC};

inline std::string_view criterion_name(Criterion c) {
  switch (c) {
    case Criterion::maxES: return "maxES";
    case Criterion::maxEC: return "maxEC";
    case Criterion::maxSS: return "maxSS";
    case Criterion::maxSC: return "maxSC";
    case Criterion::minAS: return "minAS";
    case Criterion::minAC: return "minAC";
    case Criterion::minVS: return "minVS";
    case Criterion::minVC: return "minVC";
  }
  return "?";
}

inline std::optional<Criterion> parse_criterion(std::string_view name) {
  for (auto c : kAllCriteria)
    if (criterion_name(c) == name) return c;
  return std::nullopt;
}

inline bool is_cardinality(Criterion c) {
  return c == Criterion::maxEC || c == Criterion::maxSC || c == Criterion::minAC || c == Criterion::minVC;
}

enum class Comparison : std::uint8_t { ABetter, BBetter, Equal, Incomparable };

namespace detail {

template <typename T>
Comparison compare_sets(const std::vector<T>& a, const std::vector<T>& b, bool larger_is_better) {
  if (a == b) return Comparison::Equal;
  bool a_in_b = std::includes(b.begin(), b.end(), a.begin(), a.end());
  bool b_in_a = std::includes(a.begin(), a.end(), b.begin(), b.end());
  if (a_in_b) return larger_is_better ? Comparison::BBetter : Comparison::ABetter;
  if (b_in_a) return larger_is_better ? Comparison::ABetter : Comparison::BBetter;
  return Comparison::Incomparable;
}

inline Comparison compare_counts(std::uint64_t a, std::uint64_t b, bool larger_is_better) {
  if (a == b) return Comparison::Equal;
  return (a > b) == larger_is_better ? Comparison::ABetter : Comparison::BBetter;
}

}  // namespace detail

/// Orders two candidates of the same instance under a criterion.
inline Comparison compare(const Candidate& a, const CriterionSets& sa, const Candidate& b, const CriterionSets& sb,
                          Criterion c) {
  switch (c) {
    case Criterion::maxES: {
      if (a == b) return Comparison::Equal;
      if (a.subset_of(b)) return Comparison::BBetter;
      if (b.subset_of(a)) return Comparison::ABetter;
      return Comparison::Incomparable;
    }
    case Criterion::maxEC: return detail::compare_counts(sa.eq_count, sb.eq_count, true);
    case Criterion::maxSS: return detail::compare_sets(sa.supp, sb.supp, true);
    case Criterion::maxSC: return detail::compare_counts(sa.supp.size(), sb.supp.size(), true);
    case Criterion::minAS: return detail::compare_sets(sa.abs, sb.abs, false);
    case Criterion::minAC: return detail::compare_counts(sa.abs.size(), sb.abs.size(), false);
    case Criterion::minVS: return detail::compare_sets(sa.viol, sb.viol, false);
    case Criterion::minVC: return detail::compare_counts(sa.viol.size(), sb.viol.size(), false);
  }
  return Comparison::Incomparable;
}

// ---------------------------------------------------------------------------
// Engine
// ---------------------------------------------------------------------------

/// Outcome of checking ⟨E, V⟩ against Definition-style solution conditions.
struct SolutionCheck {
  bool candidate = false;
  std::vector<std::string> unsatisfied_hard_rules;
  std::vector<std::string> violated_constraints;

  bool ok() const { return candidate && unsatisfied_hard_rules.empty() && violated_constraints.empty(); }
};

/// Per-candidate evaluation: active pairs plus violated denial constraints.
struct StateEval {
  ActiveSet active;
  std::vector<std::uint32_t> violated;  // constraint indices

  /// Hard-rule active pairs not merged in `c`.
  std::vector<MergePair> missing_hard(const Candidate& c, const std::vector<bool>& hard) const {
    std::vector<MergePair> out;
    for (const auto& e : active)
      if (hard[e.rule] && !c.contains(e.pair)) out.push_back(e.pair);
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
  }
};

/// Rules and constraints of a specification compiled against one database.
/// Rule index r < |object rules| names an object rule, larger indices value
/// rules in declaration order. The database, specification and similarity
/// index must outlive the engine.
class Engine {
 public:
  Engine(const Database& db, const Specification& spec, SimilarityIndex sim = {},
         AnswerMode mode = AnswerMode::Anchored)
      : db_(&db), spec_(&spec), sim_(std::move(sim)), mode_(mode) {
    for (const auto& r : spec.object_rules) {
      rules_.push_back(CompiledQuery(db, r.body, {r.x, r.y}));
      labels_.push_back(r.label);
      hard_.push_back(r.kind == RuleKind::Hard);
      positions_.emplace_back(0, 0);
    }
    for (const auto& r : spec.value_rules) {
      rules_.push_back(CompiledQuery(db, r.body, {r.lhs.tid_var, r.rhs.tid_var}));
      labels_.push_back(r.label);
      hard_.push_back(r.kind == RuleKind::Hard);
      positions_.emplace_back(r.lhs.position, r.rhs.position);
    }
    for (const auto& d : spec.constraints) constraints_.push_back(CompiledQuery(db, d.body, {}));
  }

  const Database& database() const { return *db_; }
  const Specification& spec() const { return *spec_; }
  const SimilarityIndex& similarity() const { return sim_; }
  AnswerMode answer_mode() const { return mode_; }

  std::size_t rule_count() const { return rules_.size(); }
  bool is_object_rule(std::uint32_t r) const { return r < spec_->object_rules.size(); }
  bool is_hard(std::uint32_t r) const { return hard_[r]; }
  const std::vector<bool>& hard_flags() const { return hard_; }
  const std::string& rule_label(std::uint32_t r) const { return labels_[r]; }
  const std::string& constraint_label(std::uint32_t d) const { return spec_->constraints[d].label; }

  Candidate identity() const { return Candidate::identity(*db_); }

  /// actP(D, E, V, Σ), normalized to unordered non-reflexive pairs.
  ActiveSet active_pairs(const Candidate& c) const { return active_pairs(extend(*db_, c.E, c.V)); }

  ActiveSet active_pairs(const ExtendedDatabase& ext) const {
    ActiveSet out;
    const auto& objects = *db_->objects();
    const auto& cells = *db_->cells();
    for (std::uint32_t r = 0; r < rules_.size(); ++r) {
      for (const auto& ans : eval(rules_[r], ext, sim_, mode_)) {
        if (is_object_rule(r)) {
          auto a = objects.position_of(ans[0]);
          auto b = objects.position_of(ans[1]);
          if (!a || !b || *a == *b) continue;
          out.push_back({MergePair::objects(*a, *b), r});
        } else {
          auto a = cells.position_of(Cell{ans[0], positions_[r].first});
          auto b = cells.position_of(Cell{ans[1], positions_[r].second});
          if (!a || !b || *a == *b) continue;
          out.push_back({MergePair::cells(*a, *b), r});
        }
      }
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
  }

  /// Indices of denial constraints whose body is satisfiable in `ext`.
  std::vector<std::uint32_t> violated_constraints(const ExtendedDatabase& ext) const {
    std::vector<std::uint32_t> out;
    for (std::uint32_t d = 0; d < constraints_.size(); ++d)
      if (eval_boolean(constraints_[d], ext, sim_)) out.push_back(d);
    return out;
  }

  std::vector<std::uint32_t> violated_constraints(const Candidate& c) const {
    return violated_constraints(extend(*db_, c.E, c.V));
  }

  StateEval evaluate(const Candidate& c) const {
    auto ext = extend(*db_, c.E, c.V);
    return {active_pairs(ext), violated_constraints(ext)};
  }

  const CompiledQuery& constraint_query(std::uint32_t d) const { return constraints_[d]; }
  const CompiledQuery& rule_query(std::uint32_t r) const { return rules_[r]; }

  CriterionSets criterion_sets(const Candidate& c) const { return criterion_sets(c, active_pairs(c)); }

  static CriterionSets criterion_sets(const Candidate& c, const ActiveSet& active) {
    CriterionSets s;
    s.eq_count = c.pair_count();
    for (const auto& e : active) {
      if (c.contains(e.pair)) {
        s.supp.push_back(e);
      } else {
        s.viol.push_back(e);
        if (s.abs.empty() || !(s.abs.back() == e.pair)) s.abs.push_back(e.pair);
      }
    }
    return s;
  }

  /// Greedy saturation from the identity, adding only active pairs that lie
  /// in the target; the target is a candidate iff the fixpoint reaches it.
  bool is_candidate(const Candidate& target) const {
    if (!(*target.E.universe() == *db_->objects()) || !(*target.V.universe() == *db_->cells())) return false;
    Candidate cur = identity();
    while (!(cur == target)) {
      std::vector<MergePair> add;
      for (const auto& e : active_pairs(cur))
        if (target.contains(e.pair) && !cur.contains(e.pair)) add.push_back(e.pair);
      if (add.empty()) return false;
      cur = cur.with(add);
    }
    return true;
  }

  SolutionCheck check(const Candidate& c) const {
    SolutionCheck out;
    out.candidate = is_candidate(c);
    if (!(*c.E.universe() == *db_->objects()) || !(*c.V.universe() == *db_->cells())) return out;
    auto ext = extend(*db_, c.E, c.V);
    std::vector<bool> reported(rules_.size(), false);
    for (const auto& e : active_pairs(ext))
      if (hard_[e.rule] && !c.contains(e.pair) && !reported[e.rule]) {
        reported[e.rule] = true;
        out.unsatisfied_hard_rules.push_back(labels_[e.rule]);
      }
    for (auto d : violated_constraints(ext)) out.violated_constraints.push_back(constraint_label(d));
    return out;
  }

  bool is_solution(const Candidate& c) const {
    if (!is_candidate(c)) return false;
    auto ev = evaluate(c);
    return ev.violated.empty() && ev.missing_hard(c, hard_).empty();
  }

  std::string pair_text(const MergePair& p) const {
    if (p.cell) {
      const auto& cu = *db_->cells();
      return "(" + db_->cell_text(cu[p.a]) + ", " + db_->cell_text(cu[p.b]) + ")";
    }
    const auto& ou = *db_->objects();
    return "(" + db_->text(ou[p.a]) + ", " + db_->text(ou[p.b]) + ")";
  }

 private:
  const Database* db_;
  const Specification* spec_;
  SimilarityIndex sim_;
  AnswerMode mode_;
  std::vector<CompiledQuery> rules_;
  std::vector<std::string> labels_;
  std::vector<bool> hard_;
  std::vector<std::pair<std::uint32_t, std::uint32_t>> positions_;
  std::vector<CompiledQuery> constraints_;
};

// Free-function forms.

inline ActiveSet active_pairs(const Engine& engine, const Candidate& c) { return engine.active_pairs(c); }
inline CriterionSets criterion_sets(const Engine& engine, const Candidate& c) { return engine.criterion_sets(c); }
inline bool is_candidate(const Engine& engine, const Candidate& c) { return engine.is_candidate(c); }
inline bool is_solution(const Engine& engine, const Candidate& c) { return engine.is_solution(c); }

}  // namespace lace
