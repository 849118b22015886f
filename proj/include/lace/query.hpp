#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>
#include <variant>
#include <vector>

#include "lace/core.hpp"
#include "lace/dsl.hpp"
#include "lace/similarity.hpp"

namespace lace {

// ---------------------------------------------------------------------------
// Similarity over interned constants
// ---------------------------------------------------------------------------

/// A SimilarityStore resolved against one database's constant pool.
class SimilarityIndex {
 public:
  SimilarityIndex() = default;

  SimilarityIndex(const Database& db, const SimilarityStore& store) {
    for (const auto& [key, s] : store.entries()) {
      auto a = db.find(Sort::Value, key.first);
      auto b = db.find(Sort::Value, key.second);
      if (a && b) set(*a, *b, s);
    }
  }

  void set(ConstId a, ConstId b, int score) {
    if (a == kNullConst || b == kNullConst) return;
    scores_[key(a, b)] = score;
  }

  /// Null scores 0 against everything; any other constant scores 100 against itself.
  int score(ConstId a, ConstId b) const {
    if (a == kNullConst || b == kNullConst) return 0;
    if (a == b) return 100;
    auto it = scores_.find(key(a, b));
    return it == scores_.end() ? 0 : it->second;
  }

 private:
  static std::uint64_t key(ConstId a, ConstId b) {
    if (b < a) std::swap(a, b);
    return (static_cast<std::uint64_t>(a.value) << 32) | b.value;
  }

  std::unordered_map<std::uint64_t, int> scores_;
};

// ---------------------------------------------------------------------------
// Compiled queries
// ---------------------------------------------------------------------------

class UnsafeQueryError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// How answers to free variables are read off a witness.
///
/// Definition: any constant of h(x). Anchored: only constants of h(x) that
/// are stored, in the original database, at some position of a matched fact
/// where x occurs. Both coincide on Boolean queries and under identity merges.
enum class AnswerMode : std::uint8_t { Definition, Anchored };

struct Witness {
  std::vector<std::pair<std::string, ConstSet>> h;  // per variable
  std::vector<std::uint32_t> facts;                 // extended fact chosen for each relational atom
};

class CompiledQuery {
 public:
  struct Slot {
    bool is_var = false;
    std::uint32_t var = 0;
    ConstId constant;
  };

  CompiledQuery() = default;

  /// Resolves `body` against `db`. Constants absent from the database get
  /// private ids that match nothing. Throws UnsafeQueryError when a free
  /// variable, or a variable of a similarity or inequality atom, occurs in no
  /// relational atom.
  CompiledQuery(const Database& db, const std::vector<Atom>& body, const std::vector<std::string>& free_vars) {
    next_private_ = static_cast<std::uint32_t>(db.constant_count());
    std::map<std::string, Sort> var_sort;
    for (const auto& atom : body) {
      const auto* r = std::get_if<RelationalAtom>(&atom);
      if (!r) continue;
      auto rel = db.schema().find(r->relation);
      if (!rel) throw std::invalid_argument("unknown relation " + r->relation);
      const auto& decl = db.schema().at(*rel);
      if (r->args.size() != decl.arity()) throw std::invalid_argument("arity mismatch for " + r->relation);
      RelAtom ra;
      ra.relation = *rel;
      ra.slots.push_back(slot(db, r->tid, Sort::Tid));
      if (r->tid.is_var()) var_sort.emplace(r->tid.text, Sort::Tid);
      for (std::size_t i = 0; i < r->args.size(); ++i) {
        Sort s = decl.types[i] == PosType::Obj ? Sort::Object : Sort::Value;
        ra.slots.push_back(slot(db, r->args[i], s));
        if (r->args[i].is_var()) var_sort.emplace(r->args[i].text, s);
      }
      atoms_.push_back(std::move(ra));
    }
    relational_vars_ = vars_.size();

    auto side = [&](const Term& t, const Term& other, const char* what) {
      if (t.is_var()) {
        auto idx = index_of(t.text);
        if (!idx) throw UnsafeQueryError(std::string(what) + " variable " + t.text + " occurs in no relational atom");
        return Slot{true, *idx, {}};
      }
      Sort s = Sort::Value;
      if (other.is_var() && var_sort.count(other.text)) s = var_sort.at(other.text);
      return slot(db, t, s);
    };
    for (const auto& atom : body) {
      if (const auto* n = std::get_if<InequalityAtom>(&atom)) {
        checks_.push_back({false, side(n->lhs, n->rhs, "inequality"), side(n->rhs, n->lhs, "inequality"), 0});
      } else if (const auto* s = std::get_if<SimilarityAtom>(&atom)) {
        checks_.push_back({true, side(s->lhs, s->rhs, "similarity"), side(s->rhs, s->lhs, "similarity"), s->threshold});
      }
    }

    for (const auto& name : free_vars) {
      auto idx = index_of(name);
      if (!idx) throw UnsafeQueryError("free variable " + name + " occurs in no relational atom");
      free_.push_back(*idx);
    }
    std::vector<bool> is_free(vars_.size(), false);
    for (auto f : free_) is_free[f] = true;

    // Variables shrink until their last relational occurrence, so a check can
    // run once every variable it reads is final.
    std::vector<std::size_t> last(vars_.size(), 0);
    for (std::size_t a = 0; a < atoms_.size(); ++a)
      for (const auto& s : atoms_[a].slots)
        if (s.is_var) last[s.var] = a + 1;
    schedule_.assign(atoms_.size() + 1, {});
    for (std::uint32_t c = 0; c < checks_.size(); ++c) {
      std::size_t level = 0;
      bool touches_free = false;
      for (const Slot* s : {&checks_[c].lhs, &checks_[c].rhs}) {
        if (!s->is_var) continue;
        level = std::max(level, last[s->var]);
        touches_free = touches_free || is_free[s->var];
      }
      if (touches_free) deferred_.push_back(c);
      else schedule_[level].push_back(c);
    }
    anchor_var_.assign(vars_.size(), -1);
    for (std::size_t i = 0; i < free_.size(); ++i)
      if (anchor_var_[free_[i]] < 0) anchor_var_[free_[i]] = static_cast<int>(anchor_count_++);
  }

  std::size_t arity() const { return free_.size(); }
  const std::vector<std::string>& variables() const { return vars_; }

  template <typename Visit>
  bool search(const ExtendedDatabase& ext, const SimilarityIndex& sim, AnswerMode mode, Visit&& visit) const;

 private:
  struct RelAtom {
    std::uint32_t relation = 0;
    std::vector<Slot> slots;  // slots[0] is the tid
  };

  struct Check {
    bool similarity = false;
    Slot lhs;
    Slot rhs;
    int threshold = 0;
  };

  std::optional<std::uint32_t> index_of(const std::string& name) const {
    auto it = var_index_.find(name);
    if (it == var_index_.end()) return std::nullopt;
    return it->second;
  }

  Slot slot(const Database& db, const Term& t, Sort sort) {
    if (t.is_var()) {
      auto [it, fresh] = var_index_.emplace(t.text, static_cast<std::uint32_t>(vars_.size()));
      if (fresh) vars_.push_back(t.text);
      return Slot{true, it->second, {}};
    }
    if (auto id = db.find(sort, t.text)) return Slot{false, 0, *id};
    auto [it, fresh] = private_.emplace(std::make_pair(sort, t.text), ConstId{next_private_});
    if (fresh) ++next_private_;
    return Slot{false, 0, it->second};
  }

  friend class QueryRun;

  std::vector<std::string> vars_;
  std::map<std::string, std::uint32_t> var_index_;
  std::size_t relational_vars_ = 0;
  std::vector<RelAtom> atoms_;
  std::vector<Check> checks_;
  std::vector<std::vector<std::uint32_t>> schedule_;
  std::vector<std::uint32_t> deferred_;
  std::vector<std::uint32_t> free_;
  std::vector<int> anchor_var_;
  std::size_t anchor_count_ = 0;
  std::map<std::pair<Sort, std::string>, ConstId> private_;
  std::uint32_t next_private_ = 0;
};

namespace detail {

inline ConstSet intersect(const ConstSet& a, const ConstSet& b) {
  ConstSet out;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

inline bool contains(const ConstSet& s, ConstId c) { return std::binary_search(s.begin(), s.end(), c); }

/// Disjointness with Null removed from both sides.
inline bool disjoint_ignoring_null(const ConstSet& a, const ConstSet& b) {
  auto i = a.begin(), j = b.begin();
  while (i != a.end() && j != b.end()) {
    if (*i == kNullConst) { ++i; continue; }
    if (*j == kNullConst) { ++j; continue; }
    if (*i < *j) ++i;
    else if (*j < *i) ++j;
    else return false;
  }
  return true;
}

inline bool any_similar(const ConstSet& a, const ConstSet& b, int threshold, const SimilarityIndex& sim) {
  for (auto x : a) {
    if (x == kNullConst) continue;
    for (auto y : b) {
      if (y == kNullConst) continue;
      if (sim.score(x, y) >= threshold) return true;
    }
  }
  return false;
}

}  // namespace detail

/// One backtracking evaluation of a compiled query.
class QueryRun {
 public:
  using Visitor = std::vector<ConstId>;

  QueryRun(const CompiledQuery& q, const ExtendedDatabase& ext, const SimilarityIndex& sim, AnswerMode mode)
      : q_(q), ext_(ext), sim_(sim), mode_(mode), h_(q.vars_.size()), anchors_(q.anchor_count_),
        chosen_(q.atoms_.size(), 0) {}

  /// Calls visit(tuple, run) for every answer tuple found (possibly with
  /// repetitions); stops as soon as visit returns false.
  template <typename Visit>
  void run(Visit&& visit) {
    if (!checks_pass(0)) return;
    descend(0, visit);
  }

  Witness witness() const {
    Witness w;
    for (std::size_t v = 0; v < q_.vars_.size(); ++v) w.h.emplace_back(q_.vars_[v], h_[v]);
    w.facts = chosen_;
    return w;
  }

 private:
  ConstSet value_of(const CompiledQuery::Slot& s) const {
    if (s.is_var) return h_[s.var];
    return ConstSet{s.constant};
  }

  bool check(const CompiledQuery::Check& c) const {
    ConstSet a = value_of(c.lhs), b = value_of(c.rhs);
    if (c.similarity) return detail::any_similar(a, b, c.threshold, sim_);
    return detail::disjoint_ignoring_null(a, b);
  }

  bool checks_pass(std::size_t level) const {
    for (auto c : q_.schedule_[level])
      if (!check(q_.checks_[c])) return false;
    return true;
  }

  template <typename Visit>
  bool descend(std::size_t level, Visit& visit) {
    if (level == q_.atoms_.size()) return answers(visit);
    const auto& atom = q_.atoms_[level];
    const Database& db = ext_.database();
    for (auto fi : ext_.facts_of(atom.relation)) {
      const auto& ef = ext_.at(fi);
      std::vector<std::pair<std::uint32_t, ConstSet>> saved;
      std::vector<std::pair<int, std::size_t>> anchor_marks;
      bool ok = true;
      for (std::size_t i = 0; i < atom.slots.size() && ok; ++i) {
        const auto& s = atom.slots[i];
        const auto& set = ef.sets[i];
        if (!s.is_var) {
          ok = detail::contains(set, s.constant);
          continue;
        }
        saved.emplace_back(s.var, h_[s.var]);
        h_[s.var] = h_[s.var].empty() ? set : detail::intersect(h_[s.var], set);
        ok = !h_[s.var].empty();
        int av = q_.anchor_var_[s.var];
        if (ok && av >= 0) {
          const auto& fact = db.facts()[ef.source];
          anchor_marks.emplace_back(av, anchors_[static_cast<std::size_t>(av)].size());
          anchors_[static_cast<std::size_t>(av)].push_back(i == 0 ? fact.tid : fact.args[i - 1]);
        }
      }
      bool keep_going = true;
      if (ok && checks_pass(level + 1)) {
        chosen_[level] = fi;
        keep_going = descend(level + 1, visit);
      }
      for (auto it = anchor_marks.rbegin(); it != anchor_marks.rend(); ++it)
        anchors_[static_cast<std::size_t>(it->first)].resize(it->second);
      for (auto it = saved.rbegin(); it != saved.rend(); ++it) h_[it->first] = std::move(it->second);
      if (!keep_going) return false;
    }
    return true;
  }

  template <typename Visit>
  bool answers(Visit& visit) {
    const auto& free = q_.free_;
    std::vector<ConstSet> options(free.size());
    for (std::size_t i = 0; i < free.size(); ++i) {
      options[i] = h_[free[i]];
      if (mode_ == AnswerMode::Anchored) {
        ConstSet anchor = anchors_[static_cast<std::size_t>(q_.anchor_var_[free[i]])];
        std::sort(anchor.begin(), anchor.end());
        anchor.erase(std::unique(anchor.begin(), anchor.end()), anchor.end());
        options[i] = detail::intersect(options[i], anchor);
      }
      if (options[i].empty()) return true;
    }
    std::vector<ConstId> tuple(free.size());
    return product(0, options, tuple, visit);
  }

  template <typename Visit>
  bool product(std::size_t i, const std::vector<ConstSet>& options, std::vector<ConstId>& tuple, Visit& visit) {
    const auto& free = q_.free_;
    if (i == free.size()) {
      std::vector<std::pair<std::uint32_t, ConstSet>> saved;
      for (std::size_t k = 0; k < free.size(); ++k) {
        if (h_[free[k]].size() == 1 && h_[free[k]][0] == tuple[k]) continue;
        saved.emplace_back(free[k], h_[free[k]]);
        h_[free[k]] = ConstSet{tuple[k]};
      }
      bool consistent = true;
      for (std::size_t k = 0; k < free.size() && consistent; ++k) consistent = h_[free[k]] == ConstSet{tuple[k]};
      bool ok = consistent;
      for (std::size_t c = 0; ok && c < q_.deferred_.size(); ++c) ok = check(q_.checks_[q_.deferred_[c]]);
      bool keep_going = true;
      if (ok) keep_going = visit(tuple, *this);
      for (auto it = saved.rbegin(); it != saved.rend(); ++it) h_[it->first] = std::move(it->second);
      return keep_going;
    }
    for (auto c : options[i]) {
      tuple[i] = c;
      if (!product(i + 1, options, tuple, visit)) return false;
    }
    return true;
  }

  const CompiledQuery& q_;
  const ExtendedDatabase& ext_;
  const SimilarityIndex& sim_;
  AnswerMode mode_;
  std::vector<ConstSet> h_;
  std::vector<std::vector<ConstId>> anchors_;
  std::vector<std::uint32_t> chosen_;
};

template <typename Visit>
bool CompiledQuery::search(const ExtendedDatabase& ext, const SimilarityIndex& sim, AnswerMode mode,
                           Visit&& visit) const {
  bool stopped = false;
  QueryRun run(*this, ext, sim, mode);
  run.run([&](const std::vector<ConstId>& tuple, const QueryRun& r) {
    if (!visit(tuple, r)) {
      stopped = true;
      return false;
    }
    return true;
  });
  return stopped;
}

/// All answer tuples of `q` over `ext`.
inline std::set<std::vector<ConstId>> eval(const CompiledQuery& q, const ExtendedDatabase& ext,
                                           const SimilarityIndex& sim, AnswerMode mode = AnswerMode::Definition) {
  std::set<std::vector<ConstId>> out;
  q.search(ext, sim, mode, [&](const std::vector<ConstId>& t, const QueryRun&) {
    out.insert(t);
    return true;
  });
  return out;
}

/// True iff the query (free variables ignored) has a witness.
inline bool eval_boolean(const CompiledQuery& q, const ExtendedDatabase& ext, const SimilarityIndex& sim) {
  return q.search(ext, sim, AnswerMode::Definition, [](const std::vector<ConstId>&, const QueryRun&) {
    return false;
  });
}

inline std::optional<Witness> find_witness(const CompiledQuery& q, const ExtendedDatabase& ext,
                                           const SimilarityIndex& sim) {
  std::optional<Witness> out;
  q.search(ext, sim, AnswerMode::Definition, [&](const std::vector<ConstId>&, const QueryRun& r) {
    out = r.witness();
    return false;
  });
  return out;
}

/// Convenience overloads compiling the body on the fly.
inline std::set<std::vector<ConstId>> eval(const std::vector<Atom>& body, const std::vector<std::string>& free_vars,
                                           const ExtendedDatabase& ext, const SimilarityIndex& sim,
                                           AnswerMode mode = AnswerMode::Definition) {
  return eval(CompiledQuery(ext.database(), body, free_vars), ext, sim, mode);
}

inline bool eval_boolean(const std::vector<Atom>& body, const ExtendedDatabase& ext, const SimilarityIndex& sim) {
  return eval_boolean(CompiledQuery(ext.database(), body, {}), ext, sim);
}

// ---------------------------------------------------------------------------
// Similarity store construction
// ---------------------------------------------------------------------------

/// (relation, position) pairs read by some similarity atom of the specification.
inline std::set<std::pair<std::uint32_t, std::uint32_t>> similarity_positions(const Specification& spec) {
  std::set<std::pair<std::uint32_t, std::uint32_t>> out;
  auto scan = [&](const std::vector<Atom>& body) {
    std::set<std::string> vars;
    for (const auto& a : body)
      if (const auto* s = std::get_if<SimilarityAtom>(&a)) {
        if (s->lhs.is_var()) vars.insert(s->lhs.text);
        if (s->rhs.is_var()) vars.insert(s->rhs.text);
      }
    for (const auto& a : body) {
      const auto* r = std::get_if<RelationalAtom>(&a);
      if (!r) continue;
      auto rel = spec.schema.find(r->relation);
      if (!rel) continue;
      for (std::size_t i = 0; i < r->args.size(); ++i)
        if (r->args[i].is_var() && vars.count(r->args[i].text))
          out.emplace(*rel, static_cast<std::uint32_t>(i + 1));
    }
  };
  for (const auto& r : spec.object_rules) scan(r.body);
  for (const auto& r : spec.value_rules) scan(r.body);
  for (const auto& d : spec.constraints) scan(d.body);
  return out;
}

/// Scores all pairs of non-Null values found at similarity-referenced
/// positions, then applies `overrides` on top.
inline SimilarityStore build_sim_store(const Database& db, const Specification& spec, const SimConfig& cfg = {},
                                       const SimilarityStore& overrides = {}) {
  std::vector<std::string> values;
  auto positions = similarity_positions(spec);
  for (const auto& f : db.facts()) {
    const auto& decl = db.schema().at(f.relation);
    auto rel = spec.schema.find(decl.name);
    if (!rel) continue;
    for (std::size_t i = 0; i < f.args.size(); ++i)
      if (positions.count({*rel, static_cast<std::uint32_t>(i + 1)}) && !db.is_null(f.args[i]))
        values.push_back(db.text(f.args[i]));
  }
  SimilarityStore store = score_all_pairs(std::move(values), cfg);
  store.overlay(overrides);
  return store;
}

}  // namespace lace
