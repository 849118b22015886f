#pragma once

#include <array>
#include <cctype>
#include <cstdint>
#include <istream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "lace/core.hpp"
#include "lace/dsl.hpp"
#include "lace/semantics.hpp"

namespace lace {

struct Literal {
  int var = 1;  // 1-based
  bool positive = true;

  auto operator<=>(const Literal&) const = default;
};

using Clause3 = std::array<Literal, 3>;

struct Cnf3 {
  int variables = 0;
  std::vector<Clause3> clauses;

  void validate() const {
    if (variables < 1) throw std::invalid_argument("cnf: at least one variable required");
    if (clauses.empty()) throw std::invalid_argument("cnf: empty clause list");
    for (const auto& c : clauses)
      for (const auto& l : c)
        if (l.var < 1 || l.var > variables) throw std::invalid_argument("cnf: literal variable out of range");
  }
};

/// Either a unit x_h (no body) or a clause ¬x_j ∨ ¬x_k ∨ x_h.
struct HornClause {
  std::optional<std::pair<int, int>> body;
  int head = 1;
};

struct HornInput {
  int variables = 0;
  std::vector<HornClause> clauses;
  int query = 1;

  void validate() const {
    auto in_range = [&](int v) { return v >= 1 && v <= variables; };
    if (!in_range(query)) throw std::invalid_argument("horn: query variable out of range");
    for (const auto& c : clauses) {
      if (!in_range(c.head)) throw std::invalid_argument("horn: head variable out of range");
      if (c.body && (!in_range(c.body->first) || !in_range(c.body->second)))
        throw std::invalid_argument("horn: body variable out of range");
    }
  }
};

/// A generated instance with its distinguished candidate.
struct GadgetInstance {
  Database db;
  Specification spec;
  Candidate baseline;
};

// ---------------------------------------------------------------------------
// Oracles
// ---------------------------------------------------------------------------

inline bool sat_oracle(const Cnf3& phi) {
  if (phi.variables > 20) throw std::length_error("sat_oracle: too many variables");
  for (std::uint32_t mask = 0; mask < (1u << phi.variables); ++mask) {
    bool all = true;
    for (const auto& c : phi.clauses) {
      bool sat = false;
      for (const auto& l : c) sat = sat || (((mask >> (l.var - 1)) & 1u) != 0) == l.positive;
      if (!sat) {
        all = false;
        break;
      }
    }
    if (all) return true;
  }
  return false;
}

/// F ⊨ x_w, by least-model computation.
inline bool horn_entails(const HornInput& in) {
  if (in.variables > 10000) throw std::length_error("horn_entails: too many variables");
  std::vector<bool> truth(static_cast<std::size_t>(in.variables) + 1, false);
  bool changed = true;
  while (changed) {
    changed = false;
    for (const auto& c : in.clauses) {
      if (truth[static_cast<std::size_t>(c.head)]) continue;
      if (!c.body || (truth[static_cast<std::size_t>(c.body->first)] && truth[static_cast<std::size_t>(c.body->second)])) {
        truth[static_cast<std::size_t>(c.head)] = true;
        changed = true;
      }
    }
  }
  return truth[static_cast<std::size_t>(in.query)];
}

// ---------------------------------------------------------------------------
// Input formats
// ---------------------------------------------------------------------------

/// DIMACS CNF; every clause must have exactly three literals.
inline Cnf3 parse_dimacs(std::istream& in) {
  Cnf3 out;
  bool header = false;
  std::size_t declared = 0;
  std::vector<Literal> cur;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::istringstream ls(line);
    std::string first;
    if (!(ls >> first) || first[0] == 'c' || first[0] == '%') continue;
    if (first == "p") {
      std::string fmt;
      if (!(ls >> fmt >> out.variables >> declared) || fmt != "cnf")
        throw std::invalid_argument("dimacs line " + std::to_string(lineno) + ": bad problem line");
      header = true;
      continue;
    }
    if (!header) throw std::invalid_argument("dimacs: clause before problem line");
    std::istringstream tokens(line);
    long long v;
    while (tokens >> v) {
      if (v == 0) {
        if (cur.size() != 3)
          throw std::invalid_argument("dimacs line " + std::to_string(lineno) + ": clause of width " +
                                      std::to_string(cur.size()) + ", expected 3");
        out.clauses.push_back({cur[0], cur[1], cur[2]});
        cur.clear();
      } else {
        cur.push_back({static_cast<int>(v < 0 ? -v : v), v > 0});
      }
    }
    if (!tokens.eof()) throw std::invalid_argument("dimacs line " + std::to_string(lineno) + ": bad token");
  }
  if (!header) throw std::invalid_argument("dimacs: missing problem line");
  if (!cur.empty()) throw std::invalid_argument("dimacs: unterminated clause");
  if (declared != out.clauses.size())
    throw std::invalid_argument("dimacs: problem line declares " + std::to_string(declared) + " clauses, found " +
                                std::to_string(out.clauses.size()));
  out.validate();
  return out;
}

inline std::string to_dimacs(const Cnf3& phi) {
  std::ostringstream os;
  os << "p cnf " << phi.variables << ' ' << phi.clauses.size() << '\n';
  for (const auto& c : phi.clauses) {
    for (const auto& l : c) os << (l.positive ? l.var : -l.var) << ' ';
    os << "0\n";
  }
  return os.str();
}

/// Line format: `unit x1`, `clause -x1 -x2 x3`, `query x2`; `#` comments.
inline HornInput parse_horn(std::istream& in) {
  HornInput out;
  bool have_query = false;
  std::string line;
  std::size_t lineno = 0;
  auto var_of = [&](std::string tok, bool negated) {
    std::string where = "horn line " + std::to_string(lineno) + ": ";
    if (negated) {
      if (tok.empty() || tok[0] != '-') throw std::invalid_argument(where + "body literal must be negative");
      tok.erase(0, 1);
    }
    if (tok.size() < 2 || tok[0] != 'x') throw std::invalid_argument(where + "bad variable " + tok);
    int v = 0;
    for (std::size_t i = 1; i < tok.size(); ++i) {
      if (!std::isdigit(static_cast<unsigned char>(tok[i]))) throw std::invalid_argument(where + "bad variable " + tok);
      v = v * 10 + (tok[i] - '0');
      if (v > 1000000) throw std::invalid_argument(where + "variable index too large");
    }
    if (v < 1) throw std::invalid_argument(where + "bad variable " + tok);
    out.variables = std::max(out.variables, v);
    return v;
  };
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::vector<std::string> toks;
    for (std::string t; ls >> t;) toks.push_back(t);
    if (toks.empty()) continue;
    std::string where = "horn line " + std::to_string(lineno) + ": ";
    if (toks[0] == "unit" && toks.size() == 2) {
      out.clauses.push_back({std::nullopt, var_of(toks[1], false)});
    } else if (toks[0] == "clause" && toks.size() == 4) {
      int j = var_of(toks[1], true), k = var_of(toks[2], true), h = var_of(toks[3], false);
      out.clauses.push_back({std::make_pair(j, k), h});
    } else if (toks[0] == "query" && toks.size() == 2) {
      if (have_query) throw std::invalid_argument(where + "duplicate query");
      out.query = var_of(toks[1], false);
      have_query = true;
    } else {
      throw std::invalid_argument(where + "expected 'unit', 'clause' or 'query'");
    }
  }
  if (!have_query) throw std::invalid_argument("horn: missing query line");
  out.validate();
  return out;
}

inline std::string to_horn_text(const HornInput& in) {
  std::ostringstream os;
  for (const auto& c : in.clauses) {
    if (c.body) os << "clause -x" << c.body->first << " -x" << c.body->second << " x" << c.head << '\n';
    else os << "unit x" << c.head << '\n';
  }
  os << "query x" << in.query << '\n';
  return os.str();
}

// ---------------------------------------------------------------------------
// Generators
// ---------------------------------------------------------------------------

namespace detail {

inline std::string var_name(int i) { return "x" + std::to_string(i); }
inline std::string primed(int i) { return "x" + std::to_string(i) + "'"; }

/// Clause relation: one letter per literal, f for negative, t for positive.
inline std::string clause_relation(const Clause3& c) {
  std::string name = "R_";
  for (const auto& l : c) name += l.positive ? 't' : 'f';
  return name;
}

inline const char* kClauseShapes[] = {"fff", "fft", "ftf", "ftt", "tff", "tft", "ttf", "ttt"};

inline std::string sat_schema_text() {
  std::string s = "schema V(a: obj).\nschema T(a: obj).\nschema F(a: obj).\nschema B(a: obj).\n";
  for (const char* shape : kClauseShapes) s += std::string("schema R_") + shape + "(a1: obj, a2: obj, a3: obj).\n";
  return s;
}

/// δ1…δ8: a clause is violated when every literal is false.
inline std::string clause_constraints(const std::string& extra) {
  std::string s;
  int k = 1;
  for (const char* shape : kClauseShapes) {
    s += "dc d" + std::to_string(k++) + ": R_" + shape + "(y1, y2, y3)";
    for (int i = 0; i < 3; ++i) s += std::string(", ") + (shape[i] == 'f' ? "T" : "F") + "(y" + std::to_string(i + 1) + ")";
    s += extra + ".\n";
  }
  return s;
}

inline void add_sat_facts(DatabaseBuilder& b, const Cnf3& phi) {
  for (int i = 1; i <= phi.variables; ++i) b.add("V", {var_name(i)});
  b.add("T", {"1"});
  b.add("F", {"0"});
  b.add("B", {"0"});
  b.add("B", {"1"});
  for (const auto& c : phi.clauses) b.add(clause_relation(c), {var_name(c[0].var), var_name(c[1].var), var_name(c[2].var)});
}

inline ObjRel close_objects(const Database& db, const std::vector<std::pair<std::string, std::string>>& pairs) {
  std::vector<std::pair<ConstId, ConstId>> ids;
  for (const auto& [a, b] : pairs) ids.emplace_back(*db.find(Sort::Object, a), *db.find(Sort::Object, b));
  return ObjRel::close(db.objects(), ids);
}

}  // namespace detail

/// Specification text of the unrestricted 3SAT gadget.
inline std::string sat_gadget_spec_text() {
  return detail::sat_schema_text() + "soft obj sigma: V(x), B(y) => EqO(x, y).\n" + "dc d0: F(y), T(y).\n" +
         detail::clause_constraints("") + "dc d9: V(v), B(v), V(x), T(y), F(z), x != y, x != z.\n";
}

inline std::string sat_minA_gadget_spec_text() {
  return detail::sat_schema_text() + "schema H(a1: obj, a2: obj).\n" +
         "soft obj sigma: V(x), B(y) => EqO(x, y).\n" + "soft obj sigma1: H(x, y) => EqO(x, y).\n" +
         "dc d0: F(y), T(y).\n" + detail::clause_constraints(", H(z, z)");
}

inline std::string sat_maxE_gadget_spec_text() {
  return detail::sat_schema_text() + "schema H(a1: obj, a2: obj).\nschema Vp(a: obj).\nschema P(a1: obj, a2: obj).\n" +
         "soft obj sigma: V(x), B(y) => EqO(x, y).\n" + "soft obj sigma1: H(x, y) => EqO(x, y).\n" +
         "soft obj sigma2: Vp(x), B(y) => EqO(x, y).\n" + "dc d0: F(y), T(y).\n" +
         detail::clause_constraints(", H(z, z)") + "dc d9: P(y, y).\n";
}

inline std::string horn_gadget_spec_text() {
  return "schema R(l: obj, a1: obj, a2: obj, a3: obj).\nschema C(a1: obj, a2: obj).\nschema W(a1: obj, a2: obj).\n"
         "soft obj sigma: C(x, y) => EqO(x, y).\n"
         "hard obj rho: R(zl, z1, z2, x), R(zl, z1, z2, y), C(z, z) => EqO(x, y).\n"
         "dc delta: W(y, y).\n";
}

/// Unrestricted gadget; the baseline is the identity.
inline GadgetInstance gen_3sat(const Cnf3& phi) {
  phi.validate();
  Specification spec = parse_spec(sat_gadget_spec_text());
  DatabaseBuilder b(spec.schema);
  detail::add_sat_facts(b, phi);
  Database db = std::move(b).build();
  Candidate base = Candidate::identity(db);
  return {std::move(db), std::move(spec), std::move(base)};
}

/// Restricted gadget for minAC/minVC; baseline merges every variable with 0.
inline GadgetInstance gen_3sat_restricted_minA(const Cnf3& phi) {
  phi.validate();
  Specification spec = parse_spec(sat_minA_gadget_spec_text());
  DatabaseBuilder b(spec.schema);
  detail::add_sat_facts(b, phi);
  b.add("H", {"c1", "c2"});
  Database db = std::move(b).build();
  std::vector<std::pair<std::string, std::string>> pairs;
  for (int i = 1; i <= phi.variables; ++i) pairs.emplace_back(detail::var_name(i), "0");
  Candidate base{detail::close_objects(db, pairs), db.identity_cells()};
  return {std::move(db), std::move(spec), std::move(base)};
}

/// Restricted gadget for maxEC/maxSC; baseline merges variables with 0 and
/// their copies with 1.
inline GadgetInstance gen_3sat_restricted_maxE(const Cnf3& phi) {
  phi.validate();
  Specification spec = parse_spec(sat_maxE_gadget_spec_text());
  DatabaseBuilder b(spec.schema);
  detail::add_sat_facts(b, phi);
  b.add("H", {"c1", "c2"});
  for (int i = 1; i <= phi.variables; ++i) b.add("Vp", {detail::primed(i)});
  for (int i = 1; i <= phi.variables; ++i) b.add("P", {detail::var_name(i), detail::primed(i)});
  Database db = std::move(b).build();
  std::vector<std::pair<std::string, std::string>> pairs;
  for (int i = 1; i <= phi.variables; ++i) {
    pairs.emplace_back(detail::var_name(i), "0");
    pairs.emplace_back(detail::primed(i), "1");
  }
  Candidate base{detail::close_objects(db, pairs), db.identity_cells()};
  return {std::move(db), std::move(spec), std::move(base)};
}

/// Horn3SAT gadget; the baseline is the identity.
inline GadgetInstance gen_horn(const HornInput& in) {
  in.validate();
  Specification spec = parse_spec(horn_gadget_spec_text());
  DatabaseBuilder b(spec.schema);
  b.add("C", {"c1", "c2"});
  b.add("W", {detail::var_name(in.query), detail::primed(in.query)});
  for (std::size_t i = 0; i < in.clauses.size(); ++i) {
    const auto& c = in.clauses[i];
    std::string l = "l" + std::to_string(i + 1);
    if (c.body) {
      b.add("R", {l, detail::var_name(c.body->first), detail::var_name(c.body->second), detail::var_name(c.head)});
      b.add("R", {l, detail::primed(c.body->first), detail::primed(c.body->second), detail::primed(c.head)});
    } else {
      b.add("R", {l, "t", "t", detail::var_name(c.head)});
      b.add("R", {l, "t", "t", detail::primed(c.head)});
    }
  }
  Database db = std::move(b).build();
  Candidate base = Candidate::identity(db);
  return {std::move(db), std::move(spec), std::move(base)};
}

}  // namespace lace
