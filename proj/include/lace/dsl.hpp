#pragma once

#include <cctype>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "lace/core.hpp"

namespace lace {

// ---------------------------------------------------------------------------
// Abstract syntax
// ---------------------------------------------------------------------------

struct Term {
  enum class Kind : std::uint8_t { Variable, Constant };
  Kind kind = Kind::Variable;
  std::string text;  // variable name, or constant text

  static Term var(std::string name) { return {Kind::Variable, std::move(name)}; }
  static Term constant(std::string text) { return {Kind::Constant, std::move(text)}; }

  bool is_var() const { return kind == Kind::Variable; }
  bool is_anonymous() const { return is_var() && !text.empty() && text[0] == '_'; }

  bool operator==(const Term&) const = default;
};

struct RelationalAtom {
  std::string relation;
  Term tid;
  std::vector<Term> args;  // args[i-1] is position i

  bool operator==(const RelationalAtom&) const = default;
};

/// sim(lhs, rhs) >= threshold, threshold in [0, 100].
struct SimilarityAtom {
  Term lhs;
  Term rhs;
  int threshold = 100;

  bool operator==(const SimilarityAtom&) const = default;
};

struct InequalityAtom {
  Term lhs;
  Term rhs;

  bool operator==(const InequalityAtom&) const = default;
};

using Atom = std::variant<RelationalAtom, SimilarityAtom, InequalityAtom>;

enum class RuleKind : std::uint8_t { Hard, Soft };

struct ObjectRule {
  std::string label;
  RuleKind kind = RuleKind::Soft;
  std::vector<Atom> body;
  std::string x;
  std::string y;

  bool operator==(const ObjectRule&) const = default;
};

struct CellRef {
  std::string tid_var;
  std::uint32_t position = 0;

  bool operator==(const CellRef&) const = default;
};

struct ValueRule {
  std::string label;
  RuleKind kind = RuleKind::Soft;
  std::vector<Atom> body;
  CellRef lhs;
  CellRef rhs;

  bool operator==(const ValueRule&) const = default;
};

struct DenialConstraint {
  std::string label;
  std::vector<Atom> body;

  bool operator==(const DenialConstraint&) const = default;
};

/// An ER specification: object rules, value rules and denial constraints,
/// together with the schema they are written against.
struct Specification {
  Schema schema;
  std::vector<ObjectRule> object_rules;
  std::vector<ValueRule> value_rules;
  std::vector<DenialConstraint> constraints;

  /// True iff no denial constraint contains an inequality atom.
  bool restricted() const {
    for (const auto& dc : constraints)
      for (const auto& a : dc.body)
        if (std::holds_alternative<InequalityAtom>(a)) return false;
    return true;
  }

  bool operator==(const Specification& o) const {
    return schema.relations() == o.schema.relations() && object_rules == o.object_rules &&
           value_rules == o.value_rules && constraints == o.constraints;
  }
};

struct SourceLoc {
  std::size_t line = 1;
  std::size_t column = 1;
};

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, SourceLoc loc)
      : std::runtime_error(std::to_string(loc.line) + ":" + std::to_string(loc.column) + ": " + what),
        loc_(loc) {}

  SourceLoc location() const { return loc_; }

 private:
  SourceLoc loc_;
};

struct Diagnostic {
  std::string label;
  std::string message;
};

// ---------------------------------------------------------------------------
// Shape validation
// ---------------------------------------------------------------------------

namespace detail {

struct Occurrence {
  std::string relation;
  std::size_t position;  // 0 = tid
  PosType type;          // meaningless for position 0
};

inline void collect_occurrences(const Schema& schema, const std::vector<Atom>& body,
                                std::map<std::string, std::vector<Occurrence>>& occ,
                                std::vector<std::string>& problems) {
  for (const auto& atom : body) {
    const auto* rel = std::get_if<RelationalAtom>(&atom);
    if (!rel) continue;
    auto idx = schema.find(rel->relation);
    if (!idx) {
      problems.push_back("unknown relation " + rel->relation);
      continue;
    }
    const auto& decl = schema.at(*idx);
    if (rel->args.size() != decl.arity()) {
      problems.push_back("relation " + rel->relation + " expects " + std::to_string(decl.arity()) +
                         " arguments, got " + std::to_string(rel->args.size()));
      continue;
    }
    if (rel->tid.is_var()) occ[rel->tid.text].push_back({rel->relation, 0, PosType::Obj});
    for (std::size_t i = 0; i < rel->args.size(); ++i)
      if (rel->args[i].is_var()) occ[rel->args[i].text].push_back({rel->relation, i + 1, decl.types[i]});
  }
}

inline void check_body(const Schema& schema, const std::vector<Atom>& body,
                       std::map<std::string, std::vector<Occurrence>>& occ, std::vector<std::string>& problems) {
  collect_occurrences(schema, body, occ, problems);
  for (const auto& [name, list] : occ) {
    bool tid = false, arg = false;
    for (const auto& o : list) (o.position == 0 ? tid : arg) = true;
    if (tid && arg) problems.push_back("tid variable " + name + " used outside position 0");
  }
  auto check_bound = [&](const Term& t, const char* what) {
    if (!t.is_var()) return;
    if (!occ.count(t.text)) problems.push_back(std::string(what) + " variable " + t.text + " occurs in no relational atom");
  };
  for (const auto& atom : body) {
    if (const auto* s = std::get_if<SimilarityAtom>(&atom)) {
      if (s->threshold < 0 || s->threshold > 100)
        problems.push_back("similarity threshold out of range [0,100]");
      for (const Term* t : {&s->lhs, &s->rhs}) {
        check_bound(*t, "similarity");
        if (!t->is_var() || !occ.count(t->text)) continue;
        for (const auto& o : occ.at(t->text))
          if (o.position == 0 || o.type != PosType::Val) {
            problems.push_back("similarity atom over object position: " + t->text);
            break;
          }
      }
    } else if (const auto* n = std::get_if<InequalityAtom>(&atom)) {
      check_bound(n->lhs, "inequality");
      check_bound(n->rhs, "inequality");
    }
  }
}

}  // namespace detail

/// Checks every shape condition on rules and constraints; one diagnostic per
/// violation, empty when the specification is well formed.
inline std::vector<Diagnostic> validate_rule_shapes(const Specification& spec) {
  std::vector<Diagnostic> out;
  std::set<std::string> labels;
  auto add_label = [&](const std::string& label) {
    if (!labels.insert(label).second) out.push_back({label, "duplicate label " + label});
  };
  auto emit = [&](const std::string& label, const std::vector<std::string>& problems) {
    for (const auto& p : problems) out.push_back({label, p});
  };

  for (const auto& r : spec.object_rules) {
    add_label(r.label);
    std::map<std::string, std::vector<detail::Occurrence>> occ;
    std::vector<std::string> problems;
    detail::check_body(spec.schema, r.body, occ, problems);
    for (const auto& head : {r.x, r.y}) {
      auto it = occ.find(head);
      if (it == occ.end()) {
        problems.push_back("head variable " + head + " does not occur in the body");
        continue;
      }
      for (const auto& o : it->second)
        if (o.position == 0 || o.type != PosType::Obj) {
          problems.push_back("head variable " + head + " occurs in a non-object position of " + o.relation);
          break;
        }
    }
    emit(r.label, problems);
  }

  for (const auto& r : spec.value_rules) {
    add_label(r.label);
    std::map<std::string, std::vector<detail::Occurrence>> occ;
    std::vector<std::string> problems;
    detail::check_body(spec.schema, r.body, occ, problems);
    for (const auto* ref : {&r.lhs, &r.rhs}) {
      auto it = occ.find(ref->tid_var);
      if (it == occ.end()) {
        problems.push_back("head tid variable " + ref->tid_var + " does not occur in the body");
        continue;
      }
      std::size_t tid_uses = 0;
      const detail::Occurrence* at0 = nullptr;
      for (const auto& o : it->second)
        if (o.position == 0) {
          ++tid_uses;
          at0 = &o;
        }
      if (tid_uses != 1 || it->second.size() != 1) {
        problems.push_back("tid variable " + ref->tid_var + " must occur exactly once, in position 0");
        continue;
      }
      const auto& decl = spec.schema.at(*spec.schema.find(at0->relation));
      if (ref->position == 0 || ref->position > decl.arity() || decl.type_at(ref->position) != PosType::Val)
        problems.push_back("cell " + ref->tid_var + "." + std::to_string(ref->position) +
                           " is not a value position of " + decl.name);
    }
    // Two distinct head references to the same tid variable count as one use.
    emit(r.label, problems);
  }

  for (const auto& dc : spec.constraints) {
    add_label(dc.label);
    std::map<std::string, std::vector<detail::Occurrence>> occ;
    std::vector<std::string> problems;
    detail::check_body(spec.schema, dc.body, occ, problems);
    emit(dc.label, problems);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Printer
// ---------------------------------------------------------------------------

namespace detail {

inline std::string quote(std::string_view s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  out += '"';
  return out;
}

inline std::string term_text(const Term& t) {
  if (t.is_anonymous()) return "_";
  if (t.is_var()) return t.text;
  return quote(t.text);
}

inline std::string atom_text(const Atom& a) {
  std::ostringstream os;
  std::visit(
      [&](const auto& at) {
        using A = std::decay_t<decltype(at)>;
        if constexpr (std::is_same_v<A, RelationalAtom>) {
          os << at.relation;
          if (!at.tid.is_anonymous()) os << '[' << term_text(at.tid) << ']';
          os << '(';
          for (std::size_t i = 0; i < at.args.size(); ++i) os << (i ? ", " : "") << term_text(at.args[i]);
          os << ')';
        } else if constexpr (std::is_same_v<A, SimilarityAtom>) {
          os << "sim(" << term_text(at.lhs) << ", " << term_text(at.rhs) << ") >= " << at.threshold;
        } else {
          os << term_text(at.lhs) << " != " << term_text(at.rhs);
        }
      },
      a);
  return os.str();
}

inline std::string body_text(const std::vector<Atom>& body) {
  std::string out;
  for (std::size_t i = 0; i < body.size(); ++i) {
    if (i) out += ", ";
    out += atom_text(body[i]);
  }
  return out;
}

}  // namespace detail

inline std::string schema_to_text(const Schema& schema) {
  std::ostringstream os;
  for (const auto& rel : schema.relations()) {
    os << "schema " << rel.name << '(';
    for (std::size_t i = 0; i < rel.arity(); ++i) {
      std::string attr = i < rel.attributes.size() && !rel.attributes[i].empty() ? rel.attributes[i]
                                                                                 : "a" + std::to_string(i + 1);
      os << (i ? ", " : "") << attr << ": " << (rel.types[i] == PosType::Obj ? "obj" : "val");
    }
    os << ").\n";
  }
  return os.str();
}

/// Rules and constraints only, one statement per line.
inline std::string rules_to_text(const Specification& spec) {
  std::ostringstream os;
  auto kind = [](RuleKind k) { return k == RuleKind::Hard ? "hard" : "soft"; };
  for (const auto& r : spec.object_rules)
    os << kind(r.kind) << " obj " << r.label << ": " << detail::body_text(r.body) << " => EqO(" << r.x << ", " << r.y
       << ").\n";
  for (const auto& r : spec.value_rules)
    os << kind(r.kind) << " val " << r.label << ": " << detail::body_text(r.body) << " => EqV(" << r.lhs.tid_var << '.'
       << r.lhs.position << ", " << r.rhs.tid_var << '.' << r.rhs.position << ").\n";
  for (const auto& dc : spec.constraints) os << "dc " << dc.label << ": " << detail::body_text(dc.body) << ".\n";
  return os.str();
}

inline std::string to_text(const Specification& spec) { return schema_to_text(spec.schema) + rules_to_text(spec); }

// ---------------------------------------------------------------------------
// Parser
// ---------------------------------------------------------------------------

namespace detail {

enum class Tok : std::uint8_t { Ident, Number, String, Punct, End };

struct Token {
  Tok kind = Tok::End;
  std::string text;
  SourceLoc loc;
};

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    while (true) {
      skip_space();
      SourceLoc loc{line_, col_};
      if (pos_ >= src_.size()) {
        out.push_back({Tok::End, "", loc});
        return out;
      }
      char c = src_[pos_];
      if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
        std::string id;
        while (pos_ < src_.size() && (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_' ||
                                      src_[pos_] == '\''))
          id += advance();
        out.push_back({Tok::Ident, id, loc});
      } else if (std::isdigit(static_cast<unsigned char>(c))) {
        std::string num;
        while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) num += advance();
        out.push_back({Tok::Number, num, loc});
      } else if (c == '"') {
        advance();
        std::string s;
        while (true) {
          if (pos_ >= src_.size()) throw ParseError("unterminated string literal", loc);
          char d = advance();
          if (d == '"') break;
          if (d == '\\') {
            if (pos_ >= src_.size()) throw ParseError("unterminated string literal", loc);
            d = advance();
          }
          s += d;
        }
        out.push_back({Tok::String, s, loc});
      } else {
        std::string two = std::string(src_.substr(pos_, 2));
        if (two == "=>" || two == ">=" || two == "!=") {
          advance();
          advance();
          out.push_back({Tok::Punct, two, loc});
        } else if (std::string_view("()[],.:").find(c) != std::string_view::npos) {
          out.push_back({Tok::Punct, std::string(1, advance()), loc});
        } else {
          throw ParseError(std::string("unexpected character '") + c + "'", loc);
        }
      }
    }
  }

 private:
  char advance() {
    char c = src_[pos_++];
    if (c == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    return c;
  }

  void skip_space() {
    while (pos_ < src_.size()) {
      char c = src_[pos_];
      if (c == '#') {
        while (pos_ < src_.size() && src_[pos_] != '\n') advance();
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
      } else {
        break;
      }
    }
  }

  std::string_view src_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
  std::size_t col_ = 1;
};

class Parser {
 public:
  Parser(std::string_view text, Specification& spec, std::map<std::string, SourceLoc>& locations)
      : toks_(Lexer(text).run()), spec_(spec), locations_(locations) {}

  void run() {
    while (peek().kind != Tok::End) statement();
  }

 private:
  const Token& peek(std::size_t ahead = 0) const { return toks_[std::min(i_ + ahead, toks_.size() - 1)]; }
  const Token& next() { return toks_[i_ < toks_.size() - 1 ? i_++ : i_]; }

  [[noreturn]] void fail(const std::string& what, const Token& at) const {
    throw ParseError(what + (at.kind == Tok::End ? " at end of input" : " near '" + at.text + "'"), at.loc);
  }

  bool is_punct(const char* p, std::size_t ahead = 0) const {
    return peek(ahead).kind == Tok::Punct && peek(ahead).text == p;
  }

  void expect(const char* p) {
    if (!is_punct(p)) fail(std::string("expected '") + p + "'", peek());
    next();
  }

  std::string ident(const char* what) {
    if (peek().kind != Tok::Ident) fail(std::string("expected ") + what, peek());
    return next().text;
  }

  void keyword(const char* kw) {
    if (peek().kind != Tok::Ident || peek().text != kw) fail(std::string("expected '") + kw + "'", peek());
    next();
  }

  int number(const char* what) {
    if (peek().kind != Tok::Number) fail(std::string("expected ") + what, peek());
    const auto& t = next();
    if (t.text.size() > 9) fail("number too large", t);
    return std::stoi(t.text);
  }

  void statement() {
    anon_ = 0;
    const Token& start = peek();
    std::string kw = ident("statement keyword");
    if (kw == "schema") {
      schema_decl(start);
    } else if (kw == "hard" || kw == "soft") {
      RuleKind kind = kw == "hard" ? RuleKind::Hard : RuleKind::Soft;
      std::string target = ident("'obj' or 'val'");
      if (target != "obj" && target != "val") fail("expected 'obj' or 'val'", toks_[i_ - 1]);
      std::string label = ident("rule label");
      note_label(label, start);
      expect(":");
      auto body = parse_body();
      expect("=>");
      if (target == "obj") {
        keyword("EqO");
        expect("(");
        std::string x = ident("head variable");
        expect(",");
        std::string y = ident("head variable");
        expect(")");
        spec_.object_rules.push_back({label, kind, std::move(body), x, y});
      } else {
        keyword("EqV");
        expect("(");
        CellRef a = cell_ref();
        expect(",");
        CellRef b = cell_ref();
        expect(")");
        spec_.value_rules.push_back({label, kind, std::move(body), a, b});
      }
      expect(".");
    } else if (kw == "dc") {
      std::string label = ident("constraint label");
      note_label(label, start);
      expect(":");
      auto body = parse_body();
      expect(".");
      spec_.constraints.push_back({label, std::move(body)});
    } else {
      fail("unknown statement keyword", start);
    }
  }

  void note_label(const std::string& label, const Token& at) {
    if (!locations_.emplace(label, at.loc).second) fail("duplicate label " + label, at);
  }

  void schema_decl(const Token& start) {
    RelationDecl decl;
    decl.name = ident("relation name");
    expect("(");
    while (true) {
      decl.attributes.push_back(ident("attribute name"));
      expect(":");
      const Token& ty = peek();
      std::string t = ident("'obj' or 'val'");
      if (t == "obj") decl.types.push_back(PosType::Obj);
      else if (t == "val") decl.types.push_back(PosType::Val);
      else fail("expected 'obj' or 'val'", ty);
      if (is_punct(",")) {
        next();
        continue;
      }
      break;
    }
    expect(")");
    expect(".");
    try {
      spec_.schema.add(std::move(decl));
    } catch (const std::invalid_argument& e) {
      throw ParseError(e.what(), start.loc);
    }
  }

  CellRef cell_ref() {
    CellRef ref;
    ref.tid_var = ident("tid variable");
    expect(".");
    ref.position = static_cast<std::uint32_t>(number("cell position"));
    return ref;
  }

  Term term() {
    const Token& t = peek();
    if (t.kind == Tok::String) {
      next();
      return Term::constant(t.text);
    }
    if (t.kind == Tok::Ident) {
      next();
      if (t.text == "_") return Term::var("_#" + std::to_string(++anon_));
      if (t.text[0] == '_') fail("variable names may not start with '_'", t);
      return Term::var(t.text);
    }
    fail("expected a term", t);
  }

  std::vector<Atom> parse_body() {
    std::vector<Atom> body;
    while (true) {
      body.push_back(atom());
      if (is_punct(",")) {
        next();
        continue;
      }
      return body;
    }
  }

  Atom atom() {
    const Token& start = peek();
    if (start.kind == Tok::Ident && start.text == "sim" && is_punct("(", 1)) {
      next();
      expect("(");
      SimilarityAtom s;
      s.lhs = term();
      expect(",");
      s.rhs = term();
      expect(")");
      expect(">=");
      const Token& th = peek();
      s.threshold = number("similarity threshold");
      if (s.threshold < 0 || s.threshold > 100) fail("similarity threshold must be in [0,100]", th);
      return s;
    }
    if (start.kind == Tok::Ident && start.text != "_" && (is_punct("(", 1) || is_punct("[", 1))) {
      next();
      RelationalAtom r;
      r.relation = start.text;
      auto idx = spec_.schema.find(r.relation);
      if (!idx) fail("unknown relation " + r.relation, start);
      if (is_punct("[")) {
        next();
        r.tid = term();
        expect("]");
      } else {
        r.tid = Term::var("_#" + std::to_string(++anon_));
      }
      expect("(");
      while (true) {
        r.args.push_back(term());
        if (is_punct(",")) {
          next();
          continue;
        }
        break;
      }
      expect(")");
      const auto& decl = spec_.schema.at(*idx);
      if (r.args.size() != decl.arity())
        fail("relation " + r.relation + " expects " + std::to_string(decl.arity()) + " arguments, got " +
                 std::to_string(r.args.size()),
             start);
      return r;
    }
    InequalityAtom n;
    n.lhs = term();
    expect("!=");
    n.rhs = term();
    return n;
  }

  std::vector<Token> toks_;
  std::size_t i_ = 0;
  std::size_t anon_ = 0;
  Specification& spec_;
  std::map<std::string, SourceLoc>& locations_;
};

}  // namespace detail

/// Parses without shape validation; syntax, unknown relations and arity
/// mismatches still throw ParseError.
inline Specification parse_spec_unchecked(std::string_view text, const Schema& schema = {},
                                          std::map<std::string, SourceLoc>* locations = nullptr) {
  Specification spec;
  spec.schema = schema;
  std::map<std::string, SourceLoc> locs;
  detail::Parser(text, spec, locs).run();
  if (locations) *locations = std::move(locs);
  return spec;
}

/// Parses and validates a specification; the first shape violation is
/// reported as a ParseError located at its statement.
inline Specification parse_spec(std::string_view text, const Schema& schema = {}) {
  std::map<std::string, SourceLoc> locs;
  Specification spec = parse_spec_unchecked(text, schema, &locs);
  auto diags = validate_rule_shapes(spec);
  if (!diags.empty()) {
    auto it = locs.find(diags.front().label);
    throw ParseError(diags.front().label + ": " + diags.front().message,
                     it == locs.end() ? SourceLoc{} : it->second);
  }
  return spec;
}

/// Schema-only parse: every statement must be a `schema` declaration.
inline Schema parse_schema(std::string_view text) {
  Specification spec = parse_spec_unchecked(text);
  if (!spec.object_rules.empty() || !spec.value_rules.empty() || !spec.constraints.empty())
    throw ParseError("schema file may only contain schema declarations", SourceLoc{});
  return spec.schema;
}

}  // namespace lace
