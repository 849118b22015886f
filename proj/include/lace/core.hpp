#pragma once

#include <algorithm>
#include <compare>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "lace/equiv_rel.hpp"

namespace lace {

// ---------------------------------------------------------------------------
// Constants
// ---------------------------------------------------------------------------

enum class Sort : std::uint8_t { Object, Value, Tid, Null };

inline std::string_view sort_name(Sort s) {
  switch (s) {
    case Sort::Object: return "object";
    case Sort::Value: return "value";
    case Sort::Tid: return "tid";
    case Sort::Null: return "null";
  }
  return "?";
}

struct Constant {
  Sort sort = Sort::Value;
  std::string text;

  auto operator<=>(const Constant&) const = default;
};

/// Interned handle into a Database's constant pool.
struct ConstId {
  std::uint32_t value = 0;

  auto operator<=>(const ConstId&) const = default;
};

inline constexpr ConstId kNullConst{0};

// ---------------------------------------------------------------------------
// Schema
// ---------------------------------------------------------------------------

enum class PosType : std::uint8_t { Obj, Val };

/// A relation symbol. Position 0 (the tid) is implicit; `types[i-1]` is the
/// type of argument position i.
struct RelationDecl {
  std::string name;
  std::vector<PosType> types;
  std::vector<std::string> attributes;

  std::size_t arity() const { return types.size(); }

  PosType type_at(std::size_t position) const {
    if (position == 0 || position > types.size())
      throw std::out_of_range("relation " + name + ": position out of range");
    return types[position - 1];
  }

  bool operator==(const RelationDecl& o) const { return name == o.name && types == o.types; }
};

class Schema {
 public:
  /// Adds a relation. Re-declaring an identical relation is a no-op;
  /// a conflicting re-declaration throws.
  void add(RelationDecl decl) {
    if (decl.types.empty())
      throw std::invalid_argument("relation " + decl.name + " must have arity >= 1");
    if (auto idx = find(decl.name)) {
      if (!(relations_[*idx] == decl))
        throw std::invalid_argument("conflicting declaration of relation " + decl.name);
      return;
    }
    index_.emplace(decl.name, static_cast<std::uint32_t>(relations_.size()));
    relations_.push_back(std::move(decl));
  }

  std::optional<std::uint32_t> find(std::string_view name) const {
    auto it = index_.find(std::string(name));
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  const RelationDecl& at(std::uint32_t idx) const { return relations_.at(idx); }
  const std::vector<RelationDecl>& relations() const { return relations_; }
  std::size_t size() const { return relations_.size(); }
  bool empty() const { return relations_.empty(); }

 private:
  std::vector<RelationDecl> relations_;
  std::map<std::string, std::uint32_t> index_;
};

// ---------------------------------------------------------------------------
// Database
// ---------------------------------------------------------------------------

struct Fact {
  std::uint32_t relation = 0;
  ConstId tid;
  std::vector<ConstId> args;  // args[i-1] holds position i
};

/// A value cell: the tid of a fact plus a 1-based value position.
struct Cell {
  ConstId tid;
  std::uint32_t position = 0;

  auto operator<=>(const Cell&) const = default;
};

using ObjRel = EquivRel<ConstId>;
using CellRel = EquivRel<Cell>;

class DatabaseBuilder;

/// TID-annotated database. Immutable once built; the object and cell
/// universes are fixed at construction and shared by every merge relation.
class Database {
 public:
  Database() : Database(Schema{}) {}

  const Schema& schema() const { return schema_; }
  const std::vector<Fact>& facts() const { return facts_; }
  const std::vector<std::uint32_t>& facts_of(std::uint32_t relation) const {
    return by_relation_.at(relation);
  }

  const Constant& constant(ConstId id) const { return pool_.at(id.value); }
  const std::string& text(ConstId id) const { return pool_.at(id.value).text; }
  bool is_null(ConstId id) const { return id == kNullConst; }
  std::size_t constant_count() const { return pool_.size(); }

  std::optional<ConstId> find(Sort sort, std::string_view text) const {
    if (sort == Sort::Null) return kNullConst;
    auto it = lookup_.find(key(sort, text));
    if (it == lookup_.end()) return std::nullopt;
    return it->second;
  }

  std::optional<std::uint32_t> fact_of(ConstId tid) const {
    auto it = tid_index_.find(tid.value);
    if (it == tid_index_.end()) return std::nullopt;
    return it->second;
  }

  const Fact& fact_by_tid(ConstId tid) const {
    auto idx = fact_of(tid);
    if (!idx) throw std::out_of_range("unknown tid " + text(tid));
    return facts_[*idx];
  }

  ConstId value_at(const Cell& cell) const { return fact_by_tid(cell.tid).args.at(cell.position - 1); }

  /// Obj(D), ordered by constant text.
  const UniversePtr<ConstId>& objects() const { return objects_; }
  /// Cells(D), ordered by (tid text, position).
  const UniversePtr<Cell>& cells() const { return cells_; }

  ObjRel identity_objects() const { return ObjRel(objects_); }
  CellRel identity_cells() const { return CellRel(cells_); }

  std::string cell_text(const Cell& c) const { return text(c.tid) + "." + std::to_string(c.position); }

 private:
  friend class DatabaseBuilder;

  explicit Database(Schema schema) : schema_(std::move(schema)) {
    pool_.push_back(Constant{Sort::Null, "null"});
    by_relation_.resize(schema_.size());
    objects_ = std::make_shared<Universe<ConstId>>();
    cells_ = std::make_shared<Universe<Cell>>();
  }

  static std::string key(Sort sort, std::string_view text) {
    std::string k(1, static_cast<char>('0' + static_cast<int>(sort)));
    k.append(text);
    return k;
  }

  ConstId intern(Sort sort, std::string_view text) {
    if (sort == Sort::Null) return kNullConst;
    auto k = key(sort, text);
    auto it = lookup_.find(k);
    if (it != lookup_.end()) return it->second;
    ConstId id{static_cast<std::uint32_t>(pool_.size())};
    pool_.push_back(Constant{sort, std::string(text)});
    lookup_.emplace(std::move(k), id);
    return id;
  }

  void freeze() {
    std::vector<ConstId> objs;
    std::vector<Cell> cells;
    std::vector<bool> seen(pool_.size(), false);
    for (const auto& f : facts_) {
      const auto& decl = schema_.at(f.relation);
      for (std::size_t i = 0; i < f.args.size(); ++i) {
        if (decl.types[i] == PosType::Obj) {
          if (!seen[f.args[i].value]) {
            seen[f.args[i].value] = true;
            objs.push_back(f.args[i]);
          }
        } else {
          cells.push_back(Cell{f.tid, static_cast<std::uint32_t>(i + 1)});
        }
      }
    }
    std::sort(objs.begin(), objs.end(), [&](ConstId a, ConstId b) { return text(a) < text(b); });
    std::sort(cells.begin(), cells.end(), [&](const Cell& a, const Cell& b) {
      if (a.tid != b.tid) return text(a.tid) < text(b.tid);
      return a.position < b.position;
    });
    objects_ = std::make_shared<Universe<ConstId>>(std::move(objs));
    cells_ = std::make_shared<Universe<Cell>>(std::move(cells));
  }

  Schema schema_;
  std::vector<Constant> pool_;
  std::unordered_map<std::string, ConstId> lookup_;
  std::vector<Fact> facts_;
  std::vector<std::vector<std::uint32_t>> by_relation_;
  std::unordered_map<std::uint32_t, std::uint32_t> tid_index_;
  UniversePtr<ConstId> objects_;
  UniversePtr<Cell> cells_;
};

/// Accumulates facts and produces an immutable Database.
class DatabaseBuilder {
 public:
  explicit DatabaseBuilder(Schema schema) : db_(std::move(schema)) {}

  const Schema& schema() const { return db_.schema_; }

  /// Adds R(tid, args...). A disengaged optional in a value position stores
  /// Null; object positions must be engaged.
  DatabaseBuilder& add(std::string_view relation, std::string_view tid,
                       const std::vector<std::optional<std::string>>& args) {
    auto rel = db_.schema_.find(relation);
    if (!rel) throw std::invalid_argument("unknown relation " + std::string(relation));
    const auto& decl = db_.schema_.at(*rel);
    if (args.size() != decl.arity())
      throw std::invalid_argument("arity mismatch for " + decl.name + ": expected " +
                                  std::to_string(decl.arity()) + ", got " + std::to_string(args.size()));
    ConstId t = db_.intern(Sort::Tid, tid);
    if (db_.tid_index_.count(t.value))
      throw std::invalid_argument("duplicate tid " + std::string(tid));
    Fact f{*rel, t, {}};
    f.args.reserve(args.size());
    for (std::size_t i = 0; i < args.size(); ++i) {
      if (decl.types[i] == PosType::Obj) {
        if (!args[i] || args[i]->empty())
          throw std::invalid_argument("null in object position " + std::to_string(i + 1) + " of " + decl.name);
        f.args.push_back(db_.intern(Sort::Object, *args[i]));
      } else {
        f.args.push_back(args[i] ? db_.intern(Sort::Value, *args[i]) : kNullConst);
      }
    }
    db_.tid_index_.emplace(t.value, static_cast<std::uint32_t>(db_.facts_.size()));
    db_.by_relation_[*rel].push_back(static_cast<std::uint32_t>(db_.facts_.size()));
    db_.facts_.push_back(std::move(f));
    return *this;
  }

  DatabaseBuilder& add(std::string_view relation, std::string_view tid, const std::vector<std::string>& args) {
    std::vector<std::optional<std::string>> opt(args.begin(), args.end());
    return add(relation, tid, opt);
  }

  /// Adds a fact with an auto-generated tid ("t<n>").
  DatabaseBuilder& add(std::string_view relation, const std::vector<std::string>& args) {
    std::string tid = "t" + std::to_string(++auto_tid_);
    while (db_.find(Sort::Tid, tid)) tid = "t" + std::to_string(++auto_tid_);
    return add(relation, tid, args);
  }

  std::size_t fact_count() const { return db_.facts_.size(); }

  Database build() && {
    db_.freeze();
    return std::move(db_);
  }

 private:
  Database db_;
  std::size_t auto_tid_ = 0;
};

// ---------------------------------------------------------------------------
// Extended database
// ---------------------------------------------------------------------------

/// Sorted, duplicate-free set of constants.
using ConstSet = std::vector<ConstId>;

struct ExtendedFact {
  std::uint32_t relation = 0;
  std::uint32_t source = 0;        // index into Database::facts()
  std::vector<ConstSet> sets;      // sets[0] == {tid}
};

class ExtendedDatabase {
 public:
  const Database& database() const { return *db_; }
  const std::vector<ExtendedFact>& facts() const { return facts_; }
  const std::vector<std::uint32_t>& facts_of(std::uint32_t relation) const { return db_->facts_of(relation); }
  const ExtendedFact& at(std::uint32_t idx) const { return facts_[idx]; }

 private:
  friend ExtendedDatabase extend(const Database&, const ObjRel&, const CellRel&);
  const Database* db_ = nullptr;
  std::vector<ExtendedFact> facts_;
};

/// D_{E,V}: objects replaced by their E-class, value cells by the values of
/// their V-class. `db` must outlive the result.
inline ExtendedDatabase extend(const Database& db, const ObjRel& objects, const CellRel& cells) {
  if (!(*objects.universe() == *db.objects()))
    throw std::domain_error("extend: object relation is not over Obj(D)");
  if (!(*cells.universe() == *db.cells()))
    throw std::domain_error("extend: cell relation is not over Cells(D)");

  const auto& ou = *db.objects();
  const auto& cu = *db.cells();

  std::vector<ConstSet> obj_class(ou.size());
  for (const auto& cls : objects.classes()) {
    ConstSet members;
    for (auto i : cls) members.push_back(ou[i]);
    std::sort(members.begin(), members.end());
    for (auto i : cls) obj_class[i] = members;
  }
  std::vector<ConstSet> cell_values(cu.size());
  for (const auto& cls : cells.classes()) {
    ConstSet values;
    for (auto i : cls) values.push_back(db.value_at(cu[i]));
    std::sort(values.begin(), values.end());
    values.erase(std::unique(values.begin(), values.end()), values.end());
    for (auto i : cls) cell_values[i] = values;
  }

  ExtendedDatabase out;
  out.db_ = &db;
  out.facts_.reserve(db.facts().size());
  for (std::uint32_t fi = 0; fi < db.facts().size(); ++fi) {
    const auto& f = db.facts()[fi];
    const auto& decl = db.schema().at(f.relation);
    ExtendedFact ef{f.relation, fi, {}};
    ef.sets.reserve(f.args.size() + 1);
    ef.sets.push_back({f.tid});
    for (std::size_t i = 0; i < f.args.size(); ++i) {
      if (decl.types[i] == PosType::Obj) {
        ef.sets.push_back(obj_class[*ou.position_of(f.args[i])]);
      } else {
        Cell c{f.tid, static_cast<std::uint32_t>(i + 1)};
        ef.sets.push_back(cell_values[*cu.position_of(c)]);
      }
    }
    out.facts_.push_back(std::move(ef));
  }
  return out;
}

}  // namespace lace
