#pragma once

#include <filesystem>
#include <memory>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "lace/lace.hpp"

namespace lace::test {

inline std::filesystem::path fixture_dir(const std::string& name) {
  return std::filesystem::path(LACE_FIXTURE_DIR) / name;
}

/// A database, specification and similarity store bundled with an engine.
/// Heap-allocated because the engine points into the other members.
struct Inst {
  Specification spec;
  Database db;
  SimilarityStore store;
  std::unique_ptr<Engine> engine;

  const Engine& eng() const { return *engine; }

  Candidate objs(const std::vector<std::pair<std::string, std::string>>& pairs) const {
    std::vector<std::pair<ConstId, ConstId>> ids;
    for (const auto& [a, b] : pairs) ids.emplace_back(*db.find(Sort::Object, a), *db.find(Sort::Object, b));
    return {ObjRel::close(db.objects(), ids), db.identity_cells()};
  }

  Candidate with_cells(Candidate c, const std::vector<std::tuple<std::string, int, std::string, int>>& pairs) const {
    std::vector<std::pair<Cell, Cell>> cells;
    for (const auto& [t1, p1, t2, p2] : pairs)
      cells.emplace_back(Cell{*db.find(Sort::Tid, t1), static_cast<std::uint32_t>(p1)},
                         Cell{*db.find(Sort::Tid, t2), static_cast<std::uint32_t>(p2)});
    std::vector<CellRel::IndexPair> idx;
    for (const auto& [a, b] : cells) idx.emplace_back(*db.cells()->position_of(a), *db.cells()->position_of(b));
    c.V = c.V.with(idx);
    return c;
  }

  MergePair obj_pair(const std::string& a, const std::string& b) const {
    return MergePair::objects(*db.objects()->position_of(*db.find(Sort::Object, a)),
                              *db.objects()->position_of(*db.find(Sort::Object, b)));
  }

  std::uint32_t rule(const std::string& label) const {
    for (std::uint32_t r = 0; r < engine->rule_count(); ++r)
      if (engine->rule_label(r) == label) return r;
    throw std::invalid_argument("no rule " + label);
  }
};

using Facts = std::vector<std::pair<std::string, std::vector<std::string>>>;

/// Builds an instance from specification text and facts with generated tids.
inline std::unique_ptr<Inst> make_inst(const std::string& spec_text, const Facts& facts,
                                       SimilarityStore store = {}, AnswerMode mode = AnswerMode::Anchored) {
  auto inst = std::make_unique<Inst>();
  inst->spec = parse_spec(spec_text);
  DatabaseBuilder b(inst->spec.schema);
  for (const auto& [rel, args] : facts) b.add(rel, args);
  inst->db = std::move(b).build();
  inst->store = std::move(store);
  inst->engine =
      std::make_unique<Engine>(inst->db, inst->spec, SimilarityIndex(inst->db, inst->store), mode);
  return inst;
}

inline std::unique_ptr<Inst> from_gadget(GadgetInstance g, AnswerMode mode = AnswerMode::Anchored) {
  auto inst = std::make_unique<Inst>();
  inst->spec = std::move(g.spec);
  inst->db = std::move(g.db);
  inst->engine = std::make_unique<Engine>(inst->db, inst->spec, SimilarityIndex{}, mode);
  return inst;
}

// ---------------------------------------------------------------------------
// Running example
// ---------------------------------------------------------------------------

inline std::unique_ptr<Inst> authors(AnswerMode mode = AnswerMode::Anchored) {
  auto inst = std::make_unique<Inst>();
  auto dir = fixture_dir("authors");
  inst->spec = load_spec(dir / "spec.erx");
  inst->db = ingest(dir / "data", inst->spec.schema);
  inst->store = build_sim_store(inst->db, inst->spec, SimConfig{}, load_overrides(dir / "overrides.tsv"));
  inst->engine = std::make_unique<Engine>(inst->db, inst->spec, SimilarityIndex(inst->db, inst->store), mode);
  return inst;
}

inline Candidate authors_e0v0(const Inst& i) { return i.objs({}); }
inline Candidate authors_e1v0(const Inst& i) { return i.objs({{"a1", "a2"}}); }
inline Candidate authors_e1v1(const Inst& i) { return i.with_cells(authors_e1v0(i), {{"t1", 2, "t2", 2}}); }
inline Candidate authors_e1v2(const Inst& i) { return i.with_cells(authors_e1v1(i), {{"t4", 2, "t5", 2}}); }

// ---------------------------------------------------------------------------
// Separation instances for the criteria
// ---------------------------------------------------------------------------

inline std::unique_ptr<Inst> sep_set_card() {
  return make_inst(
      "schema R(a1: obj, a2: obj).\nschema Rp(a1: obj, a2: obj).\n"
      "soft obj sigma: R(x, y) => EqO(x, y).\n"
      "soft obj sigma1: Rp(x, y) => EqO(x, y).\n"
      "dc delta: R(y, y), Rp(z, z).\n",
      {{"R", {"a1", "a2"}}, {"Rp", {"b1", "b2"}}, {"Rp", {"c1", "c2"}}});
}

inline std::unique_ptr<Inst> sep_maxes_mina() {
  return make_inst(
      "schema R(a1: obj, a2: obj).\nschema Rp(a1: obj, a2: obj).\n"
      "soft obj sigma: R(x, y) => EqO(x, y).\n"
      "soft obj sigma1: R(z, z), Rp(x, y) => EqO(x, y).\n"
      "dc delta: R(y, y), Rp(z, z).\n",
      {{"R", {"a1", "a2"}}, {"Rp", {"b1", "b2"}}});
}

inline std::unique_ptr<Inst> sep_mina_minv() {
  return make_inst(
      "schema Ra(a1: obj, a2: obj).\nschema Rb(a1: obj, a2: obj).\nschema Rc(a1: obj, a2: obj).\n"
      "soft obj sigma_a: Ra(x, y) => EqO(x, y).\n"
      "soft obj sigma_b: Rb(x, y) => EqO(x, y).\n"
      "soft obj sigma_c: Rc(x, y) => EqO(x, y).\n"
      "soft obj sigma_c1: Rb(z, z), Rc(x, y) => EqO(x, y).\n"
      "dc delta: Ra(y, y), Rc(z, z).\n",
      {{"Ra", {"a1", "a2"}}, {"Rb", {"b1", "b2"}}, {"Rc", {"c1", "c2"}}});
}

inline std::unique_ptr<Inst> sep_maxec_maxsc() {
  return make_inst(
      "schema R(a1: obj, a2: obj).\nschema Rp(a1: obj, a2: obj).\nschema Rpp(a1: obj, a2: obj).\n"
      "soft obj sigma: R(x, y) => EqO(x, y).\n"
      "soft obj sigma1: Rp(x, y) => EqO(x, y).\n"
      "soft obj sigma2: Rpp(x, y) => EqO(x, y).\n"
      "dc delta: R(y, y), Rp(z, z).\n",
      {{"R", {"a1", "a2"}}, {"Rp", {"b1", "b2"}}, {"Rpp", {"b1", "b2"}}});
}

/// Optimal solutions of `inst` under `c`, as a sorted vector.
inline std::vector<Candidate> opt(const Inst& inst, Criterion c) { return optimal_solutions(inst.eng(), c); }

inline std::vector<Candidate> sorted(std::vector<Candidate> v) {
  std::sort(v.begin(), v.end());
  return v;
}

}  // namespace lace::test
