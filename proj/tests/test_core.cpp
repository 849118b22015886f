#include <gtest/gtest.h>

#include "support/fixtures.hpp"

using namespace lace;

namespace {

Schema small_schema() {
  return parse_schema("schema R(a: obj, v: val, w: val).\nschema U(a: obj).\n");
}

}  // namespace

TEST(Schema, RejectsConflictingRedeclaration) {
  Schema s;
  s.add({"R", {PosType::Obj}, {"a"}});
  EXPECT_NO_THROW(s.add({"R", {PosType::Obj}, {"a"}}));
  EXPECT_THROW(s.add({"R", {PosType::Val}, {"a"}}), std::invalid_argument);
  EXPECT_THROW(s.add({"Z", {}, {}}), std::invalid_argument);
  EXPECT_EQ(s.size(), 1u);
}

TEST(Database, AuthorsCounts) {
  auto inst = test::authors();
  EXPECT_EQ(inst->db.facts().size(), 6u);
  EXPECT_EQ(inst->db.objects()->size(), 3u);
  EXPECT_EQ(inst->db.cells()->size(), 12u);
}

TEST(Database, SortsAreDisjoint) {
  DatabaseBuilder b(small_schema());
  b.add("R", "t1", std::vector<std::string>{"x", "x", "y"});
  b.add("U", "t2", std::vector<std::string>{"t1"});
  Database db = std::move(b).build();
  auto obj = db.find(Sort::Object, "x");
  auto val = db.find(Sort::Value, "x");
  ASSERT_TRUE(obj && val);
  EXPECT_NE(*obj, *val);
  EXPECT_NE(*db.find(Sort::Object, "t1"), *db.find(Sort::Tid, "t1"));
  EXPECT_EQ(db.objects()->size(), 2u);
}

TEST(Database, ObjectsSortedByTextCellsByTidThenPosition) {
  DatabaseBuilder b(small_schema());
  b.add("R", "t2", std::vector<std::string>{"zeta", "1", "2"});
  b.add("R", "t1", std::vector<std::string>{"alpha", "3", "4"});
  Database db = std::move(b).build();
  const auto& ou = *db.objects();
  ASSERT_EQ(ou.size(), 2u);
  EXPECT_EQ(db.text(ou[0]), "alpha");
  EXPECT_EQ(db.text(ou[1]), "zeta");
  const auto& cu = *db.cells();
  ASSERT_EQ(cu.size(), 4u);
  EXPECT_EQ(db.cell_text(cu[0]), "t1.2");
  EXPECT_EQ(db.cell_text(cu[1]), "t1.3");
  EXPECT_EQ(db.cell_text(cu[2]), "t2.2");
  EXPECT_EQ(db.value_at(cu[3]), *db.find(Sort::Value, "2"));
}

TEST(Database, BuilderValidation) {
  DatabaseBuilder b(small_schema());
  EXPECT_THROW(b.add("Nope", "t1", std::vector<std::string>{"a"}), std::invalid_argument);
  EXPECT_THROW(b.add("U", "t1", std::vector<std::string>{"a", "b"}), std::invalid_argument);
  b.add("U", "t1", std::vector<std::string>{"a"});
  EXPECT_THROW(b.add("U", "t1", std::vector<std::string>{"b"}), std::invalid_argument);
  std::vector<std::optional<std::string>> null_obj{std::nullopt};
  EXPECT_THROW(b.add("U", "t9", null_obj), std::invalid_argument);
}

TEST(Database, NullValuesAreCellsHoldingNull) {
  DatabaseBuilder b(small_schema());
  std::vector<std::optional<std::string>> args{"o", std::nullopt, "v"};
  b.add("R", "t1", args);
  Database db = std::move(b).build();
  EXPECT_EQ(db.cells()->size(), 2u);
  EXPECT_TRUE(db.is_null(db.value_at((*db.cells())[0])));
}

TEST(Database, AutoTidsSkipTakenNames) {
  DatabaseBuilder b(small_schema());
  b.add("U", "t1", std::vector<std::string>{"a"});
  b.add("U", std::vector<std::string>{"b"});
  Database db = std::move(b).build();
  EXPECT_EQ(db.facts().size(), 2u);
  EXPECT_TRUE(db.find(Sort::Tid, "t2"));
}

TEST(ExtendedDatabase, IdentityGivesSingletons) {
  auto inst = test::authors();
  auto ext = extend(inst->db, inst->db.identity_objects(), inst->db.identity_cells());
  ASSERT_EQ(ext.facts().size(), 6u);
  for (std::size_t i = 0; i < ext.facts().size(); ++i) {
    const auto& ef = ext.facts()[i];
    const auto& f = inst->db.facts()[ef.source];
    ASSERT_EQ(ef.sets.size(), f.args.size() + 1);
    EXPECT_EQ(ef.sets[0], ConstSet{f.tid});
    for (std::size_t k = 0; k < f.args.size(); ++k) EXPECT_EQ(ef.sets[k + 1], ConstSet{f.args[k]});
  }
}

TEST(ExtendedDatabase, ObjectMergesAreGlobalCellMergesLocal) {
  auto inst = test::authors();
  auto c = test::authors_e1v1(*inst);
  auto ext = extend(inst->db, c.E, c.V);
  auto a1 = *inst->db.find(Sort::Object, "a1");
  auto a2 = *inst->db.find(Sort::Object, "a2");
  auto t1 = *inst->db.fact_of(*inst->db.find(Sort::Tid, "t1"));
  auto t4 = *inst->db.fact_of(*inst->db.find(Sort::Tid, "t4"));
  auto t6 = *inst->db.fact_of(*inst->db.find(Sort::Tid, "t6"));
  ConstSet a12{std::min(a1, a2), std::max(a1, a2)};
  EXPECT_EQ(ext.at(t1).sets[1], a12);
  EXPECT_EQ(ext.at(t4).sets[1], a12);
  EXPECT_EQ(ext.at(t1).sets[2].size(), 2u);
  EXPECT_EQ(ext.at(t1).sets[3].size(), 1u);
  EXPECT_EQ(ext.at(t6).sets[2].size(), 1u);
}

TEST(ExtendedDatabase, MergedCellsShareDistinctValues) {
  auto inst = test::authors();
  auto c = test::authors_e1v2(*inst);
  auto ext = extend(inst->db, c.E, c.V);
  auto t5 = *inst->db.fact_of(*inst->db.find(Sort::Tid, "t5"));
  ConstSet expect{*inst->db.find(Sort::Value, "Smith's Prize"), *inst->db.find(Sort::Value, "Smith's Prize(1936)")};
  std::sort(expect.begin(), expect.end());
  EXPECT_EQ(ext.at(t5).sets[2], expect);
}

TEST(ExtendedDatabase, RejectsForeignUniverse) {
  auto a = test::authors();
  auto b = test::sep_set_card();
  EXPECT_THROW(extend(a->db, b->db.identity_objects(), a->db.identity_cells()), std::domain_error);
}
