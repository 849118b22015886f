#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

#include "support/fixtures.hpp"

using namespace lace;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  auto dir = fs::temp_directory_path() / ("lace_io_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

void put(const fs::path& p, const std::string& content) {
  std::ofstream f(p, std::ios::binary);
  f << content;
}

const char* kSchema = "schema A(o: obj, v: val).\n";

}  // namespace

TEST(Ingest, ReadsTsvWithNulls) {
  auto dir = scratch("nulls");
  put(dir / "A.tsv", "t1\to1\tred\nt2\to2\t\n");
  auto db = ingest(dir, parse_schema(kSchema));
  EXPECT_EQ(db.facts().size(), 2u);
  auto t2 = *db.find(Sort::Tid, "t2");
  EXPECT_TRUE(db.is_null(db.facts()[*db.fact_of(t2)].args[1]));
}

TEST(Ingest, Errors) {
  auto schema = parse_schema(kSchema);
  auto dir = scratch("errors");
  put(dir / "A.tsv", "t1\to1\n");
  EXPECT_THROW(ingest(dir, schema), FormatError);
  put(dir / "A.tsv", "\to1\tred\n");
  EXPECT_THROW(ingest(dir, schema), FormatError);
  put(dir / "A.tsv", "t1\to1\tred\nt1\to2\tblue\n");
  EXPECT_THROW(ingest(dir, schema), FormatError);
  put(dir / "A.tsv", "t1\t\tred\n");
  EXPECT_THROW(ingest(dir, schema), FormatError);
  put(dir / "A.tsv", "t1\to1\tred\n");
  put(dir / "B.tsv", "t2\to2\n");
  EXPECT_THROW(ingest(dir, schema), FormatError);
  EXPECT_THROW(ingest(dir / "missing", schema), FormatError);
}

TEST(Solutions, ParseAndRoundTrip) {
  auto inst = test::authors();
  auto dir = test::fixture_dir("authors");
  EXPECT_EQ(load_solution(dir / "e0v0.sol", inst->db), test::authors_e0v0(*inst));
  EXPECT_EQ(load_solution(dir / "e1v0.sol", inst->db), test::authors_e1v0(*inst));
  EXPECT_EQ(load_solution(dir / "e1v1.sol", inst->db), test::authors_e1v1(*inst));
  auto e1v2 = load_solution(dir / "e1v2.sol", inst->db);
  EXPECT_EQ(e1v2, test::authors_e1v2(*inst));
  std::istringstream again(solution_to_text(inst->db, e1v2));
  EXPECT_EQ(parse_solution(again, inst->db), e1v2);
}

TEST(Solutions, Errors) {
  auto inst = test::authors();
  for (const char* bad : {"eqo\ta1\n", "eqo\ta1\tzz\n", "eqv\tt1\t2\tt2\n", "eqv\tt1\t9\tt2\t2\n",
                          "eqv\tt1\tx\tt2\t2\n", "eqv\tt1\t0\tt2\t2\n", "merge\ta1\ta2\n", "eqo\tt1\ta2\n"}) {
    std::istringstream in(bad);
    EXPECT_THROW(parse_solution(in, inst->db), FormatError) << bad;
  }
  std::istringstream comment("# nothing\n\neqo\ta1\ta2\n");
  EXPECT_EQ(parse_solution(comment, inst->db), test::authors_e1v0(*inst));
}

TEST(Overrides, ParseAndValidate) {
  std::istringstream ok("x\ty\t40\n");
  auto s = parse_overrides(ok);
  EXPECT_EQ(s.score("y", "x"), 40);
  for (const char* bad : {"x\ty\n", "x\ty\t101\n", "x\ty\t-1\n", "x\ty\t4.5\n", "\ty\t4\n"}) {
    std::istringstream in(bad);
    EXPECT_THROW(parse_overrides(in), FormatError) << bad;
  }
}

TEST(GroundTruth, Parse) {
  std::istringstream in("b\ta\na\tb\nc\tc\n");
  auto t = parse_ground_truth(in);
  EXPECT_EQ(t, (PairSet<std::string>{{"a", "b"}}));
  std::istringstream bad("a\n");
  EXPECT_THROW(parse_ground_truth(bad), FormatError);
}

TEST(InstanceDir, WriteAndReingest) {
  auto g = gen_3sat_restricted_maxE(Cnf3{2, {Clause3{Literal{1, true}, Literal{2, false}, Literal{1, true}}}});
  auto dir = scratch("gadget");
  write_instance_dir(dir, g.db, g.spec, g.baseline);
  auto schema = load_schema(dir / "schema.erx");
  auto spec = load_spec(dir / "spec.erx", schema);
  EXPECT_EQ(to_text(spec), to_text(g.spec));
  auto db = ingest(dir, schema);
  EXPECT_EQ(db.facts().size(), g.db.facts().size());
  for (std::uint32_t r = 0; r < schema.size(); ++r) EXPECT_EQ(relation_tsv(db, r), relation_tsv(g.db, r));
  auto base = load_solution(dir / "baseline.sol", db);
  EXPECT_EQ(base.E.pair_count(), g.baseline.E.pair_count());
  EXPECT_EQ(solution_to_text(db, base), solution_to_text(g.db, g.baseline));
}
