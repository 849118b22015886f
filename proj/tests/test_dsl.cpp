#include <gtest/gtest.h>

#include <random>

#include "support/fixtures.hpp"
#include "support/random.hpp"

using namespace lace;

namespace {

const char* kSchema = "schema A(o: obj, v: val).\nschema B(o1: obj, o2: obj).\n";

Specification parse(const std::string& rules) { return parse_spec(std::string(kSchema) + rules); }

std::string first_error(const std::string& rules) {
  try {
    parse(rules);
  } catch (const ParseError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST(Dsl, ParsesAuthors) {
  auto inst = test::authors();
  const auto& s = inst->spec;
  ASSERT_EQ(s.schema.size(), 2u);
  ASSERT_EQ(s.object_rules.size(), 1u);
  ASSERT_EQ(s.value_rules.size(), 2u);
  ASSERT_EQ(s.constraints.size(), 1u);
  EXPECT_EQ(s.object_rules[0].label, "s1o");
  EXPECT_EQ(s.object_rules[0].kind, RuleKind::Soft);
  EXPECT_EQ(s.value_rules[0].kind, RuleKind::Hard);
  EXPECT_EQ(s.value_rules[0].lhs.tid_var, "xt");
  EXPECT_EQ(s.value_rules[0].lhs.position, 2u);
  const auto& sim = std::get<SimilarityAtom>(s.object_rules[0].body[2]);
  EXPECT_EQ(sim.threshold, 95);
  EXPECT_TRUE(s.restricted() == false);
}

TEST(Dsl, AnonymousVariablesAreDistinct) {
  auto s = parse("dc d: A(_, _), B(_, _).\n");
  const auto& a = std::get<RelationalAtom>(s.constraints[0].body[0]);
  const auto& b = std::get<RelationalAtom>(s.constraints[0].body[1]);
  std::set<std::string> names{a.tid.text, a.args[0].text, a.args[1].text, b.tid.text, b.args[0].text,
                              b.args[1].text};
  EXPECT_EQ(names.size(), 6u);
  for (const auto& n : names) EXPECT_EQ(n[0], '_');
}

TEST(Dsl, ConstantsAndPrimes) {
  auto s = parse("soft obj r: A(x', \"Smith's \\\"Prize\\\"\"), A(y, \"Smith's \\\"Prize\\\"\") => EqO(x', y).\n");
  const auto& a = std::get<RelationalAtom>(s.object_rules[0].body[0]);
  EXPECT_EQ(a.args[0], Term::var("x'"));
  EXPECT_EQ(a.args[1], Term::constant("Smith's \"Prize\""));
}

TEST(Dsl, CommentsAndWhitespace) {
  auto s = parse("# leading comment\n  dc   d :\n  B(x, x) # trailing\n .\n");
  ASSERT_EQ(s.constraints.size(), 1u);
}

TEST(Dsl, SyntaxErrorsCarryLocation) {
  try {
    parse_spec("schema A(o: obj).\n\ndc d: A(x) x.\n");
    FAIL() << "expected a parse error";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.location().line, 3u);
  }
  EXPECT_THROW(parse("dc d: A(x, y, z).\n"), ParseError);
  EXPECT_THROW(parse("dc d: Nope(x).\n"), ParseError);
  EXPECT_THROW(parse("soft obj r: B(x, y) => EqV(x, y).\n"), ParseError);
  EXPECT_THROW(parse("soft obj r: A(x, v), A(y, w), sim(v, w) >= 101 => EqO(x, y).\n"), ParseError);
  EXPECT_THROW(parse("maybe obj r: B(x, y) => EqO(x, y).\n"), ParseError);
  EXPECT_THROW(parse("dc d: B(_x, y).\n"), ParseError);
}

TEST(Dsl, DuplicateLabelsRejected) {
  EXPECT_NE(first_error("dc d: B(x, x).\ndc d: B(y, y).\n").find("duplicate"), std::string::npos);
}

TEST(Dsl, ShapeViolations) {
  EXPECT_NE(first_error("soft obj r: A(x, v), A(y, w) => EqO(x, z).\n").find("head variable z"), std::string::npos);
  EXPECT_NE(first_error("soft obj r: A(x, v), B(x, y) => EqO(v, y).\n").find("non-object"), std::string::npos);
  EXPECT_NE(first_error("soft obj r: B(x, y), sim(x, y) >= 80 => EqO(x, y).\n").find("object position"),
            std::string::npos);
  EXPECT_NE(first_error("dc d: B(x, y), x != z.\n").find("occurs in no relational atom"), std::string::npos);
  EXPECT_NE(first_error("dc d: A[t](x, v), B(t, y).\n").find("tid variable t"), std::string::npos);
  EXPECT_NE(first_error("soft val r: A[t](x, v), A[t](y, w) => EqV(t.2, t.2).\n").find("exactly once"),
            std::string::npos);
  EXPECT_NE(first_error("soft val r: A[t](x, v), A[u](x, w) => EqV(t.1, u.2).\n").find("not a value position"),
            std::string::npos);
  EXPECT_NE(first_error("soft val r: A[t](x, v), A[u](x, w) => EqV(t.2, s.2).\n").find("head tid variable s"),
            std::string::npos);
}

TEST(Dsl, ShapeValidationReportsEveryProblem) {
  auto s = parse_spec_unchecked(std::string(kSchema) +
                                "soft obj r: A(x, v), B(x, y), sim(x, v) >= 5 => EqO(x, q).\n"
                                "dc d: B(x, y), x != w.\n");
  auto diags = validate_rule_shapes(s);
  ASSERT_EQ(diags.size(), 3u);
  EXPECT_EQ(diags[0].label, "r");
  EXPECT_EQ(diags[1].label, "r");
  EXPECT_EQ(diags[2].label, "d");
}

TEST(Dsl, RestrictedFlag) {
  EXPECT_TRUE(parse("dc d: B(x, x).\n").restricted());
  EXPECT_FALSE(parse("dc d: B(x, y), x != y.\n").restricted());
}

TEST(Dsl, RoundTripFixtures) {
  std::vector<std::unique_ptr<test::Inst>> insts;
  insts.push_back(test::authors());
  insts.push_back(test::sep_set_card());
  insts.push_back(test::sep_maxes_mina());
  insts.push_back(test::sep_mina_minv());
  insts.push_back(test::sep_maxec_maxsc());
  for (const auto& i : insts) {
    auto text = to_text(i->spec);
    Specification again = parse_spec(text);
    EXPECT_EQ(again, i->spec) << text;
    EXPECT_EQ(to_text(again), text);
  }
  for (const auto& txt : {sat_gadget_spec_text(), sat_minA_gadget_spec_text(), sat_maxE_gadget_spec_text(),
                          horn_gadget_spec_text()}) {
    auto s = parse_spec(txt);
    EXPECT_EQ(parse_spec(to_text(s)), s);
  }
}

TEST(Dsl, RoundTripRandomSpecs) {
  test::Rng rng(2024);
  test::GenOptions opt;
  opt.constants = true;
  for (int i = 0; i < 300; ++i) {
    auto text = test::random_spec_text(rng, opt, 4);
    Specification s = parse_spec(text);
    ASSERT_EQ(parse_spec(to_text(s)), s) << text;
  }
}

TEST(Dsl, SchemaFromSeparateFile) {
  Schema schema = parse_schema(kSchema);
  auto s = parse_spec("dc d: B(x, x).\n", schema);
  EXPECT_EQ(s.schema.size(), 2u);
  EXPECT_THROW(parse_schema("schema A(o: obj).\ndc d: A(x).\n"), ParseError);
}
