#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "pxv/cindep.hpp"
#include "pxv/generator.hpp"
#include "pxv/rewrite_tp.hpp"

using namespace pxv;
using namespace pxv::testing;

namespace {
const char* kQBon = "personnel//person//bonus[project/laptop]";
const char* kV1 = "personnel//person[name/Rick]//bonus";
const char* kV2 = "personnel//person//bonus";

ViewDef V(const std::string& name, const std::string& q) { return {name, Q(q)}; }

std::vector<ViewDef> load_views(const std::string& name) {
  return parse_view_list(read_file(fixture_path(name)));
}
}  // namespace

TEST(DeriveParts, BonusOverUnconditionedView) {
  auto d = derive_parts(Q(kQBon), V("v2", kV2));
  ASSERT_TRUE(std::holds_alternative<RewriteParts>(d));
  const auto& parts = std::get<RewriteParts>(d);
  EXPECT_EQ(parts.k, 3u);
  EXPECT_TRUE(parts.restricted);
  EXPECT_TRUE(equivalent(parts.compensation, Q("bonus[project/laptop]")));
  EXPECT_TRUE(equivalent(parts.v_prime, parts.q_prime));
}

TEST(DeriveParts, ViewPredicateAboveDepth) {
  auto d = derive_parts(Q("a/b[c]"), V("v", "a[.//c]/b"));
  ASSERT_TRUE(std::holds_alternative<RewriteParts>(d));
  const auto& parts = std::get<RewriteParts>(d);
  EXPECT_EQ(parts.k, 2u);
  EXPECT_TRUE(equivalent(parts.v_prime, Q("a[.//c]/b")));
  EXPECT_TRUE(equivalent(parts.q_double_prime, Q("a/b[c]")));
}

TEST(DeriveParts, Rejections) {
  auto mismatch = derive_parts(Q("a/b/c"), V("v", "a/d"));
  ASSERT_TRUE(std::holds_alternative<Rejection>(mismatch));
  EXPECT_EQ(std::get<Rejection>(mismatch).gate, "equivalence");
  EXPECT_TRUE(std::holds_alternative<Rejection>(derive_parts(Q("a/b"), V("v", "a/b/c"))));
  EXPECT_TRUE(std::holds_alternative<Rejection>(derive_parts(Q(kQBon), V("v1", kV1))));
  EXPECT_TRUE(std::holds_alternative<Rejection>(derive_parts(Q("a/b/c"), V("v", "a//b"))));
}

TEST(FindTp, BonusPicksUnconditionedView) {
  TpSearch s = find_tp_rewritings(Q(kQBon), {V("v1", kV1), V("v2", kV2)});
  ASSERT_EQ(s.plans.size(), 1u);
  EXPECT_EQ(s.plans[0].view, "v2");
  EXPECT_TRUE(s.plans[0].restricted);
  ASSERT_EQ(s.rejections.size(), 1u);
  EXPECT_EQ(s.rejections[0].view, "v1");
  EXPECT_TRUE(equivalent(unfold(s.plans[0].plan_pattern(), {{"v2", Q(kV2)}}), Q(kQBon)));
  EXPECT_EQ(tp_plan_to_json(s.plans[0]),
            R"({"kind":"tp","view":"v2","compensation":"bonus[project/laptop]","mode":"restricted"})");
}

TEST(FrRestricted, BonusAnswer) {
  PDocument p = load_pdoc("per.json");
  std::vector<ViewDef> vs{V("v1", kV1), V("v2", kV2)};
  TpSearch s = find_tp_rewritings(Q(kQBon), vs);
  ASSERT_EQ(s.plans.size(), 1u);
  ViewExtension e = materialize_prob(vs[1], p);
  EXPECT_EQ(fr_restricted(s.plans[0], e), (ProbAnswer{{"n5", R("9/10")}}));
  EXPECT_EQ(exec_tp(s.plans[0], e), peval(Q(kQBon), p));
  // survives a JSON round trip of both the plan and the extension
  TpPlan back = tp_plan_from_json(tp_plan_to_json(s.plans[0]), vs);
  EXPECT_EQ(exec_tp(back, parse_extension(serialize_extension(e))), (ProbAnswer{{"n5", R("9/10")}}));
}

TEST(FrRestricted, OutPredicateDivides) {
  // v carries a predicate at its out node; the divisor strips it back out
  PDocument p = load_pdoc("per.json");
  ViewDef v = V("v", "personnel//person/bonus[project]");
  TpSearch s = find_tp_rewritings(Q("personnel//person/bonus[project/laptop]"), {v});
  ASSERT_EQ(s.plans.size(), 1u);
  ViewExtension e = materialize_prob(v, p);
  EXPECT_EQ(exec_tp(s.plans[0], e), peval(Q("personnel//person/bonus[project/laptop]"), p));
}

TEST(FindTp, DependentPredicateRejected) {
  std::vector<ViewDef> vs = load_views("dep_views.json");
  TreePattern q = Q("a/b[c]");
  TpSearch s = find_tp_rewritings(q, vs);
  EXPECT_TRUE(s.plans.empty());
  ASSERT_EQ(s.rejections.size(), 1u);
  EXPECT_EQ(s.rejections[0].gate, "c-independence gate");

  // two documents the view cannot tell apart, with different answers
  PDocument p1 = load_pdoc("dep_p1.json");
  PDocument p2 = load_pdoc("dep_p2.json");
  ViewExtension e1 = materialize_prob(vs[0], p1);
  ViewExtension e2 = materialize_prob(vs[0], p2);
  EXPECT_EQ(serialize_extension(e1), serialize_extension(e2));
  EXPECT_EQ(e1.selection(), (ProbAnswer{{"n1", R("3/4")}}));
  EXPECT_EQ(oracle_peval(AnyPattern(q), p1), (ProbAnswer{{"n1", R("1/2")}}));
  EXPECT_EQ(oracle_peval(AnyPattern(q), p2), (ProbAnswer{{"n1", R("3/8")}}));
}

TEST(FindTp, LiteralChildPredicateIsIndependent) {
  // with a child-axis view predicate the two conditions sit on different nodes
  EXPECT_TRUE(cindep(Q("a[c]/b"), Q("a/b[c]")).independent());
  EXPECT_TRUE(cindep_falsify(Q("a[c]/b"), Q("a/b[c]"), 5, 300).consistent);
  ViewDef v = V("v", "a[c]/b");
  TpSearch s = find_tp_rewritings(Q("a[c]/b[c]"), {v});
  ASSERT_EQ(s.plans.size(), 1u);
  for (const char* f : {"dep_p1.json", "dep_p2.json"}) {
    PDocument p = load_pdoc(f);
    EXPECT_EQ(exec_tp(s.plans[0], materialize_prob(v, p)), peval(Q("a[c]/b[c]"), p)) << f;
  }
}

TEST(FindTp, PrefixSuffixPredicateRejected) {
  std::vector<ViewDef> vs = load_views("psfx_views.json");
  TreePattern q = Q("a//b[e]/c/b/c//d");
  TpSearch s = find_tp_rewritings(q, vs);
  EXPECT_TRUE(s.plans.empty());
  ASSERT_EQ(s.rejections.size(), 1u);
  EXPECT_EQ(s.rejections[0].gate, "prefix-suffix predicate gate");
  EXPECT_EQ(s.rejections[0].u, 2u);

  PDocument pa = load_pdoc("psfx_p1.json");
  PDocument pb = load_pdoc("psfx_p2.json");
  ViewExtension ea = materialize_prob(vs[0], pa);
  ViewExtension eb = materialize_prob(vs[0], pb);
  EXPECT_EQ(serialize_extension(ea), serialize_extension(eb));
  EXPECT_EQ(ea.selection(), (ProbAnswer{{"n6", R("0.12")}, {"n8", R("0.24")}}));
  EXPECT_EQ(peval(q, pa), (ProbAnswer{{"n9", R("0.288")}}));
  EXPECT_EQ(peval(q, pb), (ProbAnswer{{"n9", R("0.264")}}));
  EXPECT_EQ(oracle_peval(AnyPattern(q), pa), peval(q, pa));
  EXPECT_EQ(oracle_peval(AnyPattern(q), pb), peval(q, pb));
  EXPECT_EQ(R("0.4") * R("0.3") + R("0.6") * R("0.4") - R("0.3") * R("0.4") * R("0.6"), R("0.288"));
  EXPECT_EQ(R("0.3") * R("0.4") + R("0.3") * R("0.8") - R("0.3") * R("0.4") * R("0.8"), R("0.264"));

  // forcing the general formula anyway: same output on both, so at least one is wrong
  TpPlan forced = make_tp_plan(vs[0], slice(q, 5).suffix);
  EXPECT_FALSE(forced.restricted);
  ProbAnswer fa = fr_general(forced, ea);
  ProbAnswer fb = fr_general(forced, eb);
  EXPECT_EQ(fa, fb);
  EXPECT_TRUE(fa != peval(q, pa) || fb != peval(q, pb));
}

TEST(FrGeneral, NestedOccurrencesWithPrefixSuffix) {
  std::vector<ViewDef> vs = load_views("chain_views.json");
  PDocument p = load_pdoc("chain_bcbc.json");
  TreePattern q = Q("a//b/c/b/c//d");
  TpSearch s = find_tp_rewritings(q, vs);
  ASSERT_EQ(s.plans.size(), 1u);
  EXPECT_FALSE(s.plans[0].restricted);
  EXPECT_EQ(s.plans[0].u, 2u);
  ViewExtension e = materialize_prob(vs[0], p);
  EXPECT_EQ(e.occurrence_roots().size(), 3u);  // c2, c3 and the sibling c2x
  ProbAnswer truth = oracle_peval(AnyPattern(q), p);
  ASSERT_TRUE(truth.count("d"));
  EXPECT_EQ(fr_general(s.plans[0], e), truth);
  EXPECT_EQ(exec_tp(s.plans[0], e), truth);
  EXPECT_THROW(fr_general(s.plans[0], e, 1), LimitExceeded);
}

TEST(FrGeneral, SingleEventMatchesRestricted) {
  PDocument p = load_pdoc("per.json");
  std::vector<ViewDef> vs{V("v2", kV2)};
  TpSearch s = find_tp_rewritings(Q(kQBon), vs);
  ASSERT_EQ(s.plans.size(), 1u);
  ViewExtension e = materialize_prob(vs[0], p);
  EXPECT_EQ(fr_general(s.plans[0], e), fr_restricted(s.plans[0], e));
}

TEST(FindTp, RandomPlansAreSound) {
  std::mt19937_64 rng(41);
  GenParams gp;
  gp.labels = {"a", "b", "c"};
  gp.max_dist_nodes = 7;
  gp.max_nodes = 18;
  gp.max_depth = 8;
  int restricted = 0, general = 0, rejected = 0, nonempty = 0;
  for (int t = 0; t < 600; ++t) {
    PDocument p = random_pdoc(rng, gp);
    TreePattern q = random_query_for(rng, gp, p);
    if (q.depth() < 2) continue;
    std::uniform_int_distribution<std::size_t> kd(1, q.depth());
    std::size_t k = kd(rng);
    SliceResult sl = slice(q, k);
    TreePattern v = rng() % 2 ? sl.prefix : strip_out_predicates(sl.prefix);
    std::vector<ViewDef> vs{{"v", v}};
    TpSearch s = find_tp_rewritings(q, vs);
    rejected += s.plans.empty();
    if (s.plans.empty()) continue;
    (s.plans[0].restricted ? restricted : general)++;
    ViewExtension e = materialize_prob(vs[0], p);
    ProbAnswer truth = peval(q, p);
    nonempty += !truth.empty();
    ASSERT_EQ(exec_tp(s.plans[0], e), truth)
        << to_string(q) << " via " << to_string(v) << "\n" << serialize_pdoc(p);
  }
  EXPECT_GT(restricted, 50);
  EXPECT_GT(general, 40);
  EXPECT_GT(nonempty, 50);
  std::cout << "restricted " << restricted << " general " << general << " rejected " << rejected
            << " nonempty " << nonempty << "\n";
}
