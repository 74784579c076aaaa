#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "pxv/cindep.hpp"

using namespace pxv;
using namespace pxv::testing;

namespace {
const char* kQBon = "personnel//person//bonus[project/laptop]";
const char* kV1 = "personnel//person[name/Rick]//bonus";

TreePattern with_random_predicates(std::mt19937_64& rng, const std::vector<std::string>& labels,
                                   TreePattern q) {
  std::vector<std::size_t> mb = q.main_branch();
  std::size_t n = std::uniform_int_distribution<std::size_t>(1, 2)(rng);
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t at = mb[std::uniform_int_distribution<std::size_t>(0, mb.size() - 1)(rng)];
    std::size_t c = q.add_child(at, labels[std::uniform_int_distribution<std::size_t>(0, labels.size() - 1)(rng)],
                                std::uniform_int_distribution<int>(0, 2)(rng) == 0 ? Axis::Descendant : Axis::Child);
    if (std::uniform_int_distribution<int>(0, 2)(rng) == 0) q.add_child(c, labels[0], Axis::Child);
  }
  return q;
}

// main branch of q with every /-edge turned into //
TreePattern loosen(const TreePattern& q) {
  std::vector<std::size_t> mb = q.main_branch();
  TreePattern r(q.label(mb[0]));
  std::size_t cur = 0;
  for (std::size_t k = 1; k < mb.size(); ++k) cur = r.add_child(cur, q.label(mb[k]), Axis::Descendant);
  r.set_out(cur);
  return r;
}

}  // namespace

TEST(CIndep, KnownPairs) {
  EXPECT_TRUE(cindep(Q(kQBon), Q(kV1)).independent());
  EXPECT_FALSE(cindep(Q("a[b]"), Q("a[c]")).independent());
  EXPECT_TRUE(cindep(Q(kQBon), Q("personnel//person//bonus")).independent());
}

TEST(CIndep, DescendantPredicateAboveReachesBelow) {
  // the pair behind the single-view counterexample with equal extensions
  CIndepVerdict v = cindep(Q("a[.//c]/b"), Q("a/b[c]"));
  EXPECT_FALSE(v.independent());
  EXPECT_EQ(v.rule.substr(0, 2), "R3");
  // a child predicate on the root cannot look below b
  EXPECT_TRUE(cindep(Q("a[c]/b"), Q("a/b[c]")).independent());
}

TEST(CIndep, ChainFollowingThePath) {
  // [b/x] at a can run through the b on the path and branch below it
  EXPECT_FALSE(cindep(Q("a[b/x]/b"), Q("a/b[y]")).independent());
  EXPECT_TRUE(cindep(Q("a[c/x]/b"), Q("a/b[y]")).independent());
}

TEST(CIndep, Symmetric) {
  std::mt19937_64 rng(31);
  std::vector<std::string> labels{"a", "b", "c"};
  for (int t = 0; t < 200; ++t) {
    TreePattern q1 = random_pattern(rng, labels, "a", 4, 2);
    TreePattern q2 = random_pattern(rng, labels, "a", 4, 2);
    EXPECT_EQ(cindep(q1, q2).verdict, cindep(q2, q1).verdict) << to_string(q1) << " / " << to_string(q2);
  }
}

TEST(CIndep, ReflexiveDependence) {
  std::mt19937_64 rng(32);
  std::vector<std::string> labels{"a", "b", "c"};
  for (int t = 0; t < 100; ++t) {
    TreePattern q = random_pattern(rng, labels, "a", 4, 2);
    if (q.size() == q.depth()) continue;
    EXPECT_FALSE(cindep(q, q).independent()) << to_string(q);
  }
}

TEST(Falsify, FindsMuxCounterexample) {
  FalsifyResult r = cindep_falsify(Q("a[b]"), Q("a[c]"), 1, 200);
  ASSERT_FALSE(r.consistent);
  EXPECT_NE(r.joint * r.appearance, r.product);

  // the hand-built witness: a with mux{b: 1/2, c: 1/2}
  PDocument p;
  p.add_root("r", "a");
  std::size_t m = p.add_dist(0, NodeKind::Mux);
  p.add_ordinary(m, "b", "b", R("1/2"));
  p.add_ordinary(m, "c", "c", R("1/2"));
  ProbAnswer j = oracle_peval(AnyPattern(parse_intersection("a[b] & a[c]")), p);
  EXPECT_TRUE(j.empty());
  Rational prod = oracle_peval(AnyPattern(Q("a[b]")), p)["r"] * oracle_peval(AnyPattern(Q("a[c]")), p)["r"];
  EXPECT_EQ(prod / appearance_prob(p, "r"), R("1/4"));
  EXPECT_EQ(check_independence_on(Q("a[b]"), Q("a[c]"), p), std::optional<std::string>("r"));
}

TEST(Falsify, KnownIndependentPair) {
  EXPECT_TRUE(cindep_falsify(Q(kQBon), Q(kV1), 2, 200).consistent);
}

TEST(Falsify, SelfPairWithPredicate) {
  PDocument p;
  p.add_root("r", "a");
  std::size_t i = p.add_dist(0, NodeKind::Ind);
  p.add_ordinary(i, "b", "b", R("1/2"));
  EXPECT_TRUE(check_independence_on(Q("a[b]"), Q("a[b]"), p).has_value());
  EXPECT_FALSE(cindep_falsify(Q("a[b]"), Q("a[b]"), 3, 100).consistent);
}

TEST(Falsify, IndependentVerdictsSurviveFalsification) {
  std::mt19937_64 rng(33);
  std::vector<std::string> labels{"a", "b", "c"};
  int independent = 0, dependent_witnessed = 0, dependent = 0;
  for (int t = 0; t < 120; ++t) {
    TreePattern q1 = random_pattern(rng, labels, "a", 4, 2);
    TreePattern q2 = with_random_predicates(rng, labels, t % 2 ? main_branch_pattern(q1) : loosen(q1));
    CIndepVerdict v = cindep(q1, q2);
    FalsifyResult f = cindep_falsify(q1, q2, 1000 + static_cast<std::uint64_t>(t), v.independent() ? 150 : 40);
    if (v.independent()) {
      ++independent;
      EXPECT_TRUE(f.consistent) << to_string(q1) << " / " << to_string(q2) << "\n"
                                << serialize_pdoc(*f.counterexample) << " at " << f.node;
    } else {
      ++dependent;
      dependent_witnessed += !f.consistent;
    }
  }
  EXPECT_GT(independent, 20);
  EXPECT_GT(dependent, 20);
  EXPECT_GT(dependent_witnessed, 0);
  std::cout << "independent " << independent << ", dependent " << dependent << " (witnessed "
            << dependent_witnessed << ")\n";
}

TEST(CIndep, JsonShape) {
  CIndepVerdict v = cindep(Q("a[b]"), Q("a[c]"));
  std::string s = verdict_to_json(v);
  EXPECT_NE(s.find("\"verdict\":\"Dependent\""), std::string::npos);
  EXPECT_NE(s.find("\"counterexample\":null"), std::string::npos);
}
