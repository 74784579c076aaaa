#include <gtest/gtest.h>

#include "json.hpp"
#include "pxv/generator.hpp"
#include "pxv/verify.hpp"

using namespace pxv;

TEST(Verify, ZeroTrialsPasses) {
  VerifyReport r = verify(1, 0);
  EXPECT_TRUE(r.passed());
  EXPECT_EQ(r.trials, 0u);
  auto j = nlohmann::json::parse(report_to_json(r));
  EXPECT_TRUE(j["passed"].get<bool>());
}

TEST(Verify, SmallRunAgrees) {
  VerifyReport r = verify(7, 60);
  EXPECT_EQ(r.trials, 60u);
  EXPECT_EQ(r.disagreement_count, 0u) << report_to_json(r, false);
  EXPECT_EQ(r.falsified, 0u);
  EXPECT_GT(r.tp_plans + r.product_plans + r.system_plans, 0u);
  EXPECT_EQ(r.trial_ms.size(), 60u);
}

TEST(Verify, Deterministic) {
  VerifyReport a = verify(99, 25), b = verify(99, 25);
  EXPECT_EQ(report_to_json(a, false), report_to_json(b, false));
  EXPECT_NE(trial_seed(99, 0), trial_seed(99, 1));
  EXPECT_NE(trial_seed(99, 0), trial_seed(100, 0));
}

TEST(Verify, InjectedFaultIsCaught) {
  VerifyOptions opts;
  opts.fault = Fault::SkipAppearanceDivisor;
  opts.screen_claims = false;
  VerifyReport r = verify(3, 300, {}, opts);
  ASSERT_GT(r.multi_view_plans, 0u);
  EXPECT_FALSE(r.passed());
  ASSERT_TRUE(r.first_disagreement.has_value());
  EXPECT_TRUE(r.first_disagreement->kind == "product" || r.first_disagreement->kind == "system");
  auto j = nlohmann::json::parse(report_to_json(r, false));
  EXPECT_TRUE(j.contains("first_disagreement"));
  EXPECT_TRUE(j["first_disagreement"].contains("instance"));
}

TEST(Gen, SameSeedSameInstance) {
  EXPECT_EQ(serialize_instance(gen_instance(17)), serialize_instance(gen_instance(17)));
  EXPECT_NE(serialize_instance(gen_instance(17)), serialize_instance(gen_instance(18)));
}

TEST(Gen, NoDistributionalNodesMeansOneWorld) {
  GenParams gp;
  gp.max_dist_nodes = 0;
  for (std::uint64_t s = 0; s < 20; ++s) {
    Instance in = gen_instance(s, gp);
    auto ws = enumerate_worlds(in.pdoc);
    ASSERT_EQ(ws.size(), 1u);
    EXPECT_EQ(ws[0].probability, 1);
  }
}

TEST(Gen, SweepIsValidAndMeetsViewPrecondition) {
  for (std::uint64_t s = 0; s < 100; ++s) {
    Instance in = gen_instance(s);
    EXPECT_TRUE(validate_pdoc(in.pdoc).ok()) << s;
    EXPECT_LE(in.views.size(), GenParams{}.max_views);
    EXPECT_LE(in.query.depth(), GenParams{}.query_depth);
    for (const auto& v : in.views) {
      bool ok = false;
      for (std::size_t k = 1; k <= in.query.depth() && !ok; ++k)
        ok = contains(slice(in.query, k).prefix, v.pattern);
      EXPECT_TRUE(ok) << s << ": " << to_string(v.pattern) << " vs " << to_string(in.query);
    }
    Instance back = parse_instance(serialize_instance(in));
    EXPECT_EQ(serialize_instance(back), serialize_instance(in));
  }
}
