#include "pxv/verify.hpp"

#include <chrono>
#include <set>

#include "json.hpp"
#include "pxv/cindep.hpp"
#include "pxv/rewrite_cap.hpp"
#include "pxv/rewrite_tp.hpp"

namespace pxv {

std::uint64_t trial_seed(std::uint64_t seed, std::size_t trial) {
  // splitmix64 step
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (trial + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

namespace {

using Claim = std::pair<TreePattern, TreePattern>;

struct Trial {
  std::size_t index;
  std::uint64_t seed;
  const Instance& inst;
  VerifyReport& report;
  bool ok = true;

  void disagree(const std::string& kind, const std::string& detail, const ProbAnswer& expected,
                const ProbAnswer& got) {
    ok = false;
    ++report.disagreement_count;
    if (report.first_disagreement) return;
    report.first_disagreement =
        Disagreement{index, seed, kind, detail, serialize_instance(inst), expected, got};
  }
};

}  // namespace

VerifyReport verify(std::uint64_t seed, std::size_t trials, const VerifyBounds& bounds,
                    const VerifyOptions& opts) {
  VerifyReport rep;
  ExecOptions exec_opts;
  exec_opts.skip_appearance_divisor = opts.fault == Fault::SkipAppearanceDivisor;
  for (std::size_t i = 0; i < trials; ++i) {
    auto t0 = std::chrono::steady_clock::now();
    std::uint64_t s = trial_seed(seed, i);
    Instance inst = gen_instance(s, bounds.gen);
    Trial tr{i, s, inst, rep};
    const TreePattern& q = inst.query;
    const PDocument& p = inst.pdoc;

    ProbAnswer truth = peval(q, p);
    ProbAnswer oracle = oracle_peval(AnyPattern(q), p);
    if (truth != oracle) tr.disagree("peval-oracle", to_string(q), oracle, truth);

    ExtensionSet ext;
    for (const auto& v : inst.views) ext.emplace(v.name, materialize_prob(v, p));
    std::vector<Claim> claims;

    TpSearch tps = find_tp_rewritings(q, inst.views);
    claims.insert(claims.end(), tps.independence_claims.begin(), tps.independence_claims.end());
    for (const TpPlan& plan : tps.plans) {
      ++rep.tp_plans;
      try {
        ProbAnswer got = exec_tp(plan, ext.at(plan.view));
        if (got != truth) tr.disagree("tp", tp_plan_to_json(plan), truth, got);
      } catch (const LimitExceeded&) {
        ++rep.limit_skips;
      }
    }

    ProductSearch ps = find_product_rewriting(q, inst.views);
    claims.insert(claims.end(), ps.independence_claims.begin(), ps.independence_claims.end());
    if (ps.plan) {
      ++rep.product_plans;
      rep.multi_view_plans += ps.plan->members.size() > 1;
      try {
        ProbAnswer got = exec_cap(*ps.plan, ext, exec_opts);
        if (got != truth) tr.disagree("product", cap_plan_to_json(*ps.plan), truth, got);
      } catch (const LimitExceeded&) {
        ++rep.limit_skips;
      }
    }

    try {
      CapSearch cs = tprewrite_cap(q, inst.views);
      claims.insert(claims.end(), cs.independence_claims.begin(), cs.independence_claims.end());
      if (cs.status == CapStatus::Found) {
        ++rep.system_plans;
        ProbAnswer got = exec_cap(*cs.plan, ext, exec_opts);
        if (got != truth) tr.disagree("system", cap_plan_to_json(*cs.plan), truth, got);
      }
    } catch (const LimitExceeded&) {
      ++rep.limit_skips;
    }

    if (opts.screen_claims) {
      std::set<std::pair<std::string, std::string>> seen;
      for (const auto& [a, b] : claims) {
        auto key = std::minmax(canonical(a), canonical(b));
        if (!seen.insert(key).second) continue;
        ++rep.claims_screened;
        FalsifyResult f = cindep_falsify(a, b, s, bounds.falsify_trials);
        if (!f.consistent) {
          ++rep.falsified;
          tr.disagree("falsified-claim", to_string(a) + " vs " + to_string(b) + " at " + f.node,
                      {{f.node, f.joint}}, {{f.node, f.product / f.appearance}});
        }
      }
    }

    ++rep.trials;
    rep.agreements += tr.ok;
    rep.trial_ms.push_back(
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count());
  }
  return rep;
}

std::string report_to_json(const VerifyReport& r, bool timing) {
  nlohmann::ordered_json j;
  j["trials"] = r.trials;
  j["agreements"] = r.agreements;
  j["passed"] = r.passed();
  j["plans"] = {{"tp", r.tp_plans},
                {"product", r.product_plans},
                {"system", r.system_plans},
                {"multi_view", r.multi_view_plans}};
  j["claims_screened"] = r.claims_screened;
  j["falsified"] = r.falsified;
  j["limit_skips"] = r.limit_skips;
  j["disagreements"] = r.disagreement_count;
  if (r.first_disagreement) {
    const Disagreement& d = *r.first_disagreement;
    nlohmann::ordered_json e;
    e["trial"] = d.trial;
    e["seed"] = d.seed;
    e["kind"] = d.kind;
    e["detail"] = d.detail;
    e["expected"] = nlohmann::ordered_json::parse(answer_to_json(d.expected));
    e["got"] = nlohmann::ordered_json::parse(answer_to_json(d.got));
    e["instance"] = nlohmann::ordered_json::parse(d.instance);
    j["first_disagreement"] = e;
  }
  if (timing) j["trial_ms"] = r.trial_ms;
  return j.dump();
}

}  // namespace pxv
