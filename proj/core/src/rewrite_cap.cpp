#include "pxv/rewrite_cap.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <set>

#include "json.hpp"
#include "pxv/cindep.hpp"

namespace pxv {

TreePattern CapMember::pattern() const {
  return compensation ? compensate(view_pattern, *compensation) : view_pattern;
}

TreePattern CapMember::plan_pattern() const {
  TreePattern head = doc_head(view, view_pattern.label(view_pattern.out()));
  return compensation ? compensate(head, *compensation) : head;
}

IntersectionPattern CapPlan::plan_pattern() const {
  IntersectionPattern r;
  for (const auto& m : members) r.members.push_back(m.plan_pattern());
  return r;
}

IntersectionPattern CapPlan::unfolded() const {
  IntersectionPattern r;
  for (const auto& m : members) r.members.push_back(m.pattern());
  return r;
}

namespace {

struct Candidate {
  CapMember member;
  bool admitted = false;  // probabilities recoverable from the view's extension
  std::optional<std::pair<TreePattern, TreePattern>> claim;
};

// Views containing q, then every comp(v, q_(a)) with q^(a) ⊑ v; deduplicated.
std::vector<Candidate> expand(const TreePattern& q, const std::vector<ViewDef>& V) {
  std::vector<Candidate> out;
  std::set<std::string> seen;
  for (const ViewDef& v : V)
    if (contains(q, v.pattern) && seen.insert(canonical(v.pattern)).second)
      out.push_back({{v.name, v.pattern, std::nullopt}, true, std::nullopt});
  std::size_t depth = q.depth();
  for (const ViewDef& v : V)
    for (std::size_t a = 1; a <= depth; ++a) {
      SliceResult sl = slice(q, a);
      if (!contains(sl.prefix, v.pattern)) continue;
      CapMember m{v.name, v.pattern, sl.suffix};
      TreePattern p = m.pattern();
      if (!seen.insert(canonical(p)).second) continue;
      Candidate c{m, false, std::nullopt};
      TpSearch s = find_tp_rewritings(p, {v});
      if (!s.plans.empty()) {
        c.admitted = true;
        c.claim = s.independence_claims.front();
      }
      out.push_back(std::move(c));
    }
  return out;
}

IntersectionPattern intersect(const std::vector<const CapMember*>& ms) {
  IntersectionPattern r;
  for (const auto* m : ms) r.members.push_back(m->pattern());
  return r;
}

}  // namespace

std::vector<CapMember> candidate_members(const TreePattern& q, const std::vector<ViewDef>& V,
                                         std::vector<std::pair<TreePattern, TreePattern>>* claims) {
  std::vector<CapMember> out;
  for (auto& c : expand(q, V)) {
    if (!c.admitted) continue;
    if (claims && c.claim) claims->push_back(*c.claim);
    out.push_back(std::move(c.member));
  }
  return out;
}

std::optional<std::string> appearance_view(const TreePattern& q, const std::vector<ViewDef>& V) {
  TreePattern mbq = main_branch_pattern(q);
  for (const ViewDef& v : V)
    if (contains(mbq, v.pattern)) return v.name;
  return std::nullopt;
}

std::optional<ProbAnswer> appearance_from_views(const TreePattern& q, const std::vector<ViewDef>& V,
                                                const ExtensionSet& ext) {
  auto name = appearance_view(q, V);
  if (!name) return std::nullopt;
  return ext.at(*name).selection();
}

ProductSearch find_product_rewriting(const TreePattern& q, const std::vector<ViewDef>& V,
                                     std::size_t ceiling) {
  ProductSearch r;
  if (V.size() > ceiling) {
    r.reason = std::to_string(V.size()) + " views exceed the subset-search ceiling of " +
               std::to_string(ceiling);
    return r;
  }
  // only needed once two or more probabilities are multiplied
  auto app = appearance_view(q, V);
  std::vector<std::pair<TreePattern, TreePattern>> gate_claims;
  std::vector<Candidate> cands;
  for (auto& c : expand(q, V))
    if (c.admitted) cands.push_back(std::move(c));
  std::size_t n = cands.size();
  std::vector<std::vector<char>> ind(n, std::vector<char>(n, 1));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      ind[i][j] = ind[j][i] = cindep(cands[i].member.pattern(), cands[j].member.pattern()).independent();

  std::vector<std::size_t> chosen;
  std::function<bool(std::size_t, std::size_t)> dfs = [&](std::size_t from, std::size_t size) {
    if (chosen.size() == size) {
      // a lone compensated view is a single-view rewriting, not a product
      if (size == 1 && cands[chosen[0]].member.compensation) return false;
      std::vector<const CapMember*> ms;
      for (std::size_t i : chosen) ms.push_back(&cands[i].member);
      return equiv_tp_cap(q, intersect(ms));
    }
    for (std::size_t i = from; i < n; ++i) {
      bool ok = std::all_of(chosen.begin(), chosen.end(), [&](std::size_t j) { return ind[i][j]; });
      if (!ok) continue;
      chosen.push_back(i);
      if (dfs(i + 1, size)) return true;
      chosen.pop_back();
    }
    return false;
  };
  for (std::size_t size = 1; size <= n && (size == 1 || app); ++size) {
    chosen.clear();
    if (!dfs(0, size)) continue;
    CapPlan plan;
    for (std::size_t i : chosen) {
      plan.members.push_back(cands[i].member);
      if (cands[i].claim) r.independence_claims.push_back(*cands[i].claim);
    }
    for (std::size_t a = 0; a < chosen.size(); ++a)
      for (std::size_t b = a + 1; b < chosen.size(); ++b)
        r.independence_claims.emplace_back(cands[chosen[a]].member.pattern(),
                                           cands[chosen[b]].member.pattern());
    plan.mode = ProductMode{chosen.size() > 1 ? *app : std::string()};
    r.plan = std::move(plan);
    return r;
  }
  r.reason = app ? "no pairwise c-independent subset of the " + std::to_string(n) +
                       " candidate views is equivalent to q"
                 : "no single view rewrites q and no view contains mb(q), so appearance "
                   "probabilities are unavailable";
  return r;
}

CapSearch tprewrite_cap(const TreePattern& q, const std::vector<ViewDef>& V) {
  CapSearch r;
  std::vector<Candidate> cands = expand(q, V);
  for (const auto& c : cands) {
    r.v_prime.push_back(c.member);
    if (c.admitted) {
      r.v_double_prime.push_back(c.member);
      if (c.claim) r.independence_claims.push_back(*c.claim);
    }
  }
  if (r.v_prime.empty()) {
    r.reason = "no view contains q or one of its prefixes";
    return r;
  }
  // members containing another member add nothing to the intersection
  std::vector<TreePattern> vp;
  for (const auto& m : r.v_prime) vp.push_back(m.pattern());
  std::vector<const CapMember*> all;
  bool exact = false;
  for (std::size_t i = 0; i < vp.size(); ++i) {
    exact |= contains(vp[i], q);
    bool redundant = false;
    for (std::size_t j = 0; j < vp.size() && !redundant; ++j)
      if (i != j && contains(vp[j], vp[i]) && (!contains(vp[i], vp[j]) || j < i)) redundant = true;
    if (!redundant) all.push_back(&r.v_prime[i]);
  }
  if (!exact && !equiv_tp_cap(q, intersect(all))) {
    r.reason = "the canonical plan does not unfold to q";
    return r;
  }
  std::vector<TreePattern> pats;
  for (const auto& m : r.v_double_prime) pats.push_back(m.pattern());
  r.decomposition = decompose_views(q, pats);
  r.system = build_system(r.decomposition);
  auto sol = solve_system(r.system);
  if (!sol) {
    bool slash_only = !q.has_descendant_edge_on_main_branch();
    r.status = slash_only ? CapStatus::Unknown : CapStatus::None;
    r.reason = slash_only ? "S(q, V'') has no unique solution and mb(q) has only /-edges"
                          : "S(q, V'') has no unique solution for Pr(n in q)";
    return r;
  }
  CapPlan plan;
  SystemMode mode;
  for (std::size_t i = 0; i < r.v_double_prime.size(); ++i) {
    plan.members.push_back(r.v_double_prime[i]);
    mode.coefficients.push_back((*sol)[i]);
  }
  // V' members outside V'' only guard the support
  for (const auto& c : cands)
    if (!c.admitted) {
      plan.members.push_back(c.member);
      mode.coefficients.push_back(0);
    }
  plan.mode = std::move(mode);
  r.plan = std::move(plan);
  r.status = CapStatus::Found;
  return r;
}

// ---------------------------------------------------------------- execution

ProbAnswer member_probabilities(const CapMember& m, const ExtensionSet& ext) {
  auto it = ext.find(m.view);
  if (it == ext.end()) throw Error("missing extension for view '" + m.view + "'");
  if (!m.compensation) return it->second.selection();
  return exec_tp(make_tp_plan({m.view, m.view_pattern}, *m.compensation), it->second);
}

namespace {

std::set<std::string> member_support(const CapMember& m, const ExtensionSet& ext) {
  auto it = ext.find(m.view);
  if (it == ext.end()) throw Error("missing extension for view '" + m.view + "'");
  std::set<std::string> s;
  if (!m.compensation) {
    for (const auto& [n, p] : it->second.selection()) s.insert(n);
    return s;
  }
  for (const auto& [id, p] : peval(m.plan_pattern(), it->second.ext))
    s.insert(it->second.occurrence.at(id));
  return s;
}

}  // namespace

ProbAnswer exec_cap(const CapPlan& plan, const ExtensionSet& ext, const ExecOptions& opts) {
  ProbAnswer out;
  if (plan.members.empty()) return out;
  if (const auto* pm = std::get_if<ProductMode>(&plan.mode)) {
    std::vector<ProbAnswer> vals;
    for (const auto& m : plan.members) vals.push_back(member_probabilities(m, ext));
    long extra = static_cast<long>(plan.members.size()) - 1;
    if (extra == 0) {
      for (const auto& [n, p] : vals[0])
        if (p != 0) out[n] = p;
      return out;
    }
    auto ait = ext.find(pm->appearance_view);
    if (ait == ext.end()) throw Error("missing extension for view '" + pm->appearance_view + "'");
    ProbAnswer app = ait->second.selection();
    for (const auto& [n, p0] : vals[0]) {
      auto a = app.find(n);
      if (a == app.end()) continue;  // off mb(q): probability 0
      Rational prod = p0;
      bool all = true;
      for (std::size_t i = 1; i < vals.size() && all; ++i) {
        auto it = vals[i].find(n);
        if (it == vals[i].end()) all = false;
        else prod *= it->second;
      }
      if (!all) continue;
      Rational r = opts.skip_appearance_divisor ? prod : prod / pow(a->second, extra);
      if (r != 0) out[n] = r;
    }
    return out;
  }
  const auto& coeffs = std::get<SystemMode>(plan.mode).coefficients;
  if (coeffs.size() != plan.members.size()) throw Error("coefficient count differs from member count");
  mpz_class L = 1;
  for (const auto& c : coeffs) mpz_lcm(L.get_mpz_t(), L.get_mpz_t(), c.get_den().get_mpz_t());
  if (!L.fits_ulong_p()) throw LimitExceeded("coefficient denominators too large");
  std::vector<ProbAnswer> vals(plan.members.size());
  std::vector<std::set<std::string>> guard(plan.members.size());
  for (std::size_t i = 0; i < plan.members.size(); ++i) {
    if (coeffs[i] != 0) vals[i] = member_probabilities(plan.members[i], ext);
    else guard[i] = member_support(plan.members[i], ext);
  }
  std::set<std::string> nodes;
  bool first = true;
  for (std::size_t i = 0; i < plan.members.size(); ++i) {
    std::set<std::string> s = guard[i];
    if (coeffs[i] != 0)
      for (const auto& [n, p] : vals[i]) s.insert(n);
    if (first) nodes = std::move(s);
    else {
      std::set<std::string> keep;
      std::set_intersection(nodes.begin(), nodes.end(), s.begin(), s.end(),
                            std::inserter(keep, keep.begin()));
      nodes = std::move(keep);
    }
    first = false;
  }
  for (const std::string& n : nodes) {
    Rational powered = 1;  // Pr(n in q)^L
    for (std::size_t i = 0; i < plan.members.size(); ++i) {
      if (coeffs[i] == 0) continue;
      mpz_class e = coeffs[i].get_num() * (L / coeffs[i].get_den());
      if (!e.fits_slong_p()) throw LimitExceeded("exponent too large");
      powered *= pow(vals[i].at(n), e.get_si());
    }
    auto root = exact_root(powered, L.get_ui());
    if (!root) throw Error("probability for node '" + n + "' is not an exact rational root");
    if (*root != 0) out[n] = *root;
  }
  return out;
}

// ---------------------------------------------------------------- JSON

std::string status_name(CapStatus s) {
  switch (s) {
    case CapStatus::Found: return "found";
    case CapStatus::None: return "none";
    case CapStatus::Unknown: return "unknown";
  }
  return "?";
}

std::string cap_plan_to_json(const CapPlan& plan) {
  nlohmann::ordered_json j;
  j["kind"] = "cap";
  auto ms = nlohmann::ordered_json::array();
  for (const auto& m : plan.members) {
    nlohmann::ordered_json e;
    e["view"] = m.view;
    e["compensation"] = m.compensation ? nlohmann::ordered_json(to_string(*m.compensation))
                                       : nlohmann::ordered_json(nullptr);
    ms.push_back(e);
  }
  j["members"] = ms;
  nlohmann::ordered_json mode;
  if (const auto* pm = std::get_if<ProductMode>(&plan.mode)) {
    mode["product"] = {{"appearance_view", pm->appearance_view}};
  } else {
    auto cs = nlohmann::ordered_json::array();
    for (const auto& c : std::get<SystemMode>(plan.mode).coefficients) cs.push_back(to_string(c));
    mode["system"] = {{"coefficients", cs}};
  }
  j["mode"] = mode;
  return j.dump();
}

CapPlan cap_plan_from_json(const std::string& text, const std::vector<ViewDef>& views) {
  auto j = nlohmann::json::parse(text);
  if (j.at("kind").get<std::string>() != "cap") throw Error("not a cap plan");
  CapPlan p;
  for (const auto& e : j.at("members")) {
    const ViewDef& v = find_view(views, e.at("view").get<std::string>());
    CapMember m{v.name, v.pattern, std::nullopt};
    if (e.contains("compensation") && !e.at("compensation").is_null())
      m.compensation = parse_tree_pattern(e.at("compensation").get<std::string>());
    p.members.push_back(std::move(m));
  }
  const auto& mode = j.at("mode");
  if (mode.contains("product")) {
    p.mode = ProductMode{mode.at("product").at("appearance_view").get<std::string>()};
  } else {
    SystemMode s;
    for (const auto& c : mode.at("system").at("coefficients"))
      s.coefficients.push_back(parse_rational(c.get<std::string>()));
    p.mode = std::move(s);
  }
  return p;
}

}  // namespace pxv
