#include "pxv/rewrite_tp.hpp"

#include <algorithm>
#include <map>

#include "json.hpp"

namespace pxv {

std::variant<RewriteParts, Rejection> derive_parts(const TreePattern& q, const ViewDef& v) {
  Rejection rej{v.name, "equivalence", "", 0};
  std::size_t k = v.pattern.depth();
  if (k > q.depth()) {
    rej.reason = "view main branch is longer than the query's";
    return rej;
  }
  SliceResult sl = slice(q, k);
  if (v.pattern.label(v.pattern.out()) != sl.suffix.label(0)) {
    rej.reason = "view output label differs from the query's depth-" + std::to_string(k) + " label";
    return rej;
  }
  if (!equivalent(compensate(v.pattern, sl.suffix), q)) {
    rej.reason = "comp(v, q_(" + std::to_string(k) + ")) is not equivalent to q";
    return rej;
  }
  RewriteParts parts;
  parts.k = k;
  parts.v_prime = strip_out_predicates(v.pattern);
  parts.q_prime = strip_out_predicates(sl.prefix);
  // out stays at depth k: the whole compensation then reads as a condition on n_i,
  // which is what the gate has to compare against the view's own conditions
  parts.q_double_prime = compensate(main_branch_pattern(sl.prefix), sl.suffix);
  parts.q_double_prime.set_out(parts.q_double_prime.main_branch()[k - 1]);
  parts.compensation = sl.suffix;
  parts.restricted = !v.pattern.has_descendant_edge_on_main_branch() ||
                     !sl.suffix.has_descendant_edge_on_main_branch();
  return parts;
}

GateResult apply_gates(const TreePattern& v, const TreePattern& compensation,
                       const TreePattern& q_double_prime) {
  GateResult g;
  g.v_prime = strip_out_predicates(v);
  g.q_double_prime = q_double_prime;
  g.verdict = cindep(g.v_prime, q_double_prime);
  if (!g.verdict.independent()) {
    g.gate = "c-independence gate";
    g.reason = "v' and q'' are not c-independent (" + g.verdict.rule + ")";
    return g;
  }
  g.restricted = !v.has_descendant_edge_on_main_branch() ||
                 !compensation.has_descendant_edge_on_main_branch();
  StructureReport st = structure(v);
  g.u = st.u;
  if (!g.restricted) {
    std::vector<char> on_mb = v.main_branch_mask();
    for (std::size_t i = 0; i + 1 < st.u; ++i) {
      std::size_t x = st.last_token.nodes[i];
      bool has_pred = std::any_of(v.node(x).children.begin(), v.node(x).children.end(),
                                  [&](std::size_t c) { return !on_mb[c]; });
      if (has_pred) {
        g.gate = "prefix-suffix predicate gate";
        g.reason = "u = " + std::to_string(st.u) + " and last-token node " + std::to_string(i + 1) +
                   " ('" + v.label(x) + "') carries predicates";
        return g;
      }
    }
  }
  g.passed = true;
  return g;
}

TreePattern TpPlan::plan_pattern() const {
  return compensate(doc_head(view, view_pattern.label(view_pattern.out())), compensation);
}

TpPlan make_tp_plan(const ViewDef& v, const TreePattern& compensation) {
  TpPlan p;
  p.view = v.name;
  p.view_pattern = v.pattern;
  p.compensation = compensation;
  p.k = v.pattern.depth();
  p.restricted = !v.pattern.has_descendant_edge_on_main_branch() ||
                 !compensation.has_descendant_edge_on_main_branch();
  p.u = structure(v.pattern).u;
  return p;
}

TpSearch find_tp_rewritings(const TreePattern& q, const std::vector<ViewDef>& V) {
  TpSearch s;
  for (const ViewDef& v : V) {
    auto d = derive_parts(q, v);
    if (auto* r = std::get_if<Rejection>(&d)) {
      s.rejections.push_back(*r);
      continue;
    }
    const RewriteParts& parts = std::get<RewriteParts>(d);
    GateResult g = apply_gates(v.pattern, parts.compensation, parts.q_double_prime);
    if (!g.passed) {
      s.rejections.push_back({v.name, g.gate, g.reason, g.u});
      continue;
    }
    s.plans.push_back(make_tp_plan(v, parts.compensation));
    s.independence_claims.emplace_back(g.v_prime, g.q_double_prime);
  }
  return s;
}

// ---------------------------------------------------------------- f_r

namespace {

std::size_t occurrence_root_of(const ViewExtension& e, std::size_t i) {
  std::size_t ind = e.ind_node();
  while (e.ext.node(i).parent != ind) {
    i = e.ext.node(i).parent;
    if (i == kNoNode) throw Error("node outside any occurrence");
  }
  return i;
}

TreePattern out_subpattern(const TreePattern& v) { return v.subtree(v.out(), v.out()); }

}  // namespace

ProbAnswer fr_restricted(const TpPlan& plan, const ViewExtension& ext) {
  ProbAnswer out;
  TreePattern qr = plan.plan_pattern();
  TreePattern vk = out_subpattern(plan.view_pattern);
  std::map<std::size_t, Rational> divisor;
  for (const auto& [id, pr] : peval(qr, ext.ext)) {
    std::size_t o = ext.ext.require(id);
    std::size_t r = occurrence_root_of(ext, o);
    auto it = divisor.find(r);
    if (it == divisor.end()) {
      PDocument sub = subtree_at(ext.ext, ext.ext.node(r).id);
      it = divisor.emplace(r, peval_at({&vk}, sub, 0)).first;
    }
    if (it->second == 0) throw Error("zero divisor for a supported node");
    out[ext.original(o)] += pr / it->second;
  }
  return out;
}

namespace {

struct Occurrence {
  std::size_t root;  // ext index
  PDocument sub;
  Rational beta;
  Rational divisor;  // Pr(root ∈ v_(k)(sub))
};

struct Event {
  std::size_t occ;
  std::string copy_id;  // copy of the answer node inside this occurrence
  Rational prob;        // Pr(copy ∈ q_(k)(sub))
  std::size_t distance; // ordinary non-marker nodes from the occurrence root to the copy
};

std::size_t ordinary_distance(const PDocument& sub, std::size_t i) {
  std::size_t n = 0;
  for (; i != kNoNode; i = sub.node(i).parent)
    if (sub.is_ordinary(i) && !is_marker_label(sub.node(i).label)) ++n;
  return n;
}

}  // namespace

ProbAnswer fr_general(const TpPlan& plan, const ViewExtension& ext, std::size_t event_cap) {
  const TreePattern& v = plan.view_pattern;
  const TreePattern& qk = plan.compensation;
  TreePattern vk = out_subpattern(v);
  StructureReport st = structure(v);
  std::size_t m = st.m;
  std::size_t u = st.u;
  std::vector<std::size_t> mb = v.main_branch();
  auto depth_of = [&](std::size_t x) {
    return static_cast<std::size_t>(std::find(mb.begin(), mb.end(), x) - mb.begin()) + 1;
  };

  std::vector<Occurrence> occs;
  std::map<std::string, std::vector<Event>> events;  // original id -> events
  for (std::size_t r : ext.occurrence_roots()) {
    Occurrence oc;
    oc.root = r;
    oc.sub = subtree_at(ext.ext, ext.ext.node(r).id);
    oc.beta = ext.beta(r);
    oc.divisor = peval_at({&vk}, oc.sub, 0);
    std::size_t idx = occs.size();
    for (const auto& [id, pr] : peval(qk, oc.sub)) {
      std::size_t local = oc.sub.require(id);
      events[ext.occurrence.at(id)].push_back({idx, id, pr, ordinary_distance(oc.sub, local)});
    }
    occs.push_back(std::move(oc));
  }

  ProbAnswer out;
  for (auto& [n, evs] : events) {
    if (evs.size() > event_cap)
      throw LimitExceeded("node " + n + " has " + std::to_string(evs.size()) +
                          " events, inclusion-exclusion cap is " + std::to_string(event_cap));
    // shallowest occurrence (farthest from the answer node) first
    std::stable_sort(evs.begin(), evs.end(),
                     [](const Event& a, const Event& b) { return a.distance > b.distance; });
    std::size_t a = evs.size();
    Rational total = 0;
    for (std::size_t mask = 1; mask < (std::size_t(1) << a); ++mask) {
      std::size_t i1 = static_cast<std::size_t>(__builtin_ctzll(mask));
      const Event& e1 = evs[i1];
      const Occurrence& o1 = occs[e1.occ];
      if (o1.divisor == 0) throw Error("zero divisor for a supported node");
      Rational p;
      if ((mask & (mask - 1)) == 0) {
        p = e1.prob;
      } else {
        std::vector<TreePattern> alpha{qk};
        bool impossible = false;
        for (std::size_t j = i1 + 1; j < a; ++j) {
          if (!(mask & (std::size_t(1) << j))) continue;
          const std::string& nj = ext.original(occs[evs[j].occ].root);
          // copy of n_j inside occurrence i1
          std::size_t copy = kNoNode;
          for (std::size_t x = 0; x < o1.sub.size(); ++x)
            if (o1.sub.is_ordinary(x) && !is_marker_label(o1.sub.node(x).label) &&
                ext.occurrence.at(o1.sub.node(x).id) == nj) {
              copy = x;
              break;
            }
          if (copy == kNoNode) {
            impossible = true;
            break;
          }
          std::size_t s = ordinary_distance(o1.sub, copy);
          TreePattern path;
          if (u == 0 || s > m) {
            path = TreePattern(v.label(st.last_token.nodes.back()));
            std::vector<std::size_t> map(v.size(), kNoNode);
            path.graft(0, v, st.last_token.nodes.front(), Axis::Descendant, &map);
            path.set_out(map[v.out()]);
          } else {
            std::size_t start = st.last_token.nodes[m - s];
            path = slice(v, depth_of(start)).suffix;
          }
          path.add_child(path.out(), marker_label(nj), Axis::Child);
          alpha.push_back(compensate(path, qk));
        }
        if (impossible) continue;
        std::vector<const TreePattern*> ms;
        for (const auto& t : alpha) ms.push_back(&t);
        p = peval_at(ms, o1.sub, o1.sub.require(e1.copy_id));
      }
      Rational term = o1.beta / o1.divisor * p;
      if (__builtin_popcountll(mask) % 2) total += term;
      else total -= term;
    }
    if (total != 0) out[n] = total;
  }
  return out;
}

ProbAnswer exec_tp(const TpPlan& plan, const ViewExtension& ext) {
  return plan.restricted ? fr_restricted(plan, ext) : fr_general(plan, ext);
}

// ---------------------------------------------------------------- JSON

std::string tp_plan_to_json(const TpPlan& plan) {
  nlohmann::ordered_json j;
  j["kind"] = "tp";
  j["view"] = plan.view;
  j["compensation"] = to_string(plan.compensation);
  j["mode"] = plan.restricted ? "restricted" : "general";
  return j.dump();
}

TpPlan tp_plan_from_json(const std::string& text, const std::vector<ViewDef>& views) {
  auto j = nlohmann::json::parse(text);
  if (j.at("kind").get<std::string>() != "tp") throw Error("not a tp plan");
  TpPlan p = make_tp_plan(find_view(views, j.at("view").get<std::string>()),
                          parse_tree_pattern(j.at("compensation").get<std::string>()));
  if (j.contains("mode")) p.restricted = j.at("mode").get<std::string>() == "restricted";
  return p;
}

std::string tp_search_to_json(const TpSearch& s) {
  nlohmann::ordered_json j;
  auto plans = nlohmann::ordered_json::array();
  for (const auto& p : s.plans) plans.push_back(nlohmann::ordered_json::parse(tp_plan_to_json(p)));
  j["plans"] = plans;
  auto rej = nlohmann::ordered_json::array();
  for (const auto& r : s.rejections) {
    nlohmann::ordered_json e;
    e["view"] = r.view;
    e["gate"] = r.gate;
    e["reason"] = r.reason;
    if (r.gate == "prefix-suffix predicate gate") e["u"] = r.u;
    rej.push_back(e);
  }
  j["rejections"] = rej;
  return j.dump();
}

}  // namespace pxv
