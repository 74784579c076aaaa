#include "pxv/generator.hpp"

#include <algorithm>

#include "json.hpp"

namespace pxv {

namespace {

std::size_t pick(std::mt19937_64& rng, std::size_t lo, std::size_t hi) {
  return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

bool coin(std::mt19937_64& rng, std::size_t num, std::size_t den) { return pick(rng, 1, den) <= num; }

const std::vector<Rational>& ind_probs() {
  static const std::vector<Rational> v{Rational(1, 2), Rational(1, 3), Rational(2, 3), Rational(1, 4),
                                       Rational(3, 4), Rational(1, 5), Rational(2, 5), Rational(4, 5),
                                       Rational(1)};
  return v;
}

class DocBuilder {
 public:
  DocBuilder(std::mt19937_64& rng, const GenParams& gp) : rng_(rng), gp_(gp) {}

  PDocument build() {
    p_.name = "gen";
    p_.add_root(next_id(), "a");
    ordinary_budget_ = gp_.max_nodes - 1;
    dist_budget_ = gp_.max_dist_nodes;
    expand(0, 1);
    return std::move(p_);
  }

 private:
  std::string next_id() { return "n" + std::to_string(++counter_); }
  const std::string& label() { return gp_.labels[pick(rng_, 0, gp_.labels.size() - 1)]; }

  void expand(std::size_t node, std::size_t depth) {
    if (depth >= gp_.max_depth) return;
    std::size_t kids = pick(rng_, 0, depth == 1 ? 3 : 2);
    for (std::size_t k = 0; k < kids && ordinary_budget_ > 0; ++k) {
      if (dist_budget_ > 0 && coin(rng_, 1, 2)) add_dist(node, depth, Rational(1), true);
      else add_leafish(node, depth, Rational(1));
    }
  }

  void add_leafish(std::size_t parent, std::size_t depth, const Rational& p) {
    --ordinary_budget_;
    std::size_t c = p_.add_ordinary(parent, next_id(), label(), p);
    expand(c, depth + 1);
  }

  void add_dist(std::size_t parent, std::size_t depth, const Rational& p, bool allow_chain) {
    --dist_budget_;
    bool mux = coin(rng_, 1, 2);
    std::size_t d = p_.add_dist(parent, mux ? NodeKind::Mux : NodeKind::Ind, p);
    std::size_t kids = pick(rng_, 1, 3);
    std::vector<Rational> probs;
    if (mux) {
      std::vector<std::size_t> w;
      std::size_t total = pick(rng_, 0, 2);
      for (std::size_t k = 0; k < kids; ++k) {
        w.push_back(pick(rng_, 1, 3));
        total += w.back();
      }
      for (std::size_t x : w) probs.emplace_back(Rational(static_cast<long>(x), static_cast<long>(total)));
      for (auto& q : probs) q.canonicalize();
    } else {
      for (std::size_t k = 0; k < kids; ++k) probs.push_back(ind_probs()[pick(rng_, 0, ind_probs().size() - 1)]);
    }
    for (std::size_t k = 0; k < kids; ++k) {
      if (allow_chain && dist_budget_ > 0 && coin(rng_, 1, 8)) {
        add_dist(d, depth, probs[k], false);
      } else if (ordinary_budget_ > 0 || k == 0) {
        if (ordinary_budget_ == 0) ++ordinary_budget_;  // leaves must be ordinary
        add_leafish(d, depth, probs[k]);
      }
    }
  }

  std::mt19937_64& rng_;
  const GenParams& gp_;
  PDocument p_;
  std::size_t counter_ = 0;
  std::size_t ordinary_budget_ = 0;
  std::size_t dist_budget_ = 0;
};

}  // namespace

PDocument random_pdoc(std::mt19937_64& rng, const GenParams& gp) {
  DocBuilder b(rng, gp);
  PDocument p = b.build();
  p.reindex();
  return p;
}

TreePattern random_query(std::mt19937_64& rng, const GenParams& gp) {
  auto label = [&]() -> const std::string& { return gp.labels[pick(rng, 0, gp.labels.size() - 1)]; };
  auto axis = [&] { return coin(rng, 1, 3) ? Axis::Descendant : Axis::Child; };
  TreePattern q("a");
  std::size_t depth = pick(rng, 1, std::max<std::size_t>(1, gp.query_depth));
  std::vector<std::size_t> chain{0};
  for (std::size_t k = 1; k < depth; ++k) chain.push_back(q.add_child(chain.back(), label(), axis()));
  std::size_t preds = pick(rng, 0, gp.pred_count);
  for (std::size_t k = 0; k < preds; ++k) {
    std::size_t at = chain[pick(rng, 0, chain.size() - 1)];
    std::size_t c = q.add_child(at, label(), axis());
    if (coin(rng, 1, 4)) q.add_child(c, label(), axis());
  }
  q.set_out(chain.back());
  return q;
}

TreePattern random_query_for(std::mt19937_64& rng, const GenParams& gp, const PDocument& p) {
  std::vector<std::size_t> ordinary;
  for (std::size_t i = 0; i < p.size(); ++i)
    if (p.is_ordinary(i)) ordinary.push_back(i);
  std::size_t y = ordinary[pick(rng, 0, ordinary.size() - 1)];
  std::vector<std::size_t> path;
  for (std::size_t i = y; i != kNoNode; i = p.ordinary_parent(i)) path.push_back(i);
  std::reverse(path.begin(), path.end());
  // keep the root and y, drop some intermediate nodes
  std::vector<std::size_t> kept{path[0]};
  for (std::size_t k = 1; k + 1 < path.size(); ++k)
    if (!coin(rng, 1, 3)) kept.push_back(path[k]);
  if (path.size() > 1) kept.push_back(path.back());
  while (kept.size() > std::max<std::size_t>(1, gp.query_depth)) kept.erase(kept.begin() + 1);

  TreePattern q(p.node(kept[0]).label);
  std::vector<std::size_t> chain{0};
  for (std::size_t k = 1; k < kept.size(); ++k) {
    bool adjacent = p.ordinary_parent(kept[k]) == kept[k - 1];
    Axis ax = adjacent && !coin(rng, 1, 5) ? Axis::Child : Axis::Descendant;
    chain.push_back(q.add_child(chain.back(), p.node(kept[k]).label, ax));
  }
  auto ordinary_children = [&](std::size_t x) {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < p.size(); ++i)
      if (p.is_ordinary(i) && p.ordinary_parent(i) == x) out.push_back(i);
    return out;
  };
  std::size_t preds = pick(rng, 0, gp.pred_count);
  for (std::size_t k = 0; k < preds; ++k) {
    std::size_t at = pick(rng, 0, kept.size() - 1);
    std::vector<std::size_t> kids = ordinary_children(kept[at]);
    if (kids.empty() || coin(rng, 1, 5)) {
      q.add_child(chain[at], gp.labels[pick(rng, 0, gp.labels.size() - 1)],
                  coin(rng, 1, 3) ? Axis::Descendant : Axis::Child);
      continue;
    }
    std::size_t z = kids[pick(rng, 0, kids.size() - 1)];
    std::size_t c = q.add_child(chain[at], p.node(z).label, coin(rng, 1, 4) ? Axis::Descendant : Axis::Child);
    std::vector<std::size_t> grand = ordinary_children(z);
    if (!grand.empty() && coin(rng, 1, 3))
      q.add_child(c, p.node(grand[pick(rng, 0, grand.size() - 1)]).label, Axis::Child);
  }
  q.set_out(chain.back());
  return q;
}

TreePattern random_relaxation(std::mt19937_64& rng, const TreePattern& q) {
  std::size_t depth = q.depth();
  std::size_t a = coin(rng, 1, 2) ? depth : pick(rng, 1, depth);
  TreePattern base = slice(q, a).prefix;
  // drop predicate subtrees
  std::vector<char> on_mb = base.main_branch_mask();
  std::vector<std::size_t> top;
  for (std::size_t i = 1; i < base.size(); ++i)
    if (!on_mb[i] && on_mb[base.node(i).parent]) top.push_back(i);
  TreePattern r = base;
  for (auto it = top.rbegin(); it != top.rend(); ++it)
    if (coin(rng, 1, 2)) r = r.without(*it);
  // loosen main-branch edges
  std::vector<std::size_t> mb = r.main_branch();
  TreePattern out(r.label(0));
  std::vector<std::size_t> map(r.size(), kNoNode);
  map[0] = 0;
  std::vector<char> mbm = r.main_branch_mask();
  for (std::size_t i = 1; i < r.size(); ++i) {
    Axis ax = r.node(i).axis;
    if (mbm[i] && ax == Axis::Child && coin(rng, 1, 4)) ax = Axis::Descendant;
    map[i] = out.add_child(map[r.node(i).parent], r.label(i), ax);
  }
  out.set_out(map[r.out()]);
  return out;
}

Instance gen_instance(std::uint64_t seed, const GenParams& gp) {
  std::mt19937_64 rng(seed);
  Instance inst;
  inst.pdoc = random_pdoc(rng, gp);
  inst.query = coin(rng, 4, 5) ? random_query_for(rng, gp, inst.pdoc) : random_query(rng, gp);
  std::size_t nviews = pick(rng, 1, std::max<std::size_t>(1, gp.max_views));
  for (std::size_t k = 0; k < nviews; ++k) {
    ViewDef v;
    v.name = "v" + std::to_string(k + 1);
    std::size_t kind = pick(rng, 0, 4);
    if (k > 0 && kind == 0) {
      v.pattern = main_branch_pattern(inst.query);
    } else if (kind <= 2) {
      // q with some of its predicate positions; these are what intersections combine
      std::vector<std::size_t> keep;
      for (std::size_t d = 0; d < inst.query.depth(); ++d)
        if (coin(rng, 1, 2)) keep.push_back(d);
      v.pattern = keep_predicates_at(inst.query, keep);
    } else {
      v.pattern = random_relaxation(rng, inst.query);
    }
    inst.views.push_back(std::move(v));
  }
  return inst;
}

std::string serialize_instance(const Instance& inst) {
  nlohmann::ordered_json j;
  j["pdoc"] = nlohmann::ordered_json::parse(serialize_pdoc(inst.pdoc));
  j["query"] = to_string(inst.query);
  j["views"] = nlohmann::ordered_json::parse(serialize_view_list(inst.views));
  return j.dump();
}

Instance parse_instance(const std::string& text) {
  auto j = nlohmann::ordered_json::parse(text);
  Instance inst;
  inst.pdoc = parse_pdoc(j.at("pdoc").dump());
  inst.query = parse_tree_pattern(j.at("query").get<std::string>());
  inst.views = parse_view_list(j.at("views").dump());
  return inst;
}

}  // namespace pxv
