// Condition independence.
//
// Given that the answer node n exists, its root path is fixed, and the parts of
// the document hanging off that path at different depths are independent of
// each other. A predicate can only look into the off-path regions at the depths
// where it may branch away from the path. Two queries are declared dependent
// when, for some alignment of their main branches and some choice of gap sizes
// under //-edges, a predicate of one and a predicate of the other may branch off
// at a common depth.
#include "pxv/cindep.hpp"

#include <algorithm>
#include <climits>
#include <random>
#include <set>
#include <sstream>

#include "json.hpp"
#include "pxv/probeval.hpp"

namespace pxv {

namespace {

struct Pred {
  std::size_t member;
  std::size_t node;      // predicate root in its pattern
  std::size_t position;  // alignment position of its anchor
};

struct BranchSet {
  std::set<int> depths;
  int tail = INT_MAX;  // all depths >= tail
};

std::size_t height(const TreePattern& q, std::size_t i) {
  std::size_t h = 0;
  for (std::size_t c : q.node(i).children) h = std::max(h, 1 + height(q, c));
  return h;
}

class Checker {
 public:
  Checker(const TreePattern& q1, const TreePattern& q2) : q_{&q1, &q2} {}

  CIndepVerdict run() {
    CIndepVerdict v;
    if (q_[0]->label(0) != q_[1]->label(0) ||
        q_[0]->label(q_[0]->out()) != q_[1]->label(q_[1]->out())) {
      v.rule = "trivial: root or output labels differ";
      return v;
    }
    if (q_[0]->depth() == q_[0]->size() || q_[1]->depth() == q_[1]->size()) {
      v.rule = "trivial: a query has no predicates";
      return v;
    }
    std::vector<Alignment> as;
    try {
      as = alignments({q_[0], q_[1]});
    } catch (const LimitExceeded&) {
      v.verdict = Verdict::Dependent;
      v.rule = "alignment budget exceeded";
      return v;
    }
    if (as.empty()) {
      v.rule = "trivial: intersection unsatisfiable";
      return v;
    }
    for (const Alignment& a : as)
      if (check(a, v)) return v;
    v.rule = "no overlapping predicate regions";
    return v;
  }

 private:
  bool check(const Alignment& a, CIndepVerdict& v) {
    std::vector<Pred> preds;
    std::vector<std::vector<char>> mb{q_[0]->main_branch_mask(), q_[1]->main_branch_mask()};
    std::size_t H = 1;
    for (std::size_t p = 0; p < a.positions.size(); ++p)
      for (auto [m, x] : a.positions[p].nodes)
        for (std::size_t c : q_[m]->node(x).children)
          if (!mb[m][c]) {
            preds.push_back({m, c, p});
            H = std::max(H, height(*q_[m], c) + 2);
          }
    bool has0 = false, has1 = false;
    for (const Pred& pr : preds) (pr.member == 0 ? has0 : has1) = true;
    if (!has0 || !has1) return false;

    std::vector<std::size_t> gaps;  // positions entered by a //-edge
    for (std::size_t p = 1; p < a.positions.size(); ++p)
      if (a.positions[p].axis == Axis::Descendant) gaps.push_back(p);
    std::vector<std::size_t> g(gaps.size(), 0);
    while (true) {
      if (realization(a, preds, gaps, g, v)) return true;
      std::size_t k = 0;
      while (k < g.size() && ++g[k] > H) g[k++] = 0;
      if (k == g.size()) break;
    }
    return false;
  }

  bool realization(const Alignment& a, const std::vector<Pred>& preds,
                   const std::vector<std::size_t>& gaps, const std::vector<std::size_t>& g,
                   CIndepVerdict& v) {
    // path labels; "" marks an unconstrained gap node
    path_.clear();
    std::vector<int> depth(a.positions.size(), 0);
    std::size_t gi = 0;
    for (std::size_t p = 0; p < a.positions.size(); ++p) {
      if (gi < gaps.size() && gaps[gi] == p) {
        for (std::size_t k = 0; k < g[gi]; ++k) path_.emplace_back();
        ++gi;
      }
      depth[p] = static_cast<int>(path_.size());
      path_.push_back(a.positions[p].label);
    }
    D_ = static_cast<int>(path_.size()) - 1;
    std::vector<BranchSet> sets;
    for (const Pred& pr : preds) {
      BranchSet b;
      explore(*q_[pr.member], pr.node, depth[pr.position], b);
      sets.push_back(std::move(b));
    }
    for (std::size_t i = 0; i < preds.size(); ++i) {
      if (preds[i].member != 0) continue;
      for (std::size_t j = 0; j < preds.size(); ++j) {
        if (preds[j].member != 1) continue;
        std::string rule;
        if (overlap(sets[i], sets[j], depth[preds[i].position], depth[preds[j].position], rule)) {
          v.verdict = Verdict::Dependent;
          v.rule = rule;
          std::ostringstream os;
          os << "predicate [" << q_[0]->label(preds[i].node) << "] of the first query at position "
             << preds[i].position << " and [" << q_[1]->label(preds[j].node)
             << "] of the second at position " << preds[j].position << " over path ";
          for (std::size_t k = 0; k < path_.size(); ++k) os << (k ? "/" : "") << (path_[k].empty() ? "*" : path_[k]);
          v.detail = os.str();
          return true;
        }
      }
    }
    return false;
  }

  // c hangs below a node placed on the path at depth parent_depth.
  void explore(const TreePattern& q, std::size_t c, int parent_depth, BranchSet& b) {
    if (q.node(c).axis == Axis::Descendant) {
      b.tail = std::min(b.tail, parent_depth);
      return;
    }
    b.depths.insert(parent_depth);  // c placed off the path
    int j = parent_depth + 1;
    if (j > D_) return;
    const std::string& lab = path_[static_cast<std::size_t>(j)];
    if (!lab.empty() && lab != q.label(c)) return;
    for (std::size_t cc : q.node(c).children) explore(q, cc, j, b);  // c placed on the path
  }

  static bool overlap(const BranchSet& x, const BranchSet& y, int ax, int ay, std::string& rule) {
    if (x.tail != INT_MAX && y.tail != INT_MAX) {
      rule = "R3: descendant predicates from both queries";
      return true;
    }
    for (int d : x.depths) {
      if (y.depths.count(d)) {
        rule = (d == ax && d == ay) ? "R1: predicates of both queries at one main-branch node"
                                    : "R2: a /-chain predicate follows the path into the other's region";
        return true;
      }
      if (d >= y.tail) {
        rule = "R3: descendant predicate reaches the other's region";
        return true;
      }
    }
    for (int d : y.depths)
      if (d >= x.tail) {
        rule = "R3: descendant predicate reaches the other's region";
        return true;
      }
    return false;
  }

  const TreePattern* q_[2];
  std::vector<std::string> path_;
  int D_ = 0;
};

}  // namespace

CIndepVerdict cindep(const TreePattern& q1, const TreePattern& q2) {
  Checker c(q1, q2);
  return c.run();
}

// ---------------------------------------------------------------- falsifier

std::optional<std::string> check_independence_on(const TreePattern& q1, const TreePattern& q2,
                                                 const PDocument& p) {
  ProbAnswer a = peval(q1, p), b = peval(q2, p);
  ProbAnswer j = peval_cap(IntersectionPattern{{q1, q2}}, p);
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (!p.is_ordinary(i)) continue;
    const std::string& id = p.node(i).id;
    auto get = [&](const ProbAnswer& m) {
      auto it = m.find(id);
      return it == m.end() ? Rational(0) : it->second;
    };
    Rational app = appearance_prob(p, id);
    if (get(j) * app != get(a) * get(b)) return id;
  }
  return std::nullopt;
}

namespace {

std::size_t pick(std::mt19937_64& rng, std::size_t lo, std::size_t hi) {
  return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

// Small p-documents shaped after the patterns: a pattern (one of the queries or
// one of their interleavings) is instantiated as a tree, sprinkled with noise
// nodes, and then groups of siblings are put under mux/ind nodes.
class Instantiator {
 public:
  Instantiator(std::mt19937_64& rng, std::vector<std::string> labels, std::size_t max_dist)
      : rng_(rng), labels_(std::move(labels)), max_dist_(max_dist) {}

  PDocument make(const TreePattern& shape) {
    tree_.clear();
    tree_.push_back({shape.label(0), {}});
    build(shape, 0, 0);
    std::size_t noise = pick(rng_, 0, 3);
    for (std::size_t k = 0; k < noise; ++k) {
      std::size_t at = pick(rng_, 0, tree_.size() - 1);
      add(at, labels_[pick(rng_, 0, labels_.size() - 1)]);
    }
    PDocument p;
    p.name = "falsify";
    counter_ = 0;
    dist_left_ = max_dist_;
    p.add_root(next_id(), tree_[0].label);
    emit(p, 0, 0);
    p.reindex();
    return p;
  }

 private:
  struct TNode {
    std::string label;
    std::vector<std::size_t> children;
  };

  std::size_t add(std::size_t parent, const std::string& label) {
    tree_.push_back({label, {}});
    std::size_t me = tree_.size() - 1;
    tree_[parent].children.push_back(me);
    return me;
  }

  void build(const TreePattern& q, std::size_t src, std::size_t dst) {
    for (std::size_t c : q.node(src).children) {
      std::size_t copies = pick(rng_, 0, 4) == 0 ? 2 : 1;
      for (std::size_t k = 0; k < copies; ++k) {
        std::size_t at = dst;
        if (q.node(c).axis == Axis::Descendant) {
          std::size_t extra = pick(rng_, 0, 2);
          for (std::size_t e = 0; e < extra; ++e) at = add(at, labels_[pick(rng_, 0, labels_.size() - 1)]);
        }
        std::size_t me = add(at, q.label(c));
        build(q, c, me);
      }
    }
  }

  std::string next_id() { return "n" + std::to_string(++counter_); }

  Rational random_prob() {
    static const std::vector<Rational> v{Rational(1, 2), Rational(1, 3), Rational(2, 3),
                                         Rational(1, 4), Rational(3, 4)};
    return v[pick(rng_, 0, v.size() - 1)];
  }

  void emit(PDocument& p, std::size_t src, std::size_t dst) {
    std::vector<std::size_t> kids = tree_[src].children;
    std::shuffle(kids.begin(), kids.end(), rng_);
    std::size_t i = 0;
    while (i < kids.size()) {
      std::size_t mode = dist_left_ > 0 ? pick(rng_, 0, 3) : 0;
      if (mode == 0) {
        std::size_t me = p.add_ordinary(dst, next_id(), tree_[kids[i]].label);
        emit(p, kids[i], me);
        ++i;
      } else if (mode == 1) {
        --dist_left_;
        std::size_t d = p.add_dist(dst, NodeKind::Ind);
        std::size_t group = std::min<std::size_t>(pick(rng_, 1, 2), kids.size() - i);
        for (std::size_t k = 0; k < group; ++k, ++i) {
          std::size_t me = p.add_ordinary(d, next_id(), tree_[kids[i]].label, random_prob());
          emit(p, kids[i], me);
        }
      } else {
        --dist_left_;
        std::size_t d = p.add_dist(dst, NodeKind::Mux);
        std::size_t group = std::min<std::size_t>(pick(rng_, 1, 3), kids.size() - i);
        std::size_t total = group + pick(rng_, 0, 1);
        for (std::size_t k = 0; k < group; ++k, ++i) {
          Rational q(1, static_cast<long>(total));
          q.canonicalize();
          std::size_t me = p.add_ordinary(d, next_id(), tree_[kids[i]].label, q);
          emit(p, kids[i], me);
        }
      }
    }
  }

  std::mt19937_64& rng_;
  std::vector<std::string> labels_;
  std::size_t max_dist_;
  std::size_t dist_left_ = 0;
  std::size_t counter_ = 0;
  std::vector<TNode> tree_;
};

}  // namespace

FalsifyResult cindep_falsify(const TreePattern& q1, const TreePattern& q2, std::uint64_t seed,
                             std::size_t trials, const FalsifyParams& params) {
  FalsifyResult r;
  std::mt19937_64 rng(seed);
  std::set<std::string> ls;
  for (const TreePattern* q : {&q1, &q2})
    for (std::size_t i = 0; i < q->size(); ++i) ls.insert(q->label(i));
  ls.insert("zz");
  std::vector<std::string> labels(ls.begin(), ls.end());
  std::vector<TreePattern> shapes{q1, q2};
  try {
    for (TreePattern& t : interleavings(IntersectionPattern{{q1, q2}})) shapes.push_back(std::move(t));
  } catch (const LimitExceeded&) {
  }
  if (q1.label(0) != q2.label(0)) shapes.resize(1);
  Instantiator inst(rng, labels, params.max_dist_nodes);
  for (std::size_t t = 0; t < trials; ++t) {
    const TreePattern& shape = shapes[pick(rng, 0, shapes.size() - 1)];
    PDocument p = inst.make(shape);
    ++r.trials_run;
    if (auto bad = check_independence_on(q1, q2, p)) {
      r.consistent = false;
      r.node = *bad;
      ProbAnswer a = peval(q1, p), b = peval(q2, p);
      ProbAnswer j = peval_cap(IntersectionPattern{{q1, q2}}, p);
      r.joint = j.count(*bad) ? j[*bad] : Rational(0);
      r.product = (a.count(*bad) ? a[*bad] : Rational(0)) * (b.count(*bad) ? b[*bad] : Rational(0));
      r.appearance = appearance_prob(p, *bad);
      r.counterexample = std::move(p);
      return r;
    }
  }
  return r;
}

std::string verdict_to_json(const CIndepVerdict& v, const FalsifyResult* f) {
  nlohmann::ordered_json j;
  j["verdict"] = v.independent() ? "Independent" : "Dependent";
  j["rule"] = v.rule;
  if (!v.detail.empty()) j["detail"] = v.detail;
  if (f && f->counterexample) {
    j["counterexample"] = nlohmann::ordered_json::parse(serialize_pdoc(*f->counterexample));
    j["node"] = f->node;
    j["joint"] = to_string(f->joint);
    j["product_over_appearance"] = to_string(f->product / f->appearance);
  } else {
    j["counterexample"] = nullptr;
  }
  if (f) j["trials"] = f->trials_run;
  return j.dump();
}

}  // namespace pxv
