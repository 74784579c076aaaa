#include "pxv/pattern.hpp"

#include <algorithm>
#include <functional>
#include <map>

namespace pxv {

TreePattern::TreePattern(std::string root_label) {
  PatternNode n;
  n.label = std::move(root_label);
  nodes_.push_back(std::move(n));
}

std::size_t TreePattern::add_child(std::size_t parent, std::string label, Axis axis) {
  PatternNode n;
  n.label = std::move(label);
  n.axis = axis;
  n.parent = parent;
  nodes_.push_back(std::move(n));
  std::size_t i = nodes_.size() - 1;
  nodes_[parent].children.push_back(i);
  return i;
}

std::vector<std::size_t> TreePattern::main_branch() const {
  std::vector<std::size_t> mb;
  for (std::size_t i = out_; i != kNoNode; i = nodes_[i].parent) mb.push_back(i);
  std::reverse(mb.begin(), mb.end());
  return mb;
}

std::vector<char> TreePattern::main_branch_mask() const {
  std::vector<char> m(nodes_.size(), 0);
  for (std::size_t i = out_; i != kNoNode; i = nodes_[i].parent) m[i] = 1;
  return m;
}

std::size_t TreePattern::graft(std::size_t parent, const TreePattern& other, std::size_t src,
                               Axis axis, std::vector<std::size_t>* map) {
  std::size_t me = add_child(parent, other.nodes_[src].label, axis);
  if (map) (*map)[src] = me;
  for (std::size_t c : other.nodes_[src].children) graft(me, other, c, other.nodes_[c].axis, map);
  return me;
}

void TreePattern::graft_children(std::size_t dst, const TreePattern& other, std::size_t src,
                                 std::vector<std::size_t>* map) {
  if (map) (*map)[src] = dst;
  for (std::size_t c : other.nodes_[src].children) graft(dst, other, c, other.nodes_[c].axis, map);
}

namespace {

// Rebuild q keeping only nodes not flagged in `drop` (dropping whole subtrees).
TreePattern rebuild(const TreePattern& q, const std::vector<char>& drop, std::size_t new_out) {
  TreePattern r(q.label(0));
  std::vector<std::size_t> map(q.size(), kNoNode);
  map[0] = 0;
  for (std::size_t i = 1; i < q.size(); ++i) {
    if (drop[i]) continue;
    std::size_t p = q.node(i).parent;
    if (map[p] == kNoNode) continue;
    map[i] = r.add_child(map[p], q.label(i), q.node(i).axis);
  }
  if (new_out == kNoNode || map[new_out] == kNoNode) throw Error("out node removed");
  r.set_out(map[new_out]);
  return r;
}

}  // namespace

TreePattern TreePattern::without(std::size_t i) const {
  if (i == 0) throw Error("cannot remove the root");
  std::vector<char> drop(nodes_.size(), 0);
  drop[i] = 1;
  return rebuild(*this, drop, out_);
}

TreePattern TreePattern::subtree(std::size_t i, std::size_t out_node) const {
  TreePattern r(nodes_[i].label);
  std::vector<std::size_t> map(nodes_.size(), kNoNode);
  r.graft_children(0, *this, i, &map);
  std::size_t o = out_node == kNoNode ? i : out_node;
  if (map[o] == kNoNode) throw Error("out node outside subtree");
  r.set_out(map[o]);
  return r;
}

bool TreePattern::has_descendant_edge_on_main_branch() const {
  for (std::size_t i = out_; i != 0 && i != kNoNode; i = nodes_[i].parent)
    if (nodes_[i].axis == Axis::Descendant) return true;
  return false;
}

// ---------------------------------------------------------------- evaluation

namespace {

// match[x][y]: subpattern at x embeds with x -> y (ignoring the out restriction).
std::vector<std::vector<char>> match_table(const TreePattern& q, const Document& d) {
  std::size_t P = q.size(), N = d.nodes.size();
  std::vector<std::vector<char>> match(P, std::vector<char>(N, 0));
  std::vector<std::vector<char>> below(P, std::vector<char>(N, 0));  // some proper descendant matches
  for (std::size_t x = P; x-- > 0;) {
    for (std::size_t y = N; y-- > 0;) {
      bool ok = q.label(x) == d.nodes[y].label;
      for (std::size_t c : q.node(x).children) {
        if (!ok) break;
        if (q.node(c).axis == Axis::Descendant) {
          ok = below[c][y];
        } else {
          ok = std::any_of(d.nodes[y].children.begin(), d.nodes[y].children.end(),
                           [&](std::size_t z) { return match[c][z] != 0; });
        }
      }
      match[x][y] = ok;
      bool b = false;
      for (std::size_t z : d.nodes[y].children)
        if (match[x][z] || below[x][z]) b = true;
      below[x][y] = b;
    }
  }
  return match;
}

}  // namespace

std::vector<std::size_t> eval_doc_indices(const TreePattern& q, const Document& d) {
  if (d.nodes.empty() || q.size() == 0) return {};
  auto match = match_table(q, d);
  std::vector<std::size_t> mb = q.main_branch();
  std::size_t N = d.nodes.size();
  std::vector<char> reach(N, 0);
  if (!match[mb[0]][0]) return {};
  reach[0] = 1;
  for (std::size_t k = 1; k < mb.size(); ++k) {
    std::size_t x = mb[k];
    std::vector<char> next(N, 0);
    // anc[y]: some proper ancestor of y is in reach
    std::vector<char> anc(N, 0);
    for (std::size_t y = 1; y < N; ++y) {
      std::size_t p = d.nodes[y].parent;
      anc[y] = anc[p] || reach[p];
    }
    for (std::size_t y = 1; y < N; ++y) {
      if (!match[x][y]) continue;
      if (q.node(x).axis == Axis::Child) next[y] = reach[d.nodes[y].parent];
      else next[y] = anc[y];
    }
    reach.swap(next);
  }
  std::vector<std::size_t> out;
  for (std::size_t y = 0; y < N; ++y)
    if (reach[y]) out.push_back(y);
  return out;
}

std::set<std::string> eval_doc(const TreePattern& q, const Document& d) {
  std::set<std::string> out;
  for (std::size_t y : eval_doc_indices(q, d)) out.insert(d.nodes[y].id);
  return out;
}

std::set<std::string> eval_doc(const IntersectionPattern& q, const Document& d) {
  std::set<std::string> acc;
  for (std::size_t i = 0; i < q.members.size(); ++i) {
    std::set<std::string> r = eval_doc(q.members[i], d);
    if (i == 0) {
      acc = std::move(r);
    } else {
      std::set<std::string> both;
      std::set_intersection(acc.begin(), acc.end(), r.begin(), r.end(),
                            std::inserter(both, both.end()));
      acc = std::move(both);
    }
  }
  return acc;
}

// ---------------------------------------------------------------- containment

namespace {

const char* const kOutMarker = "\x1f" "out";

TreePattern with_out_marker(const TreePattern& q) {
  TreePattern r = q;
  r.add_child(q.out(), kOutMarker, Axis::Child);
  r.set_out(q.out());
  return r;
}

// Is there a homomorphism from `from` into `to` mapping roots to roots?
bool homomorphism(const TreePattern& from, const TreePattern& to) {
  std::size_t P = from.size(), N = to.size();
  std::vector<std::vector<char>> h(P, std::vector<char>(N, 0));
  std::vector<std::vector<char>> below(P, std::vector<char>(N, 0));
  for (std::size_t x = P; x-- > 0;) {
    for (std::size_t y = N; y-- > 0;) {
      bool ok = from.label(x) == to.label(y);
      for (std::size_t c : from.node(x).children) {
        if (!ok) break;
        if (from.node(c).axis == Axis::Descendant) {
          ok = below[c][y];
        } else {
          ok = false;
          for (std::size_t z : to.node(y).children)
            if (to.node(z).axis == Axis::Child && h[c][z]) {
              ok = true;
              break;
            }
        }
      }
      h[x][y] = ok;
      bool b = false;
      for (std::size_t z : to.node(y).children)
        if (h[x][z] || below[x][z]) b = true;
      below[x][y] = b;
    }
  }
  return h[0][0];
}

}  // namespace

bool contains(const TreePattern& q1, const TreePattern& q2) {
  if (q1.label(0) != q2.label(0)) return false;
  return homomorphism(with_out_marker(q2), with_out_marker(q1));
}

bool equivalent(const TreePattern& q1, const TreePattern& q2) {
  return contains(q1, q2) && contains(q2, q1);
}

TreePattern minimize(const TreePattern& q) {
  TreePattern cur = q;
  bool changed = true;
  while (changed) {
    changed = false;
    std::vector<char> mb = cur.main_branch_mask();
    for (std::size_t i = 1; i < cur.size(); ++i) {
      if (mb[i]) continue;
      TreePattern cand = cur.without(i);
      if (contains(cand, cur)) {
        cur = std::move(cand);
        changed = true;
        break;
      }
    }
  }
  return cur;
}

std::string canonical(const TreePattern& q) { return to_string(minimize(q)); }

bool isomorphic(const TreePattern& a, const TreePattern& b) { return canonical(a) == canonical(b); }

// ---------------------------------------------------------------- structure

std::size_t prefix_suffix(const std::vector<std::string>& seq) {
  std::size_t m = seq.size();
  for (std::size_t u = m / 2; u >= 1; --u)
    if (std::equal(seq.begin(), seq.begin() + static_cast<long>(u),
                   seq.end() - static_cast<long>(u)))
      return u;
  return 0;
}

StructureReport structure(const TreePattern& q) {
  StructureReport r;
  r.main_branch = q.main_branch();
  r.depth = r.main_branch.size();
  for (std::size_t k = 0; k < r.depth; ++k) {
    std::size_t x = r.main_branch[k];
    r.labels.push_back(q.label(x));
    r.axes.push_back(k == 0 ? Axis::Child : q.node(x).axis);
    if (k == 0 || r.axes[k] == Axis::Descendant) r.tokens.emplace_back();
    r.tokens.back().nodes.push_back(x);
  }
  r.last_token = r.tokens.back();
  r.m = r.last_token.nodes.size();
  std::vector<std::string> labels;
  for (std::size_t x : r.last_token.nodes) labels.push_back(q.label(x));
  r.u = prefix_suffix(labels);
  return r;
}

SliceResult slice(const TreePattern& q, std::size_t k) {
  std::vector<std::size_t> mb = q.main_branch();
  if (k < 1 || k > mb.size())
    throw Error("slice depth " + std::to_string(k) + " out of range 1.." + std::to_string(mb.size()));
  std::size_t x = mb[k - 1];
  SliceResult r;
  std::vector<char> drop(q.size(), 0);
  if (k < mb.size()) drop[mb[k]] = 1;
  r.prefix = rebuild(q, drop, x);
  r.suffix = q.subtree(x, q.out());
  return r;
}

TreePattern compensate(const TreePattern& q1, const TreePattern& q2) {
  if (q1.label(q1.out()) != q2.label(0))
    throw Error("compensation label mismatch: '" + q1.label(q1.out()) + "' vs '" + q2.label(0) + "'");
  TreePattern r = q1;
  std::vector<std::size_t> map(q2.size(), kNoNode);
  r.graft_children(q1.out(), q2, 0, &map);
  r.set_out(map[q2.out()]);
  return r;
}

TreePattern main_branch_pattern(const TreePattern& q) { return keep_predicates_at(q, {}); }

TreePattern strip_out_predicates(const TreePattern& q) {
  std::vector<char> drop(q.size(), 0);
  for (std::size_t c : q.node(q.out()).children) drop[c] = 1;
  return rebuild(q, drop, q.out());
}

TreePattern keep_predicates_at(const TreePattern& q, const std::vector<std::size_t>& positions) {
  std::vector<std::size_t> mb = q.main_branch();
  std::vector<char> on_mb = q.main_branch_mask();
  TreePattern r(q.label(mb[0]));
  std::vector<std::size_t> chain{0};
  for (std::size_t k = 1; k < mb.size(); ++k)
    chain.push_back(r.add_child(chain.back(), q.label(mb[k]), q.node(mb[k]).axis));
  for (std::size_t p : positions) {
    for (std::size_t c : q.node(mb.at(p)).children)
      if (!on_mb[c]) r.graft(chain[p], q, c, q.node(c).axis);
  }
  r.set_out(chain.back());
  return r;
}

// ---------------------------------------------------------------- doc heads

std::string doc_label(const std::string& view) { return "doc(" + view + ")"; }

bool is_doc_label(const std::string& label, std::string* view) {
  if (label.size() < 6 || label.compare(0, 4, "doc(") != 0 || label.back() != ')') return false;
  if (view) *view = label.substr(4, label.size() - 5);
  return true;
}

TreePattern doc_head(const std::string& view, const std::string& out_label) {
  TreePattern r(doc_label(view));
  r.set_out(r.add_child(0, out_label, Axis::Child));
  return r;
}

TreePattern unfold(const TreePattern& plan, const std::vector<NamedPattern>& views) {
  std::string name;
  if (!is_doc_label(plan.label(0), &name)) return plan;
  auto it = std::find_if(views.begin(), views.end(),
                         [&](const NamedPattern& v) { return v.name == name; });
  if (it == views.end()) throw Error("unfold: unknown view '" + name + "'");
  std::vector<std::size_t> mb = plan.main_branch();
  if (mb.size() < 2 || plan.node(0).children.size() != 1 || plan.node(mb[1]).axis != Axis::Child)
    throw Error("unfold: plan head must be doc(" + name + ")/label");
  const TreePattern& v = it->pattern;
  if (plan.label(mb[1]) != v.label(v.out()))
    throw Error("unfold: label after doc(" + name + ") must be '" + v.label(v.out()) + "'");
  return compensate(v, plan.subtree(mb[1], plan.out()));
}

IntersectionPattern unfold(const IntersectionPattern& plan, const std::vector<NamedPattern>& views) {
  IntersectionPattern r;
  for (const auto& m : plan.members) r.members.push_back(unfold(m, views));
  return r;
}

// ---------------------------------------------------------------- skeletons

bool is_extended_skeleton(const TreePattern& q) {
  std::vector<std::size_t> mb = q.main_branch();
  std::vector<char> on_mb = q.main_branch_mask();
  auto maps_into = [](const std::vector<std::string>& a, const std::vector<std::string>& b) {
    if (a.empty()) return true;
    return std::search(b.begin(), b.end(), a.begin(), a.end()) != b.end();
  };
  for (std::size_t k = 0; k < mb.size(); ++k) {
    std::size_t n = mb[k];
    std::vector<std::string> following;
    for (std::size_t j = k + 1; j < mb.size() && q.node(mb[j]).axis == Axis::Child; ++j)
      following.push_back(q.label(mb[j]));
    // predicate nodes below n
    std::vector<std::size_t> stack;
    for (std::size_t c : q.node(n).children)
      if (!on_mb[c]) stack.push_back(c);
    while (!stack.empty()) {
      std::size_t st = stack.back();
      stack.pop_back();
      for (std::size_t c : q.node(st).children) stack.push_back(c);
      if (q.node(st).axis != Axis::Descendant) continue;
      std::vector<std::string> incoming;
      for (std::size_t x = q.node(st).parent; x != n; x = q.node(x).parent) {
        incoming.push_back(q.label(x));
        if (q.node(x).axis == Axis::Descendant) break;
      }
      std::reverse(incoming.begin(), incoming.end());
      if (maps_into(incoming, following) || maps_into(following, incoming)) return false;
    }
  }
  return true;
}

}  // namespace pxv
