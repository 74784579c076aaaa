// Alignments of several main branches onto one root-to-answer path, and the
// interleaving patterns they induce.
#include <algorithm>
#include <map>
#include <unordered_set>

#include "pxv/pattern.hpp"

namespace pxv {

namespace {

struct Branch {
  std::vector<std::size_t> nodes;
  std::vector<std::string> labels;
  std::vector<Axis> axes;
};

class Aligner {
 public:
  Aligner(const std::vector<const TreePattern*>& members, std::size_t budget) : budget_(budget) {
    for (const TreePattern* m : members) {
      Branch b;
      b.nodes = m->main_branch();
      for (std::size_t x : b.nodes) {
        b.labels.push_back(m->label(x));
        b.axes.push_back(m->node(x).axis);
      }
      branches_.push_back(std::move(b));
    }
  }

  std::vector<Alignment> run() {
    std::size_t k = branches_.size();
    if (k == 0) return {};
    const std::string& root = branches_[0].labels[0];
    for (const Branch& b : branches_)
      if (b.labels[0] != root) return {};
    Alignment::Position first;
    first.label = root;
    for (std::size_t i = 0; i < k; ++i) first.nodes.emplace_back(i, branches_[i].nodes[0]);
    bool any_single = false, all_single = true;
    for (const Branch& b : branches_) {
      any_single = any_single || b.nodes.size() == 1;
      all_single = all_single && b.nodes.size() == 1;
    }
    if (any_single) {
      if (!all_single) return {};
      out_.push_back(Alignment{{first}});
      return out_;
    }
    current_.positions.push_back(first);
    std::vector<std::size_t> ptr(k, 1);
    std::vector<char> flag(k, 1);
    search(ptr, flag);
    return out_;
  }

 private:
  std::string key(const std::vector<std::size_t>& ptr, const std::vector<char>& flag) const {
    std::string s;
    for (std::size_t i = 0; i < ptr.size(); ++i) {
      s += std::to_string(ptr[i]);
      s += flag[i] ? '+' : '-';
    }
    return s;
  }

  // Returns true if at least one complete alignment extends the current prefix.
  bool search(std::vector<std::size_t>& ptr, std::vector<char>& flag) {
    std::size_t k = branches_.size();
    std::vector<std::size_t> open;
    for (std::size_t i = 0; i < k; ++i)
      if (ptr[i] < branches_[i].nodes.size()) open.push_back(i);
    if (open.empty()) {
      out_.push_back(current_);
      if (out_.size() > budget_) throw LimitExceeded("alignment budget exceeded");
      return true;
    }
    std::string state = key(ptr, flag);
    if (dead_.count(state)) return false;

    std::vector<std::size_t> forced;
    for (std::size_t i : open) {
      bool child = branches_[i].axes[ptr[i]] == Axis::Child;
      if (child && !flag[i]) {
        dead_.insert(state);
        return false;
      }
      if (child) forced.push_back(i);
    }
    bool found = false;
    std::size_t n = open.size();
    for (std::size_t mask = 1; mask < (std::size_t(1) << n); ++mask) {
      std::vector<std::size_t> S;
      for (std::size_t b = 0; b < n; ++b)
        if (mask & (std::size_t(1) << b)) S.push_back(open[b]);
      if (!std::all_of(forced.begin(), forced.end(), [&](std::size_t f) {
            return std::find(S.begin(), S.end(), f) != S.end();
          }))
        continue;
      const std::string& lab = branches_[S[0]].labels[ptr[S[0]]];
      bool ok = true;
      bool any_last = false;
      for (std::size_t i : S) {
        ok = ok && branches_[i].labels[ptr[i]] == lab;
        any_last = any_last || ptr[i] + 1 == branches_[i].nodes.size();
      }
      if (!ok) continue;
      if (any_last) {
        // outs coalesce, and only at the very end
        if (S.size() != n) continue;
        bool all_last = std::all_of(S.begin(), S.end(), [&](std::size_t i) {
          return ptr[i] + 1 == branches_[i].nodes.size();
        });
        if (!all_last) continue;
      }
      Alignment::Position pos;
      pos.label = lab;
      pos.axis = Axis::Descendant;
      for (std::size_t i : S) {
        if (flag[i] && branches_[i].axes[ptr[i]] == Axis::Child) pos.axis = Axis::Child;
        pos.nodes.emplace_back(i, branches_[i].nodes[ptr[i]]);
      }
      std::vector<std::size_t> ptr2 = ptr;
      std::vector<char> flag2(k, 0);
      for (std::size_t i : S) {
        ++ptr2[i];
        flag2[i] = 1;
      }
      current_.positions.push_back(std::move(pos));
      if (search(ptr2, flag2)) found = true;
      current_.positions.pop_back();
    }
    if (!found) dead_.insert(state);
    return found;
  }

  std::vector<Branch> branches_;
  std::size_t budget_;
  Alignment current_;
  std::vector<Alignment> out_;
  std::unordered_set<std::string> dead_;
};

}  // namespace

std::vector<Alignment> alignments(const std::vector<const TreePattern*>& members, std::size_t budget) {
  Aligner a(members, budget);
  return a.run();
}

TreePattern realize(const Alignment& a, const std::vector<const TreePattern*>& members) {
  TreePattern r(a.positions[0].label);
  std::vector<std::size_t> chain{0};
  for (std::size_t p = 1; p < a.positions.size(); ++p)
    chain.push_back(r.add_child(chain.back(), a.positions[p].label, a.positions[p].axis));
  std::vector<std::vector<char>> on_mb;
  for (const TreePattern* m : members) on_mb.push_back(m->main_branch_mask());
  for (std::size_t p = 0; p < a.positions.size(); ++p) {
    for (auto [mi, x] : a.positions[p].nodes) {
      const TreePattern& m = *members[mi];
      for (std::size_t c : m.node(x).children)
        if (!on_mb[mi][c]) r.graft(chain[p], m, c, m.node(c).axis);
    }
  }
  r.set_out(chain.back());
  return r;
}

std::vector<TreePattern> interleavings(const IntersectionPattern& q) {
  std::vector<const TreePattern*> ms;
  for (const auto& m : q.members) ms.push_back(&m);
  std::map<std::string, TreePattern> uniq;
  for (const Alignment& a : alignments(ms)) {
    TreePattern t = minimize(realize(a, ms));
    std::string s = to_string(t);
    uniq.emplace(std::move(s), std::move(t));
  }
  std::vector<TreePattern> out;
  for (auto& [s, t] : uniq) out.push_back(std::move(t));
  return out;
}

bool satisfiable(const IntersectionPattern& q) {
  std::vector<const TreePattern*> ms;
  for (const auto& m : q.members) ms.push_back(&m);
  // a zero budget stops at the first complete alignment
  try {
    return !alignments(ms, 0).empty();
  } catch (const LimitExceeded&) {
    return true;
  }
}

bool equiv_tp_cap(const TreePattern& q, const IntersectionPattern& Q) {
  std::vector<TreePattern> I = interleavings(Q);
  if (I.empty()) return false;
  bool some = std::any_of(I.begin(), I.end(), [&](const TreePattern& t) { return contains(q, t); });
  if (!some) return false;
  return std::all_of(I.begin(), I.end(), [&](const TreePattern& t) { return contains(t, q); });
}

bool cap_contained_in(const IntersectionPattern& Q, const TreePattern& q) {
  std::vector<TreePattern> I = interleavings(Q);
  return std::all_of(I.begin(), I.end(), [&](const TreePattern& t) { return contains(t, q); });
}

bool cap_equivalent(const IntersectionPattern& A, const IntersectionPattern& B) {
  std::vector<TreePattern> IA = interleavings(A), IB = interleavings(B);
  auto covered = [](const std::vector<TreePattern>& xs, const std::vector<TreePattern>& ys) {
    return std::all_of(xs.begin(), xs.end(), [&](const TreePattern& x) {
      return std::any_of(ys.begin(), ys.end(), [&](const TreePattern& y) { return contains(x, y); });
    });
  };
  return covered(IA, IB) && covered(IB, IA);
}

}  // namespace pxv
