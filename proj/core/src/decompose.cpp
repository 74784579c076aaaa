#include <algorithm>
#include <map>
#include <set>

#include "pxv/cindep.hpp"
#include "pxv/rewrite_cap.hpp"

namespace pxv {

namespace {

bool has_predicates(const TreePattern& v, std::size_t x, const std::vector<char>& on_mb) {
  for (std::size_t c : v.node(x).children)
    if (!on_mb[c]) return true;
  return false;
}

// mb(q) ∩ w, kept as a single pattern when that is possible
IntersectionPattern with_main_branch(const TreePattern& mbq, const TreePattern& w) {
  IntersectionPattern both;
  both.members = {mbq, w};
  std::vector<TreePattern> I = interleavings(both);
  if (I.empty()) throw Error("d-view '" + to_string(w) + "' does not meet mb(q)");
  std::vector<TreePattern> top;
  for (std::size_t i = 0; i < I.size(); ++i) {
    bool dominated = false;
    for (std::size_t j = 0; j < I.size() && !dominated; ++j)
      if (i != j && contains(I[i], I[j]) && (!contains(I[j], I[i]) || j < i)) dominated = true;
    if (!dominated) top.push_back(I[i]);
  }
  IntersectionPattern r;
  if (top.size() == 1) r.members = {top[0]};
  else r = both;
  return r;
}

std::string class_key(const IntersectionPattern& p) {
  std::vector<std::string> parts;
  for (const TreePattern& t : interleavings(p)) parts.push_back(canonical(t));
  std::sort(parts.begin(), parts.end());
  std::string k;
  for (const auto& s : parts) k += s + "|";
  return k;
}

}  // namespace

std::vector<std::vector<std::size_t>> predicate_groups(const TreePattern& v) {
  StructureReport st = structure(v);
  std::vector<char> on_mb = v.main_branch_mask();
  std::size_t depth = st.depth;
  std::size_t first = st.tokens.front().nodes.size();
  std::size_t last = st.tokens.size() > 1 ? st.last_token.nodes.size() : 0;

  std::vector<std::vector<std::size_t>> groups{{}};
  std::vector<std::size_t> middle;
  for (std::size_t k = 0; k < depth; ++k) {
    if (!has_predicates(v, st.main_branch[k], on_mb)) continue;
    if (k < first || k >= depth - last) groups.push_back({k});
    else middle.push_back(k);
  }
  if (!middle.empty()) groups.push_back(middle);

  // merge dependent groups until nothing changes
  for (bool changed = true; changed;) {
    changed = false;
    for (std::size_t i = 1; i < groups.size() && !changed; ++i)
      for (std::size_t j = i + 1; j < groups.size() && !changed; ++j) {
        TreePattern a = keep_predicates_at(v, groups[i]);
        TreePattern b = keep_predicates_at(v, groups[j]);
        if (cindep(a, b).independent()) continue;
        std::set<std::size_t> u(groups[i].begin(), groups[i].end());
        u.insert(groups[j].begin(), groups[j].end());
        groups[i].assign(u.begin(), u.end());
        groups.erase(groups.begin() + static_cast<std::ptrdiff_t>(j));
        changed = true;
      }
  }
  return groups;
}

Decomposition decompose_views(const TreePattern& q, const std::vector<TreePattern>& views) {
  Decomposition d;
  TreePattern mbq = main_branch_pattern(q);
  std::map<std::string, std::size_t> index;
  auto classes_of = [&](const TreePattern& v) {
    std::set<std::size_t> W;
    for (const auto& g : predicate_groups(v)) {
      IntersectionPattern w = with_main_branch(mbq, keep_predicates_at(v, g));
      std::string key = class_key(w);
      auto it = index.find(key);
      if (it == index.end()) {
        it = index.emplace(key, d.dviews.size()).first;
        d.dviews.push_back(std::move(w));
      }
      W.insert(it->second);
    }
    return std::vector<std::size_t>(W.begin(), W.end());
  };
  for (const TreePattern& v : views) d.per_view.push_back(classes_of(v));
  d.for_query = classes_of(q);
  return d;
}

ExponentSystem build_system(const Decomposition& d) {
  std::size_t s = d.dviews.size();
  auto row = [&](const std::vector<std::size_t>& W) {
    std::vector<Rational> r(s + 1, Rational(0));
    for (std::size_t j : W) r[j] = 1;
    r[s] = 1;
    return r;
  };
  ExponentSystem sys;
  for (const auto& W : d.per_view) sys.rows.push_back(row(W));
  sys.target = row(d.for_query);
  return sys;
}

std::optional<std::vector<Rational>> solve_system(const ExponentSystem& sys) {
  std::size_t m = sys.rows.size();
  std::size_t n = sys.target.size();
  // columns are views; augmented with the target
  std::vector<std::vector<Rational>> A(n, std::vector<Rational>(m + 1));
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t i = 0; i < m; ++i) A[r][i] = sys.rows[i][r];
    A[r][m] = sys.target[r];
  }
  std::vector<std::size_t> pivot_col;
  std::size_t row = 0;
  for (std::size_t col = 0; col < m && row < n; ++col) {
    std::size_t p = row;
    while (p < n && A[p][col] == 0) ++p;
    if (p == n) continue;
    std::swap(A[p], A[row]);
    Rational inv = 1 / A[row][col];
    for (auto& x : A[row]) x *= inv;
    for (std::size_t r = 0; r < n; ++r) {
      if (r == row || A[r][col] == 0) continue;
      Rational f = A[r][col];
      for (std::size_t c = col; c <= m; ++c) A[r][c] -= f * A[row][c];
    }
    pivot_col.push_back(col);
    ++row;
  }
  for (std::size_t r = row; r < n; ++r)
    if (A[r][m] != 0) return std::nullopt;
  std::vector<Rational> c(m, Rational(0));
  for (std::size_t r = 0; r < pivot_col.size(); ++r) c[pivot_col[r]] = A[r][m];
  return c;
}

}  // namespace pxv
