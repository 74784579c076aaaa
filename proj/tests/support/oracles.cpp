#include "oracles.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

namespace pxv::testing {

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string fixture_path(const std::string& name) { return std::string(PXV_FIXTURE_DIR) + "/" + name; }

PDocument load_pdoc(const std::string& name) { return parse_pdoc(read_file(fixture_path(name))); }
Document load_doc(const std::string& name) { return parse_doc(read_file(fixture_path(name))); }

namespace {

struct Run {
  std::set<std::size_t> kept;
  Rational p;
};

// All runs of the subtree at i, assuming i itself is reached.
std::vector<Run> runs(const PDocument& pd, std::size_t i) {
  const PNode& n = pd.node(i);
  std::vector<std::vector<Run>> options;  // one list per independent part
  if (n.kind == NodeKind::Ordinary) {
    std::vector<Run> acc{{{i}, Rational(1)}};
    for (std::size_t c : n.children) {
      std::vector<Run> next;
      for (const Run& a : acc)
        for (const Run& b : runs(pd, c)) {
          Run r{a.kept, a.p * b.p};
          r.kept.insert(b.kept.begin(), b.kept.end());
          next.push_back(r);
        }
      acc = std::move(next);
    }
    return acc;
  }
  std::vector<Run> out;
  std::size_t k = n.children.size();
  if (n.kind == NodeKind::Mux) {
    Rational rest = 1;
    for (std::size_t j = 0; j < k; ++j) {
      rest -= n.probs[j];
      for (const Run& r : runs(pd, n.children[j])) out.push_back({r.kept, r.p * n.probs[j]});
    }
    out.push_back({{}, rest});
    return out;
  }
  for (std::size_t mask = 0; mask < (std::size_t(1) << k); ++mask) {
    std::vector<Run> acc{{{}, Rational(1)}};
    for (std::size_t j = 0; j < k; ++j) {
      bool take = mask & (std::size_t(1) << j);
      std::vector<Run> next;
      if (!take) {
        for (Run r : acc) {
          r.p *= 1 - n.probs[j];
          next.push_back(r);
        }
      } else {
        for (const Run& a : acc)
          for (const Run& b : runs(pd, n.children[j])) {
            Run r{a.kept, a.p * b.p * n.probs[j]};
            r.kept.insert(b.kept.begin(), b.kept.end());
            next.push_back(r);
          }
      }
      acc = std::move(next);
    }
    out.insert(out.end(), acc.begin(), acc.end());
  }
  return out;
}

}  // namespace

std::map<std::vector<std::string>, Rational> brute_force_worlds(const PDocument& p) {
  std::map<std::vector<std::string>, Rational> out;
  for (const Run& r : runs(p, p.root())) {
    if (r.p == 0) continue;
    std::vector<std::string> ids;
    for (std::size_t i : r.kept) ids.push_back(p.node(i).id);
    std::sort(ids.begin(), ids.end());
    out[ids] += r.p;
  }
  return out;
}

void for_each_document(const std::vector<std::string>& labels, const std::string& root_label,
                       std::size_t max_nodes, const std::function<bool(const Document&)>& f) {
  // parent arrays with parent[i] < i, then label assignments
  for (std::size_t n = 1; n <= max_nodes; ++n) {
    std::vector<std::size_t> parent(n, 0);
    std::function<bool(std::size_t)> shapes = [&](std::size_t i) -> bool {
      if (i == n) {
        std::vector<std::size_t> lab(n, 0);
        while (true) {
          Document d;
          for (std::size_t j = 0; j < n; ++j) {
            Document::Node node;
            node.id = "d" + std::to_string(j);
            node.label = j == 0 ? root_label : labels[lab[j]];
            node.parent = j == 0 ? kNoNode : parent[j];
            d.nodes.push_back(node);
            if (j) d.nodes[parent[j]].children.push_back(j);
          }
          if (!f(d)) return false;
          std::size_t j = 1;
          while (j < n && ++lab[j] == labels.size()) lab[j++] = 0;
          if (j >= n) break;
        }
        return true;
      }
      for (std::size_t p = 0; p < i; ++p) {
        parent[i] = p;
        if (!shapes(i + 1)) return false;
      }
      return true;
    };
    if (!shapes(1)) return;
  }
}

std::vector<std::string> labels_of(const std::vector<const TreePattern*>& qs) {
  std::set<std::string> s;
  for (const TreePattern* q : qs)
    for (std::size_t i = 0; i < q->size(); ++i) s.insert(q->label(i));
  s.insert("zz");
  return {s.begin(), s.end()};
}

std::optional<Document> containment_counterexample(const TreePattern& q1, const TreePattern& q2,
                                                   std::size_t max_nodes) {
  std::optional<Document> found;
  std::vector<std::string> labels = labels_of({&q1, &q2});
  for_each_document(labels, q1.label(0), max_nodes, [&](const Document& d) {
    auto a = eval_doc(q1, d);
    auto b = eval_doc(q2, d);
    for (const auto& id : a)
      if (!b.count(id)) {
        found = d;
        return false;
      }
    return true;
  });
  return found;
}

Document random_document(std::mt19937_64& rng, const std::vector<std::string>& labels,
                         const std::string& root_label, std::size_t max_nodes) {
  std::uniform_int_distribution<std::size_t> size_d(1, max_nodes);
  std::size_t n = size_d(rng);
  Document d;
  for (std::size_t j = 0; j < n; ++j) {
    Document::Node node;
    node.id = "d" + std::to_string(j);
    node.label = j == 0 ? root_label : labels[std::uniform_int_distribution<std::size_t>(0, labels.size() - 1)(rng)];
    if (j) {
      node.parent = std::uniform_int_distribution<std::size_t>(0, j - 1)(rng);
      d.nodes[node.parent].children.push_back(j);
    }
    d.nodes.push_back(node);
  }
  return d;
}

TreePattern random_pattern(std::mt19937_64& rng, const std::vector<std::string>& labels,
                           const std::string& root_label, std::size_t max_depth,
                           std::size_t max_preds) {
  auto pick = [&](std::size_t lo, std::size_t hi) {
    return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
  };
  auto axis = [&] { return pick(0, 2) == 0 ? Axis::Descendant : Axis::Child; };
  TreePattern q(root_label);
  std::size_t depth = pick(1, max_depth);
  std::vector<std::size_t> chain{0};
  for (std::size_t k = 1; k < depth; ++k)
    chain.push_back(q.add_child(chain.back(), labels[pick(0, labels.size() - 1)], axis()));
  std::size_t preds = pick(0, max_preds);
  for (std::size_t k = 0; k < preds; ++k) {
    std::size_t at = pick(0, q.size() - 1);
    std::size_t c = q.add_child(at, labels[pick(0, labels.size() - 1)], axis());
    if (pick(0, 2) == 0) q.add_child(c, labels[pick(0, labels.size() - 1)], axis());
  }
  q.set_out(chain.back());
  return q;
}

}  // namespace pxv::testing
