#include "pxv/model.hpp"

#include <algorithm>
#include <functional>
#include <set>

#include "json.hpp"

namespace pxv {

using ojson = nlohmann::ordered_json;

std::optional<std::size_t> Document::find(const std::string& id) const {
  for (std::size_t i = 0; i < nodes.size(); ++i)
    if (nodes[i].id == id) return i;
  return std::nullopt;
}

std::optional<std::size_t> PDocument::find(const std::string& id) const {
  auto it = index_.find(id);
  if (it != index_.end() && it->second < nodes.size() && nodes[it->second].id == id &&
      nodes[it->second].kind == NodeKind::Ordinary)
    return it->second;
  for (std::size_t i = 0; i < nodes.size(); ++i)
    if (nodes[i].kind == NodeKind::Ordinary && nodes[i].id == id) return i;
  return std::nullopt;
}

std::size_t PDocument::require(const std::string& id) const {
  auto i = find(id);
  if (!i) throw Error("unknown node id '" + id + "'");
  return *i;
}

void PDocument::reindex() {
  index_.clear();
  for (std::size_t i = 0; i < nodes.size(); ++i)
    if (nodes[i].kind == NodeKind::Ordinary) index_.emplace(nodes[i].id, i);
}

std::size_t PDocument::add_root(std::string id, std::string label) {
  nodes.clear();
  index_.clear();
  PNode n;
  n.id = std::move(id);
  n.label = std::move(label);
  nodes.push_back(std::move(n));
  index_.emplace(nodes[0].id, 0);
  return 0;
}

std::size_t PDocument::add_ordinary(std::size_t parent, std::string id, std::string label,
                                    const Rational& p) {
  PNode n;
  n.id = std::move(id);
  n.label = std::move(label);
  n.parent = parent;
  std::size_t i = nodes.size();
  nodes.push_back(std::move(n));
  nodes[parent].children.push_back(i);
  if (nodes[parent].kind != NodeKind::Ordinary) nodes[parent].probs.push_back(p);
  index_.emplace(nodes[i].id, i);
  return i;
}

std::size_t PDocument::add_dist(std::size_t parent, NodeKind kind, const Rational& p,
                                std::string id) {
  PNode n;
  n.kind = kind;
  n.id = std::move(id);
  n.parent = parent;
  std::size_t i = nodes.size();
  nodes.push_back(std::move(n));
  nodes[parent].children.push_back(i);
  if (nodes[parent].kind != NodeKind::Ordinary) nodes[parent].probs.push_back(p);
  return i;
}

std::size_t PDocument::distributional_count() const {
  return static_cast<std::size_t>(std::count_if(nodes.begin(), nodes.end(), [](const PNode& n) {
    return n.kind != NodeKind::Ordinary;
  }));
}

std::size_t PDocument::ordinary_parent(std::size_t i) const {
  std::size_t p = nodes[i].parent;
  while (p != kNoNode && nodes[p].kind != NodeKind::Ordinary) p = nodes[p].parent;
  return p;
}

// ---------------------------------------------------------------- JSON

namespace {

const char* kind_name(NodeKind k) { return k == NodeKind::Mux ? "mux" : "ind"; }

void read_node(const ojson& j, PDocument& p, std::size_t parent, const Rational& prob) {
  if (!j.is_object()) throw ValidationError("node must be a JSON object");
  std::size_t self;
  if (j.contains("dist")) {
    std::string kind = j.at("dist").get<std::string>();
    NodeKind k;
    if (kind == "mux") k = NodeKind::Mux;
    else if (kind == "ind") k = NodeKind::Ind;
    else throw ValidationError("unknown distributional kind '" + kind + "'");
    std::string id = j.contains("id") ? j.at("id").get<std::string>() : std::string();
    if (parent == kNoNode) {
      // keep the malformed root so validation can report it
      PNode n;
      n.kind = k;
      n.id = id;
      p.nodes.push_back(n);
      self = 0;
    } else {
      self = p.add_dist(parent, k, prob, id);
    }
    if (j.contains("children")) {
      for (const auto& c : j.at("children")) {
        if (!c.contains("p") || !c.contains("node"))
          throw ValidationError("distributional child needs \"p\" and \"node\"");
        const auto& pj = c.at("p");
        Rational cp = pj.is_string() ? parse_rational(pj.get<std::string>())
                                     : parse_rational(pj.dump());
        read_node(c.at("node"), p, self, cp);
      }
    }
  } else {
    std::string id = j.at("id").get<std::string>();
    std::string label = j.at("label").get<std::string>();
    if (parent == kNoNode) self = p.add_root(id, label);
    else self = p.add_ordinary(parent, id, label, prob);
    if (j.contains("children"))
      for (const auto& c : j.at("children")) read_node(c, p, self, Rational(1));
  }
}

ojson write_node(const PDocument& p, std::size_t i) {
  const PNode& n = p.nodes[i];
  ojson j = ojson::object();
  if (n.kind == NodeKind::Ordinary) {
    j["id"] = n.id;
    j["label"] = n.label;
    ojson ch = ojson::array();
    for (std::size_t c : n.children) ch.push_back(write_node(p, c));
    j["children"] = ch;
  } else {
    j["dist"] = kind_name(n.kind);
    if (!n.id.empty()) j["id"] = n.id;
    ojson ch = ojson::array();
    for (std::size_t k = 0; k < n.children.size(); ++k) {
      ojson e = ojson::object();
      e["p"] = to_string(n.probs[k]);
      e["node"] = write_node(p, n.children[k]);
      ch.push_back(e);
    }
    j["children"] = ch;
  }
  return j;
}

ojson parse_json(const std::string& text) {
  try {
    return ojson::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("JSON syntax error: ") + e.what(), e.byte);
  }
}

}  // namespace

PDocument parse_pdoc(const std::string& text, const ParseOptions& opts) {
  ojson j = parse_json(text);
  PDocument p;
  try {
    if (!j.is_object() || !j.contains("root")) throw ValidationError("missing \"root\"");
    p.name = j.contains("name") ? j.at("name").get<std::string>() : std::string();
    read_node(j.at("root"), p, kNoNode, Rational(1));
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("malformed p-document: ") + e.what());
  }
  p.reindex();
  if (opts.validate) {
    ValidationReport r = validate_pdoc(p, opts.allow_distributional_leaves);
    if (!r.ok())
      throw ValidationError("invariant violation at node '" + r.violations[0].node +
                            "': " + r.violations[0].rule);
  }
  return p;
}

std::string serialize_pdoc(const PDocument& p) {
  ojson j = ojson::object();
  j["name"] = p.name;
  j["root"] = write_node(p, p.root());
  return j.dump();
}

ValidationReport validate_pdoc(const PDocument& p, bool allow_distributional_leaves) {
  ValidationReport r;
  if (p.nodes.empty()) {
    r.violations.push_back({"", "empty document"});
    return r;
  }
  auto locator = [&](std::size_t i) {
    const PNode& n = p.nodes[i];
    if (!n.id.empty()) return n.id;
    std::size_t a = p.ordinary_parent(i);
    return std::string(kind_name(n.kind)) + " under " + (a == kNoNode ? "?" : p.nodes[a].id);
  };
  if (p.nodes[0].kind != NodeKind::Ordinary)
    r.violations.push_back({locator(0), "root must be ordinary"});
  std::set<std::string> seen;
  for (std::size_t i = 0; i < p.nodes.size(); ++i) {
    const PNode& n = p.nodes[i];
    if (n.kind == NodeKind::Ordinary) {
      if (n.id.empty()) r.violations.push_back({"?", "ordinary node without id"});
      if (n.label.empty()) r.violations.push_back({n.id, "ordinary node without label"});
      if (!seen.insert(n.id).second) r.violations.push_back({n.id, "duplicate node id"});
      continue;
    }
    if (n.children.empty() && !allow_distributional_leaves)
      r.violations.push_back({locator(i), "leaves must be ordinary"});
    Rational sum = 0;
    for (const Rational& q : n.probs) {
      if (q <= 0) r.violations.push_back({locator(i), "child probability must be positive"});
      if (q > 1) r.violations.push_back({locator(i), "child probability exceeds 1"});
      sum += q;
    }
    if (n.kind == NodeKind::Mux && sum > 1)
      r.violations.push_back({locator(i), "mux child probabilities sum to " + to_string(sum) + " > 1"});
  }
  return r;
}

Document parse_doc(const std::string& text) {
  PDocument p = parse_pdoc(text);
  if (p.distributional_count() != 0) throw ValidationError("document has distributional nodes");
  return to_document(p);
}

std::string serialize_doc(const Document& d) { return serialize_pdoc(from_document(d)); }

Document to_document(const PDocument& p) {
  std::vector<char> keep(p.size(), 1);
  for (std::size_t i = 0; i < p.size(); ++i)
    if (!p.is_ordinary(i)) throw Error("not a deterministic document");
  return induced_document(p, keep);
}

PDocument from_document(const Document& d) {
  PDocument p;
  p.name = d.name;
  if (d.nodes.empty()) return p;
  p.add_root(d.nodes[0].id, d.nodes[0].label);
  std::vector<std::size_t> map(d.nodes.size(), 0);
  for (std::size_t i = 1; i < d.nodes.size(); ++i)
    map[i] = p.add_ordinary(map[d.nodes[i].parent], d.nodes[i].id, d.nodes[i].label);
  return p;
}

Document induced_document(const PDocument& p, const std::vector<char>& keep) {
  Document d;
  d.name = p.name;
  std::vector<std::size_t> map(p.size(), kNoNode);
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (!p.is_ordinary(i) || !keep[i]) continue;
    Document::Node n;
    n.id = p.nodes[i].id;
    n.label = p.nodes[i].label;
    std::size_t a = p.ordinary_parent(i);
    if (a != kNoNode) {
      n.parent = map[a];
      d.nodes[n.parent].children.push_back(d.nodes.size());
    }
    map[i] = d.nodes.size();
    d.nodes.push_back(std::move(n));
  }
  return d;
}

// ---------------------------------------------------------------- worlds

namespace {

using KeptSet = std::vector<std::uint32_t>;
using WorldDist = std::map<KeptSet, Rational>;

KeptSet merge(const KeptSet& a, const KeptSet& b) {
  KeptSet out;
  out.reserve(a.size() + b.size());
  std::merge(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

WorldDist product(const WorldDist& a, const WorldDist& b) {
  WorldDist out;
  for (const auto& [ka, pa] : a)
    for (const auto& [kb, pb] : b) out[merge(ka, kb)] += pa * pb;
  return out;
}

WorldDist world_dist(const PDocument& p, std::size_t i) {
  const PNode& n = p.nodes[i];
  if (n.kind == NodeKind::Ordinary) {
    WorldDist acc{{KeptSet{static_cast<std::uint32_t>(i)}, Rational(1)}};
    for (std::size_t c : n.children) acc = product(acc, world_dist(p, c));
    return acc;
  }
  if (n.kind == NodeKind::Mux) {
    WorldDist acc;
    Rational rest = 1;
    for (std::size_t k = 0; k < n.children.size(); ++k) {
      rest -= n.probs[k];
      for (const auto& [ks, q] : world_dist(p, n.children[k])) acc[ks] += n.probs[k] * q;
    }
    if (rest != 0) acc[KeptSet{}] += rest;
    return acc;
  }
  WorldDist acc{{KeptSet{}, Rational(1)}};
  for (std::size_t k = 0; k < n.children.size(); ++k) {
    WorldDist child;
    for (const auto& [ks, q] : world_dist(p, n.children[k])) child[ks] += n.probs[k] * q;
    Rational rest = 1 - n.probs[k];
    if (rest != 0) child[KeptSet{}] += rest;
    acc = product(acc, child);
  }
  return acc;
}

}  // namespace

std::vector<World> enumerate_worlds(const PDocument& p, std::size_t max_dist) {
  if (p.distributional_count() > max_dist)
    throw LimitExceeded("p-document has " + std::to_string(p.distributional_count()) +
                        " distributional nodes, bound is " + std::to_string(max_dist));
  WorldDist dist = world_dist(p, p.root());
  std::vector<World> out;
  out.reserve(dist.size());
  for (const auto& [ks, q] : dist) {
    std::vector<char> keep(p.size(), 0);
    World w;
    for (auto i : ks) {
      keep[i] = 1;
      w.ids.push_back(p.nodes[i].id);
    }
    std::sort(w.ids.begin(), w.ids.end());
    w.document = induced_document(p, keep);
    w.probability = q;
    out.push_back(std::move(w));
  }
  std::sort(out.begin(), out.end(), [](const World& a, const World& b) { return a.ids < b.ids; });
  return out;
}

Rational appearance_prob(const PDocument& p, const std::string& id) {
  std::size_t i = p.require(id);
  Rational r = 1;
  while (p.nodes[i].parent != kNoNode) {
    std::size_t par = p.nodes[i].parent;
    const PNode& pn = p.nodes[par];
    if (pn.kind != NodeKind::Ordinary) {
      auto it = std::find(pn.children.begin(), pn.children.end(), i);
      r *= pn.probs[static_cast<std::size_t>(it - pn.children.begin())];
    }
    i = par;
  }
  return r;
}

PDocument subtree_at(const PDocument& p, const std::string& id) {
  std::size_t start = p.require(id);
  PDocument out;
  out.name = p.name;
  out.add_root(p.nodes[start].id, p.nodes[start].label);
  std::function<void(std::size_t, std::size_t)> copy = [&](std::size_t src, std::size_t dst) {
    const PNode& n = p.nodes[src];
    for (std::size_t k = 0; k < n.children.size(); ++k) {
      std::size_t c = n.children[k];
      Rational q = n.kind == NodeKind::Ordinary ? Rational(1) : n.probs[k];
      const PNode& cn = p.nodes[c];
      std::size_t d = cn.kind == NodeKind::Ordinary ? out.add_ordinary(dst, cn.id, cn.label, q)
                                                    : out.add_dist(dst, cn.kind, q, cn.id);
      copy(c, d);
    }
  };
  copy(start, 0);
  return out;
}

}  // namespace pxv
