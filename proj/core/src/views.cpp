#include "pxv/views.hpp"

#include <algorithm>
#include <functional>

#include "json.hpp"

namespace pxv {

std::string marker_label(const std::string& orig_id) { return "#id:" + orig_id; }
bool is_marker_label(const std::string& label) { return label.rfind("#id:", 0) == 0; }

std::vector<std::size_t> ViewExtension::occurrence_roots() const {
  return ext.node(ind_node()).children;
}

Rational ViewExtension::beta(std::size_t occurrence_root) const {
  const PNode& ind = ext.node(ind_node());
  auto it = std::find(ind.children.begin(), ind.children.end(), occurrence_root);
  if (it == ind.children.end()) throw Error("not an occurrence root");
  return ind.probs[static_cast<std::size_t>(it - ind.children.begin())];
}

const std::string& ViewExtension::original(std::size_t ext_node) const {
  auto it = occurrence.find(ext.node(ext_node).id);
  if (it == occurrence.end()) throw Error("extension node '" + ext.node(ext_node).id + "' has no original");
  return it->second;
}

ProbAnswer ViewExtension::selection() const {
  ProbAnswer a;
  for (std::size_t r : occurrence_roots()) a[original(r)] += beta(r);
  return a;
}

Document materialize_det(const ViewDef& v, const Document& d) {
  Document out;
  out.name = v.name;
  Document::Node root;
  root.id = doc_label(v.name);
  root.label = doc_label(v.name);
  out.nodes.push_back(root);
  std::function<void(std::size_t, std::size_t)> copy = [&](std::size_t src, std::size_t parent) {
    Document::Node n;
    n.id = d.nodes[src].id;
    n.label = d.nodes[src].label;
    n.parent = parent;
    std::size_t me = out.nodes.size();
    out.nodes.push_back(n);
    out.nodes[parent].children.push_back(me);
    for (std::size_t c : d.nodes[src].children) copy(c, me);
  };
  for (std::size_t y : eval_doc_indices(v.pattern, d)) copy(y, 0);
  return out;
}

ViewExtension materialize_prob(const ViewDef& v, const PDocument& p) {
  ViewExtension e;
  e.view = v.name;
  e.ext.name = v.name;
  e.ext.add_root(doc_label(v.name), doc_label(v.name));
  std::size_t ind = e.ext.add_dist(0, NodeKind::Ind);
  ProbAnswer beta = peval(v.pattern, p);
  std::size_t k = 0;
  for (std::size_t y = 0; y < p.size(); ++y) {
    if (!p.is_ordinary(y)) continue;
    auto it = beta.find(p.node(y).id);
    if (it == beta.end()) continue;
    ++k;
    std::string prefix = "o" + std::to_string(k) + ".";
    std::function<void(std::size_t, std::size_t, const Rational&)> copy =
        [&](std::size_t src, std::size_t parent, const Rational& q) {
          const PNode& n = p.node(src);
          std::size_t me;
          if (n.kind == NodeKind::Ordinary) {
            std::string id = prefix + n.id;
            me = e.ext.add_ordinary(parent, id, n.label, q);
            e.occurrence.emplace(id, n.id);
          } else {
            me = e.ext.add_dist(parent, n.kind, q, n.id.empty() ? std::string() : prefix + n.id);
          }
          for (std::size_t j = 0; j < n.children.size(); ++j)
            copy(n.children[j], me, n.kind == NodeKind::Ordinary ? Rational(1) : n.probs[j]);
          if (n.kind == NodeKind::Ordinary)
            e.ext.add_ordinary(me, prefix + n.id + ".id", marker_label(n.id));
        };
    copy(y, ind, it->second);
  }
  return e;
}

std::string serialize_extension(const ViewExtension& e) {
  auto j = nlohmann::ordered_json::parse(serialize_pdoc(e.ext));
  auto occ = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < e.ext.size(); ++i) {
    auto it = e.occurrence.find(e.ext.node(i).id);
    if (e.ext.is_ordinary(i) && it != e.occurrence.end()) occ.push_back({{"ext", it->first}, {"orig", it->second}});
  }
  j["occurrences"] = occ;
  return j.dump();
}

ViewExtension parse_extension(const std::string& text) {
  ParseOptions opts;
  opts.allow_distributional_leaves = true;
  ViewExtension e;
  e.ext = parse_pdoc(text, opts);
  e.view = e.ext.name;
  auto j = nlohmann::json::parse(text);
  if (j.contains("occurrences"))
    for (const auto& o : j.at("occurrences"))
      e.occurrence.emplace(o.at("ext").get<std::string>(), o.at("orig").get<std::string>());
  if (e.ext.node(0).children.size() != 1 || e.ext.node(e.ext.node(0).children[0]).kind != NodeKind::Ind)
    throw ValidationError("extension root must have a single ind child");
  return e;
}

std::vector<ViewDef> parse_view_list(const std::string& json_text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::parse_error& ex) {
    throw ParseError(std::string("JSON syntax error: ") + ex.what(), ex.byte);
  }
  std::vector<ViewDef> out;
  for (const auto& v : j) {
    ViewDef d;
    d.name = v.at("name").get<std::string>();
    d.pattern = parse_tree_pattern(v.at("query").get<std::string>());
    out.push_back(std::move(d));
  }
  return out;
}

std::string serialize_view_list(const std::vector<ViewDef>& views) {
  auto j = nlohmann::ordered_json::array();
  for (const auto& v : views) j.push_back({{"name", v.name}, {"query", to_string(v.pattern)}});
  return j.dump();
}

std::vector<NamedPattern> named(const std::vector<ViewDef>& views) {
  std::vector<NamedPattern> out;
  for (const auto& v : views) out.push_back({v.name, v.pattern});
  return out;
}

const ViewDef& find_view(const std::vector<ViewDef>& views, const std::string& name) {
  for (const auto& v : views)
    if (v.name == name) return v;
  throw Error("unknown view '" + name + "'");
}

}  // namespace pxv
