#pragma once

#include <map>
#include <string>
#include <vector>

#include "pxv/model.hpp"
#include "pxv/pattern.hpp"
#include "pxv/probeval.hpp"

namespace pxv {

struct ViewDef {
  std::string name;
  TreePattern pattern;
};

// "#id:<orig>"
std::string marker_label(const std::string& orig_id);
bool is_marker_label(const std::string& label);

struct ViewExtension {
  std::string view;
  PDocument ext;  // root doc(view), one ind child, one subtree per occurrence
  std::map<std::string, std::string> occurrence;  // ext id -> original id (markers excluded)

  // Index of the ind node under the root.
  std::size_t ind_node() const { return ext.node(0).children.at(0); }
  // Occurrence roots (children of the ind node) and their probabilities β.
  std::vector<std::size_t> occurrence_roots() const;
  Rational beta(std::size_t occurrence_root) const;
  const std::string& original(std::size_t ext_node) const;
  // β keyed by original id; sums over repeated ids never happen for a root.
  ProbAnswer selection() const;
};

using ExtensionSet = std::map<std::string, ViewExtension>;

Document materialize_det(const ViewDef& v, const Document& d);
ViewExtension materialize_prob(const ViewDef& v, const PDocument& p);

std::string serialize_extension(const ViewExtension& e);
ViewExtension parse_extension(const std::string& text);

std::vector<ViewDef> parse_view_list(const std::string& json_text);
std::string serialize_view_list(const std::vector<ViewDef>& views);
std::vector<NamedPattern> named(const std::vector<ViewDef>& views);
const ViewDef& find_view(const std::vector<ViewDef>& views, const std::string& name);

}  // namespace pxv
