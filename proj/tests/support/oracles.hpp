#pragma once
// Independent reference procedures used only by tests.

#include <functional>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "pxv/model.hpp"
#include "pxv/pattern.hpp"
#include "pxv/probeval.hpp"

namespace pxv::testing {

std::string read_file(const std::string& path);
std::string fixture_path(const std::string& name);
PDocument load_pdoc(const std::string& name);
Document load_doc(const std::string& name);

inline TreePattern Q(const std::string& s) { return parse_tree_pattern(s); }
inline Rational R(const std::string& s) { return parse_rational(s); }

// Naive run enumeration: every mux picks one child or none, every ind picks
// a subset; run probabilities are multiplied out and summed per kept id set.
std::map<std::vector<std::string>, Rational> brute_force_worlds(const PDocument& p);

// Calls f on every document with at most max_nodes nodes, root labeled
// root_label, other labels drawn from `labels`. Node ids are "d0", "d1", ...
void for_each_document(const std::vector<std::string>& labels, const std::string& root_label,
                       std::size_t max_nodes, const std::function<bool(const Document&)>& f);

// A document d and node with the node in q1(d) but not in q2(d), if any exists
// within the bound.
std::optional<Document> containment_counterexample(const TreePattern& q1, const TreePattern& q2,
                                                   std::size_t max_nodes);

Document random_document(std::mt19937_64& rng, const std::vector<std::string>& labels,
                         const std::string& root_label, std::size_t max_nodes);

TreePattern random_pattern(std::mt19937_64& rng, const std::vector<std::string>& labels,
                           const std::string& root_label, std::size_t max_depth,
                           std::size_t max_preds);

std::vector<std::string> labels_of(const std::vector<const TreePattern*>& qs);

}  // namespace pxv::testing
