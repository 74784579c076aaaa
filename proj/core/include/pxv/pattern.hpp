#pragma once

#include <cstddef>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "pxv/model.hpp"

namespace pxv {

enum class Axis { Child, Descendant };

struct PatternNode {
  std::string label;
  Axis axis = Axis::Child;  // axis of the incoming edge; meaningless at the root
  std::size_t parent = kNoNode;
  std::vector<std::size_t> children;
};

// Tree pattern. Node 0 is the root; parents precede children.
class TreePattern {
 public:
  TreePattern() = default;
  explicit TreePattern(std::string root_label);

  std::size_t root() const { return 0; }
  std::size_t out() const { return out_; }
  std::size_t size() const { return nodes_.size(); }
  const PatternNode& node(std::size_t i) const { return nodes_[i]; }
  const std::string& label(std::size_t i) const { return nodes_[i].label; }
  const std::vector<PatternNode>& nodes() const { return nodes_; }

  std::size_t add_child(std::size_t parent, std::string label, Axis axis);
  void set_out(std::size_t i) { out_ = i; }

  // root .. out
  std::vector<std::size_t> main_branch() const;
  std::vector<char> main_branch_mask() const;
  std::size_t depth() const { return main_branch().size(); }

  // Copy of the subtree at `src` of `other` grafted below `parent`; returns the image
  // of `src` and records images in `map` when given.
  std::size_t graft(std::size_t parent, const TreePattern& other, std::size_t src, Axis axis,
                    std::vector<std::size_t>* map = nullptr);
  // Copies the children of `src` (in `other`) below `dst`.
  void graft_children(std::size_t dst, const TreePattern& other, std::size_t src,
                      std::vector<std::size_t>* map = nullptr);

  // Pattern with the subtree at i removed (i must not be the root or on the main branch).
  TreePattern without(std::size_t i) const;
  // The subtree at i as a pattern; `out_image` picks the out node (defaults to its root).
  TreePattern subtree(std::size_t i, std::size_t out_node = kNoNode) const;

  bool has_descendant_edge_on_main_branch() const;

 private:
  std::vector<PatternNode> nodes_;
  std::size_t out_ = 0;
};

struct IntersectionPattern {
  std::vector<TreePattern> members;
};

using AnyPattern = std::variant<TreePattern, IntersectionPattern>;

// ---- text form
AnyPattern parse_pattern(const std::string& text);
TreePattern parse_tree_pattern(const std::string& text);
IntersectionPattern parse_intersection(const std::string& text);
// Deterministic: predicates are emitted in sorted order.
std::string to_string(const TreePattern& q);
std::string to_string(const IntersectionPattern& q);
std::string to_string(const AnyPattern& q);

// ---- evaluation on documents
std::set<std::string> eval_doc(const TreePattern& q, const Document& d);
std::set<std::string> eval_doc(const IntersectionPattern& q, const Document& d);
// Node indices instead of ids.
std::vector<std::size_t> eval_doc_indices(const TreePattern& q, const Document& d);

// ---- containment and friends
// q1 ⊑ q2
bool contains(const TreePattern& q1, const TreePattern& q2);
bool equivalent(const TreePattern& q1, const TreePattern& q2);
TreePattern minimize(const TreePattern& q);
std::string canonical(const TreePattern& q);  // to_string(minimize(q))
bool isomorphic(const TreePattern& a, const TreePattern& b);

// ---- structure
struct Token {
  std::vector<std::size_t> nodes;  // main-branch node indices, /-connected
};

struct StructureReport {
  std::vector<std::size_t> main_branch;
  std::vector<std::string> labels;
  std::vector<Axis> axes;  // incoming axis per main-branch position (axes[0] unused)
  std::size_t depth = 0;
  std::vector<Token> tokens;
  Token last_token;
  std::size_t m = 0;
  std::size_t u = 0;
};

StructureReport structure(const TreePattern& q);
// Longest proper prefix-suffix of `seq` with 2u ≤ |seq|.
std::size_t prefix_suffix(const std::vector<std::string>& seq);

struct SliceResult {
  TreePattern prefix;
  TreePattern suffix;
};

SliceResult slice(const TreePattern& q, std::size_t k);
TreePattern compensate(const TreePattern& q1, const TreePattern& q2);
TreePattern main_branch_pattern(const TreePattern& q);
// q without the predicates of its out node.
TreePattern strip_out_predicates(const TreePattern& q);
// Main branch of q with the predicates of the given main-branch positions only.
TreePattern keep_predicates_at(const TreePattern& q, const std::vector<std::size_t>& positions);

// doc(v) head helpers.
std::string doc_label(const std::string& view);
bool is_doc_label(const std::string& label, std::string* view = nullptr);
// doc(view)/lbl
TreePattern doc_head(const std::string& view, const std::string& out_label);

struct NamedPattern {
  std::string name;
  TreePattern pattern;
};
TreePattern unfold(const TreePattern& plan, const std::vector<NamedPattern>& views);
IntersectionPattern unfold(const IntersectionPattern& plan, const std::vector<NamedPattern>& views);

// ---- intersections
// Alignment of several main branches onto one path.
struct Alignment {
  struct Position {
    std::string label;
    Axis axis = Axis::Child;  // edge from the previous position
    std::vector<std::pair<std::size_t, std::size_t>> nodes;  // (member, pattern node)
  };
  std::vector<Position> positions;
};

inline constexpr std::size_t kDefaultAlignmentBudget = 200000;

std::vector<Alignment> alignments(const std::vector<const TreePattern*>& members,
                                  std::size_t budget = kDefaultAlignmentBudget);
TreePattern realize(const Alignment& a, const std::vector<const TreePattern*>& members);
std::vector<TreePattern> interleavings(const IntersectionPattern& q);
bool satisfiable(const IntersectionPattern& q);
bool equiv_tp_cap(const TreePattern& q, const IntersectionPattern& Q);
// Q ⊑ q
bool cap_contained_in(const IntersectionPattern& Q, const TreePattern& q);
bool cap_equivalent(const IntersectionPattern& A, const IntersectionPattern& B);

bool is_extended_skeleton(const TreePattern& q);

}  // namespace pxv
