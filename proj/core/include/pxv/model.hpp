#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "pxv/rational.hpp"

namespace pxv {

inline constexpr std::size_t kNoNode = static_cast<std::size_t>(-1);

// A plain (deterministic) unordered tree. Node 0 is the root and a parent
// always precedes its children in `nodes`.
struct Document {
  struct Node {
    std::string id;
    std::string label;
    std::size_t parent = kNoNode;
    std::vector<std::size_t> children;
  };
  std::string name;
  std::vector<Node> nodes;

  std::size_t root() const { return 0; }
  std::optional<std::size_t> find(const std::string& id) const;
};

enum class NodeKind { Ordinary, Mux, Ind };

struct PNode {
  NodeKind kind = NodeKind::Ordinary;
  std::string id;     // may be empty for distributional nodes
  std::string label;  // ordinary nodes only
  std::size_t parent = kNoNode;
  std::vector<std::size_t> children;
  std::vector<Rational> probs;  // edge probability per child, distributional nodes only
};

// p-document. Node 0 is the root; parents precede children.
class PDocument {
 public:
  std::string name;
  std::vector<PNode> nodes;

  std::size_t root() const { return 0; }
  const PNode& node(std::size_t i) const { return nodes[i]; }
  std::size_t size() const { return nodes.size(); }

  // Index of the ordinary node with this id.
  std::optional<std::size_t> find(const std::string& id) const;
  std::size_t require(const std::string& id) const;

  std::size_t add_root(std::string id, std::string label);
  std::size_t add_ordinary(std::size_t parent, std::string id, std::string label,
                           const Rational& p = Rational(1));
  std::size_t add_dist(std::size_t parent, NodeKind kind, const Rational& p = Rational(1),
                       std::string id = {});

  std::size_t distributional_count() const;
  bool is_ordinary(std::size_t i) const { return nodes[i].kind == NodeKind::Ordinary; }
  // Nearest ordinary proper ancestor, or kNoNode for the root.
  std::size_t ordinary_parent(std::size_t i) const;
  void reindex();

 private:
  std::map<std::string, std::size_t> index_;
};

struct Violation {
  std::string node;  // id, or a path-like locator for distributional nodes
  std::string rule;
};

struct ValidationReport {
  std::vector<Violation> violations;
  bool ok() const { return violations.empty(); }
};

struct ParseOptions {
  bool validate = true;
  // View extensions may hold a childless ind node (empty support).
  bool allow_distributional_leaves = false;
};

PDocument parse_pdoc(const std::string& text, const ParseOptions& opts = {});
std::string serialize_pdoc(const PDocument& p);
ValidationReport validate_pdoc(const PDocument& p, bool allow_distributional_leaves = false);

Document parse_doc(const std::string& text);
std::string serialize_doc(const Document& d);

struct World {
  Document document;
  Rational probability;
  std::vector<std::string> ids;  // sorted ordinary-node ids, the world's identity
};

inline constexpr std::size_t kDefaultWorldBound = 20;

// Worlds in ascending order of their sorted id lists.
std::vector<World> enumerate_worlds(const PDocument& p, std::size_t max_dist = kDefaultWorldBound);

Rational appearance_prob(const PDocument& p, const std::string& id);

PDocument subtree_at(const PDocument& p, const std::string& id);

// Deterministic document induced by a set of kept ordinary nodes.
Document induced_document(const PDocument& p, const std::vector<char>& keep);

// Document view of a p-document without distributional nodes.
Document to_document(const PDocument& p);
PDocument from_document(const Document& d);

}  // namespace pxv
