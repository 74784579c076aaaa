// Recursive-descent reader and writer for the query syntax.
#include <algorithm>
#include <cctype>

#include "pxv/pattern.hpp"

namespace pxv {

namespace {

class Reader {
 public:
  explicit Reader(const std::string& s) : s_(s) {}

  void skip_ws() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  bool at_end() {
    skip_ws();
    return pos_ >= s_.size();
  }
  bool peek(char c) {
    skip_ws();
    return pos_ < s_.size() && s_[pos_] == c;
  }
  void expect(char c) {
    if (!peek(c)) throw ParseError(std::string("expected '") + c + "'", pos_);
    ++pos_;
  }
  // '/' or '//'; returns false if neither.
  bool axis(Axis& out) {
    skip_ws();
    if (pos_ < s_.size() && s_[pos_] == '/') {
      if (pos_ + 1 < s_.size() && s_[pos_ + 1] == '/') {
        pos_ += 2;
        out = Axis::Descendant;
      } else {
        pos_ += 1;
        out = Axis::Child;
      }
      return true;
    }
    return false;
  }

  static bool word_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }
  static bool id_char(char c) {
    return word_char(c) || c == '.' || c == ':' || c == '-';
  }

  std::string label() {
    skip_ws();
    std::size_t start = pos_;
    if (s_.compare(pos_, 4, "doc(") == 0) {
      std::size_t close = s_.find(')', pos_);
      if (close == std::string::npos) throw ParseError("unterminated doc(", pos_);
      std::string name = s_.substr(pos_ + 4, close - pos_ - 4);
      if (name.empty() || !std::all_of(name.begin(), name.end(), id_char))
        throw ParseError("bad view name in doc()", pos_ + 4);
      pos_ = close + 1;
      return s_.substr(start, pos_ - start);
    }
    if (s_.compare(pos_, 4, "#id:") == 0) {
      pos_ += 4;
      std::size_t id_start = pos_;
      while (pos_ < s_.size() && id_char(s_[pos_])) ++pos_;
      if (pos_ == id_start) throw ParseError("empty #id: marker", pos_);
      return s_.substr(start, pos_ - start);
    }
    while (pos_ < s_.size() && word_char(s_[pos_])) ++pos_;
    if (pos_ == start) throw ParseError("expected a label", pos_);
    return s_.substr(start, pos_ - start);
  }

  void predicates(TreePattern& q, std::size_t node) {
    while (peek('[')) {
      ++pos_;
      relative(q, node);
      expect(']');
    }
  }

  void relative(TreePattern& q, std::size_t anchor) {
    Axis ax = Axis::Child;
    if (peek('.')) {
      ++pos_;
      if (!axis(ax)) throw ParseError("expected '/' or '//' after '.'", pos_);
    } else {
      axis(ax);  // tolerate a leading '/' or '//'
    }
    std::size_t cur = q.add_child(anchor, label(), ax);
    predicates(q, cur);
    while (axis(ax)) {
      cur = q.add_child(cur, label(), ax);
      predicates(q, cur);
    }
  }

  TreePattern query() {
    TreePattern q(label());
    std::size_t cur = 0;
    predicates(q, cur);
    Axis ax;
    while (axis(ax)) {
      cur = q.add_child(cur, label(), ax);
      predicates(q, cur);
    }
    q.set_out(cur);
    return q;
  }

  std::size_t pos() const { return pos_; }

 private:
  const std::string& s_;
  std::size_t pos_ = 0;
};

}  // namespace

AnyPattern parse_pattern(const std::string& text) {
  Reader r(text);
  std::vector<TreePattern> members;
  members.push_back(r.query());
  while (r.peek('&')) {
    r.expect('&');
    members.push_back(r.query());
  }
  if (!r.at_end()) throw ParseError("unexpected trailing input", r.pos());
  if (members.size() == 1) return std::move(members[0]);
  return IntersectionPattern{std::move(members)};
}

TreePattern parse_tree_pattern(const std::string& text) {
  AnyPattern p = parse_pattern(text);
  if (auto* t = std::get_if<TreePattern>(&p)) return std::move(*t);
  throw ParseError("expected a single tree pattern, got an intersection", 0);
}

IntersectionPattern parse_intersection(const std::string& text) {
  AnyPattern p = parse_pattern(text);
  if (auto* t = std::get_if<TreePattern>(&p)) return IntersectionPattern{{std::move(*t)}};
  return std::get<IntersectionPattern>(std::move(p));
}

namespace {

std::string sep(Axis a) { return a == Axis::Child ? "/" : "//"; }

std::string write_pred_node(const TreePattern& q, std::size_t i);

std::string write_pred(const TreePattern& q, std::size_t c) {
  return (q.node(c).axis == Axis::Descendant ? ".//" : "") + write_pred_node(q, c);
}

std::string write_pred_node(const TreePattern& q, std::size_t i) {
  const auto& n = q.node(i);
  std::string s = n.label;
  if (n.children.size() == 1) {
    std::size_t c = n.children[0];
    return s + sep(q.node(c).axis) + write_pred_node(q, c);
  }
  std::vector<std::string> preds;
  for (std::size_t c : n.children) preds.push_back("[" + write_pred(q, c) + "]");
  std::sort(preds.begin(), preds.end());
  for (auto& p : preds) s += p;
  return s;
}

}  // namespace

std::string to_string(const TreePattern& q) {
  if (q.size() == 0) return "";
  std::vector<char> on_mb = q.main_branch_mask();
  std::string s;
  std::size_t cur = q.root();
  while (true) {
    const auto& n = q.node(cur);
    s += n.label;
    std::vector<std::string> preds;
    std::size_t next = kNoNode;
    for (std::size_t c : n.children) {
      if (on_mb[c]) next = c;
      else preds.push_back("[" + write_pred(q, c) + "]");
    }
    std::sort(preds.begin(), preds.end());
    for (auto& p : preds) s += p;
    if (next == kNoNode) break;
    s += sep(q.node(next).axis);
    cur = next;
  }
  return s;
}

std::string to_string(const IntersectionPattern& q) {
  std::string s;
  for (std::size_t i = 0; i < q.members.size(); ++i) {
    if (i) s += " & ";
    s += to_string(q.members[i]);
  }
  return s;
}

std::string to_string(const AnyPattern& q) {
  return std::visit([](const auto& p) { return to_string(p); }, q);
}

}  // namespace pxv
