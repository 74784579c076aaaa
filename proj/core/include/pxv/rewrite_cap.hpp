#pragma once

#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "pxv/pattern.hpp"
#include "pxv/probeval.hpp"
#include "pxv/rewrite_tp.hpp"
#include "pxv/views.hpp"

namespace pxv {

// ---- d-view decomposition and the exponent system

struct Decomposition {
  std::vector<IntersectionPattern> dviews;          // w_1 .. w_s
  std::vector<std::vector<std::size_t>> per_view;   // W_i, sorted
  std::vector<std::size_t> for_query;               // W_q, sorted
};

// Steps 1-2 for one pattern: predicate-position groups over its main branch,
// dependent groups merged. Each group is a set of 0-based main-branch positions.
std::vector<std::vector<std::size_t>> predicate_groups(const TreePattern& v);

Decomposition decompose_views(const TreePattern& q, const std::vector<TreePattern>& views);

struct ExponentSystem {
  // columns x_1..x_s then y; one row per view
  std::vector<std::vector<Rational>> rows;
  std::vector<Rational> target;
};

ExponentSystem build_system(const Decomposition& d);
// Coefficients c with sum c_i * rows_i = target, or nothing when target is outside the row span.
std::optional<std::vector<Rational>> solve_system(const ExponentSystem& sys);

// ---- plans

struct CapMember {
  std::string view;
  TreePattern view_pattern;
  std::optional<TreePattern> compensation;
  TreePattern pattern() const;       // comp(v, c), or v
  TreePattern plan_pattern() const;  // doc(v)/lbl(v), compensated
};

struct ProductMode {
  std::string appearance_view;
};
struct SystemMode {
  std::vector<Rational> coefficients;  // one per member; 0 = support guard only
};

struct CapPlan {
  std::vector<CapMember> members;
  std::variant<ProductMode, SystemMode> mode;
  IntersectionPattern plan_pattern() const;
  IntersectionPattern unfolded() const;
};

inline constexpr std::size_t kDefaultSubsetCeiling = 12;

struct ProductSearch {
  std::optional<CapPlan> plan;
  std::string reason;
  std::vector<std::pair<TreePattern, TreePattern>> independence_claims;
};

// Original views plus compensated views admitted by the single-view gates.
std::vector<CapMember> candidate_members(const TreePattern& q, const std::vector<ViewDef>& V,
                                         std::vector<std::pair<TreePattern, TreePattern>>* claims = nullptr);

ProductSearch find_product_rewriting(const TreePattern& q, const std::vector<ViewDef>& V,
                                     std::size_t ceiling = kDefaultSubsetCeiling);

// Name of a view v with mb(q) ⊑ v, if any.
std::optional<std::string> appearance_view(const TreePattern& q, const std::vector<ViewDef>& V);
std::optional<ProbAnswer> appearance_from_views(const TreePattern& q, const std::vector<ViewDef>& V,
                                                const ExtensionSet& ext);

enum class CapStatus { Found, None, Unknown };

struct CapSearch {
  CapStatus status = CapStatus::None;
  std::optional<CapPlan> plan;
  std::string reason;
  std::vector<CapMember> v_prime, v_double_prime;
  Decomposition decomposition;
  ExponentSystem system;
  std::vector<std::pair<TreePattern, TreePattern>> independence_claims;
};

CapSearch tprewrite_cap(const TreePattern& q, const std::vector<ViewDef>& V);

// Probability of each node under one member, read from its view's extension.
ProbAnswer member_probabilities(const CapMember& m, const ExtensionSet& ext);

// Fault injection for the verifier's mutation check.
struct ExecOptions {
  bool skip_appearance_divisor = false;
};

ProbAnswer exec_cap(const CapPlan& plan, const ExtensionSet& ext, const ExecOptions& opts = {});

std::string cap_plan_to_json(const CapPlan& plan);
CapPlan cap_plan_from_json(const std::string& text, const std::vector<ViewDef>& views);
std::string status_name(CapStatus s);

}  // namespace pxv
