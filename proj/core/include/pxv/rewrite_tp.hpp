#pragma once

#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "pxv/cindep.hpp"
#include "pxv/pattern.hpp"
#include "pxv/probeval.hpp"
#include "pxv/views.hpp"

namespace pxv {

struct RewriteParts {
  std::size_t k = 0;
  TreePattern v_prime;
  TreePattern q_prime;
  TreePattern q_double_prime;
  TreePattern compensation;  // q_(k)
  bool restricted = false;
};

struct Rejection {
  std::string view;
  std::string gate;  // "equivalence", "c-independence gate", "prefix-suffix predicate gate"
  std::string reason;
  std::size_t u = 0;
};

std::variant<RewriteParts, Rejection> derive_parts(const TreePattern& q, const ViewDef& v);

// Gates applied to a candidate (view v compensated by c), given the q″ to test
// c-independence against.
struct GateResult {
  bool passed = false;
  bool restricted = false;
  std::size_t u = 0;
  std::string gate;
  std::string reason;
  CIndepVerdict verdict;
  TreePattern v_prime;
  TreePattern q_double_prime;
};
GateResult apply_gates(const TreePattern& v, const TreePattern& compensation,
                       const TreePattern& q_double_prime);

struct TpPlan {
  std::string view;
  TreePattern view_pattern;
  TreePattern compensation;
  bool restricted = true;
  std::size_t k = 0;
  std::size_t u = 0;

  // comp(doc(v)/lbl(v), compensation)
  TreePattern plan_pattern() const;
};

TpPlan make_tp_plan(const ViewDef& v, const TreePattern& compensation);

struct TpSearch {
  std::vector<TpPlan> plans;
  std::vector<Rejection> rejections;
  // (v′, q″) pairs whose Independent verdict a plan relies on
  std::vector<std::pair<TreePattern, TreePattern>> independence_claims;
};

TpSearch find_tp_rewritings(const TreePattern& q, const std::vector<ViewDef>& V);

inline constexpr std::size_t kDefaultEventCap = 12;

ProbAnswer fr_restricted(const TpPlan& plan, const ViewExtension& ext);
ProbAnswer fr_general(const TpPlan& plan, const ViewExtension& ext,
                      std::size_t event_cap = kDefaultEventCap);
ProbAnswer exec_tp(const TpPlan& plan, const ViewExtension& ext);

std::string tp_plan_to_json(const TpPlan& plan);
TpPlan tp_plan_from_json(const std::string& text, const std::vector<ViewDef>& views);
std::string tp_search_to_json(const TpSearch& s);

}  // namespace pxv
