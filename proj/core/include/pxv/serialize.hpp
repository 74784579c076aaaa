#pragma once

#include <string>
#include <variant>
#include <vector>

#include "pxv/rewrite_cap.hpp"
#include "pxv/rewrite_tp.hpp"

namespace pxv {

using AnyPlan = std::variant<TpPlan, CapPlan>;

std::string plan_to_json(const AnyPlan& plan);
// Dispatches on "kind".
AnyPlan plan_from_json(const std::string& text, const std::vector<ViewDef>& views);
std::vector<std::string> plan_views(const AnyPlan& plan);
ProbAnswer exec_plan(const AnyPlan& plan, const ExtensionSet& ext);

// node<TAB>p lines, sorted by node id
std::string answer_to_tsv(const ProbAnswer& a);

// One <view>.json per extension.
void save_extensions(const std::string& dir, const ExtensionSet& ext);
ExtensionSet load_extensions(const std::string& dir);

}  // namespace pxv
