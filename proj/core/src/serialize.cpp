#include "pxv/serialize.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace pxv {

std::string plan_to_json(const AnyPlan& plan) {
  if (const auto* t = std::get_if<TpPlan>(&plan)) return tp_plan_to_json(*t);
  return cap_plan_to_json(std::get<CapPlan>(plan));
}

AnyPlan plan_from_json(const std::string& text, const std::vector<ViewDef>& views) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& ex) {
    throw ParseError(std::string("JSON syntax error: ") + ex.what(), ex.byte);
  }
  std::string kind = j.value("kind", "");
  if (kind == "tp") return tp_plan_from_json(text, views);
  if (kind == "cap") return cap_plan_from_json(text, views);
  throw ValidationError("plan kind must be \"tp\" or \"cap\", got \"" + kind + "\"");
}

std::vector<std::string> plan_views(const AnyPlan& plan) {
  if (const auto* t = std::get_if<TpPlan>(&plan)) return {t->view};
  std::vector<std::string> out;
  for (const auto& m : std::get<CapPlan>(plan).members)
    if (std::find(out.begin(), out.end(), m.view) == out.end()) out.push_back(m.view);
  if (const auto* pm = std::get_if<ProductMode>(&std::get<CapPlan>(plan).mode))
    if (!pm->appearance_view.empty() &&
        std::find(out.begin(), out.end(), pm->appearance_view) == out.end())
      out.push_back(pm->appearance_view);
  return out;
}

ProbAnswer exec_plan(const AnyPlan& plan, const ExtensionSet& ext) {
  if (const auto* t = std::get_if<TpPlan>(&plan)) {
    auto it = ext.find(t->view);
    if (it == ext.end()) throw Error("missing extension for view '" + t->view + "'");
    return exec_tp(*t, it->second);
  }
  return exec_cap(std::get<CapPlan>(plan), ext);
}

std::string answer_to_tsv(const ProbAnswer& a) {
  std::ostringstream os;
  for (const auto& [n, p] : a) os << n << '\t' << to_string(p) << '\n';
  return os.str();
}

void save_extensions(const std::string& dir, const ExtensionSet& ext) {
  std::filesystem::create_directories(dir);
  for (const auto& [name, e] : ext) {
    std::ofstream f(std::filesystem::path(dir) / (name + ".json"));
    if (!f) throw Error("cannot write extension for '" + name + "' in " + dir);
    f << serialize_extension(e) << '\n';
  }
}

ExtensionSet load_extensions(const std::string& dir) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(dir)) throw Error("extensions directory '" + dir + "' not found");
  ExtensionSet out;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.path().extension() != ".json") continue;
    std::ifstream f(entry.path());
    std::stringstream ss;
    ss << f.rdbuf();
    ViewExtension e = parse_extension(ss.str());
    std::string name = e.view.empty() ? entry.path().stem().string() : e.view;
    out.emplace(name, std::move(e));
  }
  return out;
}

}  // namespace pxv
