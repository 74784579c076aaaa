// pxv: command-line front end for the pxv core library.
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "pxv/cindep.hpp"
#include "pxv/generator.hpp"
#include "pxv/rewrite_cap.hpp"
#include "pxv/rewrite_tp.hpp"
#include "pxv/serialize.hpp"
#include "pxv/verify.hpp"

using namespace pxv;
using ojson = nlohmann::ordered_json;

namespace {

// Exit codes
constexpr int kOk = 0, kNoPlan = 1, kInputError = 2;

struct Opts {
  std::string pdoc, doc, query, query2, views, plan, extensions, format = "json";
  std::string mode = "product", fault = "none", out;
  std::uint64_t seed = 1;
  std::size_t trials = 0, max_dist = kDefaultWorldBound, falsify = 0;
  bool timing = false;
  GenParams gen;
};

std::string slurp(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ValidationError("cannot read '" + path + "'");
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

void need(const std::string& v, const char* flag) {
  if (v.empty()) throw ValidationError(std::string("missing required flag ") + flag);
}

PDocument load_pdoc(const Opts& o) {
  need(o.pdoc, "--pdoc");
  return parse_pdoc(slurp(o.pdoc));
}

std::vector<ViewDef> load_views(const Opts& o) {
  need(o.views, "--views");
  return parse_view_list(slurp(o.views));
}

TreePattern load_tp(const std::string& text, const char* flag) {
  need(text, flag);
  return parse_tree_pattern(text);
}

void emit_answer(const ProbAnswer& a, const Opts& o) {
  if (o.format == "tsv")
    std::cout << answer_to_tsv(a);
  else
    std::cout << answer_to_json(a) << '\n';
}

int cmd_parse(const Opts& o) {
  if (!o.query.empty()) {
    AnyPattern q = parse_pattern(o.query);
    ojson j;
    j["pattern"] = to_string(q);
    if (const auto* t = std::get_if<TreePattern>(&q)) {
      j["kind"] = "tp";
      j["canonical"] = canonical(*t);
      StructureReport s = structure(*t);
      j["depth"] = s.depth;
      j["m"] = s.m;
      j["u"] = s.u;
    } else {
      j["kind"] = "cap";
      j["satisfiable"] = satisfiable(std::get<IntersectionPattern>(q));
    }
    std::cout << j.dump() << '\n';
    return kOk;
  }
  if (!o.pdoc.empty()) {
    PDocument p = parse_pdoc(slurp(o.pdoc), {.validate = false});
    ValidationReport r = validate_pdoc(p);
    ojson j;
    j["valid"] = r.ok();
    j["violations"] = ojson::array();
    for (const auto& v : r.violations) j["violations"].push_back({{"node", v.node}, {"rule", v.rule}});
    if (r.ok()) j["pdoc"] = ojson::parse(serialize_pdoc(p));
    std::cout << j.dump() << '\n';
    return r.ok() ? kOk : kInputError;
  }
  need(o.doc, "--query, --pdoc or --doc");
  std::cout << serialize_doc(parse_doc(slurp(o.doc))) << '\n';
  return kOk;
}

int cmd_eval(const Opts& o) {
  need(o.doc, "--doc");
  need(o.query, "--query");
  Document d = parse_doc(slurp(o.doc));
  AnyPattern q = parse_pattern(o.query);
  std::set<std::string> ids = std::visit([&](const auto& p) { return eval_doc(p, d); }, q);
  if (o.format == "tsv") {
    for (const auto& id : ids) std::cout << id << '\n';
  } else {
    std::cout << ojson(ids).dump() << '\n';
  }
  return kOk;
}

int cmd_peval(const Opts& o) {
  need(o.query, "--query");
  emit_answer(peval(parse_pattern(o.query), load_pdoc(o)), o);
  return kOk;
}

int cmd_worlds(const Opts& o) {
  std::vector<World> ws = enumerate_worlds(load_pdoc(o), o.max_dist);
  if (o.format == "tsv") {
    for (const auto& w : ws) {
      std::string ids;
      for (const auto& id : w.ids) ids += (ids.empty() ? "" : ",") + id;
      std::cout << ids << '\t' << to_string(w.probability) << '\n';
    }
    return kOk;
  }
  ojson out = ojson::array();
  for (const auto& w : ws)
    out.push_back({{"ids", w.ids},
                   {"p", to_string(w.probability)},
                   {"document", ojson::parse(serialize_doc(w.document))}});
  std::cout << out.dump() << '\n';
  return kOk;
}

int cmd_materialize(const Opts& o) {
  std::vector<ViewDef> views = load_views(o);
  if (!o.doc.empty() && o.pdoc.empty()) {
    Document d = parse_doc(slurp(o.doc));
    ojson out;
    for (const auto& v : views) out[v.name] = ojson::parse(serialize_doc(materialize_det(v, d)));
    std::cout << out.dump() << '\n';
    return kOk;
  }
  PDocument p = load_pdoc(o);
  ExtensionSet ext;
  for (const auto& v : views) ext.emplace(v.name, materialize_prob(v, p));
  if (!o.extensions.empty()) {
    save_extensions(o.extensions, ext);
    ojson j;
    j["directory"] = o.extensions;
    j["views"] = ojson::array();
    for (const auto& [name, e] : ext) j["views"].push_back(name);
    std::cout << j.dump() << '\n';
    return kOk;
  }
  ojson out;
  for (const auto& [name, e] : ext) out[name] = ojson::parse(serialize_extension(e));
  std::cout << out.dump() << '\n';
  return kOk;
}

int cmd_cindep(const Opts& o) {
  TreePattern a = load_tp(o.query, "--query"), b = load_tp(o.query2, "--other");
  CIndepVerdict v = cindep(a, b);
  if (o.falsify > 0 && v.independent()) {
    FalsifyResult f = cindep_falsify(a, b, o.seed, o.falsify);
    std::cout << verdict_to_json(v, &f) << '\n';
  } else {
    std::cout << verdict_to_json(v) << '\n';
  }
  return kOk;
}

void save_plan(const Opts& o, const AnyPlan& plan) {
  if (o.out.empty()) return;
  std::ofstream f(o.out);
  if (!f) throw ValidationError("cannot write '" + o.out + "'");
  f << plan_to_json(plan) << '\n';
}

int cmd_rewrite_tp(const Opts& o) {
  TreePattern q = load_tp(o.query, "--query");
  TpSearch s = find_tp_rewritings(q, load_views(o));
  std::cout << tp_search_to_json(s) << '\n';
  if (s.plans.empty()) {
    std::string why;
    for (const auto& r : s.rejections) why += (why.empty() ? "" : "; ") + r.view + ": " + r.gate;
    std::cerr << "no rewriting" << (why.empty() ? "" : " (" + why + ")") << '\n';
    return kNoPlan;
  }
  save_plan(o, s.plans.front());
  return kOk;
}

int cmd_rewrite_cap(const Opts& o) {
  TreePattern q = load_tp(o.query, "--query");
  std::vector<ViewDef> views = load_views(o);
  ojson j;
  std::optional<CapPlan> plan;
  if (o.mode == "product") {
    ProductSearch s = find_product_rewriting(q, views);
    plan = s.plan;
    j["status"] = plan ? "found" : "none";
    if (!plan) j["reason"] = s.reason;
  } else {
    CapSearch s = tprewrite_cap(q, views);
    plan = s.plan;
    j["status"] = status_name(s.status);
    if (!plan) j["reason"] = s.reason;
  }
  j["plan"] = plan ? ojson::parse(cap_plan_to_json(*plan)) : ojson(nullptr);
  std::cout << j.dump() << '\n';
  if (!plan) {
    std::cerr << "no rewriting: " << j.value("reason", std::string()) << '\n';
    return kNoPlan;
  }
  save_plan(o, *plan);
  return kOk;
}

int cmd_exec(const Opts& o) {
  need(o.plan, "--plan");
  need(o.extensions, "--extensions");
  AnyPlan plan = plan_from_json(slurp(o.plan), load_views(o));
  emit_answer(exec_plan(plan, load_extensions(o.extensions)), o);
  return kOk;
}

int cmd_verify(const Opts& o) {
  VerifyBounds b;
  b.gen = o.gen;
  VerifyOptions vo;
  if (o.fault == "skip-appearance-divisor")
    vo.fault = Fault::SkipAppearanceDivisor;
  else if (o.fault != "none")
    throw ValidationError("unknown fault '" + o.fault + "'");
  VerifyReport r = verify(o.seed, o.trials, b, vo);
  std::cout << report_to_json(r, o.timing) << '\n';
  if (!r.passed()) std::cerr << r.disagreement_count << " disagreement(s)\n";
  return kOk;
}

int cmd_gen(const Opts& o) {
  std::cout << serialize_instance(gen_instance(o.seed, o.gen)) << '\n';
  return kOk;
}

void add_gen_flags(CLI::App* c, Opts& o) {
  c->add_option("--max-dist", o.gen.max_dist_nodes, "Distributional nodes per document");
  c->add_option("--max-depth", o.gen.max_depth, "Document depth");
  c->add_option("--query-depth", o.gen.query_depth, "Query main-branch length");
  c->add_option("--pred-count", o.gen.pred_count, "Predicates per query");
  c->add_option("--max-views", o.gen.max_views, "Views per instance");
  c->add_option("--labels", o.gen.labels, "Label alphabet")->delimiter(',');
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"View-based query answering over probabilistic XML"};
  app.require_subcommand(1);
  Opts o;

  auto fmt = [&](CLI::App* c) {
    c->add_option("--format", o.format, "Output format")->check(CLI::IsMember({"json", "tsv"}));
  };

  auto* parse = app.add_subcommand("parse", "Parse and normalize a query, p-document or document");
  parse->add_option("--query", o.query);
  parse->add_option("--pdoc", o.pdoc);
  parse->add_option("--doc", o.doc);

  auto* eval = app.add_subcommand("eval", "Evaluate a query on a deterministic document");
  eval->add_option("--doc", o.doc)->required();
  eval->add_option("--query", o.query)->required();
  fmt(eval);

  auto* pe = app.add_subcommand("peval", "Answer probabilities of a query over a p-document");
  pe->add_option("--pdoc", o.pdoc)->required();
  pe->add_option("--query", o.query)->required();
  fmt(pe);

  auto* wo = app.add_subcommand("worlds", "Enumerate possible worlds");
  wo->add_option("--pdoc", o.pdoc)->required();
  wo->add_option("--max-dist", o.max_dist, "Refuse documents with more distributional nodes");
  fmt(wo);

  auto* ma = app.add_subcommand("materialize", "Materialize view extensions");
  ma->add_option("--pdoc", o.pdoc);
  ma->add_option("--doc", o.doc);
  ma->add_option("--views", o.views)->required();
  ma->add_option("--extensions", o.extensions, "Write <view>.json files here");

  auto* ci = app.add_subcommand("cindep", "Conditional independence of two patterns");
  ci->add_option("--query", o.query)->required();
  ci->add_option("--other", o.query2)->required();
  ci->add_option("--falsify", o.falsify, "Random p-documents to test an Independent verdict on");
  ci->add_option("--seed", o.seed);

  auto* rw = app.add_subcommand("rewrite", "Find a probabilistic rewriting");
  rw->require_subcommand(1);
  auto* rtp = rw->add_subcommand("tp", "Single view with compensation");
  auto* rcap = rw->add_subcommand("cap", "Intersection of views");
  for (auto* c : {rtp, rcap}) {
    c->add_option("--query", o.query)->required();
    c->add_option("--views", o.views)->required();
    c->add_option("--out", o.out, "Save the plan here");
  }
  rcap->add_option("--mode", o.mode)->check(CLI::IsMember({"product", "system"}));

  auto* ex = app.add_subcommand("exec", "Run a plan over stored extensions");
  ex->add_option("--plan", o.plan)->required();
  ex->add_option("--views", o.views)->required();
  ex->add_option("--extensions", o.extensions)->required();
  fmt(ex);

  auto* ve = app.add_subcommand("verify", "Randomized end-to-end check against the oracles");
  ve->add_option("--seed", o.seed);
  ve->add_option("--trials", o.trials);
  ve->add_option("--fault", o.fault, "none | skip-appearance-divisor");
  ve->add_flag("--timing", o.timing, "Include per-trial milliseconds");
  add_gen_flags(ve, o);

  auto* ge = app.add_subcommand("gen", "Generate a random instance");
  ge->add_option("--seed", o.seed);
  add_gen_flags(ge, o);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? kOk : kInputError;
  }

  try {
    if (*parse) return cmd_parse(o);
    if (*eval) return cmd_eval(o);
    if (*pe) return cmd_peval(o);
    if (*wo) return cmd_worlds(o);
    if (*ma) return cmd_materialize(o);
    if (*ci) return cmd_cindep(o);
    if (*rtp) return cmd_rewrite_tp(o);
    if (*rcap) return cmd_rewrite_cap(o);
    if (*ex) return cmd_exec(o);
    if (*ve) return cmd_verify(o);
    if (*ge) return cmd_gen(o);
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << '\n';
    return kInputError;
  } catch (const ValidationError& e) {
    std::cerr << "invalid input: " << e.what() << '\n';
    return kInputError;
  } catch (const LimitExceeded& e) {
    std::cerr << "limit exceeded: " << e.what() << '\n';
    return kInputError;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInputError;
  }
  return kOk;
}
