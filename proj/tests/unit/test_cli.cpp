#include <gtest/gtest.h>
#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include "json.hpp"
#include "pxv/generator.hpp"
#include "pxv/serialize.hpp"
#include "pxv/views.hpp"

using namespace pxv;
using json = nlohmann::json;

namespace {

struct Result {
  int code;
  std::string out;
};

Result run(const std::string& args) {
  std::string cmd = std::string(PXV_BIN) + " " + args + " 2>/dev/null";
  FILE* f = popen(cmd.c_str(), "r");
  std::string out;
  std::array<char, 4096> buf;
  std::size_t n;
  while ((n = fread(buf.data(), 1, buf.size(), f)) > 0) out.append(buf.data(), n);
  int status = pclose(f);
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

std::string slurp(const std::string& path) {
  std::ifstream f(path);
  return std::string(std::istreambuf_iterator<char>(f), {});
}

std::string fx(const std::string& name) { return std::string(PXV_FIXTURE_DIR) + "/" + name; }

const std::string kQBon = "'personnel//person//bonus[project/laptop]'";
const std::string kQRBon = "'personnel//person[name/Rick]//bonus[project/laptop]'";

std::filesystem::path scratch(const std::string& tag) {
  auto p = std::filesystem::temp_directory_path() / ("pxv_cli_" + tag + std::to_string(::getpid()));
  std::filesystem::remove_all(p);
  std::filesystem::create_directories(p);
  return p;
}

}  // namespace

TEST(Cli, Peval) {
  Result r = run("peval --pdoc " + fx("per.json") + " --query " + kQBon);
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(json::parse(r.out), json::parse(R"([{"node":"n5","p":"9/10"}])"));
  Result t = run("peval --format tsv --pdoc " + fx("per.json") + " --query " + kQBon);
  EXPECT_EQ(t.out, "n5\t9/10\n");
}

TEST(Cli, WorldsIncludesCompleteDocument) {
  Result r = run("worlds --pdoc " + fx("per.json"));
  ASSERT_EQ(r.code, 0);
  json ws = json::parse(r.out);
  std::string want = serialize_doc(parse_doc(slurp(fx("d_per.json"))));
  bool found = false;
  for (const auto& w : ws)
    if (w["document"].dump() == json::parse(want).dump()) {
      found = true;
      EXPECT_EQ(w["p"], "189/400");
    }
  EXPECT_TRUE(found);
}

TEST(Cli, RewriteTpRejectsDependentPair) {
  Result r = run("rewrite tp --query 'a/b[c]' --views " + fx("dep_views.json"));
  EXPECT_EQ(r.code, 1);
  json j = json::parse(r.out);
  EXPECT_TRUE(j["plans"].empty());
  EXPECT_EQ(j["rejections"][0]["gate"], "c-independence gate");
}

TEST(Cli, MaterializeRewriteExecPipeline) {
  auto dir = scratch("pipe");
  std::string ext = (dir / "ext").string(), plan = (dir / "plan.json").string(),
              cplan = (dir / "cplan.json").string();
  ASSERT_EQ(run("materialize --pdoc " + fx("per.json") + " --views " + fx("per_views.json") +
                " --extensions " + ext).code, 0);
  EXPECT_TRUE(std::filesystem::exists(dir / "ext" / "v1.json"));

  ASSERT_EQ(run("rewrite tp --query " + kQBon + " --views " + fx("per_views.json") + " --out " + plan).code, 0);
  Result e = run("exec --plan " + plan + " --views " + fx("per_views.json") + " --extensions " + ext);
  EXPECT_EQ(e.code, 0);
  EXPECT_EQ(json::parse(e.out), json::parse(R"([{"node":"n5","p":"9/10"}])"));

  Result c = run("rewrite cap --query " + kQRBon + " --views " + fx("per_views.json") + " --out " + cplan);
  ASSERT_EQ(c.code, 0);
  EXPECT_EQ(json::parse(c.out)["status"], "found");
  Result ce = run("exec --plan " + cplan + " --views " + fx("per_views.json") + " --extensions " + ext);
  EXPECT_EQ(json::parse(ce.out), json::parse(R"([{"node":"n5","p":"27/40"}])"));

  // plan files round-trip through the library
  std::string text = slurp(cplan);
  auto views = parse_view_list(slurp(fx("per_views.json")));
  EXPECT_EQ(json::parse(plan_to_json(plan_from_json(text, views))), json::parse(text));
  std::filesystem::remove_all(dir);
}

TEST(Cli, RewriteCapNoPlanExitsOne) {
  Result r = run("rewrite cap --mode system --query 'a/b[c]/d' --views " + fx("dep_views.json"));
  EXPECT_EQ(r.code, 1);
  json j = json::parse(r.out);
  EXPECT_TRUE(j["plan"].is_null());
  EXPECT_NE(j["status"], "found");
}

TEST(Cli, InputErrorsExitTwo) {
  EXPECT_EQ(run("peval --pdoc /no/such/file --query a").code, 2);
  EXPECT_EQ(run("peval --pdoc " + fx("per.json") + " --query 'a[['").code, 2);
  EXPECT_EQ(run("frobnicate").code, 2);
  EXPECT_EQ(run("rewrite cap --mode bogus --query a --views " + fx("per_views.json")).code, 2);
}

TEST(Cli, ParseAndCindep) {
  Result p = run("parse --query 'a[b][b]/c'");
  ASSERT_EQ(p.code, 0);
  EXPECT_EQ(json::parse(p.out)["canonical"], "a[b]/c");
  Result c = run("cindep --query 'a[.//c]/b' --other 'a/b[c]'");
  EXPECT_EQ(json::parse(c.out)["verdict"], "Dependent");
}

TEST(Cli, GenAndVerify) {
  Result a = run("gen --seed 11"), b = run("gen --seed 11");
  EXPECT_EQ(a.out, b.out);
  EXPECT_TRUE(json::parse(a.out).contains("pdoc"));
  Result v = run("verify --trials 15 --seed 3");
  EXPECT_EQ(v.code, 0);
  EXPECT_TRUE(json::parse(v.out)["passed"].get<bool>());
  Result z = run("verify --trials 0");
  EXPECT_EQ(json::parse(z.out)["trials"], 0);
}

TEST(Cli, OutputsRoundTrip) {
  Result m = run("materialize --pdoc " + fx("per.json") + " --views " + fx("per_views.json"));
  ASSERT_EQ(m.code, 0);
  json exts = json::parse(m.out);
  for (const auto& [name, e] : exts.items()) {
    ViewExtension back = parse_extension(e.dump());
    EXPECT_EQ(json::parse(serialize_extension(back)), e) << name;
  }
  Result w = run("worlds --pdoc " + fx("per.json"));
  json ws = json::parse(w.out);
  for (const auto& x : ws)
    EXPECT_EQ(json::parse(serialize_doc(parse_doc(x["document"].dump()))), x["document"]);
  Result g = run("gen --seed 4");
  EXPECT_EQ(json::parse(serialize_instance(parse_instance(g.out))), json::parse(g.out));
  Result t = run("rewrite tp --query " + kQBon + " --views " + fx("per_views.json"));
  auto views = parse_view_list(slurp(fx("per_views.json")));
  json plans = json::parse(t.out)["plans"];
  for (const auto& p : plans)
    EXPECT_EQ(json::parse(tp_plan_to_json(tp_plan_from_json(p.dump(), views))), p);
}
