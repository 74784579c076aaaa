#include <benchmark/benchmark.h>

#include <algorithm>

#include "pxv/generator.hpp"
#include "pxv/rewrite_cap.hpp"
#include "pxv/rewrite_tp.hpp"

using namespace pxv;

namespace {

Instance instance(std::size_t dist, std::uint64_t seed = 42) {
  GenParams gp;
  gp.max_dist_nodes = dist;
  return gen_instance(seed, gp);
}

// subset-state DP against world enumeration, same inputs
void BM_Peval(benchmark::State& st) {
  Instance in = instance(st.range(0));
  for (auto _ : st) benchmark::DoNotOptimize(peval(in.query, in.pdoc));
}
BENCHMARK(BM_Peval)->Arg(4)->Arg(8)->Arg(12);

void BM_OraclePeval(benchmark::State& st) {
  Instance in = instance(st.range(0));
  AnyPattern q(in.query);
  for (auto _ : st) benchmark::DoNotOptimize(oracle_peval(q, in.pdoc));
}
BENCHMARK(BM_OraclePeval)->Arg(4)->Arg(8)->Arg(12);

void BM_Materialize(benchmark::State& st) {
  Instance in = instance(12);
  for (auto _ : st)
    for (const auto& v : in.views) benchmark::DoNotOptimize(materialize_prob(v, in.pdoc));
}
BENCHMARK(BM_Materialize);

void BM_Containment(benchmark::State& st) {
  TreePattern a = parse_tree_pattern("a[1]/a[2]/a[3]/a[4]/a[5]/a[6]//b");
  TreePattern b = parse_tree_pattern("a/a[2]//a[4]//a[6]//b");
  for (auto _ : st) benchmark::DoNotOptimize(contains(a, b));
}
BENCHMARK(BM_Containment);

void BM_FindTp(benchmark::State& st) {
  std::vector<Instance> ins;
  for (std::uint64_t s = 0; s < 32; ++s) ins.push_back(instance(8, s));
  for (auto _ : st)
    for (const auto& in : ins) benchmark::DoNotOptimize(find_tp_rewritings(in.query, in.views));
}
BENCHMARK(BM_FindTp);

void BM_TpRewriteCap(benchmark::State& st) {
  std::vector<Instance> ins;
  for (std::uint64_t s = 0; s < 32; ++s) ins.push_back(instance(8, s));
  for (auto _ : st)
    for (const auto& in : ins) benchmark::DoNotOptimize(tprewrite_cap(in.query, in.views));
}
BENCHMARK(BM_TpRewriteCap);

// matching instances: product search over k disjoint triples plus decoys
void BM_ProductSearchMatching(benchmark::State& st) {
  int k = static_cast<int>(st.range(0));
  std::string q = "a[1]";
  for (int i = 2; i <= 3 * k; ++i) q += "/a[" + std::to_string(i) + "]";
  q += "//b";
  auto edge = [&](std::vector<int> pos) {
    std::string s;
    for (int i = 1; i <= 3 * k; ++i) {
      s += i == 1 ? "a" : "/a";
      if (std::find(pos.begin(), pos.end(), i) != pos.end()) s += "[" + std::to_string(i) + "]";
    }
    return parse_tree_pattern(s + "//b");
  };
  std::vector<ViewDef> vs;
  for (int j = 0; j < k; ++j) {
    vs.push_back({"t" + std::to_string(j), edge({3 * j + 1, 3 * j + 2, 3 * j + 3})});
    vs.push_back({"d" + std::to_string(j), edge({3 * j + 1, (3 * j + 4) % (3 * k) + 1, 3 * j + 3})});
  }
  vs.push_back({"app", edge({})});
  TreePattern tq = parse_tree_pattern(q);
  for (auto _ : st) benchmark::DoNotOptimize(find_product_rewriting(tq, vs));
}
BENCHMARK(BM_ProductSearchMatching)->Arg(2)->Arg(3);

}  // namespace

BENCHMARK_MAIN();
