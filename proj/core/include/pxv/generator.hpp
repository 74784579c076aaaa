#pragma once

#include <random>
#include <string>
#include <vector>

#include "pxv/model.hpp"
#include "pxv/pattern.hpp"
#include "pxv/views.hpp"

namespace pxv {

struct GenParams {
  std::size_t max_dist_nodes = 12;
  std::size_t max_depth = 6;       // document depth
  std::size_t max_nodes = 28;      // ordinary nodes
  std::vector<std::string> labels{"a", "b", "c", "d"};
  std::size_t query_depth = 6;
  std::size_t pred_count = 2;
  std::size_t max_views = 4;
};

struct Instance {
  PDocument pdoc;
  TreePattern query;
  std::vector<ViewDef> views;
};

PDocument random_pdoc(std::mt19937_64& rng, const GenParams& gp);
TreePattern random_query(std::mt19937_64& rng, const GenParams& gp);
// Query built along a random root-to-node path of p, so it usually has answers.
TreePattern random_query_for(std::mt19937_64& rng, const GenParams& gp, const PDocument& p);
// A view containing q or one of its prefixes.
TreePattern random_relaxation(std::mt19937_64& rng, const TreePattern& q);

Instance gen_instance(std::uint64_t seed, const GenParams& gp = {});

std::string serialize_instance(const Instance& inst);
Instance parse_instance(const std::string& text);

}  // namespace pxv
