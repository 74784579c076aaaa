#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "pxv/model.hpp"
#include "pxv/pattern.hpp"

namespace pxv {

enum class Verdict { Independent, Dependent };

struct CIndepVerdict {
  Verdict verdict = Verdict::Independent;
  std::string rule;    // which rule fired, or why independence is trivial
  std::string detail;  // alignment and predicates involved
  bool independent() const { return verdict == Verdict::Independent; }
};

CIndepVerdict cindep(const TreePattern& q1, const TreePattern& q2);

struct FalsifyResult {
  bool consistent = true;
  std::optional<PDocument> counterexample;
  std::string node;
  Rational joint, product, appearance;  // at the violating node
  std::size_t trials_run = 0;
};

struct FalsifyParams {
  std::size_t max_dist_nodes = 10;
};

FalsifyResult cindep_falsify(const TreePattern& q1, const TreePattern& q2, std::uint64_t seed,
                             std::size_t trials, const FalsifyParams& params = {});

// Checks the defining identity on one p-document; returns the first violating node id.
std::optional<std::string> check_independence_on(const TreePattern& q1, const TreePattern& q2,
                                                 const PDocument& p);

std::string verdict_to_json(const CIndepVerdict& v, const FalsifyResult* f = nullptr);

}  // namespace pxv
