#pragma once

#include <map>
#include <string>
#include <vector>

#include "pxv/model.hpp"
#include "pxv/pattern.hpp"

namespace pxv {

// node id -> probability, positive entries only
using ProbAnswer = std::map<std::string, Rational>;

ProbAnswer peval(const TreePattern& q, const PDocument& p);
ProbAnswer peval_cap(const IntersectionPattern& Q, const PDocument& p);
ProbAnswer peval(const AnyPattern& q, const PDocument& p);

// Probability that every member selects the ordinary node `target`.
Rational peval_at(const std::vector<const TreePattern*>& members, const PDocument& p,
                  std::size_t target);

// Literal possible-worlds evaluation.
ProbAnswer oracle_peval(const AnyPattern& q, const PDocument& p,
                        std::size_t max_dist = kDefaultWorldBound);

std::string answer_to_json(const ProbAnswer& a);
ProbAnswer answer_from_json(const std::string& text);

}  // namespace pxv
