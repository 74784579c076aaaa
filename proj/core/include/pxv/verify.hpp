#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "pxv/generator.hpp"
#include "pxv/probeval.hpp"

namespace pxv {

struct VerifyBounds {
  GenParams gen;
  std::size_t falsify_trials = 25;  // per independence claim
};

enum class Fault { None, SkipAppearanceDivisor };

struct VerifyOptions {
  Fault fault = Fault::None;
  bool screen_claims = true;
};

struct Disagreement {
  std::size_t trial = 0;
  std::uint64_t seed = 0;
  std::string kind;  // peval-oracle, tp, product, system, falsified-claim
  std::string detail;
  std::string instance;
  ProbAnswer expected, got;
};

struct VerifyReport {
  std::size_t trials = 0;
  std::size_t agreements = 0;
  std::size_t tp_plans = 0, product_plans = 0, system_plans = 0, multi_view_plans = 0;
  std::size_t claims_screened = 0, falsified = 0, limit_skips = 0;
  std::size_t disagreement_count = 0;
  std::optional<Disagreement> first_disagreement;
  std::vector<double> trial_ms;
  bool passed() const { return agreements == trials; }
};

std::uint64_t trial_seed(std::uint64_t seed, std::size_t trial);

VerifyReport verify(std::uint64_t seed, std::size_t trials, const VerifyBounds& bounds = {},
                    const VerifyOptions& opts = {});

std::string report_to_json(const VerifyReport& r, bool timing = true);

}  // namespace pxv
