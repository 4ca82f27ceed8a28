#pragma once

// Exact support and confidence of one candidate, computed record by record
// with `satisfies` and nothing from the discovery engine.

#include <cstdint>
#include <vector>

#include "mdd/model.hpp"

namespace mdd::testing {

struct Exact {
  std::uint64_t joint = 0;
  std::uint64_t lhs = 0;
  double support = 0.0;
  double confidence = 0.0;
};

inline Exact exact_measures(const StatDistribution& dist, const DiscoveryRequest& req,
                            const std::vector<Level>& lhs_levels) {
  const ThresholdPattern lhs(req.lhs, lhs_levels);
  Exact e;
  for (std::size_t r = 0; r < dist.size(); ++r) {
    if (!satisfies(dist, r, lhs)) continue;
    e.lhs += dist.count(r);
    if (satisfies(dist, r, req.rhs_pattern)) e.joint += dist.count(r);
  }
  e.support = static_cast<double>(e.joint) / static_cast<double>(dist.pair_total());
  e.confidence =
      e.lhs == 0 ? 0.0 : static_cast<double>(e.joint) / static_cast<double>(e.lhs);
  return e;
}

}  // namespace mdd::testing
