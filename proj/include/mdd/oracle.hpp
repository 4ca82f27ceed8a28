#pragma once

// Brute-force reference: support and confidence recomputed straight from the
// relation's tuple pairs. Uses only the simkit primitives, never the
// distribution or discovery code.

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "mdd/model.hpp"
#include "mdd/simkit.hpp"

namespace mdd::oracle {

inline constexpr std::size_t kMaxTuples = 200;
inline constexpr std::uint64_t kMaxCandidates = 10'000;

struct Measures {
  std::uint64_t joint_pairs = 0;
  std::uint64_t lhs_pairs = 0;
  std::uint64_t pair_total = 0;
  double support = 0.0;
  double confidence = 0.0;
};

/// Throws Error(insufficient_data) for N < 2 and Error(capacity) for
/// N > kMaxTuples.
Measures measures(const Relation& relation, const ThresholdPattern& lhs,
                  const ThresholdPattern& rhs, const MetricMap& metrics,
                  const LevelDomain& domain);

struct Found {
  std::vector<Level> lhs_levels;  // over the lhs attributes, in order
  Measures measures;
};

/// Every pattern in dom(X), evaluated with `measures`; returns those with
/// support >= η_s and confidence >= η_c, lexicographic by level vector.
/// Throws Error(capacity) for d^|X| > kMaxCandidates.
std::vector<Found> discover(const Relation& relation,
                            std::span<const std::string> lhs,
                            const ThresholdPattern& rhs, double min_support,
                            double min_confidence, const MetricMap& metrics,
                            const LevelDomain& domain);

}  // namespace mdd::oracle
