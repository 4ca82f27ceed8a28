#pragma once

// Threshold determination for matching dependencies over a statistical
// distribution.
//
//   ea    every candidate, every record
//   eps   + skip candidates dominated by one whose support fell short
//   epsc  + over an rhs-grouped distribution, stop a candidate's scan once
//           its running confidence drops below the minimum
//   ap    only the first k records of the count-sorted distribution, with k
//         the shortest prefix whose remaining mass is within the ε bound
//   api   + per candidate, stop as soon as its own lhs and joint masses make
//           the remaining mass small enough
//   aps / apsi   ap / api with support-driven dominance pruning
//
// Support and confidence comparisons are done on integer pair counts.

#include <cstdint>
#include <span>
#include <vector>

#include "mdd/lattice.hpp"
#include "mdd/model.hpp"

namespace mdd {

struct EngineOptions {
  std::uint64_t candidate_budget = CandidateLattice::kDefaultBudget;
  /// Worker count for the candidate-parallel algorithms (ea, ap, api);
  /// <= 0 means the OpenMP default.
  int threads = 0;
};

/// Running masses of one candidate over a prefix of the records.
struct CandidateAccumulator {
  std::uint64_t joint_count = 0;  // records satisfying λ_X and λ_Y
  std::uint64_t lhs_count = 0;    // records satisfying λ_X
  std::size_t records_seen = 0;
};

double support_of(const CandidateAccumulator& acc, std::uint64_t pair_total);
/// joint / lhs, or 0 when no record satisfies λ_X.
double confidence_of(const CandidateAccumulator& acc);

/// A distribution compiled for one request: lhs levels laid out per record
/// and a per-record flag for the rhs pattern.
class Evaluator {
 public:
  Evaluator(const StatDistribution& dist, const DiscoveryRequest& request);

  std::size_t records() const noexcept { return counts_.size(); }
  std::size_t arity() const noexcept { return arity_; }
  std::uint64_t pair_total() const noexcept { return pair_total_; }
  std::uint64_t count(std::size_t record) const noexcept {
    return counts_[record];
  }
  bool rhs_ok(std::size_t record) const noexcept { return rhs_ok_[record]; }

  bool lhs_ok(std::size_t record,
              std::span<const Level> candidate) const noexcept {
    const Level* row = lhs_.data() + record * arity_;
    for (std::size_t a = 0; a < arity_; ++a) {
      if (row[a] < candidate[a]) return false;
    }
    return true;
  }

  /// Folds record `record` into the accumulator.
  void step(CandidateAccumulator& acc, std::size_t record,
            std::span<const Level> candidate) const noexcept {
    if (lhs_ok(record, candidate)) {
      acc.lhs_count += counts_[record];
      if (rhs_ok_[record]) acc.joint_count += counts_[record];
    }
    ++acc.records_seen;
  }

 private:
  std::size_t arity_;
  std::uint64_t pair_total_;
  std::vector<Level> lhs_;
  std::vector<std::uint8_t> rhs_ok_;
  std::vector<std::uint64_t> counts_;
};

struct ApproxBound {
  double epsilon = 0.0;
  double min_support = 0.0;
  double min_confidence = 0.0;
  /// min(ε·η_s, ε·η_s·η_c / (1 - ε - η_c))
  double bound = 0.0;
  std::size_t prefix_k = 0;         // 1-based: records 1..k are examined
  std::uint64_t suffix_count = 0;   // pairs in records k+1..n
  std::uint64_t pair_total = 0;

  double suffix_mass() const noexcept {
    return static_cast<double>(suffix_count) / static_cast<double>(pair_total);
  }
};

/// min(ε·β, ε·β·η_c / (1 - ε - η_c)); with β = η_s this is the global bound.
double relative_bound(double epsilon, double mass, double min_confidence);

/// True when `suffix_count / pair_total <= bound`.
bool within_bound(std::uint64_t suffix_count, std::uint64_t pair_total,
                  double bound) noexcept;

/// Minimal k with B̄(k) = Σ_{i>k} s_i[P] within the global bound. Requires
/// a count-sorted distribution (Error(contract) otherwise) and
/// 0 < ε < 1 - η_c (Error(validation)).
ApproxBound compute_prefix_k(const StatDistribution& sorted, double epsilon,
                             double min_support, double min_confidence);

DiscoveryResult ea(const StatDistribution& dist, const DiscoveryRequest& request,
                   const EngineOptions& options = {});
/// Single-threaded reference for ea built directly on `satisfies`.
DiscoveryResult ea_serial(const StatDistribution& dist,
                          const DiscoveryRequest& request,
                          const EngineOptions& options = {});
DiscoveryResult eps(const StatDistribution& dist, const DiscoveryRequest& request,
                    const EngineOptions& options = {});
/// Requires the output of group_by_rhs for request.rhs_pattern.
DiscoveryResult epsc(const StatDistribution& grouped,
                     const DiscoveryRequest& request,
                     const EngineOptions& options = {});
/// The approximate algorithms require a count-sorted distribution.
DiscoveryResult ap(const StatDistribution& sorted, const DiscoveryRequest& request,
                   const EngineOptions& options = {});
DiscoveryResult api(const StatDistribution& sorted,
                    const DiscoveryRequest& request,
                    const EngineOptions& options = {});
DiscoveryResult aps(const StatDistribution& sorted,
                    const DiscoveryRequest& request,
                    const EngineOptions& options = {});
DiscoveryResult apsi(const StatDistribution& sorted,
                     const DiscoveryRequest& request,
                     const EngineOptions& options = {});

/// Validates the request, projects the distribution onto X ∪ Y, applies the
/// reordering the selected algorithm needs and runs it.
DiscoveryResult discover(const StatDistribution& dist,
                         const DiscoveryRequest& request,
                         const EngineOptions& options = {});

}  // namespace mdd
