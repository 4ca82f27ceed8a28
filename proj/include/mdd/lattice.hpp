#pragma once

// The candidate set dom(X) of lhs threshold patterns, walked in an order
// where every pattern comes after all patterns that dominate it.
//
// Patterns are level vectors over X. λ1 dominates λ2 when λ1[A] <= λ2[A] for
// every A; the order visits layers of equal level sum, lowest first, and
// inside a layer goes lexicographically. Pruned and visited markers are bit
// vectors indexed by the mixed-radix code of the pattern (first attribute
// most significant), so the dominance DAG itself is never built.

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "mdd/model.hpp"

namespace mdd {

bool dominates(std::span<const Level> lower, std::span<const Level> upper);

/// Pattern-level form; throws Error(validation) when the attribute sets
/// differ.
bool dominates(const ThresholdPattern& lower, const ThresholdPattern& upper);

class CandidateLattice {
 public:
  static constexpr std::uint64_t kDefaultBudget = 10'000'000;

  /// Throws Error(capacity) when d^arity exceeds `budget`.
  CandidateLattice(std::size_t arity, LevelDomain domain,
                   std::uint64_t budget = kDefaultBudget);

  std::size_t arity() const noexcept { return arity_; }
  const LevelDomain& domain() const noexcept { return domain_; }
  std::uint64_t size() const noexcept { return size_; }

  std::uint64_t code_of(std::span<const Level> pattern) const;
  void decode(std::uint64_t code, std::span<Level> out) const;

  /// Next candidate that is neither visited nor pruned, marking it visited.
  /// The returned span stays valid until the following call.
  std::optional<std::span<const Level>> next();

  /// Marks every unvisited, unpruned candidate dominated by `pattern` as
  /// pruned and returns how many were newly marked.
  std::uint64_t prune_dominated_by(std::span<const Level> pattern);

  bool visited(std::span<const Level> pattern) const;
  bool pruned(std::span<const Level> pattern) const;
  std::uint64_t pruned_count() const noexcept { return pruned_count_; }

 private:
  bool advance();

  std::size_t arity_;
  LevelDomain domain_;
  std::uint64_t size_;
  std::size_t max_sum_;

  std::vector<Level> cursor_;
  std::size_t layer_ = 0;
  bool started_ = false;
  bool exhausted_ = false;

  std::vector<bool> visited_;
  std::vector<bool> pruned_;
  std::uint64_t pruned_count_ = 0;
};

/// Materialized dominance order; for small lattices and tests.
std::vector<std::vector<Level>> enumerate_in_dominance_order(
    std::size_t arity, const LevelDomain& domain,
    std::uint64_t budget = CandidateLattice::kDefaultBudget);

}  // namespace mdd
