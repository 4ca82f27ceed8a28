#pragma once

// Building the statistical distribution from a relation, the two record
// reorderings used by the discovery algorithms, and the cache file format.

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>

#include "mdd/model.hpp"
#include "mdd/simkit.hpp"

namespace mdd {

MetricMap uniform_metrics(std::span<const std::string> attributes,
                          const simkit::MetricKind& metric);

/// `cosine-word` when all attributes share a metric, otherwise the metrics
/// in attribute order joined by '|'.
std::string metric_spec(std::span<const std::string> attributes,
                        const MetricMap& metrics);

/// FNV-1a over the relation contents and the build parameters.
std::uint64_t source_fingerprint(const Relation& relation,
                                 std::span<const std::string> attributes,
                                 const MetricMap& metrics,
                                 const LevelDomain& domain);

/// Full pairwise pass over all N(N-1)/2 unordered tuple pairs, aggregating
/// identical discretized similarity vectors. Records come out in
/// lexicographic level order regardless of the thread count.
///
/// `threads` <= 0 uses the OpenMP default. Throws Error(insufficient_data)
/// for N < 2, Error(schema_mismatch) for unknown attributes,
/// Error(capacity) when d^|attrs| does not fit a 64-bit record key.
StatDistribution build_distribution(const Relation& relation,
                                    std::span<const std::string> attributes,
                                    const MetricMap& metrics,
                                    const LevelDomain& domain,
                                    int threads = 0);

/// Single-threaded reference for build_distribution; same output.
StatDistribution build_distribution_serial(
    const Relation& relation, std::span<const std::string> attributes,
    const MetricMap& metrics, const LevelDomain& domain);

struct GroupedDistribution {
  StatDistribution dist;
  std::size_t pivot = 0;  // records [0, pivot) satisfy the rhs pattern
};

/// Stable two-bucket partition: records satisfying `rhs` first.
GroupedDistribution group_by_rhs(const StatDistribution& dist,
                                 const ThresholdPattern& rhs);

/// Nonincreasing count; ties broken by lexicographic level vector.
StatDistribution sort_by_probability_desc(const StatDistribution& dist);

bool is_sorted_by_probability_desc(const StatDistribution& dist);

void write_distribution(const StatDistribution& dist, std::ostream& out);
StatDistribution read_distribution(std::istream& in);

void save_distribution(const StatDistribution& dist, const std::string& path);
StatDistribution load_distribution(const std::string& path);

}  // namespace mdd
