#pragma once

// Core domain types: relations, similarity level domains, statistical
// distributions, threshold patterns, discovery requests and results.

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace mdd {

using Level = std::uint8_t;

struct AttributeId {
  std::size_t index = 0;
  std::string name;

  friend bool operator==(const AttributeId&, const AttributeId&) = default;
};

/// In-memory table of string-valued tuples over named attributes.
class Relation {
 public:
  Relation() = default;
  Relation(std::vector<std::string> attribute_names,
           std::vector<std::vector<std::string>> rows);

  const std::vector<AttributeId>& schema() const noexcept { return schema_; }
  const std::vector<std::vector<std::string>>& rows() const noexcept {
    return rows_;
  }
  std::size_t tuple_count() const noexcept { return rows_.size(); }
  std::size_t attribute_count() const noexcept { return schema_.size(); }

  /// Throws Error(schema_mismatch) when the name is not in the schema.
  const AttributeId& attribute(std::string_view name) const;

  const std::string& value(std::size_t row, std::size_t attribute) const {
    return rows_[row][attribute];
  }

 private:
  std::vector<AttributeId> schema_;
  std::vector<std::vector<std::string>> rows_;
};

/// Comma-separated, double-quote escaped, first row is the header. Values are
/// kept as raw strings.
Relation parse_csv(std::istream& in);
Relation read_csv(const std::string& path);

/// Discrete similarity levels 0..d-1.
class LevelDomain {
 public:
  static constexpr int kMaxLevels = 256;

  explicit LevelDomain(int d);

  int d() const noexcept { return d_; }
  Level top() const noexcept { return static_cast<Level>(d_ - 1); }
  bool contains(int level) const noexcept { return level >= 0 && level < d_; }
  double similarity_of(int level) const noexcept {
    return static_cast<double>(level) / static_cast<double>(d_ - 1);
  }

  friend bool operator==(const LevelDomain&, const LevelDomain&) = default;

 private:
  int d_;
};

/// One aggregated record of a statistical distribution.
struct StatTuple {
  std::span<const Level> levels;
  std::uint64_t count = 0;
};

/// Threshold per attribute, identified by attribute name. Entry order is
/// preserved (it follows the X or Y ordering of the owning request).
class ThresholdPattern {
 public:
  struct Entry {
    std::string attribute;
    int level = 0;

    friend bool operator==(const Entry&, const Entry&) = default;
  };

  ThresholdPattern() = default;
  explicit ThresholdPattern(std::vector<Entry> entries);
  ThresholdPattern(std::span<const std::string> attributes,
                   std::span<const Level> levels);

  const std::vector<Entry>& entries() const noexcept { return entries_; }
  std::size_t size() const noexcept { return entries_.size(); }
  bool empty() const noexcept { return entries_.empty(); }

  std::optional<int> level_of(std::string_view attribute) const;
  std::vector<std::string> attributes() const;

  /// Throws Error(domain) when any level falls outside the domain.
  void check_domain(const LevelDomain& domain) const;

  friend bool operator==(const ThresholdPattern&,
                         const ThresholdPattern&) = default;

 private:
  std::vector<Entry> entries_;
};

enum class RecordOrder {
  unspecified,
  lexicographic,  // as produced by a build
  grouped,        // partitioned by an rhs pattern
  by_count_desc,  // nonincreasing count, ties lexicographic
};

/// Aggregated pairwise similarity-level records. Probabilities are derived
/// on demand as count / pair_total.
class StatDistribution {
 public:
  StatDistribution() : domain_(2) {}

  /// Aggregates identical level vectors; `levels` is row-major with one row
  /// per entry of `counts`. Throws on out-of-domain levels, zero counts, or
  /// a count sum exceeding pair_total.
  static StatDistribution from_records(std::vector<AttributeId> attributes,
                                       LevelDomain domain,
                                       std::vector<Level> levels,
                                       std::vector<std::uint64_t> counts,
                                       std::uint64_t pair_total);

  const std::vector<AttributeId>& attributes() const noexcept {
    return attributes_;
  }
  const LevelDomain& domain() const noexcept { return domain_; }
  std::size_t width() const noexcept { return attributes_.size(); }
  std::size_t size() const noexcept { return counts_.size(); }
  std::uint64_t pair_total() const noexcept { return pair_total_; }

  std::span<const Level> levels(std::size_t record) const noexcept {
    return {levels_.data() + record * width(), width()};
  }
  std::uint64_t count(std::size_t record) const noexcept {
    return counts_[record];
  }
  double probability(std::size_t record) const noexcept {
    return static_cast<double>(counts_[record]) /
           static_cast<double>(pair_total_);
  }
  StatTuple tuple(std::size_t record) const noexcept {
    return {levels(record), counts_[record]};
  }
  const std::vector<std::uint64_t>& counts() const noexcept { return counts_; }
  const std::vector<Level>& flat_levels() const noexcept { return levels_; }

  /// Position of an attribute within the record layout, or schema error.
  std::size_t position_of(std::string_view attribute) const;

  std::uint64_t count_sum() const noexcept;

  const std::string& metric_spec() const noexcept { return metric_spec_; }
  std::uint64_t fingerprint() const noexcept { return fingerprint_; }
  void set_provenance(std::string metric_spec, std::uint64_t fingerprint) {
    metric_spec_ = std::move(metric_spec);
    fingerprint_ = fingerprint;
  }

  RecordOrder order() const noexcept { return order_; }
  /// Rhs pattern and pivot of the last group_by_rhs, when order() == grouped.
  const std::optional<ThresholdPattern>& grouping_pattern() const noexcept {
    return grouping_pattern_;
  }
  std::size_t grouping_pivot() const noexcept { return grouping_pivot_; }

  /// Re-aggregates onto a subset of the attributes (marginalizing the rest).
  StatDistribution project(std::span<const std::string> attributes) const;

  /// Reorders records by `permutation` (new position i holds old record
  /// permutation[i]). Grouping metadata is cleared.
  StatDistribution permuted(std::span<const std::size_t> permutation,
                            RecordOrder order) const;

  void mark_grouped(ThresholdPattern rhs, std::size_t pivot);

  /// Compares records (in order) and provenance; ordering metadata is not
  /// part of the value.
  friend bool operator==(const StatDistribution& a, const StatDistribution& b);

 private:
  std::vector<AttributeId> attributes_;
  LevelDomain domain_;
  std::vector<Level> levels_;
  std::vector<std::uint64_t> counts_;
  std::uint64_t pair_total_ = 0;
  std::string metric_spec_;
  std::uint64_t fingerprint_ = 0;
  RecordOrder order_ = RecordOrder::unspecified;
  std::optional<ThresholdPattern> grouping_pattern_;
  std::size_t grouping_pivot_ = 0;
};

/// s[A] >= λ[A] for every attribute of λ. Throws Error(schema_mismatch) if
/// λ names an attribute outside `attributes`.
bool satisfies(std::span<const AttributeId> attributes, const StatTuple& s,
               const ThresholdPattern& pattern);
bool satisfies(const StatDistribution& dist, std::size_t record,
               const ThresholdPattern& pattern);

/// Drops entries whose threshold is 0; they are satisfied by every level.
ThresholdPattern strip_zero_levels(const ThresholdPattern& pattern);

enum class Algorithm { ea, eps, epsc, ap, api, aps, apsi };

const char* to_string(Algorithm algorithm) noexcept;
/// Case-insensitive; throws Error(validation) on unknown names.
Algorithm parse_algorithm(std::string_view name);
bool is_approximate(Algorithm algorithm) noexcept;

struct DiscoveryRequest {
  std::vector<std::string> lhs;
  std::vector<std::string> rhs;
  ThresholdPattern rhs_pattern;
  double min_support = 0.0;
  double min_confidence = 0.0;
  std::optional<double> epsilon;
  Algorithm algorithm = Algorithm::ea;

  /// Throws Error(validation) on: empty or overlapping X/Y, duplicate
  /// attributes, rhs_pattern not covering exactly Y, η outside (0,1],
  /// missing or out-of-range ε for approximate algorithms.
  void validate() const;
};

/// Integer-count threshold tests shared by the discovery algorithms.
/// `count / total >= eta` and `joint / lhs >= eta` with a relative slack of
/// 1e-12 against floating-point representation of eta.
bool meets_support(std::uint64_t count, std::uint64_t total,
                   double eta) noexcept;
bool meets_confidence(std::uint64_t joint, std::uint64_t lhs,
                      double eta) noexcept;

struct Counters {
  std::uint64_t candidates_total = 0;
  std::uint64_t candidates_evaluated = 0;
  /// Candidate-record satisfaction tests performed.
  std::uint64_t record_evaluations = 0;
  std::uint64_t pruned_by_support = 0;
  std::uint64_t pruned_by_confidence = 0;

  friend bool operator==(const Counters&, const Counters&) = default;
};

struct Mode {
  bool approximate = false;
  std::size_t prefix_k = 0;  // records examined per candidate at most
  double epsilon = 0.0;

  friend bool operator==(const Mode&, const Mode&) = default;
};

struct DiscoveredMd {
  std::vector<Level> lhs_levels;  // over X, zeros included
  ThresholdPattern lhs_pattern;   // zero levels removed
  ThresholdPattern rhs_pattern;
  double support = 0.0;
  double confidence = 0.0;
  std::uint64_t joint_count = 0;
  std::uint64_t lhs_count = 0;
  std::size_t records_scanned = 0;
  Mode mode;
};

struct DiscoveryResult {
  std::vector<DiscoveredMd> mds;  // canonical: lhs_levels lexicographic
  Counters counters;
  Mode mode;

  bool infeasible() const noexcept { return mds.empty(); }
};

}  // namespace mdd
