#include "mdd/model.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numeric>
#include <unordered_map>
#include <unordered_set>

#include "mdd/error.hpp"

namespace mdd {

const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::validation: return "validation";
    case ErrorKind::schema_mismatch: return "schema-mismatch";
    case ErrorKind::insufficient_data: return "insufficient-data";
    case ErrorKind::domain: return "domain";
    case ErrorKind::capacity: return "capacity";
    case ErrorKind::io: return "io";
    case ErrorKind::format: return "format";
    case ErrorKind::contract: return "contract";
  }
  return "unknown";
}

// ---------------------------------------------------------------- Relation

Relation::Relation(std::vector<std::string> attribute_names,
                   std::vector<std::vector<std::string>> rows)
    : rows_(std::move(rows)) {
  std::unordered_set<std::string> seen;
  schema_.reserve(attribute_names.size());
  for (std::size_t i = 0; i < attribute_names.size(); ++i) {
    if (attribute_names[i].empty()) {
      fail(ErrorKind::validation,
           "attribute " + std::to_string(i) + " has an empty name");
    }
    if (!seen.insert(attribute_names[i]).second) {
      fail(ErrorKind::validation,
           "duplicate attribute name '" + attribute_names[i] + "'");
    }
    schema_.push_back({i, std::move(attribute_names[i])});
  }
  for (std::size_t r = 0; r < rows_.size(); ++r) {
    if (rows_[r].size() != schema_.size()) {
      fail(ErrorKind::format, "row " + std::to_string(r + 1) + " has " +
                                  std::to_string(rows_[r].size()) +
                                  " values, expected " +
                                  std::to_string(schema_.size()));
    }
  }
}

const AttributeId& Relation::attribute(std::string_view name) const {
  for (const auto& a : schema_) {
    if (a.name == name) return a;
  }
  fail(ErrorKind::schema_mismatch,
       "unknown attribute '" + std::string(name) + "'");
}

// ------------------------------------------------------------- LevelDomain

LevelDomain::LevelDomain(int d) : d_(d) {
  if (d < 2 || d > kMaxLevels) {
    fail(ErrorKind::validation, "level count d must be in [2, " +
                                    std::to_string(kMaxLevels) + "], got " +
                                    std::to_string(d));
  }
}

// -------------------------------------------------------- ThresholdPattern

ThresholdPattern::ThresholdPattern(std::vector<Entry> entries)
    : entries_(std::move(entries)) {
  std::unordered_set<std::string> seen;
  for (const auto& e : entries_) {
    if (!seen.insert(e.attribute).second) {
      fail(ErrorKind::validation,
           "attribute '" + e.attribute + "' appears twice in a pattern");
    }
  }
}

ThresholdPattern::ThresholdPattern(std::span<const std::string> attributes,
                                   std::span<const Level> levels) {
  if (attributes.size() != levels.size()) {
    fail(ErrorKind::validation, "pattern arity mismatch");
  }
  entries_.reserve(attributes.size());
  for (std::size_t i = 0; i < attributes.size(); ++i) {
    entries_.push_back({attributes[i], levels[i]});
  }
}

std::optional<int> ThresholdPattern::level_of(std::string_view attribute) const {
  for (const auto& e : entries_) {
    if (e.attribute == attribute) return e.level;
  }
  return std::nullopt;
}

std::vector<std::string> ThresholdPattern::attributes() const {
  std::vector<std::string> out;
  out.reserve(entries_.size());
  for (const auto& e : entries_) out.push_back(e.attribute);
  return out;
}

void ThresholdPattern::check_domain(const LevelDomain& domain) const {
  for (const auto& e : entries_) {
    if (!domain.contains(e.level)) {
      fail(ErrorKind::domain, "threshold " + std::to_string(e.level) +
                                  " on '" + e.attribute +
                                  "' outside 0.." +
                                  std::to_string(domain.d() - 1));
    }
  }
}

// -------------------------------------------------------- StatDistribution

namespace {

struct LevelsHash {
  std::size_t operator()(std::string_view key) const noexcept {
    return std::hash<std::string_view>{}(key);
  }
};

}  // namespace

StatDistribution StatDistribution::from_records(
    std::vector<AttributeId> attributes, LevelDomain domain,
    std::vector<Level> levels, std::vector<std::uint64_t> counts,
    std::uint64_t pair_total) {
  const std::size_t m = attributes.size();
  if (m == 0) fail(ErrorKind::validation, "distribution without attributes");
  if (levels.size() != m * counts.size()) {
    fail(ErrorKind::validation, "level matrix does not match record count");
  }
  for (Level l : levels) {
    if (!domain.contains(l)) {
      fail(ErrorKind::domain, "record level " + std::to_string(l) +
                                  " outside 0.." +
                                  std::to_string(domain.d() - 1));
    }
  }

  StatDistribution out;
  out.attributes_ = std::move(attributes);
  out.domain_ = domain;
  out.pair_total_ = pair_total;

  // Aggregate duplicates, keeping first-occurrence order.
  std::unordered_map<std::string, std::size_t> index;
  std::uint64_t sum = 0;
  for (std::size_t r = 0; r < counts.size(); ++r) {
    if (counts[r] == 0) fail(ErrorKind::validation, "record with zero count");
    std::string key(reinterpret_cast<const char*>(levels.data() + r * m), m);
    auto [it, inserted] = index.emplace(std::move(key), out.counts_.size());
    if (inserted) {
      out.levels_.insert(out.levels_.end(), levels.begin() + r * m,
                         levels.begin() + (r + 1) * m);
      out.counts_.push_back(counts[r]);
    } else {
      out.counts_[it->second] += counts[r];
    }
    sum += counts[r];
  }
  if (sum > pair_total) {
    fail(ErrorKind::validation, "record counts sum to " + std::to_string(sum) +
                                    " > pair_total " +
                                    std::to_string(pair_total));
  }
  return out;
}

std::size_t StatDistribution::position_of(std::string_view attribute) const {
  for (std::size_t i = 0; i < attributes_.size(); ++i) {
    if (attributes_[i].name == attribute) return i;
  }
  fail(ErrorKind::schema_mismatch, "attribute '" + std::string(attribute) +
                                       "' is not part of the distribution");
}

std::uint64_t StatDistribution::count_sum() const noexcept {
  return std::accumulate(counts_.begin(), counts_.end(), std::uint64_t{0});
}

StatDistribution StatDistribution::project(
    std::span<const std::string> attributes) const {
  std::vector<std::size_t> positions;
  std::vector<AttributeId> ids;
  for (const auto& name : attributes) {
    positions.push_back(position_of(name));
    ids.push_back(attributes_[positions.back()]);
  }
  const std::size_t m = positions.size();
  std::vector<Level> levels;
  levels.reserve(size() * m);
  for (std::size_t r = 0; r < size(); ++r) {
    auto row = this->levels(r);
    for (std::size_t p : positions) levels.push_back(row[p]);
  }
  auto out = from_records(std::move(ids), domain_, std::move(levels), counts_,
                          pair_total_);
  out.metric_spec_ = metric_spec_;
  out.fingerprint_ = fingerprint_;
  return out;
}

StatDistribution StatDistribution::permuted(
    std::span<const std::size_t> permutation, RecordOrder order) const {
  if (permutation.size() != size()) {
    fail(ErrorKind::validation, "permutation length mismatch");
  }
  StatDistribution out;
  out.attributes_ = attributes_;
  out.domain_ = domain_;
  out.pair_total_ = pair_total_;
  out.metric_spec_ = metric_spec_;
  out.fingerprint_ = fingerprint_;
  out.order_ = order;
  out.levels_.reserve(levels_.size());
  out.counts_.reserve(counts_.size());
  for (std::size_t src : permutation) {
    auto row = levels(src);
    out.levels_.insert(out.levels_.end(), row.begin(), row.end());
    out.counts_.push_back(counts_[src]);
  }
  return out;
}

void StatDistribution::mark_grouped(ThresholdPattern rhs, std::size_t pivot) {
  order_ = RecordOrder::grouped;
  grouping_pattern_ = std::move(rhs);
  grouping_pivot_ = pivot;
}

bool operator==(const StatDistribution& a, const StatDistribution& b) {
  return a.attributes_ == b.attributes_ && a.domain_ == b.domain_ &&
         a.levels_ == b.levels_ && a.counts_ == b.counts_ &&
         a.pair_total_ == b.pair_total_ && a.metric_spec_ == b.metric_spec_ &&
         a.fingerprint_ == b.fingerprint_;
}

// ------------------------------------------------------------ satisfaction

bool satisfies(std::span<const AttributeId> attributes, const StatTuple& s,
               const ThresholdPattern& pattern) {
  for (const auto& e : pattern.entries()) {
    auto it = std::find_if(attributes.begin(), attributes.end(),
                           [&](const AttributeId& a) {
                             return a.name == e.attribute;
                           });
    if (it == attributes.end()) {
      fail(ErrorKind::schema_mismatch,
           "pattern attribute '" + e.attribute + "' not in attribute set");
    }
    const auto pos = static_cast<std::size_t>(it - attributes.begin());
    if (static_cast<int>(s.levels[pos]) < e.level) return false;
  }
  return true;
}

bool satisfies(const StatDistribution& dist, std::size_t record,
               const ThresholdPattern& pattern) {
  return satisfies(dist.attributes(), dist.tuple(record), pattern);
}

ThresholdPattern strip_zero_levels(const ThresholdPattern& pattern) {
  std::vector<ThresholdPattern::Entry> kept;
  for (const auto& e : pattern.entries()) {
    if (e.level > 0) kept.push_back(e);
  }
  return ThresholdPattern(std::move(kept));
}

// --------------------------------------------------------------- requests

const char* to_string(Algorithm algorithm) noexcept {
  switch (algorithm) {
    case Algorithm::ea: return "ea";
    case Algorithm::eps: return "eps";
    case Algorithm::epsc: return "epsc";
    case Algorithm::ap: return "ap";
    case Algorithm::api: return "api";
    case Algorithm::aps: return "aps";
    case Algorithm::apsi: return "apsi";
  }
  return "?";
}

Algorithm parse_algorithm(std::string_view name) {
  std::string lower(name);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  for (auto a : {Algorithm::ea, Algorithm::eps, Algorithm::epsc, Algorithm::ap,
                 Algorithm::api, Algorithm::aps, Algorithm::apsi}) {
    if (lower == to_string(a)) return a;
  }
  fail(ErrorKind::validation, "unknown algorithm '" + std::string(name) +
                                  "' (expected ea|eps|epsc|ap|api|aps|apsi)");
}

bool is_approximate(Algorithm algorithm) noexcept {
  switch (algorithm) {
    case Algorithm::ap:
    case Algorithm::api:
    case Algorithm::aps:
    case Algorithm::apsi:
      return true;
    default:
      return false;
  }
}

void DiscoveryRequest::validate() const {
  if (lhs.empty()) fail(ErrorKind::validation, "lhs attribute set X is empty");
  if (rhs.empty()) fail(ErrorKind::validation, "rhs attribute set Y is empty");
  std::unordered_set<std::string> seen;
  for (const auto& a : lhs) {
    if (!seen.insert(a).second) {
      fail(ErrorKind::validation, "duplicate lhs attribute '" + a + "'");
    }
  }
  for (const auto& a : rhs) {
    if (!seen.insert(a).second) {
      fail(ErrorKind::validation, "attribute '" + a +
                                      "' appears in both X and Y or twice in Y");
    }
  }
  if (rhs_pattern.size() != rhs.size()) {
    fail(ErrorKind::validation, "rhs thresholds must cover exactly Y");
  }
  for (const auto& a : rhs) {
    if (!rhs_pattern.level_of(a)) {
      fail(ErrorKind::validation, "no rhs threshold for '" + a + "'");
    }
  }
  auto in_unit = [](double v) { return v > 0.0 && v <= 1.0; };
  if (!in_unit(min_support)) {
    fail(ErrorKind::validation, "min support must be in (0, 1]");
  }
  if (!in_unit(min_confidence)) {
    fail(ErrorKind::validation, "min confidence must be in (0, 1]");
  }
  if (is_approximate(algorithm)) {
    if (!epsilon) {
      fail(ErrorKind::validation, std::string("algorithm ") +
                                      to_string(algorithm) +
                                      " requires an epsilon");
    }
  }
  if (epsilon && !(*epsilon > 0.0 && *epsilon < 1.0 - min_confidence)) {
    fail(ErrorKind::validation,
         "epsilon must satisfy 0 < epsilon < 1 - min_confidence");
  }
}

namespace {
constexpr double kSlack = 1e-12;
}

bool meets_support(std::uint64_t count, std::uint64_t total,
                   double eta) noexcept {
  if (total == 0) return false;
  return static_cast<double>(count) >=
         eta * static_cast<double>(total) * (1.0 - kSlack);
}

bool meets_confidence(std::uint64_t joint, std::uint64_t lhs,
                      double eta) noexcept {
  if (lhs == 0) return false;
  return static_cast<double>(joint) >=
         eta * static_cast<double>(lhs) * (1.0 - kSlack);
}

}  // namespace mdd
