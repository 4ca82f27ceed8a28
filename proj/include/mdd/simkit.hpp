#pragma once

// String similarity metrics in [0,1] and their discretization into levels.
//
// Strings are decoded as UTF-8 into scalar values and lowercased (ASCII
// letters only). Cosine metrics compare token multisets; when either side
// has no tokens the result is 1 if the lowercased strings are equal and 0
// otherwise. Edit similarity is 1 - levenshtein / max length, with 1 for two
// empty strings.

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "mdd/model.hpp"

namespace mdd::simkit {

struct MetricKind {
  enum class Type { cosine_word, cosine_qgram, edit };

  Type type = Type::cosine_word;
  int q = 0;  // only for cosine_qgram; >= 1

  static MetricKind cosine_word() { return {Type::cosine_word, 0}; }
  static MetricKind cosine_qgram(int q);
  static MetricKind edit() { return {Type::edit, 0}; }

  friend bool operator==(const MetricKind&, const MetricKind&) = default;
};

/// Parses `cosine-word`, `cosine-qgram:<q>` or `edit`. A bare `cosine-qgram`
/// uses `default_q`.
MetricKind parse_metric(std::string_view text, int default_q = 3);
std::string to_string(const MetricKind& metric);

std::u32string decode_lower(std::string_view utf8);

double similarity(std::string_view a, std::string_view b,
                  const MetricKind& metric);

/// round_half_up(sim * (d-1)). Throws Error(domain) when sim is outside
/// [0,1] or NaN.
Level discretize(double sim, const LevelDomain& domain);

std::size_t levenshtein(std::u32string_view a, std::u32string_view b);

/// Precomputed per-value representation, so the pairwise pass tokenizes
/// every value once.
class Profile {
 public:
  Profile() = default;
  Profile(std::string_view value, const MetricKind& metric);

  friend double similarity(const Profile& a, const Profile& b,
                           const MetricKind& metric);

 private:
  std::u32string text_;
  // (token, multiplicity), sorted by token.
  std::vector<std::pair<std::u32string, std::uint32_t>> bag_;
  std::uint64_t sum_squares_ = 0;
};

double similarity(const Profile& a, const Profile& b, const MetricKind& metric);

}  // namespace mdd::simkit

namespace mdd {

/// Metric per attribute name.
using MetricMap = std::map<std::string, simkit::MetricKind, std::less<>>;

}  // namespace mdd
