#pragma once

// Random instances for property and differential tests.

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "mdd/model.hpp"

namespace mdd::testing {

using Rng = std::mt19937_64;

inline std::vector<std::string> attribute_names(std::size_t count,
                                                const std::string& prefix = "A") {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < count; ++i) out.push_back(prefix + std::to_string(i));
  return out;
}

/// Values are one to three words from a small vocabulary, so pairs land on
/// a spread of similarity levels and exact duplicates are common.
inline Relation random_relation(Rng& rng, std::size_t tuples,
                                std::size_t attributes) {
  static const std::vector<std::string> vocab = {
      "ann", "bob", "cat", "dan", "eve", "fox", "gus", "hal", "ivy", "jon",
      "smith", "green", "central", "rd", "no", "2", "3", "chicago"};
  std::uniform_int_distribution<std::size_t> word(0, vocab.size() - 1);
  std::uniform_int_distribution<int> len(1, 3);
  std::vector<std::vector<std::string>> rows(tuples);
  for (auto& row : rows) {
    for (std::size_t a = 0; a < attributes; ++a) {
      // Narrow vocabulary on some columns for more repeats.
      const std::size_t span = a % 2 == 0 ? 4 : vocab.size();
      std::string value;
      const int words = len(rng);
      for (int w = 0; w < words; ++w) {
        if (w) value += ' ';
        value += vocab[word(rng) % span];
      }
      row.push_back(value);
    }
  }
  return Relation(attribute_names(attributes), std::move(rows));
}

struct DistributionShape {
  std::size_t attributes = 3;
  int d = 4;
  std::size_t max_records = 200;
  bool zipf = false;
};

/// Distinct level vectors with random counts; pair_total equals the count
/// sum, so the records form a complete distribution.
inline StatDistribution random_distribution(Rng& rng, const DistributionShape& shape) {
  const auto m = shape.attributes;
  double space = std::pow(static_cast<double>(shape.d), static_cast<double>(m));
  const std::size_t cap = static_cast<std::size_t>(
      std::min<double>(space, static_cast<double>(shape.max_records)));
  std::uniform_int_distribution<std::size_t> size_pick(1, cap);
  const std::size_t n = size_pick(rng);

  std::uniform_int_distribution<int> level(0, shape.d - 1);
  std::set<std::vector<Level>> seen;
  std::vector<Level> flat;
  while (seen.size() < n) {
    std::vector<Level> v(m);
    for (auto& l : v) l = static_cast<Level>(level(rng));
    if (seen.insert(v).second) flat.insert(flat.end(), v.begin(), v.end());
  }
  std::vector<std::uint64_t> counts(n);
  if (shape.zipf) {
    std::vector<std::size_t> rank(n);
    std::iota(rank.begin(), rank.end(), 1);
    std::shuffle(rank.begin(), rank.end(), rng);
    for (std::size_t i = 0; i < n; ++i) {
      counts[i] = std::max<std::uint64_t>(
          1, static_cast<std::uint64_t>(100000.0 / static_cast<double>(rank[i])));
    }
  } else {
    std::uniform_int_distribution<std::uint64_t> count(1, 50);
    for (auto& c : counts) c = count(rng);
  }
  const auto total = std::accumulate(counts.begin(), counts.end(), std::uint64_t{0});
  std::vector<AttributeId> ids;
  const auto names = attribute_names(m);
  for (std::size_t i = 0; i < m; ++i) ids.push_back({i, names[i]});
  return StatDistribution::from_records(std::move(ids), LevelDomain(shape.d),
                                        std::move(flat), std::move(counts), total);
}

/// Request over a distribution from random_distribution: last `rhs`
/// attributes form Y, the rest X.
inline DiscoveryRequest random_request(Rng& rng, const StatDistribution& dist,
                                       std::size_t rhs_count, Algorithm algorithm) {
  DiscoveryRequest req;
  const std::size_t m = dist.width();
  for (std::size_t i = 0; i < m - rhs_count; ++i) req.lhs.push_back(dist.attributes()[i].name);
  std::uniform_int_distribution<int> level(0, dist.domain().d() - 1);
  std::vector<ThresholdPattern::Entry> rhs;
  for (std::size_t i = m - rhs_count; i < m; ++i) {
    req.rhs.push_back(dist.attributes()[i].name);
    rhs.push_back({dist.attributes()[i].name, level(rng)});
  }
  req.rhs_pattern = ThresholdPattern(std::move(rhs));
  std::uniform_real_distribution<double> support(0.005, 0.3);
  std::uniform_real_distribution<double> confidence(0.05, 0.95);
  req.min_support = support(rng);
  req.min_confidence = confidence(rng);
  req.algorithm = algorithm;
  if (is_approximate(algorithm)) {
    std::uniform_real_distribution<double> eps(0.01, 0.99);
    req.epsilon = eps(rng) * (1.0 - req.min_confidence);
  }
  return req;
}

}  // namespace mdd::testing
