#include "mdd/oracle.hpp"

#include "mdd/error.hpp"
#include "mdd/simkit.hpp"

namespace mdd::oracle {

namespace {

void check_caps(const Relation& relation) {
  if (relation.tuple_count() < 2) {
    fail(ErrorKind::insufficient_data, "oracle needs at least 2 tuples");
  }
  if (relation.tuple_count() > kMaxTuples) {
    fail(ErrorKind::capacity, "oracle is capped at " +
                                  std::to_string(kMaxTuples) + " tuples, got " +
                                  std::to_string(relation.tuple_count()));
  }
}

const simkit::MetricKind& metric_for(const MetricMap& metrics,
                                     const std::string& attribute) {
  auto it = metrics.find(attribute);
  if (it == metrics.end()) {
    fail(ErrorKind::validation, "no metric assigned to '" + attribute + "'");
  }
  return it->second;
}

// Level of every tuple pair on one attribute, pairs in (i<j) row-major order.
std::vector<Level> pair_levels(const Relation& relation,
                               const std::string& attribute,
                               const simkit::MetricKind& metric,
                               const LevelDomain& domain) {
  const auto column = relation.attribute(attribute).index;
  std::vector<Level> out;
  const std::size_t n = relation.tuple_count();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      out.push_back(simkit::discretize(
          simkit::similarity(relation.value(i, column),
                             relation.value(j, column), metric),
          domain));
    }
  }
  return out;
}

Measures tally(const std::vector<std::vector<Level>>& lhs_levels,
               std::span<const int> lhs_thresholds,
               const std::vector<bool>& rhs_ok) {
  Measures m;
  m.pair_total = rhs_ok.size();
  for (std::size_t p = 0; p < rhs_ok.size(); ++p) {
    bool lhs_ok = true;
    for (std::size_t a = 0; a < lhs_levels.size(); ++a) {
      if (lhs_levels[a][p] < lhs_thresholds[a]) {
        lhs_ok = false;
        break;
      }
    }
    if (!lhs_ok) continue;
    ++m.lhs_pairs;
    if (rhs_ok[p]) ++m.joint_pairs;
  }
  m.support = static_cast<double>(m.joint_pairs) /
              static_cast<double>(m.pair_total);
  m.confidence = m.lhs_pairs == 0 ? 0.0
                                  : static_cast<double>(m.joint_pairs) /
                                        static_cast<double>(m.lhs_pairs);
  return m;
}

std::vector<bool> rhs_flags(const Relation& relation,
                            const ThresholdPattern& rhs,
                            const MetricMap& metrics,
                            const LevelDomain& domain) {
  const std::size_t n = relation.tuple_count();
  std::vector<bool> ok(n * (n - 1) / 2, true);
  for (const auto& e : rhs.entries()) {
    const auto levels =
        pair_levels(relation, e.attribute, metric_for(metrics, e.attribute), domain);
    for (std::size_t p = 0; p < ok.size(); ++p) {
      if (levels[p] < e.level) ok[p] = false;
    }
  }
  return ok;
}

}  // namespace

Measures measures(const Relation& relation, const ThresholdPattern& lhs,
                  const ThresholdPattern& rhs, const MetricMap& metrics,
                  const LevelDomain& domain) {
  check_caps(relation);
  lhs.check_domain(domain);
  rhs.check_domain(domain);
  std::vector<std::vector<Level>> lhs_levels;
  std::vector<int> thresholds;
  for (const auto& e : lhs.entries()) {
    lhs_levels.push_back(pair_levels(relation, e.attribute,
                                     metric_for(metrics, e.attribute), domain));
    thresholds.push_back(e.level);
  }
  return tally(lhs_levels, thresholds, rhs_flags(relation, rhs, metrics, domain));
}

std::vector<Found> discover(const Relation& relation,
                            std::span<const std::string> lhs,
                            const ThresholdPattern& rhs, double min_support,
                            double min_confidence, const MetricMap& metrics,
                            const LevelDomain& domain) {
  check_caps(relation);
  rhs.check_domain(domain);
  if (lhs.empty()) fail(ErrorKind::validation, "empty lhs");
  std::uint64_t candidates = 1;
  for (std::size_t a = 0; a < lhs.size(); ++a) {
    candidates *= static_cast<std::uint64_t>(domain.d());
    if (candidates > kMaxCandidates) {
      fail(ErrorKind::capacity, "oracle is capped at " +
                                    std::to_string(kMaxCandidates) +
                                    " candidate patterns");
    }
  }

  std::vector<std::vector<Level>> lhs_levels;
  for (const auto& a : lhs) {
    lhs_levels.push_back(
        pair_levels(relation, a, metric_for(metrics, a), domain));
  }
  const auto rhs_ok = rhs_flags(relation, rhs, metrics, domain);

  // Odometer over dom(X); last attribute varies fastest, which is already
  // lexicographic order.
  std::vector<Found> out;
  std::vector<int> pattern(lhs.size(), 0);
  for (std::uint64_t c = 0; c < candidates; ++c) {
    const Measures m = tally(lhs_levels, pattern, rhs_ok);
    if (m.support >= min_support && m.lhs_pairs > 0 &&
        m.confidence >= min_confidence) {
      out.push_back({std::vector<Level>(pattern.begin(), pattern.end()), m});
    }
    for (std::size_t a = lhs.size(); a-- > 0;) {
      if (++pattern[a] < domain.d()) break;
      pattern[a] = 0;
    }
  }
  return out;
}

}  // namespace mdd::oracle
