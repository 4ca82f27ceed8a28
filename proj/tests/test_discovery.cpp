#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "mdd/discovery.hpp"
#include "mdd/distribution.hpp"
#include "mdd/error.hpp"
#include "support/generators.hpp"
#include "support/reference.hpp"

using namespace mdd;

namespace {

StatDistribution street_city() {
  const auto rel = read_csv(MDD_FIXTURES "/contacts.csv");
  const std::vector<std::string> attrs = {"Street", "City"};
  return build_distribution(rel, attrs,
                            uniform_metrics(attrs, simkit::MetricKind::cosine_word()),
                            LevelDomain(10));
}

DiscoveryRequest street_to_city(double eta_s, double eta_c, Algorithm algorithm) {
  DiscoveryRequest req;
  req.lhs = {"Street"};
  req.rhs = {"City"};
  req.rhs_pattern = ThresholdPattern({{"City", 6}});
  req.min_support = eta_s;
  req.min_confidence = eta_c;
  req.algorithm = algorithm;
  if (is_approximate(algorithm)) req.epsilon = 0.1;
  return req;
}

std::vector<std::vector<Level>> lhs_of(const DiscoveryResult& r) {
  std::vector<std::vector<Level>> out;
  for (const auto& md : r.mds) out.push_back(md.lhs_levels);
  return out;
}

StatDistribution three_records() {
  std::vector<AttributeId> ids = {{0, "X"}, {1, "Y"}};
  return StatDistribution::from_records(ids, LevelDomain(3), {2, 2, 2, 0, 2, 1},
                                        {5, 3, 2}, 10);
}

}  // namespace

TEST_CASE("contacts: Street to City") {
  const auto dist = street_city();
  const auto result = discover(dist, street_to_city(0.2, 0.5, Algorithm::ea));
  CHECK(lhs_of(result) == std::vector<std::vector<Level>>{{6}, {7}, {8}});
  REQUIRE(result.mds.size() == 3);
  const auto& md = result.mds[1];
  CHECK(md.joint_count == 4);
  CHECK(md.lhs_count == 8);
  CHECK(md.support == doctest::Approx(4.0 / 15.0));
  CHECK(md.confidence == doctest::Approx(0.5));
  CHECK(md.lhs_pattern == ThresholdPattern({{"Street", 7}}));
  CHECK(result.counters.candidates_total == 10);

  const auto strict = discover(dist, street_to_city(0.2, 0.6, Algorithm::ea));
  CHECK(lhs_of(strict) == std::vector<std::vector<Level>>{{8}});
  CHECK(strict.mds[0].confidence == doctest::Approx(2.0 / 3.0));

  for (auto alg : {Algorithm::eps, Algorithm::epsc}) {
    const auto r = discover(dist, street_to_city(0.2, 0.5, alg));
    CHECK(lhs_of(r) == lhs_of(result));
  }
}

TEST_CASE("zero levels are dropped from the reported lhs pattern") {
  const auto result = discover(street_city(), street_to_city(0.3, 0.3, Algorithm::ea));
  REQUIRE_FALSE(result.mds.empty());
  CHECK(result.mds[0].lhs_levels == std::vector<Level>{0});
  CHECK(result.mds[0].lhs_pattern.empty());
}

TEST_CASE("infeasible requests return an empty result") {
  const auto result = discover(street_city(), street_to_city(0.5, 0.9, Algorithm::eps));
  CHECK(result.infeasible());
  CHECK(result.counters.candidates_total == 10);
}

TEST_CASE("epsc stops a scan at the first confidence drop") {
  const auto dist = three_records();
  DiscoveryRequest req;
  req.lhs = {"X"};
  req.rhs = {"Y"};
  req.rhs_pattern = ThresholdPattern({{"Y", 2}});
  req.min_support = 0.1;
  req.min_confidence = 0.9;
  req.algorithm = Algorithm::epsc;
  const auto g = group_by_rhs(dist, req.rhs_pattern);
  CHECK(g.pivot == 1);
  const auto r = epsc(g.dist, req);
  CHECK(r.infeasible());
  // Each of the three candidates reads records 1 and 2, then stops.
  CHECK(r.counters.record_evaluations == 6);
  CHECK(r.counters.pruned_by_confidence == 3);
  CHECK(r.counters.pruned_by_support == 0);

  req.min_confidence = 0.5;
  const auto ok = epsc(group_by_rhs(dist, req.rhs_pattern).dist, req);
  REQUIRE(ok.mds.size() == 3);
  CHECK(ok.mds[0].confidence == doctest::Approx(0.5));
  CHECK(ok.mds[0].records_scanned == 3);
}

TEST_CASE("epsc refuses an ungrouped distribution") {
  const auto dist = three_records();
  DiscoveryRequest req;
  req.lhs = {"X"};
  req.rhs = {"Y"};
  req.rhs_pattern = ThresholdPattern({{"Y", 2}});
  req.min_support = 0.1;
  req.min_confidence = 0.5;
  try {
    (void)epsc(dist, req);
    FAIL("expected contract error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::contract);
  }
  const auto other = group_by_rhs(dist, ThresholdPattern({{"Y", 1}}));
  CHECK_THROWS_AS(epsc(other.dist, req), Error);
}

TEST_CASE("eps prunes candidates dominated by a support failure") {
  const auto dist = street_city();
  const auto ea_r = discover(dist, street_to_city(0.3, 0.1, Algorithm::ea));
  const auto eps_r = discover(dist, street_to_city(0.3, 0.1, Algorithm::eps));
  CHECK(lhs_of(ea_r) == lhs_of(eps_r));
  // Street >= 7 has support 4/15 < 0.3, which rules out 8 and 9.
  CHECK(eps_r.counters.pruned_by_support == 2);
  CHECK(eps_r.counters.candidates_evaluated == 8);
  CHECK(eps_r.counters.record_evaluations < ea_r.counters.record_evaluations);
}

TEST_CASE("prefix k for the global bound") {
  std::vector<AttributeId> ids = {{0, "A"}};
  std::vector<Level> levels;
  std::vector<std::uint64_t> counts;
  for (int i = 0; i < 100; ++i) {
    levels.push_back(static_cast<Level>(i));
    counts.push_back(1);
  }
  const auto uniform = StatDistribution::from_records(ids, LevelDomain(100), levels,
                                                      counts, 100);
  const auto b = compute_prefix_k(uniform, 0.8, 0.01, 0.15);
  CHECK(b.bound == doctest::Approx(0.008));
  CHECK(b.prefix_k == 100);
  CHECK(b.suffix_count == 0);

  const auto skewed = StatDistribution::from_records(
      ids, LevelDomain(10), {0, 1, 2, 3, 4, 5}, {50, 30, 10, 5, 3, 2}, 100);
  const auto s = compute_prefix_k(skewed, 0.5, 0.2, 0.3);
  CHECK(s.bound == doctest::Approx(0.1));
  CHECK(s.prefix_k == 3);
  CHECK(s.suffix_count == 10);

  const auto unsorted = StatDistribution::from_records(
      ids, LevelDomain(10), {0, 1}, {1, 2}, 3);
  try {
    (void)compute_prefix_k(unsorted, 0.5, 0.2, 0.3);
    FAIL("expected contract error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::contract);
  }
  CHECK_THROWS_AS(compute_prefix_k(skewed, 0.7, 0.2, 0.3), Error);
}

TEST_CASE("approximate results report their mode") {
  const auto r = discover(street_city(), street_to_city(0.2, 0.5, Algorithm::ap));
  CHECK(r.mode.approximate);
  CHECK(r.mode.epsilon == 0.1);
  CHECK(r.mode.prefix_k >= 1);
  for (const auto& md : r.mds) CHECK(md.mode == r.mode);
  const auto exact = discover(street_city(), street_to_city(0.2, 0.5, Algorithm::ea));
  CHECK_FALSE(exact.mode.approximate);
}

TEST_CASE("parallel sweep matches the serial reference") {
  testing::Rng rng(99);
  for (int round = 0; round < 60; ++round) {
    const auto dist = testing::random_distribution(rng, {3, 2 + round % 4, 300, false});
    const auto req = testing::random_request(rng, dist, 1, Algorithm::ea);
    const auto reference = ea_serial(dist, req);
    for (int threads : {1, 2, 8}) {
      const auto par = ea(dist, req, {CandidateLattice::kDefaultBudget, threads});
      CHECK(lhs_of(par) == lhs_of(reference));
      CHECK(par.counters == reference.counters);
      for (std::size_t i = 0; i < par.mds.size() && i < reference.mds.size(); ++i) {
        CHECK(par.mds[i].joint_count == reference.mds[i].joint_count);
        CHECK(par.mds[i].lhs_count == reference.mds[i].lhs_count);
      }
    }
  }
}

TEST_CASE("approximate algorithms are deterministic across thread counts") {
  testing::Rng rng(123);
  for (int round = 0; round < 30; ++round) {
    const auto dist = testing::random_distribution(rng, {3, 4, 300, true});
    for (auto alg : {Algorithm::ap, Algorithm::api}) {
      const auto req = testing::random_request(rng, dist, 1, alg);
      const auto one = discover(dist, req, {CandidateLattice::kDefaultBudget, 1});
      const auto many = discover(dist, req, {CandidateLattice::kDefaultBudget, 8});
      CHECK(lhs_of(one) == lhs_of(many));
      CHECK(one.counters == many.counters);
    }
  }
}

TEST_CASE("discover validates against the distribution") {
  auto req = street_to_city(0.2, 0.5, Algorithm::ea);
  req.lhs = {"Name"};
  try {
    (void)discover(street_city(), req);
    FAIL("expected schema error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::schema_mismatch);
  }
  req = street_to_city(0.2, 0.5, Algorithm::ea);
  req.rhs_pattern = ThresholdPattern({{"City", 10}});
  CHECK_THROWS_AS(discover(street_city(), req), Error);
}

TEST_CASE("candidate budget is enforced") {
  const auto dist = street_city();
  try {
    (void)discover(dist, street_to_city(0.2, 0.5, Algorithm::eps), {5, 0});
    FAIL("expected capacity error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::capacity);
  }
}

TEST_CASE("individual termination keeps support within epsilon") {
  // Street >= 8: the lhs-mass rule alone stops before the last (9,9) pair
  // and reports 3/15 against an exact 4/15.
  const auto dist = street_city();
  auto req = street_to_city(0.2, 0.5, Algorithm::api);
  req.epsilon = 0.2;
  for (auto alg : {Algorithm::api, Algorithm::apsi}) {
    req.algorithm = alg;
    const auto approx = discover(dist, req);
    REQUIRE_FALSE(approx.mds.empty());
    for (const auto& md : approx.mds) {
      const auto exact = testing::exact_measures(dist, req, md.lhs_levels);
      CHECK((exact.support - md.support) / exact.support <= 0.2 + 1e-12);
      CHECK(std::abs(exact.confidence - md.confidence) / exact.confidence <=
            0.2 + 1e-12);
    }
  }
}
