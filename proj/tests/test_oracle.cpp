#include <doctest.h>

#include "mdd/error.hpp"
#include "mdd/oracle.hpp"

using namespace mdd;

namespace {

const Relation& contacts() {
  static const Relation rel = read_csv(MDD_FIXTURES "/contacts.csv");
  return rel;
}

MetricMap word_metrics() {
  MetricMap m;
  for (const auto& a : contacts().schema()) m[a.name] = simkit::MetricKind::cosine_word();
  return m;
}

}  // namespace

TEST_CASE("oracle measures on the contacts fixture") {
  const auto m = oracle::measures(contacts(), ThresholdPattern({{"Street", 7}}),
                                  ThresholdPattern({{"City", 6}}), word_metrics(),
                                  LevelDomain(10));
  CHECK(m.pair_total == 15);
  CHECK(m.lhs_pairs == 8);
  CHECK(m.joint_pairs == 4);
  CHECK(m.support == doctest::Approx(4.0 / 15.0));
  CHECK(m.confidence == doctest::Approx(0.5));
}

TEST_CASE("oracle: no pair reaches the lhs pattern") {
  const auto m = oracle::measures(contacts(),
                                  ThresholdPattern({{"Name", 8}, {"Street", 8}}),
                                  ThresholdPattern({{"SIN", 9}}), word_metrics(),
                                  LevelDomain(10));
  CHECK(m.lhs_pairs == 0);
  CHECK(m.joint_pairs == 0);
  CHECK(m.support == 0.0);
  CHECK(m.confidence == 0.0);
}

TEST_CASE("oracle discovery enumerates dom(X)") {
  const std::vector<std::string> lhs = {"Street"};
  const auto found = oracle::discover(contacts(), lhs, ThresholdPattern({{"City", 6}}),
                                      0.2, 0.5, word_metrics(), LevelDomain(10));
  REQUIRE(found.size() == 3);
  CHECK(found[0].lhs_levels == std::vector<Level>{6});
  CHECK(found[0].measures.lhs_pairs == 10);
  CHECK(found[1].lhs_levels == std::vector<Level>{7});
  CHECK(found[2].lhs_levels == std::vector<Level>{8});
  CHECK(found[2].measures.confidence == doctest::Approx(2.0 / 3.0));
}

TEST_CASE("oracle size limits") {
  const Relation one({"A", "B"}, {{"x", "y"}});
  MetricMap m = {{"A", simkit::MetricKind::edit()}, {"B", simkit::MetricKind::edit()}};
  try {
    (void)oracle::measures(one, ThresholdPattern({{"A", 1}}),
                           ThresholdPattern({{"B", 1}}), m, LevelDomain(3));
    FAIL("expected insufficient data");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::insufficient_data);
  }
  std::vector<std::vector<std::string>> rows(oracle::kMaxTuples + 1, {"x", "y"});
  const Relation big({"A", "B"}, rows);
  try {
    (void)oracle::measures(big, ThresholdPattern({{"A", 1}}),
                           ThresholdPattern({{"B", 1}}), m, LevelDomain(3));
    FAIL("expected capacity error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::capacity);
  }
}
