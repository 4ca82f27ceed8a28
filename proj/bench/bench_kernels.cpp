// Serial reference against the OpenMP kernels: the pairwise distribution
// build and the candidate sweep of ea.

#include <benchmark/benchmark.h>

#include "mdd/discovery.hpp"
#include "mdd/distribution.hpp"
#include "support/generators.hpp"

namespace {

using namespace mdd;

const Relation& relation() {
  static const Relation rel = [] {
    testing::Rng rng(1);
    return testing::random_relation(rng, 600, 4);
  }();
  return rel;
}

const std::vector<std::string>& attrs() {
  static const auto names = testing::attribute_names(4);
  return names;
}

MetricMap metrics() { return uniform_metrics(attrs(), simkit::MetricKind::cosine_qgram(2)); }

void BM_BuildSerial(benchmark::State& state) {
  const auto m = metrics();
  for (auto _ : state) {
    benchmark::DoNotOptimize(build_distribution_serial(relation(), attrs(), m, LevelDomain(10)));
  }
}
BENCHMARK(BM_BuildSerial)->Unit(benchmark::kMillisecond);

void BM_BuildParallel(benchmark::State& state) {
  const auto m = metrics();
  const int threads = static_cast<int>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        build_distribution(relation(), attrs(), m, LevelDomain(10), threads));
  }
}
BENCHMARK(BM_BuildParallel)->Arg(1)->Arg(0)->Unit(benchmark::kMillisecond);

struct Instance {
  StatDistribution dist;
  DiscoveryRequest req;
};

const Instance& instance() {
  static const Instance inst = [] {
    testing::Rng rng(2);
    const auto dist = testing::random_distribution(rng, {4, 10, 5000, true});
    auto req = testing::random_request(rng, dist, 1, Algorithm::ea);
    req.min_support = 0.01;
    req.min_confidence = 0.3;
    return Instance{dist, req};
  }();
  return inst;
}

void BM_EaSerial(benchmark::State& state) {
  const auto& in = instance();
  for (auto _ : state) benchmark::DoNotOptimize(ea_serial(in.dist, in.req));
}
BENCHMARK(BM_EaSerial)->Unit(benchmark::kMillisecond);

void BM_EaParallel(benchmark::State& state) {
  const auto& in = instance();
  EngineOptions options;
  options.threads = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(ea(in.dist, in.req, options));
}
BENCHMARK(BM_EaParallel)->Arg(1)->Arg(0)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
