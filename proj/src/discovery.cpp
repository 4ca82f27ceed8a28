#include "mdd/discovery.hpp"

#include <algorithm>
#include <cmath>

#include <omp.h>

#include "mdd/distribution.hpp"
#include "mdd/error.hpp"

namespace mdd {

double support_of(const CandidateAccumulator& acc, std::uint64_t pair_total) {
  if (pair_total == 0) return 0.0;
  return static_cast<double>(acc.joint_count) / static_cast<double>(pair_total);
}

double confidence_of(const CandidateAccumulator& acc) {
  if (acc.lhs_count == 0) return 0.0;
  return static_cast<double>(acc.joint_count) /
         static_cast<double>(acc.lhs_count);
}

Evaluator::Evaluator(const StatDistribution& dist,
                     const DiscoveryRequest& request)
    : arity_(request.lhs.size()),
      pair_total_(dist.pair_total()),
      counts_(dist.counts()) {
  std::vector<std::size_t> lhs_pos;
  for (const auto& a : request.lhs) lhs_pos.push_back(dist.position_of(a));
  std::vector<std::pair<std::size_t, int>> rhs_req;
  for (const auto& e : request.rhs_pattern.entries()) {
    rhs_req.emplace_back(dist.position_of(e.attribute), e.level);
  }
  lhs_.reserve(dist.size() * arity_);
  rhs_ok_.reserve(dist.size());
  for (std::size_t r = 0; r < dist.size(); ++r) {
    const auto row = dist.levels(r);
    for (std::size_t p : lhs_pos) lhs_.push_back(row[p]);
    bool ok = true;
    for (const auto& [p, level] : rhs_req) ok = ok && row[p] >= level;
    rhs_ok_.push_back(ok ? 1 : 0);
  }
}

double relative_bound(double epsilon, double mass, double min_confidence) {
  const double first = epsilon * mass;
  const double second =
      epsilon * mass * min_confidence / (1.0 - epsilon - min_confidence);
  return std::min(first, second);
}

bool within_bound(std::uint64_t suffix_count, std::uint64_t pair_total,
                  double bound) noexcept {
  return static_cast<double>(suffix_count) <=
         bound * static_cast<double>(pair_total);
}

namespace {

void check_epsilon(double epsilon, double min_confidence) {
  if (!(epsilon > 0.0 && epsilon < 1.0 - min_confidence)) {
    fail(ErrorKind::validation,
         "epsilon must satisfy 0 < epsilon < 1 - min_confidence");
  }
}

void check_inputs(const StatDistribution& dist, const DiscoveryRequest& request) {
  request.validate();
  request.rhs_pattern.check_domain(dist.domain());
  for (const auto& a : request.lhs) dist.position_of(a);
  for (const auto& a : request.rhs) dist.position_of(a);
}

void require_sorted(const StatDistribution& dist) {
  if (!is_sorted_by_probability_desc(dist)) {
    fail(ErrorKind::contract,
         "approximate algorithms need records sorted by decreasing "
         "probability (sort_by_probability_desc)");
  }
}

DiscoveredMd make_md(const DiscoveryRequest& request,
                     std::span<const Level> levels,
                     const CandidateAccumulator& acc, std::uint64_t pair_total,
                     const Mode& mode) {
  DiscoveredMd md;
  md.lhs_levels.assign(levels.begin(), levels.end());
  md.lhs_pattern = strip_zero_levels(ThresholdPattern(request.lhs, levels));
  md.rhs_pattern = request.rhs_pattern;
  md.support = support_of(acc, pair_total);
  md.confidence = confidence_of(acc);
  md.joint_count = acc.joint_count;
  md.lhs_count = acc.lhs_count;
  md.records_scanned = acc.records_seen;
  md.mode = mode;
  return md;
}

bool accepted(const CandidateAccumulator& acc, std::uint64_t pair_total,
              const DiscoveryRequest& request) {
  return meets_support(acc.joint_count, pair_total, request.min_support) &&
         meets_confidence(acc.joint_count, acc.lhs_count,
                          request.min_confidence);
}

void canonicalize(DiscoveryResult& result) {
  std::sort(result.mds.begin(), result.mds.end(),
            [](const DiscoveredMd& a, const DiscoveredMd& b) {
              return a.lhs_levels < b.lhs_levels;
            });
}

int worker_count(const EngineOptions& options) {
  return options.threads > 0 ? options.threads : omp_get_max_threads();
}

struct Scan {
  CandidateAccumulator acc;
  // The joint count can no longer grow within the examined range, so a
  // shortfall against min support justifies dominance pruning.
  bool support_final = true;
  bool rejected_by_confidence = false;
};

// Candidates are independent: evaluate them in parallel, then restore the
// canonical order.
template <typename ScanFn>
DiscoveryResult parallel_sweep(const Evaluator& eval,
                               const DiscoveryRequest& request,
                               const LevelDomain& domain,
                               const EngineOptions& options, const Mode& mode,
                               ScanFn scan) {
  const CandidateLattice lattice(request.lhs.size(), domain,
                                 options.candidate_budget);
  const auto c = static_cast<std::int64_t>(lattice.size());
  const int workers = worker_count(options);
  std::vector<std::vector<DiscoveredMd>> found(static_cast<std::size_t>(workers));
  std::uint64_t record_evaluations = 0;

#pragma omp parallel num_threads(workers) reduction(+ : record_evaluations)
  {
    auto& local = found[static_cast<std::size_t>(omp_get_thread_num())];
    std::vector<Level> candidate(request.lhs.size());
#pragma omp for schedule(static)
    for (std::int64_t code = 0; code < c; ++code) {
      lattice.decode(static_cast<std::uint64_t>(code), candidate);
      const Scan s = scan(std::span<const Level>(candidate));
      record_evaluations += s.acc.records_seen;
      if (accepted(s.acc, eval.pair_total(), request)) {
        local.push_back(
            make_md(request, candidate, s.acc, eval.pair_total(), mode));
      }
    }
  }

  DiscoveryResult result;
  result.mode = mode;
  result.counters.candidates_total = lattice.size();
  result.counters.candidates_evaluated = lattice.size();
  result.counters.record_evaluations = record_evaluations;
  for (auto& part : found) {
    for (auto& md : part) result.mds.push_back(std::move(md));
  }
  canonicalize(result);
  return result;
}

// Walks the lattice in dominance order. A candidate whose final support
// falls short prunes every unvisited candidate it dominates (support is
// antitone along dominance).
template <typename ScanFn>
DiscoveryResult pruned_walk(const Evaluator& eval,
                            const DiscoveryRequest& request,
                            const LevelDomain& domain,
                            const EngineOptions& options, const Mode& mode,
                            ScanFn scan) {
  CandidateLattice lattice(request.lhs.size(), domain, options.candidate_budget);
  DiscoveryResult result;
  result.mode = mode;
  result.counters.candidates_total = lattice.size();
  while (auto candidate = lattice.next()) {
    ++result.counters.candidates_evaluated;
    const Scan s = scan(*candidate);
    result.counters.record_evaluations += s.acc.records_seen;
    if (s.rejected_by_confidence) ++result.counters.pruned_by_confidence;
    if (accepted(s.acc, eval.pair_total(), request)) {
      result.mds.push_back(
          make_md(request, *candidate, s.acc, eval.pair_total(), mode));
    }
    if (s.support_final &&
        !meets_support(s.acc.joint_count, eval.pair_total(),
                       request.min_support)) {
      result.counters.pruned_by_support +=
          lattice.prune_dominated_by(*candidate);
    }
  }
  canonicalize(result);
  return result;
}

auto full_scan(const Evaluator& eval) {
  return [&eval](std::span<const Level> candidate) {
    Scan s;
    for (std::size_t i = 0; i < eval.records(); ++i) {
      eval.step(s.acc, i, candidate);
    }
    return s;
  };
}

auto prefix_scan(const Evaluator& eval, std::size_t k) {
  return [&eval, k](std::span<const Level> candidate) {
    Scan s;
    for (std::size_t i = 0; i < k; ++i) eval.step(s.acc, i, candidate);
    return s;
  };
}

// Per-candidate termination: stop at the first record i where the mass left
// after i is within the bound derived from the candidate's own lhs mass.
// The lhs-mass bound alone keeps confidence within ε but lets the missed
// joint mass exceed ε times the support, so the remaining mass must also be
// within ε of the joint mass seen so far.
auto individual_scan(const Evaluator& eval, const ApproxBound& bound,
                     std::uint64_t total_count, double min_confidence) {
  return [&eval, bound, total_count,
          min_confidence](std::span<const Level> candidate) {
    Scan s;
    std::uint64_t remaining = total_count;
    const auto total = static_cast<double>(eval.pair_total());
    for (std::size_t i = 0; i < bound.prefix_k; ++i) {
      eval.step(s.acc, i, candidate);
      remaining -= eval.count(i);
      const double beta = static_cast<double>(s.acc.lhs_count) / total;
      const double alpha = static_cast<double>(s.acc.joint_count) / total;
      const double limit =
          std::min(relative_bound(bound.epsilon, beta, min_confidence),
                   bound.epsilon * alpha);
      if (within_bound(remaining, eval.pair_total(), limit)) break;
    }
    s.support_final = s.acc.records_seen == bound.prefix_k;
    return s;
  };
}

Mode approximate_mode(const ApproxBound& bound) {
  return Mode{true, bound.prefix_k, bound.epsilon};
}

Mode exact_mode(const Evaluator& eval) {
  return Mode{false, eval.records(), 0.0};
}

}  // namespace

ApproxBound compute_prefix_k(const StatDistribution& sorted, double epsilon,
                             double min_support, double min_confidence) {
  check_epsilon(epsilon, min_confidence);
  if (!(min_support > 0.0 && min_support <= 1.0)) {
    fail(ErrorKind::validation, "min support must be in (0, 1]");
  }
  require_sorted(sorted);

  ApproxBound out;
  out.epsilon = epsilon;
  out.min_support = min_support;
  out.min_confidence = min_confidence;
  out.bound = relative_bound(epsilon, min_support, min_confidence);
  out.pair_total = sorted.pair_total();

  // Grow the suffix from the tail while it stays within the bound.
  std::size_t k = sorted.size();
  std::uint64_t suffix = 0;
  while (k > 1 && within_bound(suffix + sorted.count(k - 1), out.pair_total,
                               out.bound)) {
    suffix += sorted.count(k - 1);
    --k;
  }
  out.prefix_k = k;
  out.suffix_count = suffix;
  return out;
}

DiscoveryResult ea(const StatDistribution& dist, const DiscoveryRequest& request,
                   const EngineOptions& options) {
  check_inputs(dist, request);
  const Evaluator eval(dist, request);
  return parallel_sweep(eval, request, dist.domain(), options, exact_mode(eval),
                        full_scan(eval));
}

DiscoveryResult ea_serial(const StatDistribution& dist,
                          const DiscoveryRequest& request,
                          const EngineOptions& options) {
  check_inputs(dist, request);
  const CandidateLattice lattice(request.lhs.size(), dist.domain(),
                                 options.candidate_budget);
  DiscoveryResult result;
  result.mode = Mode{false, dist.size(), 0.0};
  result.counters.candidates_total = lattice.size();
  std::vector<Level> levels(request.lhs.size());
  for (std::uint64_t code = 0; code < lattice.size(); ++code) {
    lattice.decode(code, levels);
    const ThresholdPattern lhs(request.lhs, levels);
    CandidateAccumulator acc;
    for (std::size_t r = 0; r < dist.size(); ++r) {
      if (satisfies(dist, r, lhs)) {
        acc.lhs_count += dist.count(r);
        if (satisfies(dist, r, request.rhs_pattern)) {
          acc.joint_count += dist.count(r);
        }
      }
      ++acc.records_seen;
    }
    ++result.counters.candidates_evaluated;
    result.counters.record_evaluations += acc.records_seen;
    if (accepted(acc, dist.pair_total(), request)) {
      result.mds.push_back(
          make_md(request, levels, acc, dist.pair_total(), result.mode));
    }
  }
  canonicalize(result);
  return result;
}

DiscoveryResult eps(const StatDistribution& dist, const DiscoveryRequest& request,
                    const EngineOptions& options) {
  check_inputs(dist, request);
  const Evaluator eval(dist, request);
  return pruned_walk(eval, request, dist.domain(), options, exact_mode(eval),
                     full_scan(eval));
}

DiscoveryResult epsc(const StatDistribution& grouped,
                     const DiscoveryRequest& request,
                     const EngineOptions& options) {
  check_inputs(grouped, request);
  if (grouped.order() != RecordOrder::grouped || !grouped.grouping_pattern() ||
      !(*grouped.grouping_pattern() == request.rhs_pattern)) {
    fail(ErrorKind::contract,
         "epsc needs a distribution grouped by the request's rhs pattern "
         "(group_by_rhs)");
  }
  const Evaluator eval(grouped, request);
  const double eta_c = request.min_confidence;
  auto scan = [&eval, eta_c](std::span<const Level> candidate) {
    Scan s;
    for (std::size_t i = 0; i < eval.records(); ++i) {
      eval.step(s.acc, i, candidate);
      if (s.acc.lhs_count > 0 &&
          !meets_confidence(s.acc.joint_count, s.acc.lhs_count, eta_c)) {
        // Confidence is 1 throughout the rhs-satisfying prefix, so a drop
        // only happens past the pivot, where the joint count is frozen: the
        // support seen here is already the full support.
        s.rejected_by_confidence = true;
        break;
      }
    }
    return s;
  };
  return pruned_walk(eval, request, grouped.domain(), options, exact_mode(eval),
                     scan);
}

DiscoveryResult ap(const StatDistribution& sorted, const DiscoveryRequest& request,
                   const EngineOptions& options) {
  check_inputs(sorted, request);
  const auto bound = compute_prefix_k(sorted, *request.epsilon,
                                      request.min_support,
                                      request.min_confidence);
  const Evaluator eval(sorted, request);
  return parallel_sweep(eval, request, sorted.domain(), options,
                        approximate_mode(bound),
                        prefix_scan(eval, bound.prefix_k));
}

DiscoveryResult api(const StatDistribution& sorted,
                    const DiscoveryRequest& request,
                    const EngineOptions& options) {
  check_inputs(sorted, request);
  const auto bound = compute_prefix_k(sorted, *request.epsilon,
                                      request.min_support,
                                      request.min_confidence);
  const Evaluator eval(sorted, request);
  return parallel_sweep(
      eval, request, sorted.domain(), options, approximate_mode(bound),
      individual_scan(eval, bound, sorted.count_sum(), request.min_confidence));
}

DiscoveryResult aps(const StatDistribution& sorted,
                    const DiscoveryRequest& request,
                    const EngineOptions& options) {
  check_inputs(sorted, request);
  const auto bound = compute_prefix_k(sorted, *request.epsilon,
                                      request.min_support,
                                      request.min_confidence);
  const Evaluator eval(sorted, request);
  return pruned_walk(eval, request, sorted.domain(), options,
                     approximate_mode(bound),
                     prefix_scan(eval, bound.prefix_k));
}

DiscoveryResult apsi(const StatDistribution& sorted,
                     const DiscoveryRequest& request,
                     const EngineOptions& options) {
  check_inputs(sorted, request);
  const auto bound = compute_prefix_k(sorted, *request.epsilon,
                                      request.min_support,
                                      request.min_confidence);
  const Evaluator eval(sorted, request);
  return pruned_walk(
      eval, request, sorted.domain(), options, approximate_mode(bound),
      individual_scan(eval, bound, sorted.count_sum(), request.min_confidence));
}

DiscoveryResult discover(const StatDistribution& dist,
                         const DiscoveryRequest& request,
                         const EngineOptions& options) {
  check_inputs(dist, request);
  std::vector<std::string> attrs = request.lhs;
  attrs.insert(attrs.end(), request.rhs.begin(), request.rhs.end());
  const StatDistribution projected = dist.project(attrs);
  switch (request.algorithm) {
    case Algorithm::ea: return ea(projected, request, options);
    case Algorithm::eps: return eps(projected, request, options);
    case Algorithm::epsc:
      return epsc(group_by_rhs(projected, request.rhs_pattern).dist, request,
                  options);
    case Algorithm::ap:
      return ap(sort_by_probability_desc(projected), request, options);
    case Algorithm::api:
      return api(sort_by_probability_desc(projected), request, options);
    case Algorithm::aps:
      return aps(sort_by_probability_desc(projected), request, options);
    case Algorithm::apsi:
      return apsi(sort_by_probability_desc(projected), request, options);
  }
  fail(ErrorKind::validation, "unknown algorithm");
}

}  // namespace mdd
