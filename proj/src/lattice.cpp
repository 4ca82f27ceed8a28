#include "mdd/lattice.hpp"

#include <algorithm>
#include <numeric>
#include <string>

#include "mdd/error.hpp"

namespace mdd {

bool dominates(std::span<const Level> lower, std::span<const Level> upper) {
  for (std::size_t i = 0; i < lower.size(); ++i) {
    if (lower[i] > upper[i]) return false;
  }
  return true;
}

bool dominates(const ThresholdPattern& lower, const ThresholdPattern& upper) {
  if (lower.size() != upper.size()) {
    fail(ErrorKind::validation, "dominance between patterns of different arity");
  }
  for (const auto& e : lower.entries()) {
    const auto other = upper.level_of(e.attribute);
    if (!other) {
      fail(ErrorKind::validation, "dominance between patterns over different "
                                  "attributes ('" + e.attribute + "')");
    }
    if (e.level > *other) return false;
  }
  return true;
}

CandidateLattice::CandidateLattice(std::size_t arity, LevelDomain domain,
                                   std::uint64_t budget)
    : arity_(arity), domain_(domain), size_(1) {
  if (arity == 0) fail(ErrorKind::validation, "lattice needs at least one attribute");
  const auto d = static_cast<std::uint64_t>(domain.d());
  for (std::size_t i = 0; i < arity; ++i) {
    if (size_ > budget / d) {
      fail(ErrorKind::capacity,
           "candidate count d^|X| = " + std::to_string(domain.d()) + "^" +
               std::to_string(arity) + " exceeds the candidate budget of " +
               std::to_string(budget) +
               "; reduce --levels or the number of lhs attributes, or raise "
               "--candidate-budget");
    }
    size_ *= d;
  }
  max_sum_ = arity * static_cast<std::size_t>(domain.d() - 1);
  cursor_.assign(arity, 0);
  visited_.assign(size_, false);
  pruned_.assign(size_, false);
}

std::uint64_t CandidateLattice::code_of(std::span<const Level> pattern) const {
  std::uint64_t code = 0;
  for (Level l : pattern) code = code * static_cast<std::uint64_t>(domain_.d()) + l;
  return code;
}

void CandidateLattice::decode(std::uint64_t code, std::span<Level> out) const {
  const auto d = static_cast<std::uint64_t>(domain_.d());
  for (std::size_t a = arity_; a-- > 0;) {
    out[a] = static_cast<Level>(code % d);
    code /= d;
  }
}

namespace {

// Lexicographically smallest vector of `width` entries in [0, top] summing
// to `sum`: fill from the right.
void fill_smallest(std::span<Level> out, std::size_t sum, Level top) {
  for (std::size_t i = out.size(); i-- > 0;) {
    const auto take = std::min<std::size_t>(sum, top);
    out[i] = static_cast<Level>(take);
    sum -= take;
  }
}

}  // namespace

// Steps the cursor to the next pattern in (level sum, lexicographic) order.
bool CandidateLattice::advance() {
  if (!started_) {
    started_ = true;
    std::fill(cursor_.begin(), cursor_.end(), Level{0});
    return true;
  }
  const Level top = domain_.top();
  // Rightmost position that can grow while its suffix gives up one unit.
  std::size_t suffix = 0;
  for (std::size_t i = arity_; i-- > 0;) {
    if (i + 1 < arity_) suffix += cursor_[i + 1];
    if (i + 1 < arity_ && cursor_[i] < top && suffix >= 1) {
      ++cursor_[i];
      fill_smallest(std::span<Level>(cursor_).subspan(i + 1), suffix - 1, top);
      return true;
    }
  }
  if (layer_ == max_sum_) return false;
  ++layer_;
  fill_smallest(cursor_, layer_, top);
  return true;
}

std::optional<std::span<const Level>> CandidateLattice::next() {
  while (!exhausted_) {
    if (!advance()) {
      exhausted_ = true;
      break;
    }
    const auto code = code_of(cursor_);
    if (pruned_[code]) continue;
    visited_[code] = true;
    return std::span<const Level>(cursor_);
  }
  return std::nullopt;
}

std::uint64_t CandidateLattice::prune_dominated_by(std::span<const Level> pattern) {
  if (pattern.size() != arity_) {
    fail(ErrorKind::validation, "pattern arity does not match the lattice");
  }
  // Odometer over the upper box [pattern[a], d-1] for every a.
  std::vector<Level> probe(pattern.begin(), pattern.end());
  const Level top = domain_.top();
  std::uint64_t marked = 0;
  while (true) {
    const auto code = code_of(probe);
    if (!visited_[code] && !pruned_[code]) {
      pruned_[code] = true;
      ++marked;
    }
    std::size_t a = arity_;
    while (a-- > 0) {
      if (probe[a] < top) {
        ++probe[a];
        break;
      }
      probe[a] = pattern[a];
    }
    if (a == static_cast<std::size_t>(-1)) break;
  }
  pruned_count_ += marked;
  return marked;
}

bool CandidateLattice::visited(std::span<const Level> pattern) const {
  return visited_[code_of(pattern)];
}

bool CandidateLattice::pruned(std::span<const Level> pattern) const {
  return pruned_[code_of(pattern)];
}

std::vector<std::vector<Level>> enumerate_in_dominance_order(
    std::size_t arity, const LevelDomain& domain, std::uint64_t budget) {
  CandidateLattice lattice(arity, domain, budget);
  std::vector<std::vector<Level>> out;
  out.reserve(lattice.size());
  while (auto p = lattice.next()) out.emplace_back(p->begin(), p->end());
  return out;
}

}  // namespace mdd
