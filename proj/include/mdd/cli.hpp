#pragma once

#include <iosfwd>
#include <span>
#include <string>

#include "mdd/distribution.hpp"
#include "mdd/error.hpp"
#include "mdd/model.hpp"

namespace mdd::cli {

enum ExitCode : int {
  kSuccess = 0,  // includes an infeasible discovery
  kDisagreement = 1,  // verify found a counterexample
  kValidation = 2,
  kIo = 3,
  kBudget = 4,
  kInsufficientData = 5,
};

int exit_code_for(ErrorKind kind) noexcept;

/// Entry point shared by the `mdd` executable and the tests. `args[0]` is
/// the program name.
int run(std::span<const std::string> args, std::ostream& out, std::ostream& err);

/// Inverse of metric_spec: a single metric for all attributes, or one per
/// attribute joined by '|'.
MetricMap parse_metric_spec(std::string_view spec,
                            std::span<const std::string> attributes);

}  // namespace mdd::cli
