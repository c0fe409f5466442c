#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace specsense {

// Thrown when an iterative solver produced non-finite values. Carries the
// global iteration index at which the failure was detected.
class numerical_error : public std::runtime_error {
 public:
  numerical_error(const std::string& what, std::size_t iteration)
      : std::runtime_error(what + " (iteration " + std::to_string(iteration) + ")"),
        iteration_(iteration) {}

  std::size_t iteration() const noexcept { return iteration_; }

 private:
  std::size_t iteration_;
};

// Constraint set of a column program cannot be met under nonnegativity.
// Carries the best residual achieved while trying.
class infeasible_error : public std::runtime_error {
 public:
  infeasible_error(const std::string& what, double best_residual)
      : std::runtime_error(what + " (best residual " + std::to_string(best_residual) + ")"),
        best_residual_(best_residual) {}

  double best_residual() const noexcept { return best_residual_; }

 private:
  double best_residual_;
};

// No observed entries were provided to the completion solver.
class no_data_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A requested sampling rate cannot be realized with the configured report
// count. Carries the minimum feasible number of reports per CR.
class infeasible_rate_error : public std::runtime_error {
 public:
  infeasible_rate_error(const std::string& what, std::size_t min_reports)
      : std::runtime_error(what), min_reports_(min_reports) {}

  std::size_t min_reports() const noexcept { return min_reports_; }

 private:
  std::size_t min_reports_;
};

// POD is undefined when there were no detection events at all.
class undefined_metric_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace specsense
