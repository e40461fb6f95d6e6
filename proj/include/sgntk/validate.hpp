#pragma once

#include <functional>
#include <string>
#include <vector>

#include "sgntk/dual_expectations.hpp"

namespace sgntk {

struct ValidationCheck {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct ValidationReport {
  std::vector<ValidationCheck> checks;
  bool passed() const noexcept;
};

struct ValidateOptions {
  /// The closed form under test; replaceable to confirm the suite catches faults.
  std::function<double(const Cov2&)> t_erf = sgntk::t_erf;
  std::size_t monte_carlo_samples = 1000000;
  std::size_t ensemble_count = 1000;
  std::uint64_t seed = 0;
};

/// Closed form vs quadrature vs Monte Carlo, finite-difference Jacobians,
/// depth-1 exactness, ensemble covariance and singular exponent fits.
ValidationReport validate(const ValidateOptions& options = {});

}  // namespace sgntk
