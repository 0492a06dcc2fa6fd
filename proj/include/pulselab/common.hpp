#ifndef PULSELAB_COMMON_HPP
#define PULSELAB_COMMON_HPP

#include <cmath>
#include <limits>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace pulselab {

inline constexpr double kSqrt2 = 1.4142135623730950488;

/// Error raised by malformed configuration or invalid arguments (exit code 2).
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Error raised by numerical failures: divergence, non-convergence,
/// boundary contamination, stalled iterations (exit code 3).
class NumericError : public std::runtime_error {
 public:
  explicit NumericError(const std::string& msg) : std::runtime_error(msg) {}
};

inline double quiet_nan() { return std::numeric_limits<double>::quiet_NaN(); }

inline bool nearly_integer(double x, double tol) {
  return std::fabs(x - std::round(x)) <= tol;
}

/// Ordinary least squares fit y = a + b x.
struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_stderr = 0.0;
  double rms_residual = 0.0;
  int n = 0;
};

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

/// Runs fn(i) for i in [0, n) on up to `jobs` threads. Results must be
/// written into index-addressed slots by the caller so the outcome does not
/// depend on scheduling. Exceptions are captured and rethrown.
void parallel_for_indexed(int n, int jobs, const std::function<void(int)>& fn);

}  // namespace pulselab

#endif
