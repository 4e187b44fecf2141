#pragma once

#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace rwn {

// Error taxonomy shared by all modules.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DomainError : public Error {
 public:
  using Error::Error;
};

class NoBracket : public Error {
 public:
  using Error::Error;
};

class NoConvergence : public Error {
 public:
  using Error::Error;
};

class StepUnderflow : public Error {
 public:
  using Error::Error;
};

class DegenerateInput : public Error {
 public:
  using Error::Error;
};

}  // namespace rwn

namespace rwn::numerics {

struct ToleranceSpec {
  double rel_tol = 1e-10;
  double abs_tol = 1e-14;
  int max_iterations = 200;

  // Throws DomainError when an invariant is violated.
  void validate() const;
};

struct FitResult {
  double slope = 0.0;
  double intercept = 0.0;
  double residual_rms = 0.0;
};

using ScalarFn = std::function<double(double)>;

// Bracketing root finder (TOMS 748: inverse cubic/quadratic steps with a
// bisection safeguard). Returns the midpoint of the final bracket.
double root_find_bracketed(const ScalarFn& fn, double lo, double hi,
                           const ToleranceSpec& tol = {});

// Algebraic endpoint behaviour of an integrand, fn ~ (x - a)^left_exponent.
// Exponents in (-1, 0) trigger a smoothing substitution.
struct EndpointHint {
  std::optional<double> left_exponent;
  std::optional<double> right_exponent;
};

// Adaptive Gauss-Kronrod quadrature. Either bound may be infinite.
double integrate_adaptive(const ScalarFn& fn, double a, double b,
                          const ToleranceSpec& tol = {},
                          const EndpointHint& hint = {});

using State = std::vector<double>;
using VectorField = std::function<void(const State& y, State& dydx, double x)>;

struct Trajectory {
  std::vector<double> x;
  std::vector<State> y;

  [[nodiscard]] const State& back() const { return y.back(); }
  [[nodiscard]] std::size_t size() const { return x.size(); }
};

// Dormand-Prince 5(4) with step-size control and dense output.
// Without sample points every accepted step is recorded; with sample points
// (monotone, first == x0, last == x1) the solution is interpolated there.
Trajectory ode_solve(const VectorField& rhs, double x0, double x1, State y0,
                     const ToleranceSpec& tol = {},
                     std::span<const double> sample_points = {});

// Least squares line through (ln x, ln y).
FitResult fit_power_law(std::span<const std::pair<double, double>> samples);

// Least squares line through (x, y).
FitResult fit_line(std::span<const std::pair<double, double>> samples);

// n points, logarithmically spaced, endpoints included.
std::vector<double> log_grid(double lo, double hi, std::size_t n);
std::vector<double> linear_grid(double lo, double hi, std::size_t n);

}  // namespace rwn::numerics
