#include "rwn/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/tools/toms748_solve.hpp>
#include <boost/numeric/odeint.hpp>

namespace rwn::numerics {

namespace odeint = boost::numeric::odeint;

void ToleranceSpec::validate() const {
  if (!(rel_tol > 0.0)) throw DomainError("ToleranceSpec: rel_tol must be > 0");
  if (!(abs_tol >= 0.0)) throw DomainError("ToleranceSpec: abs_tol must be >= 0");
  if (max_iterations < 1) throw DomainError("ToleranceSpec: max_iterations must be >= 1");
}

double root_find_bracketed(const ScalarFn& fn, double lo, double hi, const ToleranceSpec& tol) {
  tol.validate();
  if (!(lo < hi)) throw DomainError("root_find_bracketed: need lo < hi");
  const double flo = fn(lo);
  const double fhi = fn(hi);
  if (!std::isfinite(flo) || !std::isfinite(fhi)) {
    throw DomainError("root_find_bracketed: non-finite function value at bracket end");
  }
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if (flo * fhi > 0.0) throw NoBracket("root_find_bracketed: fn(lo) and fn(hi) have equal sign");

  const double rel = std::max(tol.rel_tol, 4.0 * std::numeric_limits<double>::epsilon());
  const double abs = tol.abs_tol;
  auto converged = [rel, abs](double a, double b) {
    return std::abs(b - a) <= std::max(abs, rel * std::min(std::abs(a), std::abs(b)));
  };

  std::uintmax_t iters = static_cast<std::uintmax_t>(tol.max_iterations);
  const auto bracket = boost::math::tools::toms748_solve(
      [&fn](double x) { return fn(x); }, lo, hi, flo, fhi, converged, iters);
  const double mid = 0.5 * (bracket.first + bracket.second);
  if (!converged(bracket.first, bracket.second) && fn(mid) != 0.0) {
    throw NoConvergence("root_find_bracketed: iteration budget exhausted");
  }
  return mid;
}

namespace {

double gk_integrate(const ScalarFn& fn, double a, double b, const ToleranceSpec& tol) {
  double error = 0.0;
  double l1 = 0.0;
  constexpr unsigned max_depth = 18;
  const double result = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
      fn, a, b, max_depth, tol.rel_tol, &error, &l1);
  if (!std::isfinite(result)) throw NoConvergence("integrate_adaptive: non-finite result");
  // Kronrod-minus-Gauss estimates are pessimistic; the acceptance band is
  // measured against the L1 norm so that cancelling integrands are not rejected.
  if (error > std::max(tol.abs_tol, tol.rel_tol * std::max(std::abs(result), l1)) * 10.0) {
    throw NoConvergence("integrate_adaptive: error estimate above tolerance");
  }
  return result;
}

bool singular_exponent(const std::optional<double>& e) {
  return e.has_value() && *e > -1.0 && *e < 0.0;
}

// x = a + L v^m maps v in (0, 1] onto (a, b]; with m = 1/(1+beta) a factor
// (x - a)^beta becomes bounded in v.
double integrate_left_substituted(const ScalarFn& fn, double a, double b, double beta,
                                  const ToleranceSpec& tol) {
  const double m = 1.0 / (1.0 + beta);
  const double len = b - a;
  auto g = [&](double v) {
    if (v <= 0.0) return 0.0;
    const double vm1 = std::pow(v, m - 1.0);
    return fn(a + len * v * vm1) * len * m * vm1;
  };
  return gk_integrate(g, 0.0, 1.0, tol);
}

double integrate_right_substituted(const ScalarFn& fn, double a, double b, double beta,
                                   const ToleranceSpec& tol) {
  const double m = 1.0 / (1.0 + beta);
  const double len = b - a;
  auto g = [&](double v) {
    if (v <= 0.0) return 0.0;
    const double vm1 = std::pow(v, m - 1.0);
    return fn(b - len * v * vm1) * len * m * vm1;
  };
  return gk_integrate(g, 0.0, 1.0, tol);
}

}  // namespace

double integrate_adaptive(const ScalarFn& fn, double a, double b, const ToleranceSpec& tol,
                          const EndpointHint& hint) {
  tol.validate();
  if (std::isnan(a) || std::isnan(b)) throw DomainError("integrate_adaptive: NaN bound");
  if (a == b) return 0.0;
  if (a > b) return -integrate_adaptive(fn, b, a, tol, {hint.right_exponent, hint.left_exponent});

  const bool left = singular_exponent(hint.left_exponent);
  const bool right = singular_exponent(hint.right_exponent);
  if ((left && !std::isfinite(a)) || (right && !std::isfinite(b))) {
    throw DomainError("integrate_adaptive: endpoint hint on an infinite bound");
  }
  if (left && right) {
    const double c = 0.5 * (a + b);
    return integrate_left_substituted(fn, a, c, *hint.left_exponent, tol) +
           integrate_right_substituted(fn, c, b, *hint.right_exponent, tol);
  }
  if (left) return integrate_left_substituted(fn, a, b, *hint.left_exponent, tol);
  if (right) return integrate_right_substituted(fn, a, b, *hint.right_exponent, tol);
  return gk_integrate(fn, a, b, tol);
}

Trajectory ode_solve(const VectorField& rhs, double x0, double x1, State y0,
                     const ToleranceSpec& tol, std::span<const double> sample_points) {
  tol.validate();
  if (y0.empty()) throw DomainError("ode_solve: empty initial state");
  Trajectory traj;
  if (x0 == x1) {
    traj.x.push_back(x0);
    traj.y.push_back(std::move(y0));
    return traj;
  }
  if (!sample_points.empty() &&
      (sample_points.front() != x0 || sample_points.back() != x1)) {
    throw DomainError("ode_solve: sample points must start at x0 and end at x1");
  }

  const double direction = x1 > x0 ? 1.0 : -1.0;
  const std::size_t max_steps =
      static_cast<std::size_t>(tol.max_iterations) * 10000u;
  const double min_step = 64.0 * std::numeric_limits<double>::epsilon();

  using Stepper = odeint::runge_kutta_dopri5<State>;
  auto dense = odeint::make_dense_output(std::max(tol.abs_tol, 1e-300), tol.rel_tol, Stepper());

  auto system = [&rhs](const State& y, State& dydx, double x) { rhs(y, dydx, x); };

  std::size_t steps = 0;
  double last_x = x0;
  auto observer = [&](const State& y, double x) {
    for (double v : y) {
      if (!std::isfinite(v)) throw StepUnderflow("ode_solve: solution became non-finite");
    }
    if (!traj.x.empty() && x != last_x &&
        std::abs(x - last_x) < min_step * std::max(1.0, std::abs(x))) {
      throw StepUnderflow("ode_solve: step size underflow");
    }
    last_x = x;
    traj.x.push_back(x);
    traj.y.push_back(y);
  };

  const double dt0 = direction * std::abs(x1 - x0) * 1e-4;
  try {
    if (sample_points.empty()) {
      // Count every accepted step; odeint's checker resets on each observation.
      auto counting = [&](const State& y, double x) {
        if (++steps > max_steps) throw NoConvergence("ode_solve: step budget exhausted");
        observer(y, x);
      };
      odeint::integrate_adaptive(dense, system, y0, x0, x1, dt0, counting);
    } else {
      odeint::integrate_times(dense, system, y0, sample_points.begin(), sample_points.end(),
                              dt0, observer, odeint::max_step_checker(max_steps));
    }
  } catch (const odeint::step_adjustment_error& e) {
    throw StepUnderflow(std::string("ode_solve: ") + e.what());
  } catch (const odeint::no_progress_error& e) {
    throw NoConvergence(std::string("ode_solve: ") + e.what());
  }
  return traj;
}

FitResult fit_line(std::span<const std::pair<double, double>> samples) {
  if (samples.size() < 2) throw DegenerateInput("fit_line: need at least two samples");
  const double n = static_cast<double>(samples.size());
  double mx = 0.0, my = 0.0;
  for (const auto& [x, y] : samples) {
    mx += x;
    my += y;
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (const auto& [x, y] : samples) {
    sxx += (x - mx) * (x - mx);
    sxy += (x - mx) * (y - my);
  }
  if (sxx == 0.0) throw DegenerateInput("fit_line: all abscissae are equal");
  FitResult fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double ss = 0.0;
  for (const auto& [x, y] : samples) {
    const double r = y - (fit.intercept + fit.slope * x);
    ss += r * r;
  }
  fit.residual_rms = std::sqrt(ss / n);
  return fit;
}

FitResult fit_power_law(std::span<const std::pair<double, double>> samples) {
  if (samples.size() < 3) throw DegenerateInput("fit_power_law: need at least three samples");
  std::vector<std::pair<double, double>> logs;
  logs.reserve(samples.size());
  for (const auto& [x, y] : samples) {
    if (!(x > 0.0) || !(y > 0.0)) throw DomainError("fit_power_law: samples must be positive");
    logs.emplace_back(std::log(x), std::log(y));
  }
  return fit_line(logs);
}

std::vector<double> log_grid(double lo, double hi, std::size_t n) {
  if (!(lo > 0.0) || !(hi > 0.0)) throw DomainError("log_grid: bounds must be positive");
  if (n < 2) throw DomainError("log_grid: need at least two points");
  std::vector<double> g(n);
  const double llo = std::log(lo), lhi = std::log(hi);
  for (std::size_t i = 0; i < n; ++i) {
    g[i] = std::exp(llo + (lhi - llo) * static_cast<double>(i) / static_cast<double>(n - 1));
  }
  g.front() = lo;
  g.back() = hi;
  return g;
}

std::vector<double> linear_grid(double lo, double hi, std::size_t n) {
  if (n < 2) throw DomainError("linear_grid: need at least two points");
  std::vector<double> g(n);
  for (std::size_t i = 0; i < n; ++i) {
    g[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
  }
  g.back() = hi;
  return g;
}

}  // namespace rwn::numerics
