#pragma once

#include "rwn/numerics.hpp"
#include "rwn/spacetime.hpp"

namespace rwn {

enum class Rescale { None, ByInnerRadius };

// A radius in the static interior together with its distance to the inner
// horizon. Both are kept because 1 - r/r_star is not representable as a
// difference once the tortoise coordinate is a few units large.
struct RadialPoint {
  double r = 0.0;
  double gap = 0.0;  // r_star - r
};

struct TailConstants {
  bool extremal = false;
  // Subextremal: r_star - r ~ prefactor * exp(-rate * x).
  // Extremal: r_star - r ~ prefactor / x, rate = 0.
  double rate = 0.0;
  double prefactor = 0.0;
};

struct ExponentFits {
  numerics::FitResult small_x;  // ln r vs ln x, slope 1/3
  numerics::FitResult tail;     // ln(gap) vs x (subextremal) or ln(gap) vs ln x (extremal)
};

// Tortoise coordinate x with f^2 d/dr = d/dx on (0, r_star), x(0) = 0.
// All inputs and outputs are in map units: the raw Compton-wavelength units
// for Rescale::None, or units of r_star for Rescale::ByInnerRadius.
class CoordinateMap {
 public:
  explicit CoordinateMap(const Spacetime& st, Rescale rescale = Rescale::ByInnerRadius);

  [[nodiscard]] const Spacetime& spacetime() const { return st_; }
  [[nodiscard]] Rescale rescale() const { return rescale_; }
  [[nodiscard]] bool extremal() const { return st_.sector == Sector::Extremal; }
  // Raw length of one map unit.
  [[nodiscard]] double length_unit() const { return unit_; }
  [[nodiscard]] double r_star() const { return r_star_raw_ / unit_; }
  [[nodiscard]] double rho() const { return rho_; }
  [[nodiscard]] double kappa_hat() const { return kappa_hat_; }

  [[nodiscard]] double x_of_r(double r) const;
  [[nodiscard]] double x_of_point(const RadialPoint& p) const;
  [[nodiscard]] RadialPoint point_of_r(double r) const;
  [[nodiscard]] RadialPoint locate(double x) const;
  [[nodiscard]] double r_of_x(double x) const { return locate(x).r; }

  // f^2 and f at a point (dimensionless, independent of the unit choice).
  [[nodiscard]] double f_squared(const RadialPoint& p) const;
  [[nodiscard]] double f(const RadialPoint& p) const;

  // Log-odds chart t = ln(r / gap) covering (0, r_star) by the real line.
  // r and gap are explicit in t, and dx/dt = r^3 / (r_star^2 (r_+ - r)) is
  // smooth, so integrators use t instead of x.
  [[nodiscard]] RadialPoint point_of_chart(double t) const;
  [[nodiscard]] double chart_of_point(const RadialPoint& p) const;
  // Chart value at x without forming the gap, finite far past gap underflow.
  [[nodiscard]] double chart_of_x(double x) const;
  [[nodiscard]] double dx_dchart(const RadialPoint& p) const;

  [[nodiscard]] TailConstants tail_constants() const;
  [[nodiscard]] ExponentFits verify_exponents() const;

 private:
  // Everything below works in units of r_star.
  [[nodiscard]] double xhat(double rhat, double gaphat) const;
  [[nodiscard]] double xhat_series(double rhat) const;
  [[nodiscard]] double xhat_log_gap(double rhat, double log_gap) const;
  [[nodiscard]] RadialPoint locate_hat(double xh) const;
  // ln(gap) for xh above the series switch.
  [[nodiscard]] double solve_log_gap(double xh) const;

  Spacetime st_;
  Rescale rescale_;
  double r_star_raw_ = 0.0;
  double unit_ = 1.0;
  double rho_ = 1.0;
  double kappa_hat_ = 0.0;
  double xhat_switch_ = 0.0;  // xhat at rhat = 1/2
};

}  // namespace rwn
