#include "rwn/coordinates.hpp"

#include <cmath>
#include <limits>
#include <vector>

namespace rwn {

namespace {

constexpr double kSeriesSwitch = 0.5;

numerics::ToleranceSpec inversion_tolerance() {
  return {4.0 * std::numeric_limits<double>::epsilon(), 0.0, 200};
}

}  // namespace

CoordinateMap::CoordinateMap(const Spacetime& st, Rescale rescale) : st_(st), rescale_(rescale) {
  if (!st.is_black_hole()) throw DomainError("CoordinateMap: naked sector has no static interior chart");
  r_star_raw_ = *st.r_star;
  unit_ = rescale == Rescale::ByInnerRadius ? r_star_raw_ : 1.0;
  rho_ = st.rho();
  kappa_hat_ = st.kappa_hat();
  xhat_switch_ = xhat_series(kSeriesSwitch);
}

double CoordinateMap::xhat_series(double rhat) const {
  // x(r) = sum_{n>=3} c_n r^n; the n = 1, 2 terms cancel identically.
  const double log_rho = std::log1p(kappa_hat_);
  double sum = 0.0;
  double power = rhat * rhat;
  for (int n = 3; n < 400; ++n) {
    power *= rhat;
    double cn = 0.0;
    if (kappa_hat_ == 0.0) {
      cn = static_cast<double>(n - 2) / n;
    } else {
      cn = -std::expm1((2.0 - n) * log_rho) / (kappa_hat_ * n);
    }
    const double term = cn * power;
    sum += term;
    if (std::abs(term) <= 1e-18 * std::abs(sum)) break;
  }
  return sum;
}

double CoordinateMap::xhat(double rhat, double gaphat) const {
  if (rhat < kSeriesSwitch) return xhat_series(rhat);
  return xhat_log_gap(rhat, std::log(gaphat));
}

double CoordinateMap::xhat_log_gap(double rhat, double log_gap) const {
  if (kappa_hat_ == 0.0) {
    return std::exp(-log_gap) + 2.0 * log_gap - std::exp(log_gap);
  }
  return rhat + (rho_ * rho_ / kappa_hat_) * std::log1p(-rhat / rho_) - log_gap / kappa_hat_;
}

double CoordinateMap::x_of_point(const RadialPoint& p) const {
  const double rs = r_star();
  if (!(p.r > 0.0) || !(p.gap > 0.0)) throw DomainError("x_of_point: point outside (0, r_star)");
  return rs * xhat(p.r / rs, p.gap / rs);
}

RadialPoint CoordinateMap::point_of_r(double r) const {
  const double rs = r_star();
  if (!(r > 0.0) || !(r < rs)) throw DomainError("point_of_r: r outside (0, r_star)");
  return {r, rs - r};
}

double CoordinateMap::x_of_r(double r) const { return x_of_point(point_of_r(r)); }

RadialPoint CoordinateMap::locate_hat(double xh) const {
  if (xh <= xhat_switch_) {
    auto fn = [this, xh](double r) { return xhat_series(r) - xh; };
    const double guess = std::cbrt(3.0 * rho_ * xh);
    double lo = 0.5 * guess;
    // The series converges on the whole interior; widen past the switch
    // point so a root sitting exactly on it stays bracketed.
    constexpr double kSeriesCap = 0.75;
    double hi = std::min(kSeriesCap, 2.0 * guess);
    while (fn(lo) > 0.0) lo *= 0.5;
    if (fn(hi) < 0.0) hi = kSeriesCap;
    const double r = numerics::root_find_bracketed(fn, lo, hi, inversion_tolerance());
    return {r, 1.0 - r};
  }

  const double sigma = solve_log_gap(xh);
  return {-std::expm1(sigma), std::exp(sigma)};
}

double CoordinateMap::solve_log_gap(double xh) const {
  // x is strictly decreasing in sigma = ln(gap).
  auto fn = [this, xh](double sigma) { return xhat_log_gap(-std::expm1(sigma), sigma) - xh; };
  const double hi = std::log(0.75);
  const double guess = kappa_hat_ == 0.0 ? -std::log(xh) : -kappa_hat_ * xh;
  double lo = std::min(1.5 * guess - 1.0, hi - 1.0);
  constexpr double kSigmaFloor = -1e7;
  while (fn(lo) < 0.0) {
    if (lo <= kSigmaFloor) throw NoConvergence("locate: x too deep in the horizon tail");
    lo = std::max(2.0 * lo, kSigmaFloor);
  }
  return numerics::root_find_bracketed(fn, lo, hi, inversion_tolerance());
}

RadialPoint CoordinateMap::locate(double x) const {
  if (!(x > 0.0) || !std::isfinite(x)) throw DomainError("locate: x must be positive and finite");
  const double rs = r_star();
  const RadialPoint hat = locate_hat(x / rs);
  return {hat.r * rs, hat.gap * rs};
}

double CoordinateMap::f_squared(const RadialPoint& p) const {
  const double rs = r_star();
  const double rhat = p.r / rs;
  const double ghat = p.gap / rs;
  return (kappa_hat_ + ghat) * ghat / (rhat * rhat);
}

double CoordinateMap::f(const RadialPoint& p) const { return std::sqrt(f_squared(p)); }

RadialPoint CoordinateMap::point_of_chart(double t) const {
  const double rs = r_star();
  if (t >= 0.0) {
    const double e = std::exp(-t);
    return {rs / (1.0 + e), rs * e / (1.0 + e)};
  }
  const double e = std::exp(t);
  return {rs * e / (1.0 + e), rs / (1.0 + e)};
}

double CoordinateMap::chart_of_point(const RadialPoint& p) const { return std::log(p.r / p.gap); }

double CoordinateMap::chart_of_x(double x) const {
  if (!(x > 0.0) || !std::isfinite(x)) throw DomainError("chart_of_x: x must be positive and finite");
  const double xh = x / r_star();
  if (xh <= xhat_switch_) return chart_of_point(locate(x));
  const double sigma = solve_log_gap(xh);
  return std::log(-std::expm1(sigma)) - sigma;
}

double CoordinateMap::dx_dchart(const RadialPoint& p) const {
  const double rs = r_star();
  const double rhat = p.r / rs;
  return rs * rhat * rhat * rhat / (kappa_hat_ + p.gap / rs);
}

TailConstants CoordinateMap::tail_constants() const {
  const double rs = r_star();
  TailConstants tc;
  if (extremal()) {
    tc.extremal = true;
    tc.rate = 0.0;
    tc.prefactor = rs * rs;
    return tc;
  }
  tc.rate = kappa_hat_ / rs;
  tc.prefactor = rs * std::exp(kappa_hat_ + rho_ * rho_ * std::log1p(-1.0 / rho_));
  return tc;
}

ExponentFits CoordinateMap::verify_exponents() const {
  const double rs = r_star();
  ExponentFits fits;

  std::vector<std::pair<double, double>> small;
  for (double xh : numerics::log_grid(1e-12, 1e-8, 9)) {
    const double x = xh * rs;
    small.emplace_back(x, r_of_x(x));
  }
  fits.small_x = numerics::fit_power_law(small);

  std::vector<std::pair<double, double>> tail;
  if (extremal()) {
    for (double xh : numerics::log_grid(1e4, 1e6, 9)) {
      const double x = xh * rs;
      tail.emplace_back(x, locate(x).gap);
    }
    fits.tail = numerics::fit_power_law(tail);
  } else {
    for (double xh : numerics::linear_grid(2.0, 4.0, 9)) {
      const double x = xh * rs;
      tail.emplace_back(x, std::log(locate(x).gap));
    }
    fits.tail = numerics::fit_line(tail);
  }
  return fits;
}

}  // namespace rwn
