#include "rwn/radial_operator.hpp"

#include <cmath>
#include <limits>
#include <numbers>

namespace rwn {

namespace {

const numerics::ToleranceSpec kPhaseTolerance{1e-11, 1e-15, 200};

double integrate_signed(const numerics::ScalarFn& fn, double lo, double hi, std::optional<double> zero_hint) {
  if (lo == hi) return 0.0;
  const double sign = lo < hi ? 1.0 : -1.0;
  const double a = std::min(lo, hi);
  const double b = std::max(lo, hi);
  numerics::EndpointHint hint;
  if (a == 0.0) hint.left_exponent = zero_hint;
  return sign * numerics::integrate_adaptive(fn, a, b, kPhaseTolerance, hint);
}

}  // namespace

void RadialMode::validate() const {
  if (k == 0) throw DomainError("RadialMode: k must be nonzero");
  if (!(fa >= 0.0) || !std::isfinite(fa)) throw DomainError("RadialMode: fa must be finite and >= 0");
  if (theta && !(*theta >= 0.0 && *theta < std::numbers::pi)) {
    throw DomainError("RadialMode: theta must lie in [0, pi)");
  }
}

RadialOperator::RadialOperator(const RadialMode& mode) : mode_(mode), map_((mode.validate(), mode.spacetime), mode.rescale) {
  const double alpha = mode.spacetime.constants.alpha_s;
  d_prefactor_ = mode.spacetime.nucleus.Z * alpha * alpha / (4.0 * std::numbers::pi * map_.length_unit());
}

double RadialOperator::b_limit() const {
  return mode_.spacetime.nucleus.Z * mode_.spacetime.constants.alpha_s / map_.r_star();
}

CoefficientSample RadialOperator::coefficients(double x) const {
  if (!(x > 0.0)) throw DomainError("coefficients: x must be positive");
  auto s = coefficients_at(map_.locate(x));
  s.x = x;
  return s;
}

CoefficientSample RadialOperator::coefficients_at(const RadialPoint& p) const {
  CoefficientSample s;
  s.x = std::numeric_limits<double>::quiet_NaN();
  if (mode_.free_comparison) {
    s.b = b_limit();
    s.log_abs_d = -std::numeric_limits<double>::infinity();
    return s;
  }
  const double rs = map_.r_star();
  const double rhat = p.r / rs;
  const double ghat = p.gap / rs;
  const double log_f = 0.5 * (std::log(map_.kappa_hat() + ghat) + std::log(ghat)) - std::log(rhat);
  s.a = std::exp(log_f);
  s.b = mode_.spacetime.nucleus.Z * mode_.spacetime.constants.alpha_s / p.r;
  s.c = s.a / p.r;
  s.log_abs_d = std::log(d_prefactor_) + log_f - 2.0 * std::log(p.r);
  s.d = std::exp(s.log_abs_d);
  return s;
}

double RadialOperator::kappa_tilde(const CoefficientSample& s) const {
  const double kc = mode_.k * s.c;
  if (mode_.fa == 0.0) return kc;
  return kc - mode_.fa * s.d;
}

RealMatrix2 RadialOperator::potential_matrix(double x) const {
  const auto s = coefficients(x);
  const double ma = mass() * s.a;
  const double kt = kappa_tilde(s);
  return {{{ma - s.b, kt}, {kt, -ma - s.b}}};
}

ComplexMatrix2 RadialOperator::generator(Complex lambda, const CoefficientSample& s) const {
  const double ma = mass() * s.a;
  const double kt = kappa_tilde(s);
  return {{{Complex(-kt), lambda + ma + s.b}, {ma - s.b - lambda, Complex(kt)}}};
}

SpinorState RadialOperator::ode_rhs(Complex lambda, double x, const SpinorState& g) const {
  const auto m = generator(lambda, coefficients(x));
  return {m[0][0] * g.g1 + m[0][1] * g.g2, m[1][0] * g.g1 + m[1][1] * g.g2};
}

ComplexMatrix2 RadialOperator::chart_generator(Complex lambda, const RadialPoint& p) const {
  const auto s = coefficients_at(p);
  const double w = map_.dx_dchart(p);
  double kt = mode_.k * s.c * w;
  if (mode_.fa > 0.0) kt -= mode_.fa * std::exp(s.log_abs_d + std::log(w));
  const double ma = mass() * s.a;
  return {{{Complex(-kt), (lambda + ma + s.b) * w}, {(ma - s.b - lambda) * w, Complex(kt)}}};
}

double RadialOperator::coupling(const RadialPoint& p) const {
  if (mode_.free_comparison) return 0.0;
  const auto s = coefficients_at(p);
  const double za = mode_.spacetime.nucleus.Z * mode_.spacetime.constants.alpha_s;
  const double db = za * p.gap / (p.r * map_.r_star());
  double kt = std::abs(mode_.k * s.c);
  if (mode_.fa > 0.0) kt = std::abs(mode_.k * s.c - mode_.fa * s.d);
  return std::max({kt, mass() * s.a, db});
}

double RadialOperator::coupling_below(double level) const {
  if (!(level > 0.0)) throw DomainError("coupling_below: level must be positive");
  const double rs = map_.r_star();
  auto excess = [&](double log_x) {
    const double c = coupling(map_.locate(std::exp(log_x)));
    return c > 0.0 ? std::log(c) - std::log(level) : -1e3;
  };
  double lo = std::log(rs);
  if (excess(lo) <= 0.0) return rs;
  double hi = lo + 1.0;
  while (excess(hi) > 0.0) {
    lo = hi;
    hi += 2.0;
    if (hi > std::log(rs) + 93.0) throw NoConvergence("coupling_below: level not reached");
  }
  return std::exp(numerics::root_find_bracketed(excess, lo, hi, {1e-6, 0.0, 200}));
}

double RadialOperator::nu(double x) const {
  if (!(x >= 0.0)) throw DomainError("nu: x must be >= 0");
  auto fn = [this](double y) { return mode_.k * coefficients(y).c; };
  return integrate_signed(fn, 0.0, x, -2.0 / 3.0);
}

double RadialOperator::xi(double x, double base) const {
  if (!(x >= 0.0)) throw DomainError("xi: x must be >= 0");
  if (mode_.fa > 0.0 && !(base > 0.0)) throw DomainError("xi: fa > 0 needs a positive base point");
  const double upper = std::min(x, map_.r_star());
  auto fn = [this](double y) { return kappa_tilde(coefficients(y)); };
  return -integrate_signed(fn, base, upper, -2.0 / 3.0);
}

double RadialOperator::eta(double x, std::optional<double> anchor) const {
  const double a = anchor.value_or(map_.r_star());
  if (!(x >= 0.0)) throw DomainError("eta: x must be >= 0");
  if (!(a > 0.0)) throw DomainError("eta: anchor must be positive");
  if (mode_.free_comparison) return 0.0;
  const double za = mode_.spacetime.nucleus.Z * mode_.spacetime.constants.alpha_s;
  const double rs = map_.r_star();
  // -b + b_limit written through the gap so the tail does not cancel.
  auto fn = [&](double y) {
    const auto p = map_.locate(y);
    return -za * p.gap / (p.r * rs);
  };
  return integrate_signed(fn, a, x, -1.0 / 3.0);
}

Complex boundary_form(const SpinorState& g, const SpinorState& h) {
  return g.g2 * std::conj(h.g1) - g.g1 * std::conj(h.g2);
}

NormPair norm_equivalence_check(const CoordinateMap& map, const RadialSampleFn& g, double r_lo, double r_hi,
                                const numerics::ToleranceSpec& tol) {
  if (!(r_lo > 0.0) || !(r_hi < map.r_star()) || !(r_lo < r_hi)) {
    throw DomainError("norm_equivalence_check: support must lie inside (0, r_star)");
  }
  auto density = [&](double r) {
    const auto v = g(r);
    return std::norm(v.g1) + std::norm(v.g2);
  };
  NormPair out;
  out.r_integral = numerics::integrate_adaptive(
      [&](double r) { return density(r) / map.f_squared(map.point_of_r(r)); }, r_lo, r_hi, tol);
  out.x_integral = numerics::integrate_adaptive([&](double x) { return density(map.r_of_x(x)); },
                                                map.x_of_r(r_lo), map.x_of_r(r_hi), tol);
  return out;
}

}  // namespace rwn
