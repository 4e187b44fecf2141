#include "rwn/propagator.hpp"

#include <cmath>
#include <limits>

namespace rwn {

namespace {

using Vec = std::array<Complex, 2>;
using Mat = ComplexMatrix2;

Mat add(const Mat& a, const Mat& b, Complex sa, Complex sb) {
  Mat m;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) m[i][j] = sa * a[i][j] + sb * b[i][j];
  return m;
}

Mat mul(const Mat& a, const Mat& b) {
  Mat m;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) m[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
  return m;
}

double norm(const Vec& v) { return std::sqrt(std::norm(v[0]) + std::norm(v[1])); }

// Segment integral of exp(l(s)) with l linear between the end values.
double log_segment(double l0, double l1, double h) {
  const double hi = std::max(l0, l1);
  if (hi == -std::numeric_limits<double>::infinity()) return hi;
  const double d = std::abs(l1 - l0);
  const double factor = d < 1e-8 ? 1.0 - 0.5 * d : -std::expm1(-d) / d;
  return hi + std::log(std::abs(h) * factor);
}

bool finite(const Vec& v) {
  return std::isfinite(v[0].real()) && std::isfinite(v[0].imag()) && std::isfinite(v[1].real()) &&
         std::isfinite(v[1].imag());
}

}  // namespace

double log_add(double a, double b) {
  if (a < b) std::swap(a, b);
  if (b == -std::numeric_limits<double>::infinity()) return a;
  return a + std::log1p(std::exp(b - a));
}

LogSpinor LogSpinor::from(const SpinorState& g) {
  LogSpinor y;
  const double n = std::sqrt(std::norm(g.g1) + std::norm(g.g2));
  if (!(n > 0.0) || !std::isfinite(n)) throw DomainError("LogSpinor: state must be finite and nonzero");
  y.v = {g.g1 / n, g.g2 / n};
  y.log_scale = std::log(n);
  return y;
}

SpinorState LogSpinor::value() const {
  const double s = std::exp(log_scale);
  return {v[0] * s, v[1] * s};
}

MagnusPropagator::MagnusPropagator(ChartField field, PropagatorOptions options)
    : field_(std::move(field)), opt_(options) {}

LogSpinor MagnusPropagator::step(double s, double h, const LogSpinor& y) const {
  static const double c = std::sqrt(3.0) / 6.0;
  const Mat a1 = field_(s + h * (0.5 - c)).generator;
  const Mat a2 = field_(s + h * (0.5 + c)).generator;
  const Mat comm = add(mul(a2, a1), mul(a1, a2), 1.0, -1.0);
  const Mat om = add(add(a1, a2, 0.5 * h, 0.5 * h), comm, 1.0, std::sqrt(3.0) / 12.0 * h * h);

  // Trace-free: om^2 = delta^2 I.
  const Complex alpha = 0.5 * (om[0][0] - om[1][1]);
  Complex delta = std::sqrt(alpha * alpha + om[0][1] * om[1][0]);
  if (delta.real() < 0.0) delta = -delta;
  const double dr = delta.real();
  const Complex ph = std::exp(Complex(0.0, delta.imag()));
  const Complex back = std::exp(Complex(-2.0 * dr, -delta.imag()));
  const Complex ch = 0.5 * (ph + back);  // cosh(delta) e^{-dr}
  Complex sh;                            // sinh(delta)/delta e^{-dr}
  if (std::abs(delta) < 1e-4) {
    const Complex d2 = delta * delta;
    sh = (1.0 + d2 / 6.0 + d2 * d2 / 120.0) * std::exp(-dr);
  } else {
    sh = 0.5 * (ph - back) / delta;
  }
  // Remove the mean of the diagonal, which is zero up to rounding.
  const Complex mid = 0.5 * (om[0][0] + om[1][1]);
  Mat e;
  e[0][0] = ch + sh * (om[0][0] - mid);
  e[1][1] = ch + sh * (om[1][1] - mid);
  e[0][1] = sh * om[0][1];
  e[1][0] = sh * om[1][0];

  Vec w = {e[0][0] * y.v[0] + e[0][1] * y.v[1], e[1][0] * y.v[0] + e[1][1] * y.v[1]};
  const double n = norm(w);
  LogSpinor out;
  if (!(n > 0.0) || !finite(w)) {
    out.log_scale = std::numeric_limits<double>::quiet_NaN();
    return out;
  }
  out.v = {w[0] / n, w[1] / n};
  out.log_scale = dr + std::log(n);  // increment only
  return out;
}

Propagation MagnusPropagator::propagate(double s0, double s1, const LogSpinor& y0, const Observer& observer) const {
  Propagation result;
  result.end = y0;
  if (s0 == s1) return result;
  const double dir = s1 > s0 ? 1.0 : -1.0;
  double s = s0;
  LogSpinor y = y0;
  double lw = field_(s).log_weight;
  double lm = 2.0 * y.log_scale + lw;
  if (observer) observer({s, y, lw});
  double h = std::min(opt_.initial_step, std::abs(s1 - s0));
  long steps = 0;
  const double floor = 64.0 * std::numeric_limits<double>::epsilon();
  while (dir * (s1 - s) > 0.0) {
    if (++steps > opt_.max_steps) throw NoConvergence("MagnusPropagator: step budget exhausted");
    h = std::min({h, opt_.max_step, std::abs(s1 - s)});
    const LogSpinor full = step(s, dir * h, y);
    const LogSpinor half = step(s, 0.5 * dir * h, y);
    const LogSpinor two = step(s + 0.5 * dir * h, 0.5 * dir * h, half);
    double err = std::numeric_limits<double>::infinity();
    // Increments are compared, not absolute scales, which may be as large as 1e20.
    const double inc = half.log_scale + two.log_scale;
    if (std::isfinite(full.log_scale) && std::isfinite(inc)) {
      const double growth = std::abs(inc);
      const double e_scale = std::abs(full.log_scale - inc) / std::max(1.0, growth);
      // A trace-free step growing by e^g contracts transverse errors by e^{-2g}.
      const double e_dir = std::sqrt(std::norm(full.v[0] - two.v[0]) + std::norm(full.v[1] - two.v[1])) /
                           std::max(1.0, growth);
      err = std::max(e_scale, e_dir) / opt_.rel_tol;
    }
    if (err <= 1.0) {
      const double s_next = std::abs(s1 - s) <= h ? s1 : s + dir * h;
      const double lw_next = field_(s_next).log_weight;
      LogSpinor y_next{two.v, y.log_scale + inc};
      const double lm_next = 2.0 * y_next.log_scale + lw_next;
      result.log_mass = log_add(result.log_mass, log_segment(lm, lm_next, s_next - s));
      s = s_next;
      y = y_next;
      lw = lw_next;
      lm = lm_next;
      if (observer) observer({s, y, lw});
      h *= std::min(4.0, std::max(1.0, 0.9 * std::pow(err, -0.2)));
    } else {
      h *= std::max(0.1, 0.9 * std::pow(err, -0.2));
      if (h <= floor * std::max(1.0, std::abs(s))) throw StepUnderflow("MagnusPropagator: step size underflow");
    }
  }
  result.end = y;
  return result;
}

ChartField chart_field(const RadialOperator& op, Complex lambda) {
  return [&op, lambda](double t) {
    const auto p = op.map().point_of_chart(t);
    return ChartSample{op.chart_generator(lambda, p), std::log(op.map().dx_dchart(p))};
  };
}

ChartField offset_field(const RadialOperator& op, Complex lambda, double base) {
  return [&op, lambda, base](double y) {
    const auto s = op.coefficients_at(op.map().locate(base + y));
    return ChartSample{op.generator(lambda, s), 0.0};
  };
}

}  // namespace rwn
