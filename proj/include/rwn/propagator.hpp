#pragma once

#include <functional>

#include "rwn/radial_operator.hpp"

namespace rwn {

// g = exp(log_scale) * v with |v| = 1. The phase stays in v.
struct LogSpinor {
  std::array<Complex, 2> v{Complex(1.0), Complex(0.0)};
  double log_scale = 0.0;

  static LogSpinor from(const SpinorState& g);
  [[nodiscard]] SpinorState value() const;  // may overflow
};

// Generator of d/ds g = G(s) g and ln(dx/ds), the weight turning ds into dx.
struct ChartSample {
  ComplexMatrix2 generator;
  double log_weight = 0.0;
};
using ChartField = std::function<ChartSample(double s)>;

struct PropagatorOptions {
  double rel_tol = 1e-10;
  double initial_step = 1e-2;
  double max_step = 1.0;
  long max_steps = 5'000'000;
};

struct StepRecord {
  double s = 0.0;
  LogSpinor state;
  double log_weight = 0.0;
};

struct Propagation {
  LogSpinor end;
  double log_mass = -std::numeric_limits<double>::infinity();  // ln of int |g|^2 dx over the path
};

// Fourth-order Magnus integrator with exact 2x2 exponentials, renormalized
// after every step so that growth like r^(1e18) stays representable.
// Step size from step doubling on the log scale and the direction.
class MagnusPropagator {
 public:
  MagnusPropagator(ChartField field, PropagatorOptions options = {});

  using Observer = std::function<void(const StepRecord&)>;
  // Works in either direction; the observer sees every accepted node including s0.
  Propagation propagate(double s0, double s1, const LogSpinor& y0, const Observer& observer = {}) const;

 private:
  [[nodiscard]] LogSpinor step(double s, double h, const LogSpinor& y) const;

  ChartField field_;
  PropagatorOptions opt_;
};

// Field for the log-odds chart t of a radial operator at spectral parameter lambda.
[[nodiscard]] ChartField chart_field(const RadialOperator& op, Complex lambda);
// Field in a local offset y with x = base + y; the coefficients are evaluated
// at locate(base + y), so windows far out in x stay resolvable.
[[nodiscard]] ChartField offset_field(const RadialOperator& op, Complex lambda, double base);

// ln(exp(a) + exp(b)).
[[nodiscard]] double log_add(double a, double b);

}  // namespace rwn
