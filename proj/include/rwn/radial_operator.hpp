#pragma once

#include <array>
#include <complex>
#include <functional>
#include <optional>
#include <utility>

#include "rwn/coordinates.hpp"

namespace rwn {

using Complex = std::complex<double>;

struct RadialMode {
  Spacetime spacetime;
  int k = -1;
  double fa = 0.0;
  std::optional<double> theta;
  Rescale rescale = Rescale::ByInnerRadius;
  // Replaces a, c, d by 0 and b by its horizon limit; used as a reference
  // system with plane-wave solutions.
  bool free_comparison = false;

  void validate() const;
};

struct SpinorState {
  Complex g1;
  Complex g2;
};

// Coefficients of the transformed operator at one point, map units.
// a = f is dimensionless; b, c, d carry the map length unit.
struct CoefficientSample {
  double x = 0.0;
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;
  double d = 0.0;          // may overflow to inf very close to r = 0
  double log_abs_d = 0.0;  // ln d, always finite for r > 0
};

using RealMatrix2 = std::array<std::array<double, 2>, 2>;
using ComplexMatrix2 = std::array<std::array<Complex, 2>, 2>;

class RadialOperator {
 public:
  explicit RadialOperator(const RadialMode& mode);

  [[nodiscard]] const RadialMode& mode() const { return mode_; }
  [[nodiscard]] const CoordinateMap& map() const { return map_; }
  // Mass in map units (the raw electron mass is 1 in Compton units).
  [[nodiscard]] double mass() const { return map_.length_unit(); }
  // Z alpha_s / r_star, the limit of b at the horizon.
  [[nodiscard]] double b_limit() const;
  [[nodiscard]] double lambda_star() const { return -b_limit(); }

  [[nodiscard]] CoefficientSample coefficients(double x) const;
  [[nodiscard]] CoefficientSample coefficients_at(const RadialPoint& p) const;
  // k c - fa d.
  [[nodiscard]] double kappa_tilde(const CoefficientSample& s) const;

  [[nodiscard]] RealMatrix2 potential_matrix(double x) const;
  // M with g' = M g; trace-free by construction.
  [[nodiscard]] ComplexMatrix2 generator(Complex lambda, const CoefficientSample& s) const;
  [[nodiscard]] SpinorState ode_rhs(Complex lambda, double x, const SpinorState& g) const;
  // (dx/dt) M in the log-odds chart t, assembled in log form so the
  // anomalous term stays finite arbitrarily close to r = 0.
  [[nodiscard]] ComplexMatrix2 chart_generator(Complex lambda, const RadialPoint& p) const;
  // Largest deviation from the horizon-limit system: max(|kappa~|, m a, |b - b_limit|).
  [[nodiscard]] double coupling(const RadialPoint& p) const;
  // Smallest x (to a factor 1 + 1e-6) beyond which coupling <= level; searched
  // geometrically from x = r_star. Throws NoConvergence past x = 1e40 r_star.
  [[nodiscard]] double coupling_below(double level) const;

  [[nodiscard]] double nu(double x) const;
  // For fa > 0 the integral of d diverges at 0, so xi is taken from base > 0.
  [[nodiscard]] double xi(double x, double base = 0.0) const;
  // Default anchor is x = 1 in units of r_star.
  [[nodiscard]] double eta(double x, std::optional<double> anchor = std::nullopt) const;

 private:
  RadialMode mode_;
  CoordinateMap map_;
  double d_prefactor_ = 0.0;  // Z alpha_s^2 / (4 pi L)
};

// g2(0) conj(h1(0)) - g1(0) conj(h2(0)).
[[nodiscard]] Complex boundary_form(const SpinorState& g, const SpinorState& h);

struct NormPair {
  double r_integral = 0.0;
  double x_integral = 0.0;
};

// I_r = int |g|^2 / f^2 dr and I_x = int |g|^2 dx over [r_lo, r_hi] in map units.
// Default tolerance sits above the ~1e-12 noise of r_of_x.
using RadialSampleFn = std::function<SpinorState(double r)>;
[[nodiscard]] NormPair norm_equivalence_check(const CoordinateMap& map, const RadialSampleFn& g,
                                              double r_lo, double r_hi,
                                              const numerics::ToleranceSpec& tol = {1e-10, 0.0, 200});

}  // namespace rwn
