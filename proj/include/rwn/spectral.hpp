#pragma once

#include <array>
#include <optional>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "rwn/propagator.hpp"
#include "rwn/radial_operator.hpp"

namespace rwn {

enum class Endpoint { Zero, Infinity };
enum class EndpointClass { LimitPoint, LimitCircle };
enum class Verdict { NoEigenvalueEvidence, Inconclusive };

std::string_view to_string(Endpoint e);
std::string_view to_string(EndpointClass c);
std::string_view to_string(Verdict v);

struct EndpointReport {
  Endpoint endpoint = Endpoint::Zero;
  EndpointClass classification = EndpointClass::LimitPoint;
  std::optional<double> exponent_p;  // Zero only
  // Square integrability near the endpoint of the recessive and the dominant solution.
  std::array<bool, 2> l2_verdicts{false, false};
  // Fitted slopes of ln(window mass): against t near Zero, against x near Infinity.
  // Empty for the closed-form Zero classification.
  std::optional<std::array<double, 2>> mass_slopes;
};

struct ThresholdReport {
  double fa_crit = 0.0;
  double p_of_fa = 0.0;  // p = p_of_fa * fa
};

struct DeficiencyReport {
  int n_plus = 0;
  int n_minus = 0;
  // Numerical evidence at lambda = +i (map units).
  EndpointReport zero;
  EndpointReport infinity;
};

struct WeylResidual {
  int n = 0;
  double norm = 0.0;        // ||f_n|| by quadrature
  double analytic = 0.0;    // reduced form
  double quadrature = 0.0;  // operator applied pointwise
};

struct EigenScanReport {
  std::vector<double> lambda_grid;
  std::vector<double> mismatch;  // mean log2(doubling ratio) - 1; 0 for a bounded oscillatory tail
  std::vector<std::array<double, 3>> ratios;
  std::vector<double> roots;
  std::vector<double> window_starts;  // X_j with windows [X_j, 2 X_j]
};

struct CandidateEvidence {
  double lambda_star = 0.0;
  std::vector<double> window_ratios;
  std::vector<double> window_starts;
  std::optional<std::pair<double, double>> uv_limits;
  double conservation_drift = 0.0;  // max | |u|^2 - |v|^2 - initial | / (|u|^2 + |v|^2) at the match point
  double match_point = 0.0;
  Verdict verdict = Verdict::Inconclusive;
};

struct VariationOptions {
  // Replaces the boundary-admissible solution at the match point (test hook).
  std::optional<SpinorState> initial;
};

[[nodiscard]] double local_exponent(const RadialMode& mode);
[[nodiscard]] EndpointReport classify_zero_endpoint(const RadialMode& mode);
[[nodiscard]] EndpointReport classify_infinity_endpoint(const RadialMode& mode);
[[nodiscard]] ThresholdReport esa_threshold(const Spacetime& st);
[[nodiscard]] DeficiencyReport deficiency_indices(const RadialMode& mode);

// lambda in map units. fa = 0 uses x e^{-x/2n} profiles on (0, inf);
// fa > 0 uses e^{-(x-base)/2n} profiles on [base, inf), base = max(r_star, x where the
// coupling falls to 1).
[[nodiscard]] WeylResidual weyl_residual(const RadialMode& mode, double lambda, int n);

[[nodiscard]] double candidate_eigenvalue(const Spacetime& st, Rescale rescale = Rescale::ByInnerRadius);
// n points on [-5 b, 5 b] (b = Z alpha_s / r_star) with the grid point nearest lambda* moved onto it.
[[nodiscard]] std::vector<double> default_lambda_grid(const RadialMode& mode, int n = 101);
[[nodiscard]] EigenScanReport eigen_scan(const RadialMode& mode, std::span<const double> lambda_grid, int jobs = 1);
[[nodiscard]] CandidateEvidence variation_limits(const RadialMode& mode, const VariationOptions& options = {});
// Im z != 0; m(conj z) = conj m(z). Anchored at zero through theta for fa = 0,
// at the point where the coupling falls to 1 (map units) for fa >= fa_crit.
[[nodiscard]] Complex m_function(const RadialMode& mode, Complex z);

// Runs fn(i) for i in [0, n) on up to jobs threads; rethrows the first failure.
void parallel_for(std::size_t n, int jobs, const std::function<void(std::size_t)>& fn);

}  // namespace rwn
