#include <cmath>
#include <numbers>

#include "doctest.h"
#include "rwn/spectral.hpp"

using namespace rwn;

namespace {

constexpr double kAlpha = 1.0 / 137.036;

Spacetime sub_st(int Z = 1) { return build_spacetime({Z, 2.0e18 * Z}); }
Spacetime ext_st(int Z = 1) { return build_spacetime({Z, extremal_mass_number(Z)}); }

RadialMode mode_of(const Spacetime& st, double fa, std::optional<double> theta = 0.0) {
  RadialMode m;
  m.spacetime = st;
  m.fa = fa;
  m.theta = theta;
  return m;
}

double log_slope(const std::vector<double>& x, const std::vector<double>& y) {
  std::vector<std::pair<double, double>> pts;
  for (std::size_t i = 0; i < x.size(); ++i) pts.emplace_back(x[i], y[i]);
  return numerics::fit_power_law(pts).slope;
}

}  // namespace

TEST_CASE("threshold closed form") {
  const auto rep = esa_threshold(sub_st());
  CHECK(rep.p_of_fa == doctest::Approx(1.1724966498107e18).epsilon(1e-12));
  CHECK(rep.fa_crit == doctest::Approx(1.2793213526386e-18).epsilon(1e-12));
  CHECK(rep.p_of_fa * rep.fa_crit == doctest::Approx(1.5).epsilon(1e-15));
  CHECK(std::abs(1.3e-18 - rep.fa_crit) / rep.fa_crit < 0.02);
  for (const auto& st : {sub_st(10), ext_st(), ext_st(92)}) {
    CHECK(esa_threshold(st).fa_crit == doctest::Approx(rep.fa_crit).epsilon(1e-12));
  }
  CHECK_THROWS_AS((void)esa_threshold(build_spacetime({1, 1.0})), DomainError);
}

TEST_CASE("exponent is independent of Z") {
  const double p1 = local_exponent(mode_of(sub_st(1), 1.0));
  CHECK(p1 == doctest::Approx(1.1724966498107e18).epsilon(1e-12));
  for (int Z : {10, 92}) {
    CHECK(std::abs(local_exponent(mode_of(sub_st(Z), 1.0)) - p1) <= 1e-12 * p1);
    CHECK(std::abs(local_exponent(mode_of(ext_st(Z), 1.0)) - p1) <= 1e-12 * p1);
  }
}

TEST_CASE("zero endpoint flips at the threshold") {
  const auto st = sub_st();
  const double crit = esa_threshold(st).fa_crit;
  auto lc = [&](double fa) { return classify_zero_endpoint(mode_of(st, fa)).classification == EndpointClass::LimitCircle; };
  CHECK(lc(0.0));
  CHECK(lc(0.5 * crit));
  CHECK_FALSE(lc(1.0));
  CHECK_FALSE(lc(2.0 * crit));
  double lo = 0.0, hi = 1e-17;
  while (hi - lo > 1e-13 * hi) {
    const double mid = 0.5 * (lo + hi);
    (lc(mid) ? lo : hi) = mid;
  }
  CHECK(std::abs(hi - crit) <= 1e-10 * crit);
  const auto rep = classify_zero_endpoint(mode_of(st, 1.0));
  REQUIRE(rep.exponent_p);
  CHECK(rep.l2_verdicts[0]);
  CHECK_FALSE(rep.l2_verdicts[1]);
}

TEST_CASE("infinity endpoint is limit point") {
  for (const auto& st : {sub_st(), ext_st()}) {
    for (double fa : {0.0, 1.0}) {
      const auto rep = classify_infinity_endpoint(mode_of(st, fa));
      CHECK(rep.endpoint == Endpoint::Infinity);
      CHECK(rep.classification == EndpointClass::LimitPoint);
      CHECK(rep.l2_verdicts[0]);
      CHECK_FALSE(rep.l2_verdicts[1]);
    }
  }
}

TEST_CASE("deficiency indices") {
  for (const auto& st : {sub_st(), ext_st()}) {
    const auto d0 = deficiency_indices(mode_of(st, 0.0));
    CHECK(d0.n_plus == 1);
    CHECK(d0.n_minus == 1);
    CHECK(d0.zero.classification == EndpointClass::LimitCircle);
    const auto d1 = deficiency_indices(mode_of(st, 1.0));
    CHECK(d1.n_plus == 0);
    CHECK(d1.n_minus == 0);
    // exactly one admissible solution at zero
    CHECK(d1.zero.l2_verdicts[0]);
    CHECK_FALSE(d1.zero.l2_verdicts[1]);
  }
}

TEST_CASE("theta family is symmetric") {
  for (double theta : {0.0, 0.3, std::numbers::pi / 4, 2.0}) {
    const SpinorState g{Complex(std::cos(theta)), Complex(-std::sin(theta))};
    const SpinorState h{Complex(2.5 * std::cos(theta)), Complex(-2.5 * std::sin(theta))};
    CHECK(std::abs(g.g1 * std::sin(theta) + g.g2 * std::cos(theta)) < 1e-15);
    CHECK(std::abs(boundary_form(g, h)) < 1e-15);
  }
}

TEST_CASE("weyl sequence") {
  const double lam = -0.5 * kAlpha;
  for (double fa : {0.0, 1.0}) {
    std::vector<double> ns, res;
    double prev = INFINITY;
    for (int n : {4, 16, 64, 256}) {
      const auto w = weyl_residual(mode_of(sub_st(), fa), lam, n);
      CHECK(w.norm == doctest::Approx(1.0).epsilon(1e-10));
      CHECK(std::abs(w.analytic - w.quadrature) <= 1e-8 * w.analytic);
      CHECK(w.quadrature < prev);
      prev = w.quadrature;
      ns.push_back(n);
      res.push_back(w.quadrature);
    }
    if (fa == 0.0) {
      CHECK(log_slope(ns, res) == doctest::Approx(-1.0).epsilon(0.1));
      CHECK(res.back() == doctest::Approx(1.0 / 512.0).epsilon(1e-3));
    } else {
      CHECK(log_slope(ns, res) == doctest::Approx(-0.5).epsilon(0.1));
    }
  }
}

TEST_CASE("weyl residual is theta independent") {
  const auto a = weyl_residual(mode_of(sub_st(), 0.0, 0.0), 0.01, 16);
  const auto b = weyl_residual(mode_of(sub_st(), 0.0, std::numbers::pi / 4), 0.01, 16);
  CHECK(a.quadrature == b.quadrature);
  CHECK(a.analytic == b.analytic);
}

TEST_CASE("weyl residual extremal") {
  std::vector<double> ns, res;
  for (int n : {4, 16, 64, 256}) {
    const auto w = weyl_residual(mode_of(ext_st(), 0.0), 0.0, n);
    CHECK(std::abs(w.analytic - w.quadrature) <= 1e-8 * w.analytic);
    ns.push_back(n);
    res.push_back(w.quadrature);
  }
  CHECK(log_slope(ns, res) == doctest::Approx(-1.0).epsilon(0.1));
}

TEST_CASE("candidate eigenvalue") {
  CHECK(candidate_eigenvalue(sub_st()) == doctest::Approx(-kAlpha).epsilon(1e-12));
  CHECK(candidate_eigenvalue(sub_st(2)) == doctest::Approx(-2.0 * kAlpha).epsilon(1e-12));
  CHECK(candidate_eigenvalue(ext_st(), Rescale::None) == doctest::Approx(-2.0190921850374e21).epsilon(1e-12));
  CHECK_THROWS_AS((void)candidate_eigenvalue(build_spacetime({1, 1.0})), DomainError);
}

TEST_CASE("default grid") {
  const auto grid = default_lambda_grid(mode_of(sub_st(), 0.0));
  REQUIRE(grid.size() == 101);
  CHECK(grid.front() == doctest::Approx(-5.0 * kAlpha));
  CHECK(grid.back() == doctest::Approx(5.0 * kAlpha));
  CHECK(std::count(grid.begin(), grid.end(), candidate_eigenvalue(sub_st())) == 1);
}

TEST_CASE("eigen scan finds no roots") {
  const auto st = sub_st();
  struct Case {
    double fa;
    std::optional<double> theta;
  };
  for (const auto& c : {Case{0.0, 0.0}, Case{0.0, std::numbers::pi / 4}, Case{1.0, std::nullopt}}) {
    const auto mode = mode_of(st, c.fa, c.theta);
    const auto grid = default_lambda_grid(mode);
    const auto rep = eigen_scan(mode, grid, 4);
    CHECK(rep.roots.empty());
    REQUIRE(rep.ratios.size() == grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
      for (double r : rep.ratios[i]) CHECK(r == doctest::Approx(2.0).epsilon(0.05));
      CHECK(std::abs(rep.mismatch[i]) < 0.05);
    }
  }
}

TEST_CASE("eigen scan extremal away from the candidate") {
  const auto mode = mode_of(ext_st(), 1.0, std::nullopt);
  const double b = -candidate_eigenvalue(ext_st());
  std::vector<double> grid;
  for (double s : {-5.0, -3.0, -1.5, -0.5, 0.5, 2.0, 5.0}) grid.push_back(-b + s * b);
  const auto rep = eigen_scan(mode, grid, 2);
  CHECK(rep.roots.empty());
}

TEST_CASE("eigen scan preconditions") {
  const auto st = sub_st();
  const std::vector<double> grid{0.0};
  CHECK_THROWS_AS((void)eigen_scan(mode_of(st, 0.0, std::nullopt), grid), DomainError);
  CHECK_THROWS_AS((void)eigen_scan(mode_of(st, 0.5 * esa_threshold(st).fa_crit), grid), DomainError);
}

TEST_CASE("eigen scan is deterministic across jobs") {
  const auto mode = mode_of(sub_st(), 0.0);
  const auto grid = default_lambda_grid(mode, 21);
  const auto a = eigen_scan(mode, grid, 1);
  const auto b = eigen_scan(mode, grid, 3);
  CHECK(a.mismatch == b.mismatch);
  CHECK(a.ratios == b.ratios);
  CHECK(a.window_starts == b.window_starts);
}

TEST_CASE("variation limits at the candidate") {
  const auto ev = variation_limits(mode_of(sub_st(), 0.0));
  CHECK(ev.lambda_star == doctest::Approx(-kAlpha));
  REQUIRE(ev.window_ratios.size() >= 3);
  for (double r : ev.window_ratios) CHECK(r == doctest::Approx(2.0).epsilon(0.05));
  CHECK(ev.conservation_drift <= 1e-8);
  REQUIRE(ev.uv_limits);
  CHECK(ev.uv_limits->first > 0.0);
  CHECK(ev.verdict == Verdict::NoEigenvalueEvidence);

  const auto ev1 = variation_limits(mode_of(sub_st(), 1.0, std::nullopt));
  CHECK(ev1.conservation_drift <= 1e-8);
  CHECK(ev1.verdict == Verdict::NoEigenvalueEvidence);
}

TEST_CASE("variation limits without coupling") {
  auto mode = mode_of(sub_st(), 0.0);
  mode.free_comparison = true;
  VariationOptions opt;
  opt.initial = SpinorState{Complex(0.7, 0.1), Complex(-0.2, 0.4)};
  const auto ev = variation_limits(mode, opt);
  REQUIRE(ev.uv_limits);
  // the state enters with unit norm
  const double scale = 2.0 * std::sqrt(0.7);
  const double u = std::abs(Complex(0.7, 0.1) + Complex(0.0, 1.0) * Complex(-0.2, 0.4)) / scale;
  const double v = std::abs(Complex(0.7, 0.1) - Complex(0.0, 1.0) * Complex(-0.2, 0.4)) / scale;
  CHECK(ev.uv_limits->first == doctest::Approx(u).epsilon(1e-14));
  CHECK(ev.uv_limits->second == doctest::Approx(v).epsilon(1e-14));
  CHECK(ev.conservation_drift <= 1e-14);
}

TEST_CASE("variation limits extremal") {
  const auto ev = variation_limits(mode_of(ext_st(), 0.0));
  CHECK(ev.verdict == Verdict::Inconclusive);
  CHECK_FALSE(ev.window_ratios.empty());
  const auto ev1 = variation_limits(mode_of(ext_st(), 1.0, std::nullopt));
  CHECK(ev1.verdict == Verdict::Inconclusive);
}

TEST_CASE("m function herglotz") {
  for (double fa : {0.0, 1.0}) {
    const auto mode = mode_of(sub_st(), fa, fa == 0.0 ? std::optional<double>(0.0) : std::nullopt);
    for (double lam : numerics::linear_grid(-5.0 * kAlpha, 5.0 * kAlpha, 21)) {
      const Complex m = m_function(mode, Complex(lam, 1e-3 * kAlpha));
      CHECK(m.imag() > 0.0);
    }
  }
  CHECK(m_function(mode_of(ext_st(), 0.0), Complex(0.0, 1e-3 * kAlpha)).imag() > 0.0);
}

TEST_CASE("m function free comparison") {
  for (double theta : {0.0, 1.0}) {
    auto mode = mode_of(sub_st(), 0.0, theta);
    mode.free_comparison = true;
    for (const Complex z : {Complex(0.0, 1e-3), Complex(-kAlpha, 0.5), Complex(0.03, 2.0)}) {
      const Complex m = m_function(mode, z);
      CHECK(std::abs(m - Complex(0.0, 1.0)) < 1e-8);
    }
  }
}

TEST_CASE("m function conjugation") {
  const auto mode = mode_of(sub_st(), 0.0, 0.4);
  const Complex z(0.003, 2e-3);
  const Complex a = m_function(mode, z);
  const Complex b = m_function(mode, std::conj(z));
  CHECK(std::abs(b - std::conj(a)) <= 1e-8 * std::abs(a));
  CHECK_THROWS_AS((void)m_function(mode, Complex(0.1, 0.0)), DomainError);
}

TEST_CASE("parallel_for") {
  std::vector<int> out(50, 0);
  parallel_for(out.size(), 4, [&](std::size_t i) { out[i] = int(i * i); });
  for (std::size_t i = 0; i < out.size(); ++i) CHECK(out[i] == int(i * i));
  CHECK_THROWS_AS(parallel_for(10, 3, [](std::size_t i) { if (i == 7) throw NoConvergence("x"); }), NoConvergence);
}

TEST_CASE("weyl residual refuses unresolvable oscillation") {
  CHECK_THROWS_AS((void)weyl_residual(mode_of(sub_st(), 0.0), 1e7, 4), NoConvergence);
}
