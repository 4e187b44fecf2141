#include <cmath>
#include <random>

#include "doctest.h"
#include "rwn/coordinates.hpp"

using namespace rwn;

namespace {

Spacetime sub() { return build_spacetime({1, 2.0e18}); }
Spacetime ext() { return build_spacetime({1, extremal_mass_number(1)}); }

// Plain trapezoid-free oracle: composite Simpson on dr / f^2 in raw units.
double simpson_x(const Spacetime& st, double r) {
  const int n = 20000;
  const double h = r / n;
  double sum = 0.0;
  for (int i = 0; i <= n; ++i) {
    const double ri = i * h;
    const double g = i == 0 ? 0.0 : 1.0 / f_squared(st, ri);
    const double w = (i == 0 || i == n) ? 1.0 : (i % 2 ? 4.0 : 2.0);
    sum += w * g;
  }
  return sum * h / 3.0;
}

}  // namespace

TEST_CASE("naked sector has no interior chart") {
  CHECK_THROWS_AS(CoordinateMap(build_spacetime({1, 1.0})), DomainError);
}

TEST_CASE("closed form against reference values") {
  const CoordinateMap map(sub());
  CHECK(map.r_star() == 1.0);
  CHECK(map.x_of_r(0.5) == doctest::Approx(0.006338870219040089).epsilon(1e-12));
  CHECK(map.r_of_x(0.006338870219040089) == doctest::Approx(0.5).epsilon(1e-9));

  const auto e = ext();
  const CoordinateMap raw(e, Rescale::None);
  const double r0 = *e.r0();
  CHECK(raw.x_of_r(r0 / 2.0) / r0 == doctest::Approx(2.0 + 2.0 * std::log(0.5) - 0.5).epsilon(1e-12));
  CHECK(raw.x_of_r(r0 / 2.0) / r0 == doctest::Approx(0.11370563888010938).epsilon(1e-12));

  CHECK_THROWS_AS((void)map.x_of_r(0.0), DomainError);
  CHECK_THROWS_AS((void)map.x_of_r(1.0), DomainError);
  CHECK_THROWS_AS((void)map.locate(-1.0), DomainError);
}

TEST_CASE("closed form against direct quadrature of dr / f^2") {
  const auto st = sub();
  const CoordinateMap raw(st, Rescale::None);
  for (double frac : {0.1, 0.3, 0.5, 0.7}) {
    const double r = frac * *st.r_minus;
    CHECK(raw.x_of_r(r) == doctest::Approx(simpson_x(st, r)).epsilon(1e-9));
  }
}

TEST_CASE("strict monotonicity") {
  for (const auto& st : {sub(), ext()}) {
    const CoordinateMap map(st);
    std::mt19937 gen(5);
    std::uniform_real_distribution<double> u(1e-6, 1.0 - 1e-6);
    for (int i = 0; i < 500; ++i) {
      double a = u(gen), b = u(gen);
      if (a == b) continue;
      if (a > b) std::swap(a, b);
      CHECK(map.x_of_r(b) > map.x_of_r(a));
    }
  }
}

TEST_CASE("derivative identity dx/dr = 1/f^2") {
  for (const auto& st : {sub(), ext()}) {
    const CoordinateMap map(st);
    for (double r : numerics::linear_grid(0.05, 0.9, 18)) {
      const double h = 1e-4;
      auto x = [&](double v) { return map.x_of_r(v); };
      const double d = (x(r - 2 * h) - 8 * x(r - h) + 8 * x(r + h) - x(r + 2 * h)) / (12.0 * h);
      const double expect = 1.0 / map.f_squared(map.point_of_r(r));
      CHECK(d == doctest::Approx(expect).epsilon(1e-8));
    }
  }
}

TEST_CASE("rescaled map depends only on the horizon ratio") {
  const CoordinateMap a(build_spacetime({1, 2.0e18}));
  const CoordinateMap b(build_spacetime({10, 2.0e19}));
  CHECK(a.rho() == doctest::Approx(b.rho()).epsilon(1e-14));
  for (double r : numerics::linear_grid(0.01, 0.99, 99)) {
    CHECK(a.x_of_r(r) == doctest::Approx(b.x_of_r(r)).epsilon(1e-14));
  }
}

TEST_CASE("round trip over a log grid") {
  for (const auto& [st, xmax] : {std::pair{sub(), 60.0}, std::pair{ext(), 1e8}}) {
    const CoordinateMap map(st);
    for (double x : numerics::log_grid(1e-10, xmax, 1000)) {
      const double back = map.x_of_point(map.locate(x));
      CHECK(std::abs(back - x) <= 1e-12 * std::max(1.0, x));
    }
    for (double r : numerics::log_grid(1e-6, 0.999, 200)) {
      CHECK(map.r_of_x(map.x_of_r(r)) == doctest::Approx(r).epsilon(1e-12));
    }
  }
}

TEST_CASE("small-x inversion follows the cubic law") {
  const CoordinateMap map(sub());
  for (double x : {1e-15, 1e-12, 1e-9}) {
    CHECK(map.r_of_x(x) == doctest::Approx(std::cbrt(3.0 * map.rho() * x)).epsilon(1e-4));
  }
  const auto st = sub();
  const CoordinateMap raw(st, Rescale::None);
  const double x = 1e-12 * *st.r_minus;
  CHECK(raw.r_of_x(x) == doctest::Approx(std::cbrt(3.0 * *st.r_plus * *st.r_minus * x)).epsilon(1e-4));
}

TEST_CASE("log-odds chart") {
  const CoordinateMap map(sub());
  for (double t : {-30.0, -2.0, 0.0, 1.5, 40.0}) {
    const auto p = map.point_of_chart(t);
    CHECK(p.r + p.gap == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(map.chart_of_point(p) == doctest::Approx(t).epsilon(1e-13));
  }
  const double t = 0.3, h = 1e-5;
  const double d = (map.x_of_point(map.point_of_chart(t + h)) - map.x_of_point(map.point_of_chart(t - h))) / (2 * h);
  CHECK(d == doctest::Approx(map.dx_dchart(map.point_of_chart(t))).epsilon(1e-8));
}

TEST_CASE("tail constants") {
  const auto st = sub();
  const CoordinateMap map(st);
  const auto tc = map.tail_constants();
  CHECK_FALSE(tc.extremal);
  CHECK(tc.rate == doctest::Approx(10.140026351409888).epsilon(1e-12));
  for (double x : {3.0, 5.0, 10.0}) {
    CHECK(map.locate(x).gap == doctest::Approx(tc.prefactor * std::exp(-tc.rate * x)).epsilon(1e-10));
  }
  const CoordinateMap raw(st, Rescale::None);
  CHECK(raw.tail_constants().rate ==
        doctest::Approx((*st.r_plus - *st.r_minus) / (*st.r_minus * *st.r_minus)).epsilon(1e-12));

  const CoordinateMap em(ext());
  const auto te = em.tail_constants();
  CHECK(te.extremal);
  CHECK(te.prefactor == 1.0);
  for (double x : {1e5, 1e6, 1e7}) {
    CHECK(x * em.locate(x).gap == doctest::Approx(te.prefactor).epsilon(1e-3));
  }
}

TEST_CASE("fitted exponents") {
  const auto s = CoordinateMap(sub()).verify_exponents();
  CHECK(s.small_x.slope == doctest::Approx(1.0 / 3.0).epsilon(3e-3));
  CHECK(-s.tail.slope == doctest::Approx(10.140026351409888).epsilon(1e-6));
  const auto e = CoordinateMap(ext()).verify_exponents();
  CHECK(e.small_x.slope == doctest::Approx(1.0 / 3.0).epsilon(3e-3));
  CHECK(e.tail.slope == doctest::Approx(-1.0).epsilon(1e-3));
}
