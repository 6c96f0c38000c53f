#include <doctest.h>

#include <cmath>

#include "jminv/numerics.hpp"

using namespace jminv;

TEST_SUITE("numerics") {
  TEST_CASE("brent finds a bracketed root") {
    const double r = brent_root([](double x) { return std::cos(x) - x; }, 0, 1);
    CHECK(r == doctest::Approx(0.7390851332151607).epsilon(1e-13));
    CHECK_THROWS_AS(brent_root([](double x) { return x * x + 1; }, -1, 1), InputError);
  }

  TEST_CASE("gauss-legendre integrates polynomials exactly") {
    const GaussRule g = gauss_legendre(8);
    CHECK(g.w.sum() == doctest::Approx(2.0).epsilon(1e-14));
    double s = 0;
    for (int i = 0; i < 8; ++i) s += g.w[i] * std::pow(g.x[i], 14);
    CHECK(s == doctest::Approx(2.0 / 15).epsilon(1e-13));
  }

  TEST_CASE("richardson derivative") {
    CHECK(derivative([](double x) { return std::sin(x); }, 0.3, 1e-3) ==
          doctest::Approx(std::cos(0.3)).epsilon(1e-11));
  }

  TEST_CASE("natural cubic spline") {
    std::vector<double> x, y;
    for (int i = 0; i <= 200; ++i) {
      x.push_back(i * 0.05);
      y.push_back(std::sin(x.back()));
    }
    const CubicSpline s(x, y);
    CHECK(s(2.5125) == doctest::Approx(std::sin(2.5125)).epsilon(1e-7));
    CHECK_THROWS_AS(CubicSpline({0, 1, 2}, {0, 1, 2}), InputError);
    CHECK_THROWS_AS(CubicSpline({0, 2, 1, 3}, {0, 1, 2, 3}), InputError);
  }

  TEST_CASE("damped newton solves a nonlinear pair") {
    auto F = [](const Eigen::VectorXd& x) {
      Eigen::VectorXd r(2);
      r << x[0] * x[0] + x[1] * x[1] - 4, std::exp(x[0]) + x[1] - 1;
      return r;
    };
    Eigen::VectorXd x0(2);
    x0 << 1, -1.5;
    const NewtonResult res = damped_newton(F, x0, [](const Eigen::VectorXd&) { return true; });
    REQUIRE(res.converged);
    CHECK(F(res.x).norm() < 1e-10);
  }

  TEST_CASE("sqrt_near picks the closer branch") {
    const cplx s = sqrt_near(cplx(-1, -1e-9), cplx(0, 1));
    CHECK(s.imag() > 0);
  }
}
