#include <doctest.h>

#include <cmath>

#include "jminv/basis.hpp"
#include "jminv/numerics.hpp"

using namespace jminv;

namespace {
constexpr double rho = 0.495;
}

TEST_SUITE("basis") {
  TEST_CASE("kinetic matrix closed forms") {
    const auto t = kinetic_matrix<double>(0, 3);
    CHECK(t.diag[0] == doctest::Approx(0.75).epsilon(1e-15));
    CHECK(t.offdiag[0] == doctest::Approx(-0.6123724357).epsilon(1e-10));
    CHECK(t.offdiag[1] == doctest::Approx(-0.5 * std::sqrt(5.0)).epsilon(1e-15));
    CHECK(t.diag[1] == doctest::Approx(1.75).epsilon(1e-15));
    CHECK_THROWS_AS(kinetic_matrix<double>(0, 0), InputError);
  }

  TEST_CASE("oscillator functions") {
    const BasisConfig c{rho, 5, 0};
    CHECK(oscillator_fn(c, 0, 0.0) == 0.0);
    for (int n = 0; n < 6; ++n) CHECK(std::abs(oscillator_fn(c, n, 12 * rho)) < 1e-12);
    const GaussRule g = gauss_legendre(120);
    const double R = 12 * rho;
    for (int ell : {0, 1, 2})
      for (int n = 0; n <= 8; ++n)
        for (int m = 0; m <= 8; ++m) {
          const BasisConfig cl{rho, 9, ell};
          double s = 0;
          for (int i = 0; i < g.x.size(); ++i) {
            const double r = 0.5 * R * (g.x[i] + 1);
            s += 0.5 * R * g.w[i] * oscillator_fn(cl, n, r) * oscillator_fn(cl, m, r);
          }
          CHECK(std::abs(s - (n == m ? 1.0 : 0.0)) < 1e-9);
        }
  }

  TEST_CASE("sine-like closed form at n = 0") {
    const double q = 1.3;
    const auto t = reference_solutions(rho, 0, q, 4);
    const double ref = std::sqrt(2 * std::sqrt(kPi) * rho) * q * std::exp(-q * q / 2);
    CHECK(t.sine_like[0].real() == doctest::Approx(ref).epsilon(1e-13));
  }

  TEST_CASE("recursion identity and C+/C- relations") {
    for (int ell : {0, 1, 3})
      for (cplx q : {cplx(0.2), cplx(1.0), cplx(3.5), cplx(7.0), cplx(0, 0.3), cplx(0, 1.1), cplx(0, 4.0)}) {
        const auto t = reference_solutions(rho, ell, q, 40);
        CHECK(recursion_residual(ell, q, t.sine_like) <= 1e-10);
        CHECK(recursion_residual(ell, q, t.cosine_like) <= 1e-10);
        for (int n = 0; n <= 40; ++n) {
          const double sc = std::max({1.0, std::abs(t.cplus[n]), std::abs(t.sine_like[n]), std::abs(t.cosine_like[n])});
          CHECK(std::abs(t.cplus[n] - t.cminus[n] - 2.0 * cplx(0, 1) * t.sine_like[n]) <= 1e-12 * sc);
          CHECK(std::abs(t.cplus[n] + t.cminus[n] - 2.0 * t.cosine_like[n]) <= 1e-12 * sc);
        }
      }
  }

  TEST_CASE("C+ on the imaginary axis decays like exp(-2|q| sqrt(n + 3/4))") {
    // amplitude sqrt(rho) m^(-1/4) with m = n + l/2 + 3/4; the exponent carries 2|q|
    const double kq = rho * 2.1946752413;
    const auto t = reference_solutions(rho, 0, cplx(0, kq), 200);
    for (int n = 30; n <= 200; ++n) {
      const double m = n + 0.75;
      const double law = std::sqrt(rho) * std::pow(m, -0.25) * std::exp(-2 * kq * std::sqrt(m));
      CHECK(std::abs(t.cplus[n]) / law == doctest::Approx(1.0).epsilon(0.2));
      CHECK(std::abs(t.cplus[n].imag()) <= 1e-12 * std::abs(t.cplus[n]));
    }
  }

  TEST_CASE("cosine-like growth for large real q") {
    // ratios to the leading large-q form, oracle: 40-digit evaluation of the 1F1 closed form
    const std::tuple<double, double> ref[] = {{6.0, 2.565509834}, {10.0, 1.339935905}, {20.0, 1.072254704}};
    double prev = 1e300;
    for (auto [q, want] : ref) {
      const auto t = reference_solutions(rho, 0, q, 6);
      const double r = cosine_asymptotic_check(t, rho, 0)[4];
      CHECK(r == doctest::Approx(want).epsilon(1e-8));
      CHECK(r < prev);
      prev = r;
    }
    const auto t = reference_solutions(rho, 0, 10.0, 6);
    for (int n = 0; n <= 6; ++n) CHECK((t.cosine_like[n].real() > 0) == (n % 2 == 1));
  }

  TEST_CASE("hypergeometric series") {
    CHECK(std::abs(hyp1f1_series(1, 1, cplx(0.7)) - std::exp(0.7)) < 1e-14);
  }
}
