#include <doctest.h>

#include <cmath>

#include "common.hpp"

using namespace jminv;

TEST_SUITE("forward") {
  const auto cs = fixture::channels();

  TEST_CASE("diagonal H gives indicator components") {
    auto h = QuasiTridiagonalHamiltonian::zeros(cs);
    for (int n = 0; n < 5; ++n) {
      h.a1[n] = 0.3 + n;
      h.a2[n] = 0.8 + n;
    }
    const auto tr = spectral_data(h);
    for (int j = 0; j < 10; ++j) {
      CHECK(tr[j].lambda == doctest::Approx(0.3 + 0.5 * j));
      const bool last1 = std::abs(tr[j].lambda - 4.3) < 1e-12, last2 = std::abs(tr[j].lambda - 4.8) < 1e-12;
      CHECK(tr[j].zN == (last1 ? 1.0 : 0.0));
      CHECK(tr[j].zNN == (last2 ? 1.0 : 0.0));
    }
  }

  TEST_CASE("final bands reproduce the published eigenvalues") {
    const auto tr = spectral_data(fixture::from_bands(golden::bands_final));
    const auto ref = fixture::final_triplets();
    for (int j = 0; j < 10; ++j) {
      CHECK(tr[j].lambda == doctest::Approx(ref[j].lambda).epsilon(1e-6));
    }
  }

  TEST_CASE("component orthonormality for random H") {
    std::mt19937_64 rng(11);
    for (int i = 0; i < 50; ++i) {
      const auto tr = spectral_data(random_hamiltonian(cs, rng));
      double s11 = 0, s22 = 0, s12 = 0;
      for (const auto& t : tr) {
        s11 += t.zN * t.zN;
        s22 += t.zNN * t.zNN;
        s12 += t.zN * t.zNN;
      }
      CHECK(std::abs(s11 - 1) < 1e-12);
      CHECK(std::abs(s22 - 1) < 1e-12);
      CHECK(std::abs(s12) < 1e-12);
    }
  }

  TEST_CASE("P functions") {
    const PFunctions one = p_functions({{1.0, 1.0, 0.0}}, 2.0);
    CHECK(one.p11 == 1.0);
    CHECK(one.p12 == 0.0);
    CHECK(one.p22 == 0.0);
    const auto h = fixture::from_bands(golden::bands_final);
    const PFunctions pf = p_functions(spectral_data(h), 2.0);
    const Eigen::MatrixXd G = (Eigen::MatrixXd::Identity(10, 10) * 2.0 - dense(h)).inverse();
    CHECK(std::abs(pf.p11 - G(4, 4)) < 1e-10);
    CHECK(std::abs(pf.p12 - G(4, 9)) < 1e-10);
    CHECK(std::abs(pf.p22 - G(9, 9)) < 1e-10);
    CHECK_THROWS_AS(p_functions({{1.0, 1.0, 0.0}}, 1.0), InputError);
  }

  TEST_CASE("free motion gives S = I") {
    const auto tr = spectral_data(free_hamiltonian(cs));
    for (double k = 0.1; k <= 6.0; k += 0.137) {
      if (std::abs(k - std::sqrt(10.0)) < 1e-3) continue;
      const Mat2c S = smatrix_from_triplets(tr, cs, k).S;
      if (k > std::sqrt(10.0))
        CHECK((S - Mat2c::Identity()).cwiseAbs().maxCoeff() <= 1e-10);
      else
        CHECK(std::abs(S(0, 0) - 1.0) <= 1e-10);
    }
    CHECK(bound_states_from_h(free_hamiltonian(cs)).empty());
  }

  TEST_CASE("unitarity on the open region") {
    const auto h = fixture::from_bands(golden::bands_final);
    for (double k = std::sqrt(10.0) + 1e-3; k <= 6.0; k += 0.01)
      CHECK(unitarity_defect(smatrix_from_h(h, k).s) <= 1e-8);
    std::mt19937_64 rng(5);
    for (int i = 0; i < 100; ++i) {
      const auto tr = spectral_data(random_hamiltonian(cs, rng));
      for (double k = 3.2; k <= 6.0; k += 0.4) CHECK(unitarity_defect(smatrix_from_triplets(tr, cs, k).S) <= 1e-8);
    }
  }

  TEST_CASE("bound state of the published final H") {
    const auto b = bound_states_from_h(fixture::from_bands(golden::bands_final));
    REQUIRE(b.size() == 1);
    CHECK(b[0].kappa == doctest::Approx(golden::kappa).epsilon(1e-6));
    CHECK(b[0].res11.imag() / golden::res11_im == doctest::Approx(1.0).epsilon(1e-3));
    CHECK(b[0].res12.imag() / golden::res12_im == doctest::Approx(1.0).epsilon(1e-3));
  }

  TEST_CASE("dense layout roundtrip") {
    std::mt19937_64 rng(9);
    const auto h = random_hamiltonian(cs, rng);
    CHECK(fixture::max_band_diff(from_dense(dense(h), cs), h) == 0.0);
    Eigen::MatrixXd m = dense(h);
    m(0, 3) = m(3, 0) = 0.5;
    CHECK_THROWS_AS(from_dense(m, cs), InputError);
  }
}
