#include <doctest.h>

#include <cmath>

#include "common.hpp"

using namespace jminv;

TEST_SUITE("refmodel") {
  const auto p = fixture::model();
  const auto cs = fixture::channels();

  TEST_CASE("model S-matrix is unitary and symmetric") {
    for (double k = 3.17; k <= 12; k += 0.173) CHECK(unitarity_defect(model_smatrix(p, k).s) <= 1e-10);
    const Mat2c s = model_smatrix(p, 4.0).s;
    CHECK(std::norm(s(0, 0)) + std::norm(s(0, 1)) == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(std::abs(s(0, 1) - s(1, 0)) == 0.0);
    for (double k = 0.05; k < 3.16; k += 0.1) CHECK(std::abs(std::abs(model_smatrix(p, k).s(0, 0)) - 1) <= 1e-12);
  }

  TEST_CASE("zero momentum and decoupled limits") {
    CHECK(std::abs(model_smatrix(p, 0.0).s(0, 0) - 1.0) < 1e-14);
    AnalyticModelParams d = p;
    d.b = 0;
    for (double k : {0.5, 2.0, 4.0, 7.0}) CHECK(std::abs(model_smatrix(d, k).s(0, 1)) == 0.0);
  }

  TEST_CASE("bound state: pole position and residues") {
    const BoundStateData b = bound_state_of_model(p, cs);
    CHECK(b.kappa == doctest::Approx(golden::kappa).epsilon(1e-10));
    // exact residues (contour integration, cross-checked at 30 digits)
    CHECK(std::abs(b.res11 - cplx(0, -26.7099132988)) <= 1e-8);
    CHECK(std::abs(b.res12 - cplx(0, 18.1350982192)) <= 1e-8);
    // published values agree up to a common factor 1 + 6e-6
    CHECK(b.res11.imag() / golden::res11_im == doctest::Approx(1.0).epsilon(1e-5));
    CHECK(b.res12.imag() / golden::res12_im == doctest::Approx(1.0).epsilon(1e-5));
    CHECK(b.anc[0] == doctest::Approx(5.168163436).epsilon(1e-9));
    CHECK(b.anc[1] == doctest::Approx(-2.649608267).epsilon(1e-9));
    CHECK(std::abs(b.res11.real()) < 1e-10);
  }

  TEST_CASE("eigenphase decomposition") {
    CHECK(eigenphase_mix(Mat2c::Identity()).delta1 == doctest::Approx(0.0));
    Mat2c d = Mat2c::Zero();
    d(0, 0) = std::exp(cplx(0, 0.6));
    d(1, 1) = std::exp(cplx(0, -0.2));
    const auto e = eigenphase_mix(d);
    CHECK(e.delta1 == doctest::Approx(0.3).epsilon(1e-14));
    CHECK(e.delta2 == doctest::Approx(-0.1).epsilon(1e-14));
    CHECK(std::abs(e.mix) < 1e-15);
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> ph(-1.5, 1.5), mx(-0.7, 0.7);
    for (int i = 0; i < 200; ++i) {
      const EigenphaseDecomposition x{ph(rng), ph(rng), mx(rng)};
      const Mat2c s = recompose(x);
      CHECK(unitarity_defect(s) <= 1e-13);
      CHECK((recompose(eigenphase_mix(s)) - s).cwiseAbs().maxCoeff() <= 1e-10);
    }
  }

  TEST_CASE("tabulated provider") {
    std::vector<SMatrixSample> samples;
    for (int i = 0; i < 600; ++i) samples.push_back(model_smatrix(p, 0.01 + 6.99 * i / 599.0));
    const TabulatedProvider tp(samples, {});
    auto err = [&](double k) { return (tp.smatrix(k) - model_smatrix(p, k).s).cwiseAbs().maxCoeff(); };
    for (double k : {0.731, 1.5, 3.9, 4.123, 5.555, 6.5}) CHECK(err(k) <= 1e-8);
    // the sub-threshold resonance near k = 2.4 is under-resolved by a cubic at this spacing
    CHECK(err(2.4) <= 1e-4);
    CHECK_THROWS_AS(tp.smatrix(8.0), InputError);
    CHECK_THROWS_AS(TabulatedProvider({samples[0]}, {}), InputError);
    std::vector<SMatrixSample> shuffled(samples.begin(), samples.begin() + 6);
    std::swap(shuffled[2], shuffled[4]);
    CHECK_THROWS_AS(TabulatedProvider(shuffled, {}), InputError);
    std::vector<SMatrixSample> asym(samples.begin(), samples.begin() + 6);
    asym[3].s(1, 0) += 0.1;
    CHECK_THROWS_AS(TabulatedProvider(asym, {}), VerificationError);
  }

  TEST_CASE("k grid skips the threshold") {
    const auto g = k_grid(0.2, 6, 600, 10);
    CHECK(g.front() == 0.2);
    CHECK(g.back() == 6.0);
    for (double k : g) CHECK(std::abs(k - std::sqrt(10.0)) >= 1e-6);
  }
}
