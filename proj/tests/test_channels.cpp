#include <doctest.h>

#include <cmath>

#include "jminv/channels.hpp"

using namespace jminv;

TEST_SUITE("channels") {
  const ChannelSet cs{0, 0, 10, 0.495, 5};

  TEST_CASE("channel momenta and branches") {
    CHECK(std::abs(channel2_momentum(cs, 4.0) - std::sqrt(6.0)) < 1e-14);
    const cplx k2 = channel2_momentum(cs, 2.0);
    CHECK(std::abs(k2.real()) < 1e-15);
    CHECK(k2.imag() == doctest::Approx(std::sqrt(6.0)).epsilon(1e-14));
    const Kinematics kin = kinematics_at(cs, 6.0);
    CHECK(kin.eps == doctest::Approx(4.41045).epsilon(1e-14));
    CHECK(std::abs(kin.k2 * kin.k2 - cplx(26)) <= 1e-13 * 26);
  }

  TEST_CASE("weight matrix") {
    CHECK(weight_at(cs, 2.0).p22 == 0.0);
    CHECK(weight_at(cs, 4.0).p22 == doctest::Approx(4 / std::sqrt(6.0)).epsilon(1e-14));
    ChannelSet same = cs;
    same.delta = 0;
    CHECK(weight_at(same, 1.7).p22 == doctest::Approx(1.0).epsilon(1e-15));
  }

  TEST_CASE("threshold landmarks") {
    CHECK(cs.threshold_eps() == doctest::Approx(1.225125).epsilon(1e-15));
    CHECK(eps_of_k(cs, 6.0) == doctest::Approx(4.41045).epsilon(1e-15));
    CHECK(k_of_eps(cs, eps_of_k(cs, 3.3)) == doctest::Approx(3.3).epsilon(1e-15));
  }

  TEST_CASE("validation") {
    ChannelSet bad = cs;
    bad.N = 1;
    CHECK_THROWS_AS(bad.validate(), InputError);
    bad = cs;
    bad.delta = -1;
    CHECK_THROWS_AS(bad.validate(), InputError);
    bad = cs;
    bad.rho = 0;
    CHECK_THROWS_AS(bad.validate(), InputError);
  }
}
