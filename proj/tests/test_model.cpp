#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "stochlog/errors.hpp"
#include "stochlog/model.hpp"

using namespace stochlog;

TEST_SUITE("model") {

TEST_CASE("coefficients of the reference scenario") {
  const Params p = Params::reference_scenario();
  CHECK(p.carrying_capacity() == 2.0);
  CHECK(p.growth_rate() == 2.0);
  CHECK(drift(p, 0.0) == 0.0);
  CHECK(diffusion_sq(p, 0.0) == 0.0);
  CHECK(drift(p, 2.0) == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(drift(p, 1.0) == doctest::Approx(1.0));
  CHECK(diffusion_sq(p, 1.0) == doctest::Approx(0.01 * 39.0));
  CHECK(diffusion(p, 1.0) == doctest::Approx(std::sqrt(0.39)));
}

TEST_CASE("non-positive parameters are rejected") {
  CHECK_THROWS_AS(Params(0.0, 1.0, 1.0, 0.1), ConfigError);
  CHECK_THROWS_AS(Params(1.0, -1.0, 1.0, 0.1), ConfigError);
  CHECK_THROWS_AS(Params(1.0, 1.0, 0.0, 0.1), ConfigError);
  CHECK_THROWS_AS(Params(1.0, 1.0, 1.0, 0.0), ConfigError);
  CHECK_THROWS_AS(Params(1.0, 1.0, 1.0, std::nan("")), ConfigError);
}

TEST_CASE("boundary derivatives agree with finite differences of the coefficients") {
  for (const Params& p : {Params::reference_scenario(), Params(3.0, 5.0, 0.5, 0.7), Params(1.0, 1.0, 2.0, 1.0)}) {
    const BoundaryDerivatives d = boundary_derivatives(p);
    const double e = 1e-5;
    const double b1 = (drift(p, 2 * e) * -1.0 + 4.0 * drift(p, e) - 3.0 * drift(p, 0.0)) / (2 * e);
    const double a1 = (diffusion_sq(p, 2 * e) * -1.0 + 4.0 * diffusion_sq(p, e) - 3.0 * diffusion_sq(p, 0.0)) / (2 * e);
    const double E = 1e-2;
    const double a2 = (diffusion_sq(p, 2 * E) - 2.0 * diffusion_sq(p, E) + diffusion_sq(p, 0.0)) / (E * E);
    CHECK(d.b_prime_0 == doctest::Approx(b1).epsilon(1e-8));
    CHECK(d.a_prime_0 == doctest::Approx(a1).epsilon(1e-8));
    CHECK(d.a_second_0 == doctest::Approx(a2).epsilon(1e-8));
  }
  const BoundaryDerivatives d = boundary_derivatives(Params::reference_scenario());
  CHECK(d.b_prime_0 == 2.0);
  CHECK(d.a_prime_0 == doctest::Approx(0.38));
}

TEST_CASE("scale density: log form and representability") {
  const Params p = Params::reference_scenario();
  for (double y : {0.0, 0.5, 2.0, 7.0}) {
    CHECK(log_scale_density(p, y) == doctest::Approx(oracle::log_scale(20, 18, 1, 0.1, y)).epsilon(1e-13));
  }
  // log s(0) = -8000 ln 38 for rho = 0.1: far below the double range.
  CHECK_THROWS_AS(scale_density(p, 0.0), ScaleOverflow);
  try {
    scale_density(p, 0.0);
  } catch (const ScaleOverflow& e) {
    CHECK(e.log_value() == doctest::Approx(-8000.0 * std::log(38.0)));
  }
  const Params q(20.0, 18.0, 1.0, 1.0);
  CHECK(scale_density(q, 1.0) == doctest::Approx(std::exp(oracle::log_scale(20, 18, 1, 1.0, 1.0))));
}

TEST_CASE("scale integral matches Simpson in log form") {
  const Params q(20.0, 18.0, 1.0, 1.0);
  const double ref = oracle::log_scale(20, 18, 1, 1.0, 0.0);
  const long double s = oracle::simpson(
      [&](long double y) { return std::exp(static_cast<long double>(oracle::log_scale(20, 18, 1, 1.0, double(y)) - ref)); },
      0.3L, 3.0L, 20000);
  CHECK(log_scale_integral(q, 0.3, 3.0) == doctest::Approx(ref + std::log(double(s))).epsilon(1e-10));
}

TEST_CASE("hitting probability against the Simpson oracle") {
  const Params p = Params::reference_scenario();
  // High-precision values (30 digits, adaptive quadrature) frozen once.
  CHECK(hitting_probability(p, 0.25, 2.5) == doctest::Approx(0.1009059206907739).epsilon(1e-7));
  CHECK(hitting_probability(p, 0.25, 3.0) == doctest::Approx(0.1016028892380092).epsilon(1e-7));
  CHECK(hitting_probability(p, 0.25, 4.0) == doctest::Approx(0.4262917378553592).epsilon(1e-7));
  for (double x_r : {2.5, 4.0}) {
    CHECK(hitting_probability(p, 0.25, x_r) ==
          doctest::Approx(oracle::hitting_probability(20, 18, 1, 0.1, 0.25, x_r)).epsilon(1e-6));
  }
  const Params q(3.0, 5.0, 0.5, 0.7);
  CHECK(hitting_probability(q, 1.0, 3.0) ==
        doctest::Approx(oracle::hitting_probability(3, 5, 0.5, 0.7, 1.0, 3.0)).epsilon(1e-7));
}

TEST_CASE("hitting probability is a decreasing probability in x") {
  const Params p = Params::reference_scenario();
  double prev = 1.0;
  for (double x : {0.01, 0.1, 0.5, 1.0, 2.0, 3.0, 3.9}) {
    const double h = hitting_probability(p, x, 4.0);
    CHECK(h > 0.0);
    CHECK(h < 1.0);
    CHECK(h <= prev);
    prev = h;
  }
  CHECK_THROWS_AS(hitting_probability(p, 0.0, 4.0), ConfigError);
  CHECK_THROWS_AS(hitting_probability(p, 4.0, 4.0), ConfigError);
  CHECK_THROWS_AS(hitting_probability(p, 5.0, 4.0), ConfigError);
}

TEST_CASE("birth-death rates and diffusion limit") {
  const MicroParams mp(20.0, 18.0, 1.0, 1000.0);
  const BdRates r = bd_rates(mp, 250);
  CHECK(r.birth == doctest::Approx(5000.0));
  CHECK(r.death == doctest::Approx((18.0 + 0.25) * 250.0));
  CHECK(mp.to_params().rho == doctest::Approx(1.0 / std::sqrt(1000.0)));
  CHECK(bd_rates(mp, 0).birth == 0.0);
  CHECK_THROWS_AS(MicroParams(20.0, 18.0, 1.0, 0.0), ConfigError);
}

}
