#include <doctest.h>

#include <cmath>
#include <vector>

#include "stochlog/errors.hpp"
#include "stochlog/estimator.hpp"

using namespace stochlog;

TEST_SUITE("estimator") {

TEST_CASE("quadratic bowl") {
  OptimOptions o;
  const auto f = [](std::span<const double> x) {
    return (x[0] - 3.0) * (x[0] - 3.0) + (x[1] - 4.0) * (x[1] - 4.0);
  };
  const OptimResult r = nelder_mead(f, {1.0, 1.0}, o);
  CHECK(r.converged);
  CHECK(std::abs(r.x[0] - 3.0) < 1e-6);
  CHECK(std::abs(r.x[1] - 4.0) < 1e-6);
  CHECK(r.trace.size() == r.n_evals);
  o.positivity = Positivity::none;
  const OptimResult raw = nelder_mead(f, {1.0, 1.0}, o);
  CHECK(std::abs(raw.x[0] - 3.0) < 1e-6);
  CHECK(std::abs(raw.x[1] - 4.0) < 1e-6);
}

TEST_CASE("Rosenbrock from the classical start") {
  OptimOptions o;
  o.positivity = Positivity::none;
  const auto f = [](std::span<const double> x) {
    return 100.0 * (x[1] - x[0] * x[0]) * (x[1] - x[0] * x[0]) + (1.0 - x[0]) * (1.0 - x[0]);
  };
  const OptimResult r = nelder_mead(f, {-1.2, 1.0}, o);
  MESSAGE("Rosenbrock evaluations: " << r.n_evals);
  CHECK(r.converged);
  CHECK(r.n_evals < 2000);
  CHECK(std::abs(r.x[0] - 1.0) < 1e-4);
  CHECK(std::abs(r.x[1] - 1.0) < 1e-4);
}

TEST_CASE("log-space search returns the positive argmin and stays positive") {
  OptimOptions o;
  const auto f = [](std::span<const double> x) {
    CHECK(x[0] > 0.0);
    CHECK(x[1] > 0.0);
    return std::pow(std::log(x[0]) - 1.0, 2) + std::pow(x[1] - 0.01, 2) * 1e4;
  };
  const OptimResult r = nelder_mead(f, {5.0, 5.0}, o);
  CHECK(r.x[0] == doctest::Approx(std::exp(1.0)).epsilon(1e-6));
  CHECK(r.x[1] == doctest::Approx(0.01).epsilon(1e-5));
}

TEST_CASE("argmin is invariant under a constant shift") {
  OptimOptions o;
  const auto f = [](std::span<const double> x) { return std::pow(x[0] - 2.0, 2) + std::pow(x[1] - 0.5, 4); };
  const auto g = [&](std::span<const double> x) { return f(x) + 1000.0; };
  const OptimResult a = nelder_mead(f, {1.0, 1.0}, o);
  const OptimResult b = nelder_mead(g, {1.0, 1.0}, o);
  // Comparisons see identical differences up to rounding in the shifted values.
  CHECK(a.x[0] == doctest::Approx(b.x[0]).epsilon(1e-5));
  CHECK(a.x[1] == doctest::Approx(b.x[1]).epsilon(1e-3));
}

TEST_CASE("NaN aborts and budget is honored") {
  OptimOptions o;
  const auto nan_far = [](std::span<const double> x) { return x[0] > 3.0 ? std::nan("") : -x[0]; };
  CHECK_THROWS_AS(nelder_mead(nan_far, {1.0}, o), NumericalError);
  o.max_evals = 10;
  const auto f = [](std::span<const double> x) { return std::pow(x[0] - 7.0, 2); };
  const OptimResult r = nelder_mead(f, {1.0}, o);
  CHECK_FALSE(r.converged);
  CHECK(r.n_evals <= 12);
  o.max_evals = 1;
  CHECK_THROWS_AS(nelder_mead(f, {1.0}, o), ConfigError);
  CHECK_THROWS_AS(nelder_mead(f, {-1.0}, OptimOptions{}), ConfigError);
}

TEST_CASE("parameter masks") {
  const Params base = Params::reference_scenario();
  ParamMask m;
  CHECK(m.size() == 2);
  CHECK(m.pack(base) == std::vector<double>{20.0, 18.0});
  const std::vector<double> free{21.0, 17.0};
  const Params q = m.unpack(free, base);
  CHECK(q.lambda == 21.0);
  CHECK(q.mu == 17.0);
  CHECK(q.rho == 0.1);
  ParamMask all{true, true, true, true};
  CHECK(all.pack(base).size() == 4);
}

TEST_CASE("extinction classes") {
  CHECK(classify_extinction(std::vector<double>{0.25, 0.5, 0.8}, 2.0) == ExtinctionClass::never);
  CHECK(classify_extinction(std::vector<double>{0.25, 0.5, 0.0, 0.0}, 2.0) == ExtinctionClass::transient);
  CHECK(classify_extinction(std::vector<double>{0.25, 1.2, 0.3, 0.0}, 2.0) == ExtinctionClass::after_stationarity);
  CHECK(to_string(ExtinctionClass::after_stationarity) == "after_stationarity");
}

TEST_CASE("fit on a short surviving series") {
  ReplicateScenario sc;
  sc.likelihood.h = 1e-2;
  sc.likelihood.delta = 1e-2;
  sc.delta_sim = 1e-2;
  sc.optim.x_tol = 1e-3;
  sc.optim.f_abs_tol = 1e-4;
  sc.M = 100;
  sc.horizon = 5.0;
  std::size_t rep = 0;
  ExtinctionClass cls{};
  ObservationSeries obs = replicate_series(sc, 1, rep, &cls);
  while (cls != ExtinctionClass::never) obs = replicate_series(sc, 1, ++rep, &cls);
  const FitResult a = fit(obs, sc.likelihood, sc.theta_init, sc.optim);
  const FitResult b = fit(obs, sc.likelihood, sc.theta_init, sc.optim);
  CHECK(a.converged);
  CHECK(a.theta_hat == b.theta_hat);
  CHECK(a.nll == b.nll);
  CHECK(a.theta_hat.lambda > 0.0);
  CHECK(a.theta_hat.mu > 0.0);
  CHECK_FALSE(a.low_information);
  CHECK(a.trace.size() == a.n_evaluations);
  // The minimum is no worse than the start.
  CHECK(a.nll <= a.trace.front().value);
}

TEST_CASE("early extinction is flagged as low information") {
  ReplicateScenario sc;
  sc.likelihood.h = 1e-2;
  sc.likelihood.delta = 1e-2;
  sc.delta_sim = 1e-2;
  sc.optim.x_tol = 1e-3;
  sc.optim.f_abs_tol = 1e-4;
  sc.M = 100;
  sc.horizon = 5.0;
  std::size_t rep = 0;
  ExtinctionClass cls{};
  ObservationSeries obs = replicate_series(sc, 1, rep, &cls);
  while (cls != ExtinctionClass::transient) obs = replicate_series(sc, 1, ++rep, &cls);
  const FitResult r = fit(obs, sc.likelihood, sc.theta_init, sc.optim);
  CHECK(r.low_information);
  CHECK_FALSE(r.warnings.empty());
}

TEST_CASE("replicate with one repetition reduces to fit") {
  ReplicateScenario sc;
  sc.likelihood.h = 1e-2;
  sc.likelihood.delta = 1e-2;
  sc.delta_sim = 1e-2;
  sc.optim.x_tol = 1e-3;
  sc.optim.f_abs_tol = 1e-4;
  sc.M = 40;
  sc.horizon = 2.0;
  const auto rows = replicate(sc, 1, 5);
  REQUIRE(rows.size() == 1);
  REQUIRE(rows[0].fit);
  ExtinctionClass cls{};
  const ObservationSeries obs = replicate_series(sc, 5, 0, &cls);
  LikelihoodSettings inner = sc.likelihood;
  inner.exec = Exec::serial;
  const FitResult direct = fit(obs, inner, sc.theta_init, sc.optim);
  CHECK(rows[0].fit->theta_hat == direct.theta_hat);
  CHECK(rows[0].extinction == cls);
  const auto serial = replicate(sc, 3, 5, Exec::serial);
  const auto parallel = replicate(sc, 3, 5, Exec::parallel);
  for (std::size_t i = 0; i < 3; ++i) CHECK(serial[i].fit->theta_hat == parallel[i].fit->theta_hat);
}

}
