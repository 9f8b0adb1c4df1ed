#include <doctest.h>

#include <cmath>
#include <numeric>
#include <vector>

#include "stochlog/errors.hpp"
#include "stochlog/likelihood.hpp"
#include "stochlog/mc_kernels.hpp"

using namespace stochlog;

namespace {

LikelihoodSettings fd_settings() {
  LikelihoodSettings s;
  s.backend = Backend::fd;
  s.h = 1e-2;
  s.x_upper = 10.0;
  s.delta = 1e-2;
  return s;
}

LikelihoodSettings mc_settings(Backend b) {
  LikelihoodSettings s;
  s.backend = b;
  s.delta = 1e-2;
  s.n_paths = 100;
  s.seed = 9;
  return s;
}

const Backend kAll[] = {Backend::fd, Backend::pedersen, Backend::bridge_plain, Backend::bridge_modified,
                        Backend::nonparametric};

LikelihoodSettings settings_for(Backend b) { return b == Backend::fd ? fd_settings() : mc_settings(b); }

}  // namespace

TEST_SUITE("likelihood") {

TEST_CASE("backend names round-trip") {
  for (Backend b : kAll) CHECK(parse_backend(to_string(b)) == b);
  CHECK_THROWS_AS(parse_backend("euler"), ConfigError);
}

TEST_CASE("absorbed starts for every backend") {
  const Params p = Params::reference_scenario();
  for (Backend b : kAll) {
    const LikelihoodSettings s = settings_for(b);
    CHECK(transition_term(p, 0.0, 0.0, 0.1, s) == 1.0);
    CHECK(transition_term(p, 0.0, 1.5, 0.1, s) == 0.0);
    const ObservationSeries zeros(0.1, std::vector<double>(6, 0.0));
    CHECK(neg_log_likelihood(p, zeros, s).value == 0.0);
  }
}

TEST_CASE("single transition and appended zeros") {
  const Params p = Params::reference_scenario();
  for (Backend b : kAll) {
    const LikelihoodSettings s = settings_for(b);
    const ObservationSeries one(0.1, {0.25, 0.4});
    CHECK(neg_log_likelihood(p, one, s).value == doctest::Approx(-std::log(transition_term(p, 0.25, 0.4, 0.1, s))));

    const ObservationSeries dying(0.1, {0.25, 0.1, 0.0});
    const ObservationSeries padded(0.1, {0.25, 0.1, 0.0, 0.0, 0.0, 0.0});
    const NllResult r1 = neg_log_likelihood(p, dying, s);
    const NllResult r2 = neg_log_likelihood(p, padded, s);
    CHECK(r1.value == r2.value);
    CHECK(r2.terms.size() == 5);
    for (std::size_t k = 2; k < 5; ++k) CHECK(r2.terms[k].density == 1.0);
  }
}

TEST_CASE("the log-likelihood is additive over transitions") {
  const Params p = Params::reference_scenario();
  const LikelihoodSettings s = fd_settings();
  const std::vector<double> v{0.25, 0.4, 0.7, 1.1, 1.6, 1.9, 2.1};
  const ObservationSeries whole(0.1, v);
  const ObservationSeries head(0.1, {v.begin(), v.begin() + 4});
  const ObservationSeries tail(0.1, {v.begin() + 3, v.end()});
  const double sum = neg_log_likelihood(p, head, s).value + neg_log_likelihood(p, tail, s).value;
  CHECK(neg_log_likelihood(p, whole, s).value == doctest::Approx(sum).epsilon(1e-13));
  const NllResult r = neg_log_likelihood(p, whole, s);
  double terms = 0.0;
  for (const auto& t : r.terms) terms += t.neg_log;
  CHECK(r.value == doctest::Approx(terms).epsilon(1e-14));
}

TEST_CASE("determinism and reproducibility") {
  const Params p = Params::reference_scenario();
  const ObservationSeries obs(0.1, {0.25, 0.4, 0.7, 1.1, 0.9});
  const LikelihoodSettings fd = fd_settings();
  CHECK(neg_log_likelihood(p, obs, fd).value == neg_log_likelihood(p, obs, fd).value);
  LikelihoodSettings fd_serial = fd;
  fd_serial.exec = Exec::serial;
  CHECK(neg_log_likelihood(p, obs, fd).value == neg_log_likelihood(p, obs, fd_serial).value);
  for (Backend b : {Backend::pedersen, Backend::bridge_modified, Backend::nonparametric}) {
    const LikelihoodSettings s = mc_settings(b);
    CHECK(neg_log_likelihood(p, obs, s).value == neg_log_likelihood(p, obs, s).value);
  }
}

TEST_CASE("impossible transitions are floored and counted") {
  const Params p = Params::reference_scenario();
  const ObservationSeries obs(0.1, {0.25, 0.0, 1.0});
  const NllResult r = neg_log_likelihood(p, obs, fd_settings());
  CHECK(r.n_floored == 1);
  CHECK(r.terms[1].floored);
  CHECK(r.terms[1].neg_log == doctest::Approx(-std::log(1e-300)));
  CHECK(std::isfinite(r.value));
}

TEST_CASE("settings are validated") {
  const Params p = Params::reference_scenario();
  const ObservationSeries obs(0.1, {0.25, 0.4});
  LikelihoodSettings s = fd_settings();
  s.floor = 0.0;
  CHECK_THROWS_AS(neg_log_likelihood(p, obs, s), ConfigError);
  s = fd_settings();
  s.delta = 0.03;
  CHECK_THROWS_AS(neg_log_likelihood(p, obs, s), ConfigError);
  s = mc_settings(Backend::pedersen);
  s.n_paths = 0;
  CHECK_THROWS_AS(neg_log_likelihood(p, obs, s), ConfigError);
  CHECK_THROWS_AS(transition_term(p, -1.0, 0.5, 0.1, fd_settings()), ConfigError);
}

TEST_CASE("finite differences and Pedersen agree on a reference transition") {
  const Params p = Params::reference_scenario();
  LikelihoodSettings fd;
  fd.h = 1e-3;
  fd.delta = 1e-3;
  const double q_fd = transition_term(p, 0.25, 2.0, 1.0, fd);
  // 10^4 paths as 20 independent batches of 500 for a standard error.
  std::vector<double> est(20);
  for (std::size_t r = 0; r < est.size(); ++r) {
    est[r] = pedersen_density(p, 0.25, 2.0, McSettings{1.0, 1e-3, 500, 31, r}).value;
  }
  const double mean = std::accumulate(est.begin(), est.end(), 0.0) / 20.0;
  double ss = 0.0;
  for (double e : est) ss += (e - mean) * (e - mean);
  const double se = std::sqrt(ss / 19.0 / 20.0);
  MESSAGE("fd " << q_fd << " pedersen " << mean << " +- " << se);
  CHECK(std::abs(q_fd - mean) < 3.0 * se);
}

}
