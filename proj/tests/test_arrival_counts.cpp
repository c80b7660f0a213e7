#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "ncqueue/arrival_counts.hpp"
#include "ncqueue/des_oracle.hpp"
#include "ncqueue/rlnc_chain.hpp"
#include "ncqueue/service_mgf.hpp"
#include "test_params.hpp"

using namespace ncq;

namespace {

struct Pipeline {
  Policy policy;
  TransitionMatrix matrix;
  CompletionPmf pmf;
};

Pipeline build(const LinkParams& p, int j, double tol = 1e-12) {
  Policy policy = optimize_policy(p, j);
  TransitionMatrix matrix = make_transition_matrix(p, policy.n_per_state);
  CompletionPmf pmf = completion_pmf(j, policy, matrix, tol);
  return {std::move(policy), std::move(matrix), std::move(pmf)};
}

double poisson_pmf(int k, double mu) {
  return std::exp(-mu + k * std::log(mu) - std::lgamma(k + 1.0));
}

}  // namespace

TEST_CASE("no arrivals at lambda = 0") {
  const auto p = test_link();
  const auto pl = build(p, 3);
  const auto arr = arrival_pmf(3, 0.0, 10, pl.pmf);
  CHECK(arr.a[0] == doctest::Approx(1.0 - pl.pmf.truncated_mass).epsilon(1e-14));
  for (int k = 1; k <= 10; ++k) CHECK(arr.a[k] == 0.0);
}

TEST_CASE("deterministic service gives a plain Poisson") {
  const auto p = test_link(0.0, 0.0);
  const double lambda = 30.0;
  for (int j : {1, 3}) {
    const auto pl = build(p, j);
    const double t = j * packet_duration(p, j) + wait_time(p);
    const auto arr = arrival_pmf(j, lambda, 15, pl.pmf);
    for (int k = 0; k <= 15; ++k)
      CHECK(arr.a[k] ==
            doctest::Approx(poisson_pmf(k, lambda * t)).epsilon(1e-12));
  }
}

TEST_CASE("partial sums are monotone and bounded") {
  const auto p = test_link();
  const auto pl = build(p, 4);
  const auto arr = arrival_pmf(4, 30.0, 60, pl.pmf);
  double acc = 0.0;
  for (double v : arr.a) {
    CHECK(v >= 0.0);
    acc += v;
    CHECK(acc <= 1.0 + 1e-12);
  }
  // large enough kmax captures all mass except the pmf truncation
  CHECK(1.0 - acc - pl.pmf.truncated_mass < 1e-10);
}

TEST_CASE("per-atom Poisson terms sum to one at desk scale") {
  const auto p = test_link();
  const auto pl = build(p, 2);
  const double lambda = 30.0;
  const double t_max = pl.pmf.atoms.back().first;
  const int kmax = static_cast<int>(std::ceil(lambda * t_max) +
                                    20.0 * std::sqrt(lambda * t_max) + 20.0);
  const auto arr = arrival_pmf(2, lambda, kmax, pl.pmf);
  double acc = 0.0;
  for (double v : arr.a) acc += v;
  CHECK(acc + pl.pmf.truncated_mass == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("generating function checks") {
  const auto p = test_link();
  const auto pl = build(p, 3);
  const double lambda = 30.0;
  SUBCASE("A(1) = 1") {
    CHECK(arrival_gf_eval(3, lambda, 1.0, pl.policy, pl.matrix) ==
          doctest::Approx(1.0).epsilon(1e-14));
  }
  SUBCASE("A(0) = a_0 within tail bounds") {
    const auto arr = arrival_pmf(3, lambda, 30, pl.pmf);
    const double a0_gf = arrival_gf_eval(3, lambda, 0.0, pl.policy, pl.matrix);
    CHECK(std::abs(a0_gf - arr.a[0]) <= arr.tail_bound + 1e-10);
  }
  SUBCASE("polynomial evaluation matches the MGF substitution") {
    const auto arr = arrival_pmf(3, lambda, 200, pl.pmf);
    for (double z : {0.0, 0.25, 0.5, 0.75, 1.0}) {
      double poly = 0.0;
      double zk = 1.0;
      for (double v : arr.a) {
        poly += v * zk;
        zk *= z;
      }
      const double gf = arrival_gf_eval(3, lambda, z, pl.policy, pl.matrix);
      CHECK(poly <= gf + 1e-10);
      CHECK(gf <= poly + arr.tail_bound + 1e-8);
    }
  }
  SUBCASE("slope at z=1 is lambda over mu") {
    const double mu_inv = mean_service_time(3, pl.policy, pl.matrix);
    const double h = 1e-7;
    const double fd = (arrival_gf_eval(3, lambda, 1.0, pl.policy, pl.matrix) -
                       arrival_gf_eval(3, lambda, 1.0 - h, pl.policy,
                                       pl.matrix)) /
                      h;
    CHECK(fd == doctest::Approx(lambda * mu_inv).epsilon(1e-5));
  }
}

TEST_CASE("agrees with Monte Carlo service sampling") {
  const auto p = test_link();
  const double lambda = 30.0;
  const int j = 2;
  const auto pl = build(p, j);
  const auto arr = arrival_pmf(j, lambda, 10, pl.pmf);
  const auto mc = sample_service(p, pl.policy, lambda, 200000, 42, 10);
  for (int k = 0; k <= 10; ++k) {
    const double f = static_cast<double>(mc.arrival_counts[k]) / mc.runs;
    const double se = std::sqrt(arr.a[k] * (1.0 - arr.a[k]) / mc.runs);
    CHECK(std::abs(f - arr.a[k]) <= 3.0 * se + 1e-12);
  }
}
