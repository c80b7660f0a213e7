#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "ncqueue/errors.hpp"
#include "ncqueue/rlnc_chain.hpp"
#include "ncqueue/service_mgf.hpp"
#include "test_params.hpp"

using namespace ncq;

TEST_CASE("MGF normalization and closed forms") {
  SUBCASE("M(0) = 1 always") {
    for (double pe : {0.0, 0.1, 0.2, 0.5}) {
      const auto p = test_link(pe, 0.2);
      const auto policy = optimize_policy(p, 5);
      const auto matrix = make_transition_matrix(p, policy.n_per_state);
      for (int n = 1; n <= 5; ++n)
        CHECK(mgf_eval(n, 0.0, policy, matrix) ==
              doctest::Approx(1.0).epsilon(1e-14));
    }
  }
  SUBCASE("deterministic completion at pe=0") {
    const auto p = test_link(0.0, 0.0);
    const auto policy = optimize_policy(p, 4);
    const auto matrix = make_transition_matrix(p, policy.n_per_state);
    for (int n = 1; n <= 4; ++n)
      for (double s : {-50.0, -1.0, 0.0}) {
        const double t = n * packet_duration(p, 4) + wait_time(p);
        CHECK(mgf_eval(n, s, policy, matrix) ==
              doctest::Approx(std::exp(s * t)).epsilon(1e-13));
      }
  }
  SUBCASE("single state geometric closed form") {
    const auto p = test_link(0.2, 0.0);
    const auto policy = make_policy(p, {1});
    const auto matrix = make_transition_matrix(p, policy.n_per_state);
    const double t1 = policy.t_round[0];
    for (double s : {-10.0, -1.0, 0.0}) {
      const double x = std::exp(s * t1);
      const double closed = 0.8 * x / (1.0 - 0.2 * x);
      CHECK(mgf_eval(1, s, policy, matrix) ==
            doctest::Approx(closed).epsilon(1e-13));
      CHECK(mgf_direct_enum(1, s, policy, matrix, 1e-12) ==
            doctest::Approx(closed).epsilon(1e-11));
    }
  }
  SUBCASE("strictly increasing in s on s <= 0") {
    const auto p = test_link();
    const auto policy = optimize_policy(p, 3);
    const auto matrix = make_transition_matrix(p, policy.n_per_state);
    double prev = 0.0;
    for (double s : {-20.0, -10.0, -5.0, -1.0, -0.1, 0.0}) {
      const double v = mgf_eval(3, s, policy, matrix);
      CHECK(v > prev);
      prev = v;
    }
  }
}

TEST_CASE("recursion agrees with the direct path-sum enumeration") {
  for (double pe : {0.0, 0.1, 0.2, 0.5})
    for (double pe_ack : {0.0, 0.2}) {
      const auto p = test_link(pe, pe_ack);
      const auto policy = optimize_policy(p, 4);
      const auto matrix = make_transition_matrix(p, policy.n_per_state);
      for (int n = 1; n <= 4; ++n)
        for (double s : {-50.0, -10.0, -1.0, 0.0}) {
          const double closed = mgf_eval(n, s, policy, matrix);
          const double enumd = mgf_direct_enum(n, s, policy, matrix, 1e-11);
          CHECK(std::abs(closed - enumd) <= 1e-9);
        }
    }
}

TEST_CASE("completion pmf") {
  SUBCASE("single atom at pe=0") {
    const auto p = test_link(0.0, 0.0);
    const auto policy = optimize_policy(p, 3);
    const auto matrix = make_transition_matrix(p, policy.n_per_state);
    const auto pmf = completion_pmf(3, policy, matrix, 1e-10);
    REQUIRE(pmf.atoms.size() == 1);
    CHECK(pmf.atoms[0].first ==
          doctest::Approx(3 * packet_duration(p, 3) + wait_time(p)));
    CHECK(pmf.atoms[0].second == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(pmf.truncated_mass == 0.0);
  }
  SUBCASE("geometric ladder for one packet, one shot per round") {
    const auto p = test_link(0.2, 0.0);
    const auto policy = make_policy(p, {1});
    const auto matrix = make_transition_matrix(p, policy.n_per_state);
    const auto pmf = completion_pmf(1, policy, matrix, 1e-10);
    const double t1 = policy.t_round[0];
    for (std::size_t k = 0; k < std::min<std::size_t>(pmf.atoms.size(), 10); ++k) {
      CHECK(pmf.atoms[k].first ==
            doctest::Approx((k + 1) * t1).epsilon(1e-12));
      CHECK(pmf.atoms[k].second ==
            doctest::Approx(0.8 * std::pow(0.2, k)).epsilon(1e-12));
    }
  }
  SUBCASE("atoms reproduce the MGF and account for all mass") {
    for (double pe : {0.1, 0.2, 0.5}) {
      const auto p = test_link(pe, 0.2);
      const auto policy = optimize_policy(p, 4);
      const auto matrix = make_transition_matrix(p, policy.n_per_state);
      const double tol = 1e-10;
      const auto pmf = completion_pmf(4, policy, matrix, tol);
      CHECK(pmf.truncated_mass <= tol);
      double mass = pmf.truncated_mass;
      for (const auto& [t, pr] : pmf.atoms) mass += pr;
      CHECK(mass == doctest::Approx(1.0).epsilon(1e-12));
      for (double s : {-10.0, -1.0, 0.0}) {
        double acc = 0.0;
        for (const auto& [t, pr] : pmf.atoms) acc += pr * std::exp(s * t);
        CHECK(std::abs(acc - mgf_eval(4, s, policy, matrix)) <= tol * 10);
      }
      // times strictly increasing
      for (std::size_t i = 1; i < pmf.atoms.size(); ++i)
        CHECK(pmf.atoms[i].first > pmf.atoms[i - 1].first);
    }
  }
}

TEST_CASE("mean service time") {
  const auto p = test_link(0.2, 0.0);
  SUBCASE("matches the chain recursion exactly") {
    const auto policy = optimize_policy(p, 5);
    const auto matrix = make_transition_matrix(p, policy.n_per_state);
    const auto e = expected_absorption_times(matrix, policy.t_round);
    for (int j = 1; j <= 5; ++j)
      CHECK(mean_service_time(j, policy, matrix) == e[j]);
  }
  SUBCASE("geometric mean for one packet") {
    const auto policy = make_policy(p, {1});
    const auto matrix = make_transition_matrix(p, policy.n_per_state);
    CHECK(mean_service_time(1, policy, matrix) ==
          doctest::Approx(policy.t_round[0] / 0.8).epsilon(1e-14));
  }
}

TEST_CASE("energy MGF") {
  SUBCASE("unit powers reduce to the time MGF") {
    const auto p = test_link();
    const auto policy = optimize_policy(p, 4);
    const auto matrix = make_transition_matrix(p, policy.n_per_state);
    for (int n = 1; n <= 4; ++n)
      for (double s : {-10.0, -1.0, 0.0})
        CHECK(energy_mgf_eval(n, s, policy, matrix, p) ==
              doctest::Approx(mgf_eval(n, s, policy, matrix)).epsilon(1e-14));
  }
  SUBCASE("normalization at s=0") {
    auto p = test_link();
    p.tx_power = 3.0;
    p.rx_power = 0.5;
    const auto policy = optimize_policy(p, 3);
    const auto matrix = make_transition_matrix(p, policy.n_per_state);
    CHECK(energy_mgf_eval(3, 0.0, policy, matrix, p) ==
          doctest::Approx(1.0).epsilon(1e-14));
  }
  SUBCASE("transmit-only energy against enumeration") {
    auto p = test_link();
    p.tx_power = 2.0;
    p.rx_power = 1e-9;  // validate() requires positive power
    const auto policy = optimize_policy(p, 2);
    const auto matrix = make_transition_matrix(p, policy.n_per_state);
    const auto weights = round_energies(policy, p);
    for (double s : {-5.0, -1.0}) {
      const double closed = energy_mgf_eval(2, s, policy, matrix, p);
      const double enumd =
          mgf_direct_enum_weights(2, s, weights, matrix, 1e-11);
      CHECK(std::abs(closed - enumd) <= 1e-9);
    }
  }
}

TEST_CASE("divergence is reported") {
  const auto p = test_link(0.5, 0.0);
  const auto policy = make_policy(p, {1});
  const auto matrix = make_transition_matrix(p, policy.n_per_state);
  // P_11 = 0.5; choose s with e^{sT} = 4 so the geometric factor diverges
  const double s = std::log(4.0) / policy.t_round[0];
  CHECK_THROWS_AS(mgf_eval(1, s, policy, matrix), numerical_error);
}
