#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "ncqueue/channel.hpp"
#include "ncqueue/errors.hpp"
#include "test_params.hpp"

using namespace ncq;

TEST_CASE("packet duration from bit layout") {
  const auto p = test_link();
  CHECK(packet_duration(p, 5) == doctest::Approx(10180.0 / 1.5e6).epsilon(1e-12));

  LinkParams q = p;
  q.header_bits = 0;
  q.payload_bits = 1500000;
  CHECK(packet_duration(q, 1) ==
        doctest::Approx((1.5e6 + 20.0) / 1.5e6).epsilon(1e-12));

  // affine in M with slope g/R
  CHECK(packet_duration(p, 2) - packet_duration(p, 1) ==
        doctest::Approx(20.0 / 1.5e6).epsilon(1e-12));
  for (int m = 1; m < 10; ++m)
    CHECK(packet_duration(p, m + 1) - packet_duration(p, m) ==
          doctest::Approx(20.0 / 1.5e6).epsilon(1e-12));

  CHECK_THROWS_AS(packet_duration(p, 0), std::invalid_argument);
}

TEST_CASE("waiting window") {
  const auto p = test_link();
  CHECK(wait_time(p) == doctest::Approx(25e-3 + 100.0 / 1.5e6).epsilon(1e-12));

  LinkParams q = p;
  q.prop_delay_s = 2 * p.prop_delay_s;
  CHECK(wait_time(q) - wait_time(p) ==
        doctest::Approx(2 * p.prop_delay_s).epsilon(1e-12));

  q = p;
  q.t_wait_override = 0.5;
  CHECK(wait_time(q) == 0.5);
}

TEST_CASE("round duration") {
  const auto p = test_link();
  CHECK(round_duration(p, 5, 1, 1) ==
        doctest::Approx(packet_duration(p, 5) + wait_time(p)).epsilon(1e-15));
  CHECK(round_duration(p, 5, 3, 7) == doctest::Approx(7.2573e-2).epsilon(1e-4));
  CHECK_THROWS_AS(round_duration(p, 5, 3, 0), std::invalid_argument);
  CHECK_THROWS_AS(round_duration(p, 5, 6, 6), std::invalid_argument);

  // consecutive N differ by exactly T_p
  for (int n = 1; n < 20; ++n)
    CHECK(round_duration(p, 5, 2, n + 1) - round_duration(p, 5, 2, n) ==
          doctest::Approx(packet_duration(p, 5)).epsilon(1e-12));
}

TEST_CASE("round energy") {
  auto p = test_link();
  SUBCASE("unit powers collapse to time") {
    for (int m : {1, 3, 5})
      for (int n = 1; n <= 10; ++n)
        CHECK(round_energy(p, m, 1, n) == round_duration(p, m, 1, n));
  }
  SUBCASE("transmit-only energy") {
    p.tx_power = 2.0;
    p.rx_power = 0.0;
    CHECK(round_energy(p, 5, 2, 4) ==
          doctest::Approx(2.0 * 4 * packet_duration(p, 5)).epsilon(1e-12));
  }
  SUBCASE("mixed powers") {
    p.tx_power = 1.0;
    p.rx_power = 0.5;
    CHECK(round_energy(p, 5, 3, 7) == doctest::Approx(6.0040e-2).epsilon(1e-4));
  }
}

TEST_CASE("parameter validation") {
  auto p = test_link();
  p.pe = 1.0;
  CHECK_THROWS_AS(p.validate(), config_error);
  p = test_link();
  p.rate_bps = 0.0;
  CHECK_THROWS_AS(p.validate(), config_error);
  p = test_link();
  p.header_bits = 0;  // header may be zero
  CHECK_NOTHROW(p.validate());
}
