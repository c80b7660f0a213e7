#pragma once

#include <cstdint>
#include <optional>

namespace ncq {

// Physical and protocol constants of the TDD erasure link.
// Times are seconds, rates bits/second, powers energy/second.
struct LinkParams {
  double pe = 0.2;          // erasure probability of a coded data packet
  double pe_ack = 0.2;      // erasure probability of an ACK packet
  double rate_bps = 1.5e6;  // link data rate R
  std::int64_t payload_bits = 10000;  // data bits per packet, n
  std::int64_t header_bits = 80;      // header size h
  std::int64_t coeff_bits = 20;       // bits per coding coefficient, g
  std::int64_t ack_bits = 100;        // ACK packet size
  double prop_delay_s = 12.5e-3;      // one-way propagation time
  double tx_power = 1.0;
  double rx_power = 1.0;
  // Replaces the default waiting-window formula when set.
  std::optional<double> t_wait_override;

  void validate() const;  // throws config_error on violated invariants
};

// Timing constants derived for one batch size.
struct TimingDerived {
  int batch_size;     // M
  double t_packet_s;  // T_p = (h + n + g*M) / R
  double t_wait_s;    // T_w
};

// Duration of one coded packet carrying M coefficients: (h + n + g*M) / R.
double packet_duration(const LinkParams& params, int batch_size);

// Waiting window T_w: round-trip propagation plus ACK transmission,
// unless overridden in params.
double wait_time(const LinkParams& params);

TimingDerived derive_timing(const LinkParams& params, int batch_size);

// T^i = N_i * T_p + T_w, the deterministic round length from dof state i.
double round_duration(const LinkParams& params, int batch_size, int state,
                      int n_packets);

// E^i = tx_power * N_i * T_p + rx_power * T_w.
double round_energy(const LinkParams& params, int batch_size, int state,
                    int n_packets);

}  // namespace ncq
