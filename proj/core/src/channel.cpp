#include "ncqueue/channel.hpp"

#include <stdexcept>
#include <string>

#include "ncqueue/errors.hpp"

namespace ncq {

void LinkParams::validate() const {
  if (!(pe >= 0.0 && pe < 1.0)) throw config_error("pe must be in [0,1)");
  if (!(pe_ack >= 0.0 && pe_ack < 1.0))
    throw config_error("pe_ack must be in [0,1)");
  if (!(rate_bps > 0.0)) throw config_error("rate_bps must be positive");
  if (payload_bits <= 0) throw config_error("payload_bits must be positive");
  if (header_bits < 0) throw config_error("header_bits must be non-negative");
  if (coeff_bits <= 0) throw config_error("coeff_bits must be positive");
  if (ack_bits <= 0) throw config_error("ack_bits must be positive");
  if (prop_delay_s < 0.0)
    throw config_error("prop_delay_s must be non-negative");
  if (!(tx_power > 0.0)) throw config_error("tx_power must be positive");
  if (!(rx_power > 0.0)) throw config_error("rx_power must be positive");
  if (t_wait_override && !(*t_wait_override > 0.0))
    throw config_error("t_wait_s must be positive");
}

double packet_duration(const LinkParams& params, int batch_size) {
  if (batch_size < 1)
    throw std::invalid_argument("packet_duration: batch_size must be >= 1");
  const double bits = static_cast<double>(params.header_bits) +
                      static_cast<double>(params.payload_bits) +
                      static_cast<double>(params.coeff_bits) * batch_size;
  return bits / params.rate_bps;
}

double wait_time(const LinkParams& params) {
  if (params.t_wait_override) return *params.t_wait_override;
  return 2.0 * params.prop_delay_s +
         static_cast<double>(params.ack_bits) / params.rate_bps;
}

TimingDerived derive_timing(const LinkParams& params, int batch_size) {
  return TimingDerived{batch_size, packet_duration(params, batch_size),
                       wait_time(params)};
}

double round_duration(const LinkParams& params, int batch_size, int state,
                      int n_packets) {
  if (state < 1 || state > batch_size)
    throw std::invalid_argument("round_duration: state out of range");
  if (n_packets < 1)
    throw std::invalid_argument("round_duration: n_packets must be >= 1");
  return n_packets * packet_duration(params, batch_size) + wait_time(params);
}

double round_energy(const LinkParams& params, int batch_size, int state,
                    int n_packets) {
  if (state < 1 || state > batch_size)
    throw std::invalid_argument("round_energy: state out of range");
  if (n_packets < 1)
    throw std::invalid_argument("round_energy: n_packets must be >= 1");
  return params.tx_power * n_packets * packet_duration(params, batch_size) +
         params.rx_power * wait_time(params);
}

}  // namespace ncq
