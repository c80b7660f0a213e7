#pragma once

#include <istream>
#include <string>

#include "ncqueue/channel.hpp"

namespace ncq {

// Everything a run needs, read from a `key = value` text file.
// Link keys: pe, pe_ack, rate_bps, payload_bits, header_bits, coeff_bits,
// ack_bits, prop_delay_s, tx_power, rx_power, t_wait_s (optional override).
// Queue keys: lambda, m, K, B. Tolerances: pmf_tol, search_window.
// Unknown keys are an error; missing pe_ack defaults to pe.
struct FileConfig {
  LinkParams link;
  double lambda = 1.0;
  int m = 1;
  int K = 1;
  int B = 30;
  double pmf_tol = 1e-10;
  int search_window = 50;
};

// Throws config_error with line numbers on parse problems.
FileConfig parse_config(std::istream& in, const std::string& source_name);
FileConfig load_config(const std::string& path);

}  // namespace ncq
