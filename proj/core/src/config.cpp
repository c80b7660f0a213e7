#include "ncqueue/config.hpp"

#include <cstdint>
#include <fstream>
#include <set>
#include <sstream>
#include <string>

#include "ncqueue/errors.hpp"

namespace ncq {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double parse_real(const std::string& v, const std::string& key, int line) {
  std::size_t pos = 0;
  double x;
  try {
    x = std::stod(v, &pos);
  } catch (const std::exception&) {
    throw config_error("line " + std::to_string(line) + ": bad value for " +
                       key + ": '" + v + "'");
  }
  if (pos != v.size())
    throw config_error("line " + std::to_string(line) +
                       ": trailing characters in value for " + key);
  return x;
}

std::int64_t parse_int(const std::string& v, const std::string& key,
                       int line) {
  const double x = parse_real(v, key, line);
  const auto n = static_cast<std::int64_t>(x);
  if (static_cast<double>(n) != x)
    throw config_error("line " + std::to_string(line) + ": " + key +
                       " must be an integer");
  return n;
}

}  // namespace

FileConfig parse_config(std::istream& in, const std::string& source_name) {
  FileConfig cfg;
  std::set<std::string> seen;
  bool have_pe_ack = false;

  std::string raw;
  int lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    std::string line = raw;
    if (const auto hash = line.find('#'); hash != std::string::npos)
      line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;

    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw config_error(source_name + ":" + std::to_string(lineno) +
                         ": expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string val = trim(line.substr(eq + 1));
    if (key.empty() || val.empty())
      throw config_error(source_name + ":" + std::to_string(lineno) +
                         ": expected 'key = value'");
    if (!seen.insert(key).second)
      throw config_error(source_name + ":" + std::to_string(lineno) +
                         ": duplicate key '" + key + "'");

    if (key == "pe") {
      cfg.link.pe = parse_real(val, key, lineno);
    } else if (key == "pe_ack") {
      cfg.link.pe_ack = parse_real(val, key, lineno);
      have_pe_ack = true;
    } else if (key == "rate_bps") {
      cfg.link.rate_bps = parse_real(val, key, lineno);
    } else if (key == "payload_bits") {
      cfg.link.payload_bits = parse_int(val, key, lineno);
    } else if (key == "header_bits") {
      cfg.link.header_bits = parse_int(val, key, lineno);
    } else if (key == "coeff_bits") {
      cfg.link.coeff_bits = parse_int(val, key, lineno);
    } else if (key == "ack_bits") {
      cfg.link.ack_bits = parse_int(val, key, lineno);
    } else if (key == "prop_delay_s") {
      cfg.link.prop_delay_s = parse_real(val, key, lineno);
    } else if (key == "tx_power") {
      cfg.link.tx_power = parse_real(val, key, lineno);
    } else if (key == "rx_power") {
      cfg.link.rx_power = parse_real(val, key, lineno);
    } else if (key == "t_wait_s") {
      cfg.link.t_wait_override = parse_real(val, key, lineno);
    } else if (key == "lambda") {
      cfg.lambda = parse_real(val, key, lineno);
    } else if (key == "m") {
      cfg.m = static_cast<int>(parse_int(val, key, lineno));
    } else if (key == "K") {
      cfg.K = static_cast<int>(parse_int(val, key, lineno));
    } else if (key == "B") {
      cfg.B = static_cast<int>(parse_int(val, key, lineno));
    } else if (key == "pmf_tol") {
      cfg.pmf_tol = parse_real(val, key, lineno);
    } else if (key == "search_window") {
      cfg.search_window = static_cast<int>(parse_int(val, key, lineno));
    } else {
      throw config_error(source_name + ":" + std::to_string(lineno) +
                         ": unknown key '" + key + "'");
    }
  }

  for (const char* required :
       {"pe", "rate_bps", "payload_bits", "header_bits", "coeff_bits",
        "ack_bits", "prop_delay_s"}) {
    if (!seen.count(required))
      throw config_error(source_name + ": missing required key '" +
                         std::string(required) + "'");
  }
  if (!have_pe_ack) cfg.link.pe_ack = cfg.link.pe;

  cfg.link.validate();
  if (cfg.lambda < 0) throw config_error("lambda must be non-negative");
  if (cfg.pmf_tol <= 0) throw config_error("pmf_tol must be positive");
  if (cfg.search_window < 1)
    throw config_error("search_window must be positive");
  return cfg;
}

FileConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw config_error("cannot open config file: " + path);
  return parse_config(in, path);
}

}  // namespace ncq
