// ncq: bulk-service queueing analysis of RLNC over a TDD erasure link,
// plus a Monte Carlo simulator for cross-validation.
//
// Subcommands: policy, service-dist, arrivals, queue, sweep, simulate.
// Exit codes: 0 ok, 2 configuration error, 3 numerical failure,
// 4 instability reported as error.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "ncqueue/arrival_counts.hpp"
#include "ncqueue/bulk_queue.hpp"
#include "ncqueue/channel.hpp"
#include "ncqueue/config.hpp"
#include "ncqueue/des_oracle.hpp"
#include "ncqueue/errors.hpp"
#include "ncqueue/rlnc_chain.hpp"
#include "ncqueue/service_mgf.hpp"

using nlohmann::json;

namespace {

constexpr const char* kVersion = "0.1.0";

std::string fmt12(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

std::string fmt4(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.4f", v);
  return buf;
}

json config_snapshot(const ncq::FileConfig& cfg) {
  json j{{"pe", cfg.link.pe},
         {"pe_ack", cfg.link.pe_ack},
         {"rate_bps", cfg.link.rate_bps},
         {"payload_bits", cfg.link.payload_bits},
         {"header_bits", cfg.link.header_bits},
         {"coeff_bits", cfg.link.coeff_bits},
         {"ack_bits", cfg.link.ack_bits},
         {"prop_delay_s", cfg.link.prop_delay_s},
         {"tx_power", cfg.link.tx_power},
         {"rx_power", cfg.link.rx_power},
         {"lambda", cfg.lambda},
         {"m", cfg.m},
         {"K", cfg.K},
         {"B", cfg.B},
         {"pmf_tol", cfg.pmf_tol},
         {"search_window", cfg.search_window}};
  if (cfg.link.t_wait_override) j["t_wait_s"] = *cfg.link.t_wait_override;
  return j;
}

json make_manifest(const std::string& command, const ncq::FileConfig& cfg,
                   const std::vector<std::string>& outputs) {
  return json{{"tool", "ncq"},
              {"version", kVersion},
              {"command", command},
              {"config", config_snapshot(cfg)},
              {"outputs", outputs}};
}

struct Output {
  std::string path;    // empty = stdout
  std::string format;  // csv | json | table

  // Writes the payload; CSV/table files get a sibling manifest file, JSON
  // embeds its manifest.
  void emit(const json& manifest, const json& result,
            const std::string& tabular) const {
    std::string body;
    if (format == "json") {
      json doc{{"manifest", manifest}, {"result", result}};
      body = doc.dump(2) + "\n";
    } else {
      body = tabular;
    }
    if (path.empty()) {
      std::cout << body;
    } else {
      std::ofstream out(path);
      if (!out) throw ncq::config_error("cannot open output file: " + path);
      out << body;
      if (format != "json") {
        std::ofstream mf(path + ".manifest.json");
        mf << manifest.dump(2) << "\n";
      }
    }
  }
};

struct QueueOverrides {
  std::optional<double> lambda;
  std::optional<int> m, K, B;

  void apply(ncq::FileConfig& cfg) const {
    if (lambda) cfg.lambda = *lambda;
    if (m) cfg.m = *m;
    if (K) cfg.K = *K;
    if (B) cfg.B = *B;
  }
};

ncq::QueueConfig queue_config(const ncq::FileConfig& cfg) {
  ncq::QueueConfig qc{cfg.m, cfg.K, cfg.B, cfg.lambda};
  qc.validate();
  return qc;
}

int run_policy(const ncq::FileConfig& cfg, int batch_size, const Output& out) {
  const auto policy = ncq::optimize_policy(cfg.link, batch_size, cfg.search_window);

  json result{{"batch_size", policy.batch_size},
              {"n_per_state", policy.n_per_state},
              {"t_round_s", policy.t_round},
              {"expected_completion_s", policy.expected_completion}};

  std::ostringstream tab;
  if (out.format == "csv") {
    tab << "i,N_i,T_round_s,E_completion_s\n";
    for (int i = 1; i <= policy.batch_size; ++i)
      tab << i << ',' << policy.n_per_state[i - 1] << ','
          << fmt12(policy.t_round[i - 1]) << ','
          << fmt12(policy.expected_completion[i - 1]) << '\n';
  } else {
    tab << "state i   N_i   T^i [s]   E[T_i] [s]\n";
    for (int i = 1; i <= policy.batch_size; ++i)
      tab << i << "   " << policy.n_per_state[i - 1] << "   "
          << fmt4(policy.t_round[i - 1]) << "   "
          << fmt4(policy.expected_completion[i - 1]) << '\n';
  }
  out.emit(make_manifest("policy", cfg, {out.path}), result, tab.str());
  return 0;
}

int run_service_dist(const ncq::FileConfig& cfg, int state, const Output& out) {
  const auto policy = ncq::optimize_policy(cfg.link, state, cfg.search_window);
  const auto matrix = ncq::make_transition_matrix(cfg.link, policy.n_per_state);
  const auto pmf = ncq::completion_pmf(state, policy, matrix, cfg.pmf_tol);

  json atoms = json::array();
  for (const auto& [t, p] : pmf.atoms) atoms.push_back({{"t", t}, {"p", p}});
  json result{{"state", pmf.batch_size_state},
              {"atoms", atoms},
              {"truncated_mass", pmf.truncated_mass}};

  std::ostringstream tab;
  if (out.format == "csv") {
    tab << "t_s,prob\n";
    for (const auto& [t, p] : pmf.atoms)
      tab << fmt12(t) << ',' << fmt12(p) << '\n';
  } else {
    tab << "completion time [s]   prob\n";
    for (const auto& [t, p] : pmf.atoms)
      tab << fmt4(t) << "   " << fmt12(p) << '\n';
    tab << "truncated mass: " << fmt12(pmf.truncated_mass) << '\n';
  }
  out.emit(make_manifest("service-dist", cfg, {out.path}), result, tab.str());
  return 0;
}

int run_arrivals(const ncq::FileConfig& cfg, int service_type, int kmax,
                 const Output& out) {
  const auto policy =
      ncq::optimize_policy(cfg.link, service_type, cfg.search_window);
  const auto matrix = ncq::make_transition_matrix(cfg.link, policy.n_per_state);
  const auto pmf = ncq::completion_pmf(service_type, policy, matrix, cfg.pmf_tol);
  const auto arr = ncq::arrival_pmf(service_type, cfg.lambda, kmax, pmf);

  json result{{"j", arr.service_type},
              {"lambda", arr.lambda_rate},
              {"a", arr.a},
              {"tail_bound", arr.tail_bound}};

  std::ostringstream tab;
  if (out.format == "csv") {
    tab << "k,a_k\n";
    for (std::size_t k = 0; k < arr.a.size(); ++k)
      tab << k << ',' << fmt12(arr.a[k]) << '\n';
  } else {
    tab << "k    a_k (j=" << service_type << ", lambda=" << cfg.lambda << ")\n";
    for (std::size_t k = 0; k < arr.a.size(); ++k)
      tab << k << "    " << fmt12(arr.a[k]) << '\n';
    tab << "tail bound: " << fmt12(arr.tail_bound) << '\n';
  }
  out.emit(make_manifest("arrivals", cfg, {out.path}), result, tab.str());
  return 0;
}

int run_queue(const ncq::FileConfig& cfg, bool fail_on_unstable,
              const Output& out) {
  const auto qc = queue_config(cfg);
  const auto sol = ncq::solve_queue(cfg.link, qc, cfg.pmf_tol, cfg.search_window);

  json result{{"pi", sol.pi},
              {"mean_queue", sol.mean_queue},
              {"mean_batch", sol.mean_batch},
              {"stable_infinite", sol.stable_infinite},
              {"input_error_bound", sol.input_error_bound}};

  std::ostringstream tab;
  if (out.format == "csv") {
    tab << "i,pi_i\n";
    for (std::size_t i = 0; i < sol.pi.size(); ++i)
      tab << i << ',' << fmt12(sol.pi[i]) << '\n';
    tab << "EQ," << fmt12(sol.mean_queue) << "\nEZ," << fmt12(sol.mean_batch)
        << "\nstable," << (sol.stable_infinite ? 1 : 0) << "\nerr_bound,"
        << fmt12(sol.input_error_bound) << '\n';
  } else {
    tab << "stationary distribution (lambda=" << cfg.lambda << ", m=" << qc.m
        << ", K=" << qc.k_max << ", B=" << qc.capacity << "):\n";
    for (std::size_t i = 0; i < sol.pi.size(); ++i)
      tab << "  pi_" << i << " = " << fmt12(sol.pi[i]) << '\n';
    tab << "E[Q] = " << fmt4(sol.mean_queue) << '\n'
        << "E[Z] = " << fmt4(sol.mean_batch) << '\n'
        << "stable (infinite capacity): "
        << (sol.stable_infinite ? "yes" : "no") << '\n'
        << "input error bound: " << fmt12(sol.input_error_bound) << '\n';
  }
  out.emit(make_manifest("queue", cfg, {out.path}), result, tab.str());
  if (fail_on_unstable && !sol.stable_infinite) {
    std::cerr << "ncq: system unstable for infinite capacity "
                 "(lambda >= K*mu_K)\n";
    return 4;
  }
  return 0;
}

int run_sweep(const ncq::FileConfig& cfg, const std::vector<double>& lambdas,
              int m_min, int m_max, int k_min, int k_max, int capacity,
              bool fail_on_unstable, const Output& out) {
  const auto res = ncq::sweep(cfg.link, lambdas, m_min, m_max, k_min, k_max,
                              capacity, cfg.pmf_tol, cfg.search_window);

  json cells = json::array();
  for (const auto& c : res.cells) {
    json jc{{"lambda", c.lambda}, {"m", c.m},
            {"K", c.k},           {"B", c.capacity},
            {"EQ", c.mean_queue}, {"EZ", c.mean_batch},
            {"stable", c.stable}, {"err_bound", c.err_bound}};
    if (!c.error.empty()) jc["error"] = c.error;
    cells.push_back(jc);
  }
  json argmin = json::array();
  for (const auto& [lambda, mins] : res.argmin) {
    json entries = json::array();
    for (const auto& c : mins)
      entries.push_back({{"m", c.m}, {"K", c.k}, {"EQ", c.mean_queue}});
    argmin.push_back({{"lambda", lambda}, {"minimizers", entries}});
  }
  json result{{"cells", cells}, {"argmin", argmin}};

  std::ostringstream tab;
  if (out.format == "csv") {
    tab << "lambda,m,K,B,EQ,EZ,stable,err_bound\n";
    for (const auto& c : res.cells) {
      if (!c.error.empty()) continue;
      tab << fmt12(c.lambda) << ',' << c.m << ',' << c.k << ',' << c.capacity
          << ',' << fmt12(c.mean_queue) << ',' << fmt12(c.mean_batch) << ','
          << (c.stable ? 1 : 0) << ',' << fmt12(c.err_bound) << '\n';
    }
  } else {
    tab << "lambda   m   K   B   E[Q]     E[Z]     stable\n";
    for (const auto& c : res.cells) {
      if (!c.error.empty()) {
        tab << c.lambda << "   " << c.m << "   " << c.k << "   error: "
            << c.error << '\n';
        continue;
      }
      tab << c.lambda << "   " << c.m << "   " << c.k << "   " << c.capacity
          << "   " << fmt4(c.mean_queue) << "   " << fmt4(c.mean_batch)
          << "   " << (c.stable ? "yes" : "no") << '\n';
    }
    for (const auto& [lambda, mins] : res.argmin) {
      tab << "argmin E[Q] at lambda=" << lambda << ":";
      for (const auto& c : mins)
        tab << " (m=" << c.m << ",K=" << c.k << ",EQ=" << fmt4(c.mean_queue)
            << ")";
      tab << '\n';
    }
  }
  out.emit(make_manifest("sweep", cfg, {out.path}), result, tab.str());

  if (fail_on_unstable) {
    for (const auto& c : res.cells)
      if (c.error.empty() && !c.stable) {
        std::cerr << "ncq: unstable cell lambda=" << c.lambda << " (m=" << c.m
                  << ",K=" << c.k << ")\n";
        return 4;
      }
  }
  return 0;
}

int run_simulate(const ncq::FileConfig& cfg, std::uint64_t seed,
                 std::uint64_t completions, double warmup, int initial_queue,
                 bool strict_ack, const Output& out) {
  ncq::SimConfig sim;
  sim.queue = queue_config(cfg);
  sim.link = cfg.link;
  for (int z = cfg.m; z <= cfg.K; ++z)
    sim.policies.push_back(
        ncq::optimize_policy(cfg.link, z, cfg.search_window));
  sim.seed = seed;
  sim.target_completions = completions;
  sim.warmup_fraction = warmup;
  sim.initial_queue = initial_queue;
  sim.strict_ack_mode = strict_ack;

  const auto rep = ncq::simulate(sim);

  json per_type = json::object();
  for (const auto& [z, st] : rep.per_type) {
    per_type[std::to_string(z)] = {
        {"services", st.services},
        {"mean_service_time", st.mean_service_time},
        {"arrival_freq", st.arrival_freq},
        {"arrival_freq_se", st.arrival_freq_se}};
  }
  json result{{"seed", seed},
              {"completions", rep.completions},
              {"arrivals", rep.arrivals},
              {"served_packets", rep.served_packets},
              {"dropped", rep.dropped},
              {"in_system_at_end", rep.in_system_at_end},
              {"mean_queue_embedded", rep.mean_queue_embedded},
              {"se_queue_embedded", rep.se_queue_embedded},
              {"mean_queue_time_avg", rep.mean_queue_time_avg},
              {"se_queue_time_avg", rep.se_queue_time_avg},
              {"mean_batch", rep.mean_batch},
              {"se_batch", rep.se_batch},
              {"embedded_hist", rep.embedded_hist},
              {"per_type", per_type}};

  std::ostringstream tab;
  tab << "completions: " << rep.completions << '\n'
      << "arrivals: " << rep.arrivals << "  dropped: " << rep.dropped << '\n'
      << "E[Q] embedded: " << fmt4(rep.mean_queue_embedded) << " +- "
      << fmt4(rep.se_queue_embedded) << '\n'
      << "E[Q] time-avg: " << fmt4(rep.mean_queue_time_avg) << " +- "
      << fmt4(rep.se_queue_time_avg) << '\n'
      << "E[Z]: " << fmt4(rep.mean_batch) << " +- " << fmt4(rep.se_batch)
      << '\n';
  out.emit(make_manifest("simulate", cfg, {out.path}), result, tab.str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bulk-service queueing analysis for RLNC over TDD erasure links"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path;
  Output out;
  out.format = "table";
  app.add_option("--config", config_path, "Configuration file (key = value)")
      ->required();
  app.add_option("--out", out.path, "Output file (default: stdout)");
  app.add_option("--format", out.format, "Output format")
      ->check(CLI::IsMember({"csv", "json", "table"}));

  QueueOverrides qo;

  auto* c_policy = app.add_subcommand("policy", "Optimized per-state packet counts");
  int policy_m = 1;
  c_policy->add_option("-M,--batch-size", policy_m, "Batch size M")->required();

  auto* c_dist = app.add_subcommand("service-dist", "Completion-time distribution");
  int dist_j = 1;
  c_dist->add_option("-j,--state", dist_j, "Starting state")->required();

  auto* c_arr = app.add_subcommand("arrivals", "Arrival-count probabilities a_k");
  int arr_j = 1;
  int arr_kmax = -1;
  c_arr->add_option("-j,--service-type", arr_j, "Bulk size j")->required();
  c_arr->add_option("--kmax", arr_kmax, "Largest k (default: B)");
  c_arr->add_option("--lambda", qo.lambda, "Arrival rate override");

  auto* c_queue = app.add_subcommand("queue", "Stationary distribution and metrics");
  bool fail_on_unstable = false;
  c_queue->add_option("--lambda", qo.lambda, "Arrival rate override");
  c_queue->add_option("--m", qo.m, "Minimum bulk size override");
  c_queue->add_option("--K", qo.K, "Maximum bulk size override");
  c_queue->add_option("--B", qo.B, "Capacity override");
  c_queue->add_flag("--fail-on-unstable", fail_on_unstable,
                    "Exit 4 when lambda >= K*mu_K");

  auto* c_sweep = app.add_subcommand("sweep", "Grid over (lambda, m, K)");
  std::vector<double> sweep_lambdas;
  int m_min = 1, m_max = 1, k_min = 1, k_max = 1;
  std::optional<int> sweep_b;
  c_sweep->add_option("--lambda", sweep_lambdas, "Arrival rates")->required();
  c_sweep->add_option("--m-min", m_min, "Smallest m")->required();
  c_sweep->add_option("--m-max", m_max, "Largest m")->required();
  c_sweep->add_option("--K-min", k_min, "Smallest K")->required();
  c_sweep->add_option("--K-max", k_max, "Largest K")->required();
  c_sweep->add_option("--B", sweep_b, "Capacity override");
  c_sweep->add_flag("--fail-on-unstable", fail_on_unstable,
                    "Exit 4 when any cell is unstable");

  auto* c_sim = app.add_subcommand("simulate", "Monte Carlo discrete-event run");
  std::uint64_t seed = 1;
  std::uint64_t completions = 100000;
  double warmup = 0.1;
  int initial_queue = 0;
  bool strict_ack = false;
  c_sim->add_option("--lambda", qo.lambda, "Arrival rate override");
  c_sim->add_option("--m", qo.m, "Minimum bulk size override");
  c_sim->add_option("--K", qo.K, "Maximum bulk size override");
  c_sim->add_option("--B", qo.B, "Capacity override");
  c_sim->add_option("--seed", seed, "RNG seed");
  c_sim->add_option("--completions", completions, "Service completions to run");
  c_sim->add_option("--warmup", warmup, "Warmup fraction in [0,1)");
  c_sim->add_option("--initial-queue", initial_queue, "Packets queued at t=0");
  c_sim->add_flag("--strict-ack", strict_ack,
                  "Receiver progress persists across lost ACKs");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;  // usage problems are configuration errors
  }

  try {
    ncq::FileConfig cfg = ncq::load_config(config_path);
    qo.apply(cfg);

    if (*c_policy) return run_policy(cfg, policy_m, out);
    if (*c_dist) return run_service_dist(cfg, dist_j, out);
    if (*c_arr)
      return run_arrivals(cfg, arr_j, arr_kmax < 0 ? cfg.B : arr_kmax, out);
    if (*c_queue) return run_queue(cfg, fail_on_unstable, out);
    if (*c_sweep)
      return run_sweep(cfg, sweep_lambdas, m_min, m_max, k_min, k_max,
                       sweep_b.value_or(cfg.B), fail_on_unstable, out);
    if (*c_sim)
      return run_simulate(cfg, seed, completions, warmup, initial_queue,
                          strict_ack, out);
    return 2;
  } catch (const ncq::config_error& e) {
    std::cerr << "ncq: configuration error: " << e.what() << '\n';
    return 2;
  } catch (const ncq::numerical_error& e) {
    std::cerr << "ncq: numerical failure: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "ncq: error: " << e.what() << '\n';
    return 2;
  }
}
