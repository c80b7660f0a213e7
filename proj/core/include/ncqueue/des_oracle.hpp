#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "ncqueue/bulk_queue.hpp"
#include "ncqueue/channel.hpp"
#include "ncqueue/rlnc_chain.hpp"

namespace ncq {

// splitmix64 (Steele, Lea, Flood 2014): 64-bit counter-based generator.
// Deterministic across platforms, one independent stream per seed.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Uniform in [0, 1), 53-bit resolution.
  double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  bool bernoulli(double p) { return uniform01() < p; }

  // Inverse-CDF exponential; rate 0 yields +infinity.
  double exponential(double rate);

 private:
  std::uint64_t state_;
};

struct SimConfig {
  QueueConfig queue;
  LinkParams link;
  std::vector<Policy> policies;  // bulk sizes m..K, in order
  std::uint64_t seed = 1;
  std::uint64_t target_completions = 100000;  // total, including warmup
  double max_sim_time_s = 0.0;                // 0 = no time horizon
  double warmup_fraction = 0.1;
  int initial_queue = 0;
  // When true, receiver dof progress persists across lost ACKs instead of
  // mirroring the analytic model. Model-fidelity probe, not used by
  // acceptance tests.
  bool strict_ack_mode = false;
  int arrival_hist_kmax = 32;

  void validate() const;
};

struct ServiceTypeStats {
  std::uint64_t services = 0;
  double mean_service_time = 0.0;
  std::vector<double> arrival_freq;     // fraction of services with k arrivals
  std::vector<double> arrival_freq_se;  // binomial standard errors
};

struct SimReport {
  std::uint64_t completions = 0;      // post-warmup service completions
  std::uint64_t arrivals = 0;         // all arrivals, including warmup
  std::uint64_t served_packets = 0;
  std::uint64_t dropped = 0;
  std::uint64_t in_system_at_end = 0;  // waiting in queue when the run stopped

  double mean_queue_embedded = 0.0;  // queue length at completion epochs
  double se_queue_embedded = 0.0;
  double mean_queue_time_avg = 0.0;  // continuous-time average
  double se_queue_time_avg = 0.0;
  double mean_batch = 0.0;
  double se_batch = 0.0;

  std::map<int, ServiceTypeStats> per_type;
  std::vector<double> embedded_hist;  // normalized, indices 0..B
};

// Event-driven run of the full system: Poisson arrivals into a FIFO buffer of
// capacity B, bulk RLNC-TDD service with per-packet and ACK erasures.
// Bit-identical output for identical configs. Standard errors via batch
// means over >= 20 batches.
SimReport simulate(const SimConfig& cfg);

// Independent replications of a single type-j service (no queue): counts of
// Poisson arrivals during each service and the mean service time.
// Used to validate arrival_pmf and mean_service_time.
struct ServiceSample {
  std::uint64_t runs = 0;
  std::vector<std::uint64_t> arrival_counts;  // k = 0..kmax, overflow in last
  double mean_service_time = 0.0;
  double se_service_time = 0.0;
};
ServiceSample sample_service(const LinkParams& link, const Policy& policy,
                             double lambda_rate, std::uint64_t runs,
                             std::uint64_t seed, int kmax);

}  // namespace ncq
