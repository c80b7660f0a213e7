#include "ncqueue/des_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <tuple>
#include <utility>

#include "ncqueue/errors.hpp"

namespace ncq {

double SplitMix64::exponential(double rate) {
  if (rate <= 0.0) return std::numeric_limits<double>::infinity();
  return -std::log1p(-uniform01()) / rate;
}

void SimConfig::validate() const {
  queue.validate();
  link.validate();
  if (static_cast<int>(policies.size()) != queue.k_max - queue.m + 1)
    throw config_error("simulate: need one policy per bulk size m..K");
  for (int z = queue.m; z <= queue.k_max; ++z)
    if (policies[z - queue.m].batch_size != z)
      throw config_error("simulate: policies must cover bulk sizes m..K in order");
  if (target_completions == 0 && max_sim_time_s <= 0.0)
    throw config_error("simulate: horizon must be positive");
  if (!(warmup_fraction >= 0.0 && warmup_fraction < 1.0))
    throw config_error("simulate: warmup fraction must be in [0,1)");
  if (initial_queue < 0 || initial_queue > queue.capacity)
    throw config_error("simulate: initial_queue must be in [0,B]");
}

namespace {

struct BatchAccumulator {
  // Batch-means standard errors; fixed batch count, batches balanced by the
  // caller feeding equal sample counts.
  std::vector<double> sums;
  std::vector<std::uint64_t> counts;

  explicit BatchAccumulator(int n_batches) : sums(n_batches, 0.0), counts(n_batches, 0) {}

  void add(int batch, double value) {
    sums[batch] += value;
    counts[batch] += 1;
  }

  // (mean, standard error of the mean)
  std::pair<double, double> estimate() const {
    std::vector<double> means;
    for (std::size_t i = 0; i < sums.size(); ++i)
      if (counts[i] > 0) means.push_back(sums[i] / counts[i]);
    if (means.empty()) return {0.0, 0.0};
    double mu = 0.0;
    for (double v : means) mu += v;
    mu /= means.size();
    if (means.size() < 2) return {mu, 0.0};
    double var = 0.0;
    for (double v : means) var += (v - mu) * (v - mu);
    var /= (means.size() - 1);
    return {mu, std::sqrt(var / means.size())};
  }
};

constexpr int kNumBatches = 32;

}  // namespace

SimReport simulate(const SimConfig& cfg) {
  cfg.validate();
  SplitMix64 rng(cfg.seed);

  const int m = cfg.queue.m;
  const int k_max = cfg.queue.k_max;
  const int b = cfg.queue.capacity;
  const double lambda = cfg.queue.lambda_rate;
  const double pe = cfg.link.pe;
  const double pe_ack = cfg.link.pe_ack;

  const std::uint64_t warmup =
      static_cast<std::uint64_t>(cfg.warmup_fraction *
                                 static_cast<double>(cfg.target_completions));

  double t = 0.0;
  int q = cfg.initial_queue;
  std::uint64_t arrivals = 0, dropped = 0, served = 0, completions = 0;
  double next_arrival = t + rng.exponential(lambda);

  // Continuous-time queue integral, reset after warmup.
  double area = 0.0;
  double area_t0 = 0.0;
  double last_event = 0.0;

  const auto advance_to = [&](double t_end) {
    while (next_arrival <= t_end) {
      area += q * (next_arrival - last_event);
      last_event = next_arrival;
      ++arrivals;
      if (q < b)
        ++q;
      else
        ++dropped;
      next_arrival += rng.exponential(lambda);
    }
    area += q * (t_end - last_event);
    last_event = t_end;
    t = t_end;
  };

  BatchAccumulator acc_embedded(kNumBatches);
  BatchAccumulator acc_batchsize(kNumBatches);
  std::vector<double> area_batch(kNumBatches, 0.0);
  std::vector<double> span_batch(kNumBatches, 0.0);
  std::vector<std::uint64_t> embedded_hist(b + 1, 0);

  struct TypeAcc {
    std::uint64_t services = 0;
    double time_sum = 0.0, time_sq = 0.0;
    std::vector<std::uint64_t> k_hist;
  };
  std::vector<TypeAcc> types(k_max - m + 1);
  for (auto& ta : types) ta.k_hist.assign(cfg.arrival_hist_kmax + 2, 0);

  const std::uint64_t post_warmup_total = cfg.target_completions - warmup;
  double prev_epoch_time = 0.0;
  std::uint64_t post_idx = 0;

  while (true) {
    if (cfg.target_completions > 0 && completions >= cfg.target_completions)
      break;
    if (cfg.max_sim_time_s > 0.0 && t >= cfg.max_sim_time_s) break;

    // Fill the queue to the minimum bulk size before serving.
    if (q < m) {
      if (next_arrival == std::numeric_limits<double>::infinity()) break;
      advance_to(next_arrival);
      continue;
    }

    const int z = std::min(q, k_max);
    q -= z;
    const Policy& pol = cfg.policies[z - m];
    const double t_service_start = t;
    const std::uint64_t arrivals_before = arrivals + dropped;

    int dofs_tx = z;               // transmitter's belief
    int dofs_rx = z;               // receiver's true missing dofs
    while (dofs_tx > 0) {
      const int n = pol.n_per_state[dofs_tx - 1];
      advance_to(t + pol.t_round[dofs_tx - 1]);
      int received = 0;
      for (int p = 0; p < n; ++p)
        if (!rng.bernoulli(pe)) ++received;
      const bool ack_ok = !rng.bernoulli(pe_ack);
      if (cfg.strict_ack_mode) {
        dofs_rx -= std::min(received, dofs_rx);
        if (ack_ok) dofs_tx = dofs_rx;
      } else {
        // Mirrors the analytic chain: progress counts only when the ACK lands.
        if (ack_ok) {
          dofs_rx -= std::min(received, dofs_rx);
          dofs_tx = dofs_rx;
        }
      }
    }
    served += z;
    ++completions;

    const double service_time = t - t_service_start;
    const std::uint64_t k_arrived = arrivals + dropped - arrivals_before;

    if (completions == warmup) {
      // Reset the continuous-time accumulator at the warmup boundary.
      area_t0 = area;
      prev_epoch_time = t;
    }
    if (completions > warmup) {
      const int batch = static_cast<int>(
          std::min<std::uint64_t>(post_idx * kNumBatches / std::max<std::uint64_t>(post_warmup_total, 1),
                                  kNumBatches - 1));
      acc_embedded.add(batch, static_cast<double>(q));
      acc_batchsize.add(batch, static_cast<double>(z));
      area_batch[batch] += area - area_t0;
      span_batch[batch] += t - prev_epoch_time;
      area_t0 = area;
      prev_epoch_time = t;
      embedded_hist[q] += 1;

      auto& ta = types[z - m];
      ta.services += 1;
      ta.time_sum += service_time;
      ta.time_sq += service_time * service_time;
      const std::size_t slot =
          std::min<std::size_t>(k_arrived, ta.k_hist.size() - 1);
      ta.k_hist[slot] += 1;
      ++post_idx;
    }
  }

  SimReport report;
  report.completions = completions > warmup ? completions - warmup : 0;
  report.arrivals = arrivals;
  report.served_packets = served;
  report.dropped = dropped;
  report.in_system_at_end = static_cast<std::uint64_t>(q);

  std::tie(report.mean_queue_embedded, report.se_queue_embedded) =
      acc_embedded.estimate();
  std::tie(report.mean_batch, report.se_batch) = acc_batchsize.estimate();

  {
    // Time-average per batch: ratio of per-batch area to per-batch span.
    std::vector<double> ratios;
    for (int i = 0; i < kNumBatches; ++i)
      if (span_batch[i] > 0.0) ratios.push_back(area_batch[i] / span_batch[i]);
    if (!ratios.empty()) {
      double mu = 0.0;
      for (double v : ratios) mu += v;
      mu /= ratios.size();
      report.mean_queue_time_avg = mu;
      if (ratios.size() >= 2) {
        double var = 0.0;
        for (double v : ratios) var += (v - mu) * (v - mu);
        var /= (ratios.size() - 1);
        report.se_queue_time_avg = std::sqrt(var / ratios.size());
      }
    }
  }

  if (report.completions > 0) {
    report.embedded_hist.assign(b + 1, 0.0);
    for (int i = 0; i <= b; ++i)
      report.embedded_hist[i] =
          static_cast<double>(embedded_hist[i]) / report.completions;
  }

  for (int z = m; z <= k_max; ++z) {
    const auto& ta = types[z - m];
    if (ta.services == 0) continue;
    ServiceTypeStats st;
    st.services = ta.services;
    st.mean_service_time = ta.time_sum / ta.services;
    st.arrival_freq.resize(ta.k_hist.size());
    st.arrival_freq_se.resize(ta.k_hist.size());
    for (std::size_t k = 0; k < ta.k_hist.size(); ++k) {
      const double f = static_cast<double>(ta.k_hist[k]) / ta.services;
      st.arrival_freq[k] = f;
      st.arrival_freq_se[k] = std::sqrt(f * (1.0 - f) / ta.services);
    }
    report.per_type.emplace(z, std::move(st));
  }
  return report;
}

ServiceSample sample_service(const LinkParams& link, const Policy& policy,
                             double lambda_rate, std::uint64_t runs,
                             std::uint64_t seed, int kmax) {
  link.validate();
  if (runs == 0) throw config_error("sample_service: runs must be positive");
  SplitMix64 rng(seed);

  ServiceSample out;
  out.runs = runs;
  out.arrival_counts.assign(kmax + 2, 0);  // overflow bucket at the end

  double time_sum = 0.0, time_sq = 0.0;
  for (std::uint64_t r = 0; r < runs; ++r) {
    double service_time = 0.0;
    int dofs = policy.batch_size;
    while (dofs > 0) {
      const int n = policy.n_per_state[dofs - 1];
      service_time += policy.t_round[dofs - 1];
      int received = 0;
      for (int p = 0; p < n; ++p)
        if (!rng.bernoulli(link.pe)) ++received;
      if (!rng.bernoulli(link.pe_ack)) dofs -= std::min(received, dofs);
    }
    // Poisson count over the realized service time.
    std::uint64_t k = 0;
    double t_acc = rng.exponential(lambda_rate);
    while (t_acc <= service_time) {
      ++k;
      t_acc += rng.exponential(lambda_rate);
    }
    out.arrival_counts[std::min<std::uint64_t>(k, kmax + 1)] += 1;
    time_sum += service_time;
    time_sq += service_time * service_time;
  }
  out.mean_service_time = time_sum / runs;
  const double var =
      (time_sq - time_sum * time_sum / runs) / (runs > 1 ? runs - 1 : 1);
  out.se_service_time = std::sqrt(std::max(var, 0.0) / runs);
  return out;
}

}  // namespace ncq
