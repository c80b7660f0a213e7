#pragma once

#include <map>
#include <string>
#include <vector>

#include "ncqueue/arrival_counts.hpp"
#include "ncqueue/channel.hpp"

namespace ncq {

// Bulk range (m..k_max), waiting-room capacity and arrival rate of the
// embedded M/G^(m,K)/1 queue.
struct QueueConfig {
  int m = 1;
  int k_max = 1;      // K
  int capacity = 30;  // B, packets waiting (excludes the batch in service)
  double lambda_rate = 1.0;

  void validate() const;  // throws config_error
};

struct QueueSolution {
  std::vector<double> pi;  // pi_0..pi_B at service-completion epochs
  double mean_queue = 0.0;
  double mean_batch = 0.0;
  bool stable_infinite = false;  // lambda < K * mu_K
  // Propagated truncation bound from the arrival inputs plus any
  // renormalization applied after the solve.
  double input_error_bound = 0.0;
};

// Embedded transition matrix over queue lengths 0..B. `arrivals` must hold an
// ArrivalPmf with kmax >= B for every bulk size in m..K. Rows sum to 1
// exactly: the last column carries the R(k,l) arrival tail.
std::vector<std::vector<double>> build_embedded_matrix(
    const QueueConfig& cfg, const std::map<int, ArrivalPmf>& arrivals);

// Left stationary vector of a row-stochastic matrix: pi P = pi, sum pi = 1.
// Dense direct solve with the normalization replacing one equation;
// guarantees residual ||pi P - pi||_inf <= 1e-10 or throws numerical_error.
std::vector<double> stationary_distribution(
    const std::vector<std::vector<double>>& p);

// E[Q] = sum i * pi_i.
double mean_queue_size(const std::vector<double>& pi);

// E[Z_(m,K)] = sum clamp(i, m, K) * pi_i, with the i >= K bucket computed as
// 1 - sum_{i<K} pi_i. Exactly m when m = K.
double mean_batch_size(const std::vector<double>& pi, const QueueConfig& cfg);

// Infinite-capacity stability: lambda < K * mu_K (strict).
bool stability_check(const QueueConfig& cfg, double mu_K);

// Full pipeline for one configuration: optimize policies for bulk sizes
// m..K, expand completion PMFs, build and solve the embedded chain.
QueueSolution solve_queue(const LinkParams& params, const QueueConfig& cfg,
                          double pmf_tol = 1e-10, int search_window = 50);

struct SweepCell {
  double lambda = 0.0;
  int m = 0;
  int k = 0;
  int capacity = 0;
  double mean_queue = 0.0;
  double mean_batch = 0.0;
  bool stable = false;
  double err_bound = 0.0;
  std::string error;  // non-empty when the cell failed
};

struct SweepResult {
  std::vector<SweepCell> cells;  // deterministic (lambda, m, K) order
  // Per-lambda minimizers of E[Q], every cell within 0.1% of the minimum.
  std::map<double, std::vector<SweepCell>> argmin;
};

SweepResult sweep(const LinkParams& params, const std::vector<double>& lambdas,
                  int m_min, int m_max, int k_min, int k_max, int capacity,
                  double pmf_tol = 1e-10, int search_window = 50);

}  // namespace ncq
