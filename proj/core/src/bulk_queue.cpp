#include "ncqueue/bulk_queue.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "ncqueue/errors.hpp"
#include "ncqueue/service_mgf.hpp"

namespace ncq {

void QueueConfig::validate() const {
  if (!(1 <= m && m <= k_max && k_max <= capacity))
    throw config_error("queue config requires 1 <= m <= K <= B");
  if (lambda_rate < 0.0) throw config_error("lambda must be non-negative");
}

std::vector<std::vector<double>> build_embedded_matrix(
    const QueueConfig& cfg, const std::map<int, ArrivalPmf>& arrivals) {
  cfg.validate();
  const int b = cfg.capacity;
  for (int j = cfg.m; j <= cfg.k_max; ++j) {
    const auto it = arrivals.find(j);
    if (it == arrivals.end())
      throw config_error("build_embedded_matrix: missing arrival pmf for j=" +
                         std::to_string(j));
    if (static_cast<int>(it->second.a.size()) < b + 1)
      throw config_error("build_embedded_matrix: arrival pmf for j=" +
                         std::to_string(j) + " needs kmax >= B");
  }

  std::vector<std::vector<double>> p(b + 1, std::vector<double>(b + 1, 0.0));
  for (int i = 0; i <= b; ++i) {
    int type, shift;
    if (i <= cfg.m) {
      type = cfg.m;  // wait for m, serve m, queue drains fully
      shift = 0;
    } else if (i <= cfg.k_max) {
      type = i;  // serve everything waiting
      shift = 0;
    } else {
      type = cfg.k_max;  // serve K, i-K left over
      shift = i - cfg.k_max;
    }
    const auto& a = arrivals.at(type).a;
    double row_sum = 0.0;
    for (int col = shift; col < b; ++col) {
      p[i][col] = a[col - shift];
      row_sum += p[i][col];
    }
    p[i][b] = 1.0 - row_sum;  // R(B-1-shift, type)
  }
  return p;
}

std::vector<double> stationary_distribution(
    const std::vector<std::vector<double>>& p) {
  const int n = static_cast<int>(p.size());
  for (int i = 0; i < n; ++i) {
    if (static_cast<int>(p[i].size()) != n)
      throw std::invalid_argument("stationary_distribution: non-square matrix");
    double s = 0.0;
    for (double v : p[i]) s += v;
    if (std::abs(s - 1.0) > 1e-12)
      throw std::invalid_argument(
          "stationary_distribution: matrix is not row-stochastic");
  }

  // (P^T - I) x = 0 with the last equation replaced by sum x = 1.
  std::vector<std::vector<double>> a(n, std::vector<double>(n + 1, 0.0));
  for (int i = 0; i < n - 1; ++i) {
    for (int j = 0; j < n; ++j) a[i][j] = p[j][i] - (i == j ? 1.0 : 0.0);
    a[i][n] = 0.0;
  }
  for (int j = 0; j < n; ++j) a[n - 1][j] = 1.0;
  a[n - 1][n] = 1.0;

  // Gaussian elimination with partial pivoting.
  for (int col = 0; col < n; ++col) {
    int piv = col;
    for (int r = col + 1; r < n; ++r)
      if (std::abs(a[r][col]) > std::abs(a[piv][col])) piv = r;
    if (std::abs(a[piv][col]) < 1e-300)
      throw numerical_error("stationary_distribution: singular system "
                            "(reducible chain?)");
    std::swap(a[col], a[piv]);
    for (int r = col + 1; r < n; ++r) {
      const double f = a[r][col] / a[col][col];
      if (f == 0.0) continue;
      for (int c = col; c <= n; ++c) a[r][c] -= f * a[col][c];
    }
  }
  std::vector<double> pi(n, 0.0);
  for (int r = n - 1; r >= 0; --r) {
    double acc = a[r][n];
    for (int c = r + 1; c < n; ++c) acc -= a[r][c] * pi[c];
    pi[r] = acc / a[r][r];
  }

  // Round-off can leave tiny negatives; clamp and renormalize.
  double sum = 0.0;
  for (double& v : pi) {
    if (v < 0.0) {
      if (v < -1e-12)
        throw numerical_error(
            "stationary_distribution: significant negative probability");
      v = 0.0;
    }
    sum += v;
  }
  for (double& v : pi) v /= sum;

  double residual = 0.0;
  for (int j = 0; j < n; ++j) {
    double pij = 0.0;
    for (int i = 0; i < n; ++i) pij += pi[i] * p[i][j];
    residual = std::max(residual, std::abs(pij - pi[j]));
  }
  if (residual > 1e-10)
    throw numerical_error("stationary_distribution: residual " +
                          std::to_string(residual) + " exceeds 1e-10");
  return pi;
}

double mean_queue_size(const std::vector<double>& pi) {
  double eq = 0.0;
  for (std::size_t i = 0; i < pi.size(); ++i) eq += static_cast<double>(i) * pi[i];
  return eq;
}

double mean_batch_size(const std::vector<double>& pi, const QueueConfig& cfg) {
  if (cfg.m == cfg.k_max) return static_cast<double>(cfg.m);
  double below_k = 0.0;
  double ez = 0.0;
  for (int i = 0; i < cfg.k_max && i < static_cast<int>(pi.size()); ++i) {
    below_k += pi[i];
    ez += std::max(i, cfg.m) * pi[i];
  }
  ez += cfg.k_max * (1.0 - below_k);
  return ez;
}

bool stability_check(const QueueConfig& cfg, double mu_K) {
  return cfg.lambda_rate < cfg.k_max * mu_K;
}

QueueSolution solve_queue(const LinkParams& params, const QueueConfig& cfg,
                          double pmf_tol, int search_window) {
  cfg.validate();
  params.validate();

  std::map<int, ArrivalPmf> arrivals;
  double err_bound = 0.0;
  double mu_K = 0.0;
  for (int j = cfg.m; j <= cfg.k_max; ++j) {
    const Policy policy = optimize_policy(params, j, search_window);
    const auto matrix = make_transition_matrix(params, policy.n_per_state);
    const auto pmf = completion_pmf(j, policy, matrix, pmf_tol);
    arrivals.emplace(j, arrival_pmf(j, cfg.lambda_rate, cfg.capacity, pmf));
    err_bound = std::max(err_bound, pmf.truncated_mass);
    if (j == cfg.k_max) mu_K = 1.0 / mean_service_time(j, policy, matrix);
  }

  const auto p = build_embedded_matrix(cfg, arrivals);
  QueueSolution sol;
  sol.pi = stationary_distribution(p);
  sol.mean_queue = mean_queue_size(sol.pi);
  sol.mean_batch = mean_batch_size(sol.pi, cfg);
  sol.stable_infinite = stability_check(cfg, mu_K);
  sol.input_error_bound = err_bound;
  return sol;
}

SweepResult sweep(const LinkParams& params, const std::vector<double>& lambdas,
                  int m_min, int m_max, int k_min, int k_max, int capacity,
                  double pmf_tol, int search_window) {
  if (lambdas.empty() || m_min > m_max || k_min > k_max)
    throw config_error("sweep: empty range");

  SweepResult result;
  for (double lambda : lambdas) {
    for (int m = m_min; m <= m_max; ++m) {
      for (int k = std::max(m, k_min); k <= k_max; ++k) {
        SweepCell cell;
        cell.lambda = lambda;
        cell.m = m;
        cell.k = k;
        cell.capacity = capacity;
        try {
          QueueConfig cfg{m, k, capacity, lambda};
          const auto sol = solve_queue(params, cfg, pmf_tol, search_window);
          cell.mean_queue = sol.mean_queue;
          cell.mean_batch = sol.mean_batch;
          cell.stable = sol.stable_infinite;
          cell.err_bound = sol.input_error_bound;
        } catch (const std::exception& e) {
          cell.error = e.what();
        }
        result.cells.push_back(std::move(cell));
      }
    }
  }

  for (double lambda : lambdas) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& c : result.cells)
      if (c.lambda == lambda && c.error.empty())
        best = std::min(best, c.mean_queue);
    std::vector<SweepCell> mins;
    for (const auto& c : result.cells)
      if (c.lambda == lambda && c.error.empty() &&
          c.mean_queue <= best * 1.001)
        mins.push_back(c);
    result.argmin[lambda] = std::move(mins);
  }
  return result;
}

}  // namespace ncq
