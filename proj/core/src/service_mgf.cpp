#include "ncqueue/service_mgf.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>
#include <string>

#include "ncqueue/errors.hpp"

namespace ncq {

namespace {

double mgf_eval_weights(int n, double s, const std::vector<double>& weights,
                        const TransitionMatrix& matrix) {
  if (n < 0 || n > matrix.batch_size)
    throw std::invalid_argument("mgf_eval: state out of range");
  std::vector<double> m(n + 1, 1.0);
  for (int i = 1; i <= n; ++i) {
    const double x = std::exp(s * weights[i - 1]);
    const double denom = 1.0 - matrix.p[i][i] * x;
    if (denom <= 0.0)
      throw numerical_error("mgf_eval: geometric factor diverges at state " +
                            std::to_string(i) + " (P_ii * e^{s T^i} >= 1)");
    double acc = 0.0;
    for (int j = 0; j < i; ++j) acc += matrix.p[i][j] * m[j];
    m[i] = x / denom * acc;
  }
  return m[n];
}

}  // namespace

double mgf_eval(int n, double s, const Policy& policy,
                const TransitionMatrix& matrix, double /*tol*/) {
  return mgf_eval_weights(n, s, policy.t_round, matrix);
}

double mgf_direct_enum_weights(int n, double s,
                               const std::vector<double>& round_weights,
                               const TransitionMatrix& matrix, double tol) {
  if (n < 1 || n > 4)
    throw std::invalid_argument("mgf_direct_enum: n must be in 1..4");
  if (s > 0.0)
    throw std::invalid_argument("mgf_direct_enum: requires s <= 0");
  if (tol <= 0.0) throw std::invalid_argument("mgf_direct_enum: tol must be > 0");

  // Per-state visit-count caps from the geometric decay ratio
  // rho_j = P_{j->j} e^{s T^j}: the tail beyond cap_j is below tol_eff.
  const double tol_eff = tol * 1e-3;
  std::vector<int> cap(n + 1, 1);
  double tuple_count = 1.0;
  for (int j = 1; j <= n; ++j) {
    const double rho = matrix.p[j][j] * std::exp(s * round_weights[j - 1]);
    if (rho <= 0.0) {
      cap[j] = 1;
    } else {
      const double c = std::log(tol_eff * (1.0 - rho)) / std::log(rho);
      cap[j] = std::max(2, static_cast<int>(std::ceil(c)) + 1);
    }
    tuple_count *= cap[j] + 1;
  }
  if (tuple_count > 5e7)
    throw numerical_error(
        "mgf_direct_enum: tolerance not reachable within iteration cap");

  // Combined weight of one visit-count tuple: C_n * A_n folded together so
  // skipped states (m_i = 0) never need negative powers of P_{i->i}.
  std::vector<int> m(n + 1, 0);
  std::vector<double> b(n + 1, 0.0);
  double total = 0.0;

  const auto tuple_weight = [&]() {
    b[0] = 1.0;
    for (int j = 1; j <= n; ++j) {
      if (m[j] == 0) {
        b[j] = 0.0;
        continue;
      }
      double acc = 0.0;
      bool skippable = true;  // all states strictly between l and j unvisited
      for (int l = j - 1; l >= 0; --l) {
        if (skippable) acc += matrix.p[j][l] * b[l];
        if (l >= 1 && m[l] != 0) skippable = false;
      }
      b[j] = std::pow(matrix.p[j][j], m[j] - 1) * acc;
    }
    return b[n];
  };

  // Odometer over (m_1..m_n); m_n starts at 1.
  m[n] = 1;
  for (;;) {
    const double w = tuple_weight();
    if (w != 0.0) {
      double t = 0.0;
      for (int j = 1; j <= n; ++j) t += m[j] * round_weights[j - 1];
      total += w * std::exp(s * t);
    }
    int j = 1;
    while (j <= n) {
      if (m[j] < cap[j]) {
        ++m[j];
        break;
      }
      m[j] = (j == n) ? 1 : 0;
      ++j;
    }
    if (j > n) break;
  }
  return total;
}

double mgf_direct_enum(int n, double s, const Policy& policy,
                       const TransitionMatrix& matrix, double tol) {
  return mgf_direct_enum_weights(n, s, policy.t_round, matrix, tol);
}

CompletionPmf completion_pmf(int n, const Policy& policy,
                             const TransitionMatrix& matrix, double tol,
                             std::size_t node_cap) {
  if (n < 1 || n > matrix.batch_size)
    throw std::invalid_argument("completion_pmf: state out of range");
  for (int i = 1; i <= n; ++i)
    if (matrix.p[i][i] >= 1.0)
      throw numerical_error("completion_pmf: chain is not absorbing");

  // Truncation budget: a branch may be dropped only while the total dropped
  // mass stays below budget/2; once the whole frontier fits in the remaining
  // budget, it is truncated wholesale and expansion stops. A fixed per-branch
  // threshold leaks mass when self-loop probabilities spawn many tiny paths.
  const double budget = 0.5 * tol;
  using Counts = std::vector<int>;  // rounds spent in each state 1..n
  std::map<std::pair<int, Counts>, double> frontier;
  frontier[{n, Counts(n, 0)}] = 1.0;

  std::map<Counts, double> absorbed;
  double truncated = 0.0;
  std::size_t nodes = 0;

  while (!frontier.empty()) {
    double frontier_mass = 0.0;
    for (const auto& [key, prob] : frontier) frontier_mass += prob;
    if (truncated + frontier_mass <= budget) {
      truncated += frontier_mass;
      break;
    }
    std::map<std::pair<int, Counts>, double> next;
    for (const auto& [key, prob] : frontier) {
      if (prob < tol * 1e-3 && truncated + prob <= 0.5 * budget) {
        truncated += prob;
        continue;
      }
      if (++nodes > node_cap)
        throw numerical_error(
            "completion_pmf: node cap exceeded before reaching tolerance");
      const auto& [state, counts] = key;
      Counts advanced = counts;
      ++advanced[state - 1];
      for (int j = 0; j <= state; ++j) {
        const double p = matrix.p[state][j];
        if (p <= 0.0) continue;
        if (j == 0)
          absorbed[advanced] += prob * p;
        else
          next[{j, advanced}] += prob * p;
      }
    }
    frontier.swap(next);
  }

  if (truncated > tol)
    throw numerical_error("completion_pmf: truncated mass " +
                          std::to_string(truncated) + " exceeds tolerance");

  std::vector<std::pair<double, double>> atoms;
  atoms.reserve(absorbed.size());
  for (const auto& [counts, prob] : absorbed) {
    double t = 0.0;
    for (int i = 1; i <= n; ++i) t += counts[i - 1] * policy.t_round[i - 1];
    atoms.emplace_back(t, prob);
  }
  std::sort(atoms.begin(), atoms.end());

  // Distinct visit-count tuples can land on the same total time.
  CompletionPmf pmf;
  pmf.batch_size_state = n;
  pmf.truncated_mass = truncated;
  for (const auto& [t, p] : atoms) {
    if (!pmf.atoms.empty() &&
        std::abs(t - pmf.atoms.back().first) <= 1e-12 * t)
      pmf.atoms.back().second += p;
    else
      pmf.atoms.emplace_back(t, p);
  }
  return pmf;
}

double mean_service_time(int j, const Policy& policy,
                         const TransitionMatrix& matrix) {
  return expected_absorption_times(matrix, policy.t_round)[j];
}

std::vector<double> round_energies(const Policy& policy,
                                   const LinkParams& params) {
  std::vector<double> e(policy.batch_size);
  for (int i = 1; i <= policy.batch_size; ++i)
    e[i - 1] = round_energy(params, policy.batch_size, i,
                            policy.n_per_state[i - 1]);
  return e;
}

double energy_mgf_eval(int n, double s, const Policy& policy,
                       const TransitionMatrix& matrix,
                       const LinkParams& params) {
  return mgf_eval_weights(n, s, round_energies(policy, params), matrix);
}

}  // namespace ncq
