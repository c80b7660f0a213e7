#include "ncqueue/rlnc_chain.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "ncqueue/errors.hpp"

namespace ncq {

namespace {

// C(n,k) (1-pe)^k pe^(n-k), log-space to survive large n.
double binomial_term(int n, int k, double pe) {
  if (pe == 0.0) return k == n ? 1.0 : 0.0;
  const double lchoose =
      std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
  return std::exp(lchoose + k * std::log1p(-pe) + (n - k) * std::log(pe));
}

}  // namespace

std::vector<double> transition_row(int state, int n_packets,
                                   const LinkParams& params) {
  if (state < 1) throw std::invalid_argument("transition_row: state must be >= 1");
  if (n_packets < state)
    throw std::invalid_argument(
        "transition_row: need at least `state` packets per round (N_i >= i)");

  const double ack = 1.0 - params.pe_ack;
  std::vector<double> row(state + 1, 0.0);
  // j dofs still missing after the round <=> i-j innovative receptions.
  for (int j = 1; j < state; ++j)
    row[j] = ack * binomial_term(n_packets, state - j, params.pe);
  double tail = 0.0;  // i or more receptions all complete the batch
  for (int k = state; k <= n_packets; ++k)
    tail += binomial_term(n_packets, k, params.pe);
  row[0] = ack * tail;

  double off = 0.0;
  for (int j = 0; j < state; ++j) off += row[j];
  row[state] = 1.0 - off;
  return row;
}

TransitionMatrix make_transition_matrix(const LinkParams& params,
                                        const std::vector<int>& n_per_state) {
  const int M = static_cast<int>(n_per_state.size());
  TransitionMatrix matrix;
  matrix.batch_size = M;
  matrix.p.assign(M + 1, std::vector<double>(M + 1, 0.0));
  matrix.p[0][0] = 1.0;
  for (int i = 1; i <= M; ++i) {
    const auto row = transition_row(i, n_per_state[i - 1], params);
    for (int j = 0; j <= i; ++j) matrix.p[i][j] = row[j];
  }
  return matrix;
}

std::vector<double> expected_absorption_times(
    const TransitionMatrix& matrix, const std::vector<double>& t_round) {
  const int M = matrix.batch_size;
  std::vector<double> e(M + 1, 0.0);
  for (int i = 1; i <= M; ++i) {
    const double self = matrix.p[i][i];
    if (self >= 1.0)
      throw numerical_error("expected_absorption_times: P_{" +
                            std::to_string(i) + "->" + std::to_string(i) +
                            "} = 1, chain never absorbs");
    double acc = t_round[i - 1];
    for (int j = 1; j < i; ++j) acc += matrix.p[i][j] * e[j];
    e[i] = acc / (1.0 - self);
  }
  return e;
}

std::vector<double> expected_completion_times(
    const std::vector<int>& n_per_state, const LinkParams& params) {
  const int M = static_cast<int>(n_per_state.size());
  const auto matrix = make_transition_matrix(params, n_per_state);
  std::vector<double> t_round(M);
  for (int i = 1; i <= M; ++i)
    t_round[i - 1] = round_duration(params, M, i, n_per_state[i - 1]);
  return expected_absorption_times(matrix, t_round);
}

Policy make_policy(const LinkParams& params, std::vector<int> n_per_state) {
  const int M = static_cast<int>(n_per_state.size());
  if (M < 1) throw std::invalid_argument("make_policy: empty policy");
  for (int i = 1; i <= M; ++i)
    if (n_per_state[i - 1] < i)
      throw std::invalid_argument("make_policy: N_i >= i required");

  Policy policy;
  policy.batch_size = M;
  policy.t_round.resize(M);
  for (int i = 1; i <= M; ++i)
    policy.t_round[i - 1] = round_duration(params, M, i, n_per_state[i - 1]);
  const auto e = expected_completion_times(n_per_state, params);
  policy.expected_completion.assign(e.begin() + 1, e.end());
  policy.n_per_state = std::move(n_per_state);
  return policy;
}

Policy optimize_policy(const LinkParams& params, int batch_size,
                       int search_window) {
  if (batch_size < 1)
    throw std::invalid_argument("optimize_policy: batch_size must be >= 1");
  if (search_window < 1)
    throw std::invalid_argument("optimize_policy: search_window must be >= 1");
  if (params.pe >= 1.0)
    throw std::invalid_argument("optimize_policy: pe must be < 1");

  const double t_p = packet_duration(params, batch_size);
  const double t_w = wait_time(params);

  std::vector<int> chosen;
  std::vector<double> e_fixed{0.0};  // E[T_0..T_{i-1}] under chosen N's
  for (int i = 1; i <= batch_size; ++i) {
    double best = std::numeric_limits<double>::infinity();
    int best_n = i;
    int since_improved = 0;
    for (int n = i; since_improved < search_window; ++n) {
      const auto row = transition_row(i, n, params);
      double acc = n * t_p + t_w;
      for (int j = 1; j < i; ++j) acc += row[j] * e_fixed[j];
      const double cand = acc / (1.0 - row[i]);
      if (cand < best) {
        best = cand;
        best_n = n;
        since_improved = 0;
      } else {
        ++since_improved;
      }
    }
    chosen.push_back(best_n);
    e_fixed.push_back(best);
  }
  return make_policy(params, std::move(chosen));
}

}  // namespace ncq
