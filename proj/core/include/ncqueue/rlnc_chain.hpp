#pragma once

#include <vector>

#include "ncqueue/channel.hpp"

namespace ncq {

// Absorbing chain over degrees-of-freedom states 0..M. Entry p[i][j] is the
// probability of moving from i dofs missing to j in one round; row i only has
// mass on j <= i, and state 0 is absorbing.
struct TransitionMatrix {
  int batch_size = 0;                  // M
  std::vector<std::vector<double>> p;  // (M+1) x (M+1)
};

// Per-batch-size transmission policy: how many coded packets to send
// back-to-back from each dof state, with cached round lengths and expected
// completion times.
struct Policy {
  int batch_size = 0;
  std::vector<int> n_per_state;              // N_1..N_M
  std::vector<double> t_round;               // T^1..T^M
  std::vector<double> expected_completion;   // E[T_1]..E[T_M]
};

// One row of the dof chain: P_{i->j} for j = 0..i.
// Each of the n_packets coded packets is erased independently with
// probability pe; every received packet is innovative (large-field
// assumption); all successful-reception mass is gated by (1 - pe_ack), and a
// lost ACK leaves the state unchanged.
std::vector<double> transition_row(int state, int n_packets,
                                   const LinkParams& params);

TransitionMatrix make_transition_matrix(const LinkParams& params,
                                        const std::vector<int>& n_per_state);

// Expected absorption times E[T_0..T_M] from the closed recursion
//   E[T_i] = (T^i + sum_{j=1..i-1} P_{i->j} E[T_j]) / (1 - P_{i->i}).
// t_round holds T^1..T^M. Throws numerical_error if some P_{i->i} = 1.
std::vector<double> expected_absorption_times(
    const TransitionMatrix& matrix, const std::vector<double>& t_round);

// Same, building the matrix and round durations from n_per_state.
std::vector<double> expected_completion_times(
    const std::vector<int>& n_per_state, const LinkParams& params);

// Validates N_i >= i and fills the cached fields.
Policy make_policy(const LinkParams& params, std::vector<int> n_per_state);

// Greedy per-state minimization of E[T_i]: for i = 1..M, scan N_i upward from
// i, keeping already-fixed N_1..N_{i-1}; stop after `search_window`
// consecutive candidates without improvement. Ties go to the smaller N_i.
Policy optimize_policy(const LinkParams& params, int batch_size,
                       int search_window = 50);

}  // namespace ncq
