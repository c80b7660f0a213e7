#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "ncqueue/channel.hpp"
#include "ncqueue/rlnc_chain.hpp"

namespace ncq {

// Truncated distribution of the completion time of a batch whose chain starts
// at state batch_size_state. Atom times are exact integer combinations of the
// round durations T^1..T^n.
struct CompletionPmf {
  int batch_size_state = 0;
  std::vector<std::pair<double, double>> atoms;  // (time_s, prob), time ascending
  double truncated_mass = 0.0;
};

// M_{T,n}(s) by the closed recursion
//   M_{T,i}(s) = e^{s T^i} / (1 - P_{i->i} e^{s T^i}) * sum_{j<i} P_{i->j} M_{T,j}(s)
// with M_{T,0} = 1. Exact up to floating point; `tol` is unused and kept for
// interface symmetry with the enumeration below. Throws numerical_error when
// P_{n->n} e^{s T^n} >= 1.
double mgf_eval(int n, double s, const Policy& policy,
                const TransitionMatrix& matrix, double tol = 0.0);

// Direct path-sum evaluation over per-state visit counts (m_n >= 1,
// m_{n-1} >= 0, ..., m_1 >= 0), each tuple weighted by C_n * A_n and
// exp(s * sum m_i T^i). Converges monotonically for s <= 0; exists as the
// independent oracle for mgf_eval. Requires n <= 4.
double mgf_direct_enum(int n, double s, const Policy& policy,
                       const TransitionMatrix& matrix, double tol);

// Enumeration with caller-supplied per-round weights (e.g. energies E^i)
// instead of the policy round durations.
double mgf_direct_enum_weights(int n, double s,
                               const std::vector<double>& round_weights,
                               const TransitionMatrix& matrix, double tol);

// Breadth-first expansion of the chain into completion-time atoms, merging
// equal times and pruning branches below tol/1000 into truncated_mass.
// Guarantees truncated_mass <= tol or throws numerical_error.
CompletionPmf completion_pmf(int n, const Policy& policy,
                             const TransitionMatrix& matrix, double tol,
                             std::size_t node_cap = 4u << 20);

// 1/mu_j, the mean completion time from state j (the MGF slope at s = 0).
double mean_service_time(int j, const Policy& policy,
                         const TransitionMatrix& matrix);

// M_{E,n}(s): the same recursion with round energies E^i in place of T^i.
double energy_mgf_eval(int n, double s, const Policy& policy,
                       const TransitionMatrix& matrix,
                       const LinkParams& params);

// Round energies E^1..E^M for a policy.
std::vector<double> round_energies(const Policy& policy,
                                   const LinkParams& params);

}  // namespace ncq
