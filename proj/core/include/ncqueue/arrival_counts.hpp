#pragma once

#include <vector>

#include "ncqueue/rlnc_chain.hpp"
#include "ncqueue/service_mgf.hpp"

namespace ncq {

// Probabilities a_k of k Poisson arrivals during a service of bulk size
// `service_type`, for k = 0..kmax. tail_bound is the mass lost to
// completion-PMF truncation (the Poisson tail beyond kmax is handled by the
// queue matrix's R columns, not here).
struct ArrivalPmf {
  int service_type = 0;
  double lambda_rate = 0.0;
  std::vector<double> a;
  double tail_bound = 0.0;
};

// a_k = sum over completion-time atoms p(t) * e^{-lambda t} (lambda t)^k / k!.
ArrivalPmf arrival_pmf(int service_type, double lambda_rate, int kmax,
                       const CompletionPmf& pmf);

// A^{(j)}(z) = M_{T,j}(lambda (z - 1)), an independent check on arrival_pmf.
double arrival_gf_eval(int service_type, double lambda_rate, double z,
                       const Policy& policy, const TransitionMatrix& matrix);

}  // namespace ncq
