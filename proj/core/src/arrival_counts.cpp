#include "ncqueue/arrival_counts.hpp"

#include <cmath>
#include <stdexcept>

namespace ncq {

ArrivalPmf arrival_pmf(int service_type, double lambda_rate, int kmax,
                       const CompletionPmf& pmf) {
  if (pmf.batch_size_state != service_type)
    throw std::invalid_argument("arrival_pmf: pmf is for a different state");
  if (lambda_rate < 0.0)
    throw std::invalid_argument("arrival_pmf: lambda must be >= 0");
  if (kmax < 0) throw std::invalid_argument("arrival_pmf: kmax must be >= 0");

  ArrivalPmf out;
  out.service_type = service_type;
  out.lambda_rate = lambda_rate;
  out.tail_bound = pmf.truncated_mass;
  out.a.assign(kmax + 1, 0.0);
  for (const auto& [t, p] : pmf.atoms) {
    double term = std::exp(-lambda_rate * t);  // Poisson(k=0; lambda t)
    for (int k = 0; k <= kmax; ++k) {
      out.a[k] += p * term;
      term *= lambda_rate * t / (k + 1);
    }
  }
  return out;
}

double arrival_gf_eval(int service_type, double lambda_rate, double z,
                       const Policy& policy, const TransitionMatrix& matrix) {
  if (z < 0.0 || z > 1.0)
    throw std::invalid_argument("arrival_gf_eval: z must be in [0,1]");
  return mgf_eval(service_type, lambda_rate * (z - 1.0), policy, matrix);
}

}  // namespace ncq
