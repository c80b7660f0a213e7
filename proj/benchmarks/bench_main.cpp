#include <benchmark/benchmark.h>

#include "ncqueue/bulk_queue.hpp"
#include "ncqueue/des_oracle.hpp"
#include "ncqueue/rlnc_chain.hpp"
#include "ncqueue/service_mgf.hpp"

namespace {

ncq::LinkParams bench_link() {
  ncq::LinkParams p;
  p.pe = 0.2;
  p.pe_ack = 0.0;
  p.rate_bps = 1.5e6;
  p.payload_bits = 10000;
  p.header_bits = 80;
  p.coeff_bits = 100;
  p.ack_bits = 100;
  p.prop_delay_s = 0.0362;
  p.tx_power = 1.0;
  p.rx_power = 0.5;
  return p;
}

void BM_OptimizePolicy(benchmark::State& state) {
  const auto link = bench_link();
  const int m = static_cast<int>(state.range(0));
  for (auto _ : state)
    benchmark::DoNotOptimize(ncq::optimize_policy(link, m));
}
BENCHMARK(BM_OptimizePolicy)->Arg(1)->Arg(3)->Arg(5);

void BM_MgfEval(benchmark::State& state) {
  const auto link = bench_link();
  const auto policy = ncq::optimize_policy(link, 5);
  const auto matrix = ncq::make_transition_matrix(link, policy.n_per_state);
  for (auto _ : state)
    benchmark::DoNotOptimize(ncq::mgf_eval(5, -10.0, policy, matrix));
}
BENCHMARK(BM_MgfEval);

void BM_CompletionPmf(benchmark::State& state) {
  const auto link = bench_link();
  const int m = static_cast<int>(state.range(0));
  const auto policy = ncq::optimize_policy(link, m);
  const auto matrix = ncq::make_transition_matrix(link, policy.n_per_state);
  for (auto _ : state)
    benchmark::DoNotOptimize(ncq::completion_pmf(m, policy, matrix, 1e-10));
}
BENCHMARK(BM_CompletionPmf)->Arg(1)->Arg(3)->Arg(5);

void BM_SolveQueue(benchmark::State& state) {
  const auto link = bench_link();
  ncq::QueueConfig cfg{1, static_cast<int>(state.range(0)), 30, 30.0};
  for (auto _ : state)
    benchmark::DoNotOptimize(ncq::solve_queue(link, cfg));
}
BENCHMARK(BM_SolveQueue)->Arg(1)->Arg(3)->Arg(5);

void BM_Simulate(benchmark::State& state) {
  const auto link = bench_link();
  ncq::SimConfig sim;
  sim.queue = ncq::QueueConfig{1, 5, 30, 30.0};
  sim.link = link;
  for (int z = 1; z <= 5; ++z)
    sim.policies.push_back(ncq::optimize_policy(link, z));
  sim.target_completions = 10000;
  for (auto _ : state) benchmark::DoNotOptimize(ncq::simulate(sim));
}
BENCHMARK(BM_Simulate);

}  // namespace

BENCHMARK_MAIN();
