#include <benchmark/benchmark.h>

#include <vector>

#include "pinnkan/autodiff/tape.hpp"
#include "pinnkan/diag/eigen.hpp"
#include "pinnkan/network/forward.hpp"
#include "pinnkan/problems/problems.hpp"
#include "pinnkan/rng.hpp"
#include "pinnkan/train/adam.hpp"

using namespace pinnkan;

namespace {

net::NetworkSpec spec_for(basis::Family f, std::vector<int> widths) {
  net::NetworkSpec s;
  s.widths = std::move(widths);
  s.family.family = f;
  return s;
}

void bench_value_pass(benchmark::State& state, basis::Family f) {
  auto spec = spec_for(f, {2, 30, 30, 30, 1});
  auto params = net::xavier_init(spec, 1);
  net::Forward fwd(spec);
  double x[2] = {0.3, -0.4}, out[1];
  for (auto _ : state) {
    fwd.value_pass(params, {x, 2}, {out, 1});
    benchmark::DoNotOptimize(out[0]);
    x[0] = out[0] * 1e-12 + 0.3;  // keep iterations data-dependent
  }
}

// one full training step worth of work: batch loss graph plus backward pass
void bench_loss_gradient(benchmark::State& state, basis::Family f) {
  auto p = prob::make_problem(prob::ProblemId::Helmholtz);
  auto spec = spec_for(f, {2, 30, 30, 30, 1});
  auto params = net::xavier_init(spec, 2);
  net::Forward fwd(spec);
  ad::Tape tape;
  int iter = 0;
  for (auto _ : state) {
    Rng rng(mix_seed(7, static_cast<std::uint64_t>(iter++)));
    auto batch = prob::sample_batch(p, static_cast<int>(state.range(0)), rng);
    tape.reset(params.theta);
    auto lr = prob::assemble_loss(p, fwd, tape, batch);
    auto grads = tape.gradient(lr.total);
    benchmark::DoNotOptimize(grads.data());
  }
}

void bench_adam(benchmark::State& state) {
  std::size_t n = static_cast<std::size_t>(state.range(0));
  train::Adam opt(n);
  std::vector<double> theta(n, 0.1), grads(n);
  Rng rng(3);
  for (auto& g : grads) g = rng.uniform(-1.0, 1.0);
  for (auto _ : state) {
    opt.step(theta, grads);
    benchmark::DoNotOptimize(theta.data());
  }
}

void bench_eigensolver(benchmark::State& state) {
  int n = static_cast<int>(state.range(0));
  Rng rng(5);
  std::vector<double> a(static_cast<std::size_t>(n) * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j <= i; ++j) {
      double v = rng.uniform(-1.0, 1.0);
      a[static_cast<std::size_t>(i) * n + j] = v;
      a[static_cast<std::size_t>(j) * n + i] = v;
    }
  for (auto _ : state) {
    auto ev = diag::sym_eigenvalues(a, n);
    benchmark::DoNotOptimize(ev.data());
  }
}

}  // namespace

BENCHMARK_CAPTURE(bench_value_pass, tanh, basis::Family::Tanh);
BENCHMARK_CAPTURE(bench_value_pass, bspline, basis::Family::BSpline);
BENCHMARK_CAPTURE(bench_loss_gradient, tanh, basis::Family::Tanh)->Arg(128);
BENCHMARK_CAPTURE(bench_loss_gradient, bspline, basis::Family::BSpline)
    ->Arg(128);
BENCHMARK(bench_adam)->Arg(2000)->Arg(20000);
BENCHMARK(bench_eigensolver)->Arg(32)->Arg(128);

BENCHMARK_MAIN();
