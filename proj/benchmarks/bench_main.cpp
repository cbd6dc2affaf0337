#include "oscidisc/netsim/builder.hpp"
#include "oscidisc/reduction/reduction.hpp"
#include "oscidisc/rng.hpp"
#include "oscidisc/sindy/library.hpp"
#include "oscidisc/sindy/regression.hpp"

#include <benchmark/benchmark.h>

namespace {

using namespace oscidisc;

netsim::NetworkSpec kuramoto_network(int n) {
  netsim::NetworkRecipe recipe;
  recipe.kuramoto.count = n;
  return netsim::build_network(recipe, 7);
}

void BM_NetworkRhs(benchmark::State& state) {
  const auto spec = kuramoto_network(static_cast<int>(state.range(0)));
  const Vector x = netsim::random_initial_state(spec, 3);
  Vector dx(x.size());
  for (auto _ : state) {
    netsim::network_rhs(spec, std::span<const double>(x.data(), static_cast<std::size_t>(x.size())), 0.0,
                        std::span<double>(dx.data(), static_cast<std::size_t>(dx.size())));
    benchmark::DoNotOptimize(dx.data());
  }
}
BENCHMARK(BM_NetworkRhs)->Arg(50)->Arg(100)->Arg(400);

void BM_Stlsq(benchmark::State& state) {
  const Index m = state.range(0);
  Rng rng(11);
  Matrix x(m, 3);
  for (Index i = 0; i < x.size(); ++i) x.data()[i] = rng.uniform(-2.0, 2.0);
  const auto lib = sindy::LibrarySpec::polynomial(3, 3);
  const Matrix theta = sindy::build_library(x, lib);
  Matrix xi = Matrix::Zero(lib.size(), 3);
  xi(1, 0) = -1.0;
  xi(2, 1) = 2.0;
  xi(5, 2) = 0.5;
  const Matrix dx = theta * xi;
  for (auto _ : state) benchmark::DoNotOptimize(sindy::stlsq(theta, dx, 0.1));
}
BENCHMARK(BM_Stlsq)->Arg(1000)->Arg(10000);

void BM_Reduce(benchmark::State& state) {
  Rng rng(5);
  Trajectory traj;
  const Index m = state.range(0);
  traj.times = Vector::LinSpaced(m, 0.0, 1.0);
  traj.states.resize(m, 100);
  for (Index i = 0; i < traj.states.size(); ++i) traj.states.data()[i] = rng.uniform();
  traj.labels = numbered_labels("x", 100);
  for (auto _ : state) benchmark::DoNotOptimize(reduction::reduce(traj, 2));
}
BENCHMARK(BM_Reduce)->Arg(500)->Arg(2000);

}  // namespace
BENCHMARK_MAIN();
