#include <benchmark/benchmark.h>

#include "kinetic/bilinear.hpp"
#include "kinetic/collision.hpp"
#include "kinetic/elliptic.hpp"
#include "kinetic/rng.hpp"
#include "kinetic/solver.hpp"
#include "kinetic/trajectories.hpp"
#include "kinetic/transport.hpp"

using namespace kinetic;

namespace {

PhaseMatrix random_phase(std::size_t rows, std::size_t cols) {
    Stream rng(3, 0);
    PhaseMatrix f(rows, cols);
    for (Eigen::Index i = 0; i < f.size(); ++i) f.data()[i] = rng.uniform(-1.0, 1.0);
    return f;
}

} // namespace

static void BM_ExitTime(benchmark::State& state) {
    const Domain d = Domain::cylinder(1.0, 1.0, 0.5);
    Stream rng(1, 0);
    for (auto _ : state) {
        Vec3 x(rng.uniform(-0.9, 0.9), rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0));
        Vec3 v(rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1));
        benchmark::DoNotOptimize(d.exit_time(x, v));
    }
}
BENCHMARK(BM_ExitTime);

static void BM_CollisionFrequency(benchmark::State& state) {
    double s = 0.0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(collision_frequency(s));
        s = s < 10.0 ? s + 0.37 : 0.0;
    }
}
BENCHMARK(BM_CollisionFrequency);

static void BM_LatticeQBatch(benchmark::State& state) {
    const VelocityGrid v(int(state.range(0)), 4.0);
    const LatticeCollisionModel q(v, 100000000);
    const Eigen::MatrixXd G = random_phase(v.size(), 16);
    for (auto _ : state) benchmark::DoNotOptimize(q.Q_batch(G));
    state.SetItemsProcessed(state.iterations() * 16);
}
BENCHMARK(BM_LatticeQBatch)->Arg(6)->Arg(8)->Unit(benchmark::kMillisecond);

static void BM_TransportRemap(benchmark::State& state) {
    const Domain d = Domain::cylinder(1.0, 0.5, 0.5);
    const CylinderGrid x(d, int(state.range(0)), 2);
    const VelocityGrid v(8, 4.0);
    const TransportRemap T(x, v, 0.25, 1.0);
    const PhaseMatrix f = random_phase(x.size(), v.size());
    for (auto _ : state) benchmark::DoNotOptimize(T.apply(f));
}
BENCHMARK(BM_TransportRemap)->Arg(8)->Arg(16)->Unit(benchmark::kMillisecond);

static void BM_RemapAssembly(benchmark::State& state) {
    const Domain d = Domain::cylinder(1.0, 0.5, 0.5);
    const CylinderGrid x(d, 8, 2);
    const VelocityGrid v(8, 4.0);
    for (auto _ : state) benchmark::DoNotOptimize(TransportRemap(x, v, 0.25, 1.0).direct().nonZeros());
}
BENCHMARK(BM_RemapAssembly)->Unit(benchmark::kMillisecond);

static void BM_PoissonSolve(benchmark::State& state) {
    const Domain d = Domain::cylinder(1.0, 1.0, 0.5);
    const int n = int(state.range(0));
    EllipticProblem p{CutCellGrid(d, n, n), BcMode::P2, {}};
    p.xi = band_limited_source(p.grid, 1, 0);
    p.project_source();
    for (auto _ : state) benchmark::DoNotOptimize(solve_poisson(p));
}
BENCHMARK(BM_PoissonSolve)->Arg(12)->Arg(24)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
