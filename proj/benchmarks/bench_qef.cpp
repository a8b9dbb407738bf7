#include <benchmark/benchmark.h>

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <vector>

#include "qef/dynamics.hpp"
#include "qef/eppoints.hpp"
#include "qef/model.hpp"
#include "qef/momentspec.hpp"
#include "qef/numerics/pencil.hpp"
#include "qef/oracle.hpp"
#include "qef/propagate.hpp"

using qef::cd;

namespace {

qef::TwoModeParams bench_params() {
    qef::TwoModeParams p;
    p.gamma1d = 0.8;
    p.gamma2a = 0.2;
    p.epsilon = 1.0;
    p.kappa = 0.1;
    p.g = 0.15;
    return p;
}

qef::TwoModeParams circle_params() {
    qef::TwoModeParams p;
    p.gamma1d = 4.0;
    p.epsilon = 1.0;
    return p;
}

qef::QuadraticSystem damped_mode(double omega, double gamma) {
    qef::QuadraticSystem sys;
    sys.num_modes = 1;
    sys.epsilon = Eigen::MatrixXcd::Constant(1, 1, cd(omega, 0.0));
    sys.kappa = Eigen::MatrixXcd::Zero(1, 1);
    sys.rates = {{qef::RateKind::damped, gamma}};
    return qef::validate(sys);
}

} // namespace

static void BM_Eigendecompose(benchmark::State& state) {
    const auto d = qef::build_dynamics_matrix(qef::two_mode_system(bench_params()));
    for (auto _ : state) benchmark::DoNotOptimize(qef::eigendecompose(d));
}
BENCHMARK(BM_Eigendecompose);

static void BM_ClosedForm(benchmark::State& state) {
    const auto p = bench_params();
    for (auto _ : state) benchmark::DoNotOptimize(qef::two_mode_closed_form(p));
}
BENCHMARK(BM_ClosedForm);

static void BM_EnumerateFrequencies(benchmark::State& state) {
    const auto s = qef::two_mode_closed_form(bench_params());
    const int p = static_cast<int>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(qef::enumerate_frequencies(s, p));
}
BENCHMARK(BM_EnumerateFrequencies)->DenseRange(1, 6);

static void BM_DegeneracyReport(benchmark::State& state) {
    const auto s = qef::two_mode_closed_form(circle_params());
    const int p = static_cast<int>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(qef::moment_degeneracy_report(s, p, true));
}
BENCHMARK(BM_DegeneracyReport)->DenseRange(1, 5);

static void BM_DetectCoalescence(benchmark::State& state) {
    const auto d = qef::build_dynamics_matrix(qef::two_mode_system(circle_params()));
    for (auto _ : state) benchmark::DoNotOptimize(qef::detect_coalescence(d.m_omega));
}
BENCHMARK(BM_DetectCoalescence);

static void BM_SweepSurface(benchmark::State& state) {
    qef::SweepGrid grid;
    grid.gamma_max = 2.0;
    grid.kappa_max = 2.0;
    grid.g_max = 1.5;
    grid.n_gamma = 48;
    grid.n_kappa = 48;
    grid.n_g = 9;
    for (auto _ : state) benchmark::DoNotOptimize(qef::sweep_surface(grid, 1e-6, 1));
}
BENCHMARK(BM_SweepSurface);

static void BM_PropagateHierarchy(benchmark::State& state) {
    const auto d = qef::build_dynamics_matrix(qef::two_mode_system(bench_params()));
    const auto s = qef::eigendecompose(d);
    const auto kt = qef::transform_noise(s, d);
    const int order = static_cast<int>(state.range(0));
    const auto init = qef::vacuum_state(2, order);
    for (auto _ : state)
        benchmark::DoNotOptimize(qef::propagate_hierarchy(s, kt, init, 1.5));
}
BENCHMARK(BM_PropagateHierarchy)->DenseRange(1, 3);

static void BM_BuildFockLiouvillian(benchmark::State& state) {
    const auto sys = damped_mode(1.3, 0.7);
    const int cutoff = static_cast<int>(state.range(0));
    for (auto _ : state)
        benchmark::DoNotOptimize(qef::build_fock_liouvillian(sys, {cutoff}));
}
BENCHMARK(BM_BuildFockLiouvillian)->Arg(16)->Arg(32)->Arg(64);

static void BM_LiouvillianSpectrumDense(benchmark::State& state) {
    const auto l = qef::build_fock_liouvillian(damped_mode(1.3, 0.7), {10});
    for (auto _ : state) benchmark::DoNotOptimize(qef::liouvillian_spectrum(l, 8));
}
BENCHMARK(BM_LiouvillianSpectrumDense);

static void BM_PencilFit(benchmark::State& state) {
    const auto s = qef::two_mode_closed_form(bench_params());
    Eigen::VectorXcd b0(4);
    b0 << cd(0.9, 0.2), cd(0.9, -0.2), cd(0.4, -0.1), cd(0.4, 0.1);
    const double dt = 0.15;
    std::vector<cd> samples(128);
    for (std::size_t j = 0; j < samples.size(); ++j)
        samples[j] = qef::propagate_first(s, b0, dt * static_cast<double>(j))(0);
    for (auto _ : state)
        benchmark::DoNotOptimize(qef::numerics::exponential_fit(samples, dt));
}
BENCHMARK(BM_PencilFit);

BENCHMARK_MAIN();
