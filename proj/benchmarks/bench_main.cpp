#include <benchmark/benchmark.h>

#include <Eigen/Dense>

#include "rollball/engine.hpp"
#include "rollball/full_system.hpp"
#include "rollball/leaf.hpp"
#include "rollball/params.hpp"
#include "rollball/profile.hpp"
#include "rollball/reduced.hpp"
#include "rollball/routh.hpp"

namespace {

using namespace rollball;

const Params kParams(0.4, 1.4, 0.7);
const Profile kBowl = Profile::poly_p1({0.0, 1.0, 0.1});

void BM_polar_rhs(benchmark::State& state) {
    const double y[4] = {1.3, 0.2, 0.6, -0.4};
    double d[4];
    for (auto _ : state) {
        polar_rhs(kParams, kBowl, y, d);
        benchmark::DoNotOptimize(d);
    }
}
BENCHMARK(BM_polar_rhs);

void BM_field_restricted(benchmark::State& state) {
    const P4 q{0.845, 0.26, 1.014, -0.4};
    for (auto _ : state) {
        P4 f = field_restricted(kParams, kBowl, q);
        benchmark::DoNotOptimize(f);
    }
}
BENCHMARK(BM_field_restricted);

void BM_poisson_apply(benchmark::State& state) {
    const P4 q{0.845, 0.26, 1.014, -0.4};
    const P4 dE = energy_restricted_grad(kParams, kBowl, q);
    for (auto _ : state) {
        P4 f = poisson_apply(kParams, kBowl, q, dE);
        benchmark::DoNotOptimize(f);
    }
}
BENCHMARK(BM_poisson_apply);

void BM_routh_build(benchmark::State& state) {
    const double x_max = static_cast<double>(state.range(0));
    for (auto _ : state) {
        RouthSolution routh(kParams, kBowl, x_max);
        benchmark::DoNotOptimize(routh);
    }
}
BENCHMARK(BM_routh_build)->Arg(8)->Arg(64);

void BM_routh_eval(benchmark::State& state) {
    const RouthSolution routh(kParams, kBowl, 8.0);
    std::array<double, 4> U;
    std::array<double, 2> u;
    double x = 0.1;
    for (auto _ : state) {
        routh.eval(x, U, u);
        benchmark::DoNotOptimize(U);
        x = x < 7.9 ? x + 1e-3 : 0.1;
    }
}
BENCHMARK(BM_routh_eval);

void BM_leaf_integrate(benchmark::State& state) {
    auto routh = routh_cache_get(kParams, kBowl, 8.0);
    const LeafSystem leaf(kParams, kBowl, routh, {1.0, 0.5});
    for (auto _ : state) {
        OdeSolution sol = leaf.integrate(1.4, 0.25, 0.0, 5.0);
        benchmark::DoNotOptimize(sol);
    }
}
BENCHMARK(BM_leaf_integrate);

void BM_reduced_integrate(benchmark::State& state) {
    const ReducedStatePolar s0{1.2, 0.3, 0.7, -0.4};
    for (auto _ : state) {
        Trajectory traj = integrate_reduced(kParams, kBowl, s0, 0.0, 5.0);
        benchmark::DoNotOptimize(traj);
    }
}
BENCHMARK(BM_reduced_integrate);

void BM_engine_field(benchmark::State& state) {
    const QuasiVelocitySystem sys = ball_system(kParams, kBowl);
    Eigen::VectorXd q(2), v(5);
    q << 1.3, 0.4;
    const auto om_xy = constraint_omega_xy(kParams, kBowl, 1.3, 0.4, 0.2, 0.6, -0.4);
    v << 0.2, 0.6, om_xy[0], om_xy[1], -0.4;
    Eigen::VectorXd q_dot, v_dot;
    for (auto _ : state) {
        constrained_field(sys, q, v, q_dot, v_dot);
        benchmark::DoNotOptimize(v_dot);
    }
}
BENCHMARK(BM_engine_field);

} // namespace

BENCHMARK_MAIN();
