#include <doctest.h>

#include <cmath>
#include <memory>

#include "rollball/equilibria.hpp"
#include "rollball/leaf.hpp"
#include "rollball/params.hpp"
#include "rollball/profile.hpp"
#include "rollball/reduced.hpp"
#include "rollball/routh.hpp"

using namespace rollball;

namespace {

const Profile kParab = Profile::parabolic(1.0);
const Params kSpin(0.4, 1.4, 0.5);

ReducedStateP5 lift_to_stratum(const P4& q) {
    ReducedStateP5 p;
    p.p1 = q[0];
    p.p2 = q[1];
    p.p3 = q[2];
    p.p4 = q[3];
    p.p0 = (q[1] * q[1] + q[2] * q[2]) / (4.0 * q[0]);
    return p;
}

} // namespace

TEST_SUITE("leaf") {

TEST_CASE("restricted energy agrees with the full energy on the stratum") {
    const P4 q{0.9, 0.3, -0.6, 0.8};
    for (const double Om : {0.0, 0.7}) {
        const Params params = kSpin.with_omega(Om);
        const double full = moving_energy(params, kParab, lift_to_stratum(q));
        CHECK(energy_restricted(params, kParab, q) == doctest::Approx(full).epsilon(1e-12));
    }
}

TEST_CASE("hand-coded energy gradient matches finite differences") {
    const P4 pts[] = {{0.5, 0.2, 0.4, -0.3}, {2.1, -0.7, 1.2, 0.5}, {0.08, 0.01, -0.2, 1.4}};
    for (const P4& q : pts) {
        const P4 g = energy_restricted_grad(kSpin, kParab, q);
        const P4 gfd =
            fd_grad([&](const P4& p) { return energy_restricted(kSpin, kParab, p); }, q);
        for (int i = 0; i < 4; ++i)
            CHECK(g[i] == doctest::Approx(gfd[i]).epsilon(1e-6));
    }
}

TEST_CASE("restricted field is the Poisson image of the energy differential") {
    const P4 q{1.1, -0.4, 0.9, 0.6};
    for (const double Om : {0.0, 1.0}) {
        const Params params = kSpin.with_omega(Om);
        const P4 f = field_restricted(params, kParab, q);
        const P4 dE = energy_restricted_grad(params, kParab, q);
        const P4 lf = poisson_apply(params, kParab, q, dE);
        for (int i = 0; i < 4; ++i)
            CHECK(lf[i] == doctest::Approx(f[i]).epsilon(1e-9));
    }
}

TEST_CASE("symplectic coefficient carries the metric factor") {
    for (const double x : {0.3, 1.0, 4.2}) {
        const double cF = kParab.curly_F(x);
        CHECK(leaf_symplectic_form(x, kParab) ==
              doctest::Approx(1.0 / (2.0 * x * cF * cF)).epsilon(1e-14));
        CHECK(leaf_symplectic_form(x, Profile()) == doctest::Approx(1.0 / (2.0 * x)));
    }
}

TEST_CASE("leaf values follow the label parametrization") {
    auto routh = routh_cache_get(kSpin, kParab, 6.0);
    const LeafSystem leaf(kSpin, kParab, routh, {1.3, -0.4});
    for (const double x : {0.2, 1.0, 2.5}) {
        const auto lhs = leaf.p34(x);
        const auto rhs = tilde_p34(*routh, kSpin.Omega, x, leaf.label());
        CHECK(lhs[0] == doctest::Approx(rhs[0]).epsilon(1e-13));
        CHECK(lhs[1] == doctest::Approx(rhs[1]).epsilon(1e-13));
    }
}

TEST_CASE("potential derivative stack is self-consistent") {
    auto routh = routh_cache_get(kSpin, kParab, 6.0);
    const LeafSystem leaf(kSpin, kParab, routh, {0.8, 0.6});
    for (const double x : {0.4, 1.1, 2.0}) {
        const double h = 1e-5;
        const double wp_fd = (leaf.W(x + h) - leaf.W(x - h)) / (2.0 * h);
        const double wpp_fd = (leaf.W_p(x + h) - leaf.W_p(x - h)) / (2.0 * h);
        CHECK(leaf.W_p(x) == doctest::Approx(wp_fd).epsilon(1e-6));
        CHECK(leaf.W_pp(x) == doctest::Approx(wpp_fd).epsilon(1e-5));
    }
    for (const double r : {0.9, 1.5, 2.0}) {
        const double x = 0.5 * r * r;
        CHECK(leaf.V(r) == doctest::Approx(leaf.W(x)).epsilon(1e-14));
        CHECK(leaf.V_p(r) == doctest::Approx(r * leaf.W_p(x)).epsilon(1e-14));
        CHECK(leaf.V_pp(r) == doctest::Approx(leaf.W_p(x) + r * r * leaf.W_pp(x)).epsilon(1e-14));
        CHECK(leaf.V_pp(r) == doctest::Approx(leaf.V_pp_fd(r)).epsilon(1e-5));
    }
}

TEST_CASE("leaf energy is conserved along the leaf flow") {
    auto routh = routh_cache_get(kSpin, kParab, 6.0);
    const LeafSystem leaf(kSpin, kParab, routh, {1.0, 0.3});
    const double r0 = 1.4, rd0 = 0.25;
    const OdeSolution sol = leaf.integrate(r0, rd0, 0.0, 12.0);
    const double e0 = leaf.leaf_energy(r0, rd0);
    REQUIRE(sol.status == OdeStatus::Complete);
    for (double t = 0.0; t <= 12.0; t += 0.75) {
        const auto y = sol.eval(t);
        CHECK(leaf.leaf_energy(y[0], y[1]) == doctest::Approx(e0).epsilon(1e-8));
    }
}

TEST_CASE("second-order radial equation holds pointwise") {
    auto routh = routh_cache_get(kSpin, kParab, 6.0);
    const LeafSystem leaf(kSpin, kParab, routh, {-0.6, 0.9});
    for (const double r : {0.7, 1.3, 2.4}) {
        const double rd = 0.3 * r;
        const auto f = leaf.leaf_vector_field(r, rd);
        CHECK(f[0] == rd);
        const auto e = kParab.eval_profile(r);
        const double Fp = e.f_p * e.f_pp / e.F;
        const double resid = e.F * e.F * f[1] + e.F * Fp * rd * rd + leaf.V_p(r);
        CHECK(std::abs(resid) < 1e-10 * (1.0 + std::abs(leaf.V_p(r))));
    }
}

TEST_CASE("leaf dynamics reproduces the reduced radial motion") {
    const ReducedStatePolar s0{1.3, 0.2, 0.6, -0.4};
    const ReducedStateP5 p0 = to_p5(s0, kParab, kSpin);
    auto routh = routh_cache_get(kSpin, kParab, 6.0);
    const LeafLabel j = routh_J(kSpin, kParab, *routh, p0);
    const LeafSystem leaf(kSpin, kParab, routh, j);

    const Trajectory traj = integrate_reduced(kSpin, kParab, s0, 0.0, 6.0);
    REQUIRE(traj.status == TrajStatus::Complete);
    const OdeSolution rad = leaf.integrate(s0.r, s0.v_r, 0.0, 6.0);
    REQUIRE(rad.status == OdeStatus::Complete);
    for (double t = 0.0; t <= 6.0; t += 0.4) {
        const ReducedStatePolar s = traj.polar_at(t);
        const auto y = rad.eval(t);
        CHECK(y[0] == doctest::Approx(s.r).epsilon(1e-6));
        CHECK(y[1] == doctest::Approx(s.v_r).epsilon(1e-6));
    }
}

TEST_CASE("flat static leaf is purely centrifugal") {
    const Profile plane;
    const Params still(0.4, 1.4, 0.0);
    auto routh = routh_cache_get(still, plane, 6.0);
    const double j1 = 1.0;
    const LeafSystem leaf(still, plane, routh, {j1, 0.0});
    for (const double r : {0.3, 1.0, 2.7}) {
        CHECK(leaf.V_p(r) == doctest::Approx(-j1 * j1 / (r * r * r)).epsilon(1e-10));
    }
    CHECK(equilibria_on_leaf(leaf, 0.1, 5.0, 400).empty());
}

}
