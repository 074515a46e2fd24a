#include <doctest.h>

#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "rollball/reduced.hpp"
#include "rollball/routh.hpp"

using namespace rollball;

namespace {
const Profile kParab = Profile::parabolic(1.0);
const Params kSpin(0.4, 1.4, 1.0);
} // namespace

TEST_SUITE("routh") {

TEST_CASE("basepoint normalization") {
    auto routh = routh_cache_get(kSpin, kParab, 6.0);
    std::array<double, 4> U;
    std::array<double, 2> u;
    routh->eval(0.0, U, u);
    CHECK(U[0] == 1.0);
    CHECK(U[1] == 0.0);
    CHECK(U[2] == 0.0);
    CHECK(U[3] == 1.0);
    CHECK(u[0] == 0.0);
    CHECK(u[1] == 0.0);
}

TEST_CASE("unit determinant propagates (traceless coefficient matrix)") {
    auto routh = routh_cache_get(kSpin, kParab, 6.0);
    std::array<double, 4> U;
    std::array<double, 2> u;
    for (double x = 0.0; x <= 6.0; x += 0.37) {
        routh->eval(x, U, u);
        CHECK(std::abs(U[0] * U[3] - U[1] * U[2] - 1.0) < 1e-10);
    }
}

TEST_CASE("plane solves in closed form") {
    const Profile flat = Profile::plane();
    auto routh = routh_cache_get(kSpin, flat, 5.0);
    std::array<double, 4> U;
    std::array<double, 2> u;
    for (double x : {0.5, 2.0, 4.5}) {
        routh->eval(x, U, u);
        CHECK(std::abs(U[0] - 1.0) < 1e-12);
        CHECK(std::abs(U[1]) < 1e-12);
        CHECK(std::abs(U[2]) < 1e-12);
        CHECK(std::abs(U[3] - 1.0) < 1e-12);
        CHECK(u[0] == doctest::Approx(kSpin.mu * x).epsilon(1e-12));
        CHECK(std::abs(u[1]) < 1e-12);
    }
    // coefficients vanish identically on the plane
    const RouthCoeffs c = routh_coeffs(kSpin, flat, 1.3);
    CHECK(c.G3 == 0.0);
    CHECK(c.G4 == 0.0);
    CHECK(c.g3 == doctest::Approx(kSpin.mu).epsilon(1e-15));
    CHECK(c.g4 == 0.0);
}

TEST_CASE("hermite nodes carry consistent derivatives") {
    auto routh = routh_cache_get(kSpin, kParab, 6.0);
    std::array<double, 4> U, dU, Up, Um;
    std::array<double, 2> u, du, up, um;
    for (double x : {0.4, 1.7, 3.9}) {
        routh->eval_with_derivative(x, U, u, dU, du);
        const double h = 1e-5;
        routh->eval(x + h, Up, up);
        routh->eval(x - h, Um, um);
        for (int i = 0; i < 4; ++i)
            CHECK(dU[i] == doctest::Approx((Up[i] - Um[i]) / (2 * h)).epsilon(1e-5));
        for (int i = 0; i < 2; ++i)
            CHECK(du[i] == doctest::Approx((up[i] - um[i]) / (2 * h)).epsilon(1e-5));
    }
}

TEST_CASE("on-demand range extension") {
    auto routh = routh_cache_get(kSpin, Profile::poly_p1({0.0, 0.7, 0.05}), 2.0);
    const double far = 4.0 * routh->x_max();
    std::array<double, 4> U;
    std::array<double, 2> u;
    routh->eval(far, U, u); // must not throw
    CHECK(routh->x_max() >= far);
    CHECK(std::abs(U[0] * U[3] - U[1] * U[2] - 1.0) < 1e-9);
}

TEST_CASE("label map inverts the leaf parametrization") {
    auto routh = routh_cache_get(kSpin, kParab, 6.0);
    for (double j1 : {-2.0, 0.5, 3.0}) {
        for (double p1 : {0.3, 1.1, 2.6}) {
            const LeafLabel j{j1, 0.7 * j1 - 0.4};
            const auto p34 = tilde_p34(*routh, kSpin.Omega, p1, j);
            ReducedStateP5 p;
            p.p1 = p1;
            p.p2 = 0.33;
            p.p3 = p34[0];
            p.p4 = p34[1];
            p.p0 = (p.p2 * p.p2 + p.p3 * p.p3) / (4.0 * p1);
            const LeafLabel back = routh_J(kSpin, kParab, *routh, p);
            CHECK(back.j1 == doctest::Approx(j.j1).epsilon(1e-10));
            CHECK(back.j2 == doctest::Approx(j.j2).epsilon(1e-10));
        }
    }
}

TEST_CASE("moving energy structure at rest") {
    const Params still(0.4, 1.4, 0.0);
    const ReducedStateP5 p = to_p5({1.2, 0.3, 0.7, -0.5}, kParab, still);
    const double direct = moving_energy(still, kParab, p);
    // unit translation-energy coefficient
    ReducedStateP5 faster = p;
    faster.p0 = 2.0 * p.p0;
    CHECK(moving_energy(still, kParab, faster) - direct == doctest::Approx(p.p0));
    // with the surface at rest E is even in each velocity-like coordinate
    for (int i = 2; i <= 4; ++i) {
        ReducedStateP5 m = p;
        (i == 2 ? m.p2 : i == 3 ? m.p3 : m.p4) *= -1.0;
        CHECK(moving_energy(still, kParab, m) == doctest::Approx(direct).epsilon(1e-14));
    }
    // rotating the surface shifts E oddly in (p3, p4) jointly with Omega
    const Params spin = still.with_omega(0.8);
    const double ep = moving_energy(spin, kParab, p);
    const double em = moving_energy(spin.with_omega(-0.8), kParab, reflect(p));
    CHECK(ep == doctest::Approx(em).epsilon(1e-14));
}

TEST_CASE("drift report over a trajectory") {
    const ReducedStatePolar s0{1.0, 0.4, 0.9, 0.3};
    const Trajectory traj = integrate_reduced(kSpin, kParab, s0, 0.0, 20.0);
    REQUIRE(traj.status == TrajStatus::Complete);
    auto routh = routh_cache_get(kSpin, kParab, 6.0);
    const ConservationReport rep = conservation_report(kSpin, kParab, *routh, traj);
    CHECK(rep.max_rel_E < 1e-8);
    CHECK(rep.max_rel_J1 < 1e-8);
    CHECK(rep.max_rel_J2 < 1e-8);
    CHECK(rep.max_rel_K == 0.0); // polar chart keeps membership exact
    CHECK(std::isfinite(rep.E0));

    const LeafLabel j0 = routh_J(kSpin, kParab, *routh, traj.p5_at_index(0));
    CHECK(rep.J0.j1 == doctest::Approx(j0.j1));
    CHECK(rep.J0.j2 == doctest::Approx(j0.j2));
}

TEST_CASE("cache identity and separation") {
    auto a = routh_cache_get(kSpin, kParab, 6.0);
    auto b = routh_cache_get(kSpin.with_omega(2.5), kParab, 6.0); // Omega-independent table
    auto c = routh_cache_get(Params(0.5, 1.4, 1.0), kParab, 6.0); // different mu
    auto d = routh_cache_get(kSpin, Profile::parabolic(2.0), 6.0);
    CHECK(a.get() == b.get());
    CHECK(a.get() != c.get());
    CHECK(a.get() != d.get());
}

TEST_CASE("trajectory table emission") {
    const Trajectory traj = integrate_reduced(kSpin, kParab, {1.0, 0.2, 0.8, 0.1}, 0.0, 2.0);
    auto routh = routh_cache_get(kSpin, kParab, 6.0);
    std::ostringstream os;
    write_trajectory_csv(os, kSpin, kParab, *routh, traj);
    std::istringstream is(os.str());
    std::string header;
    std::getline(is, header);
    CHECK(header == "t,r,v_r,v_theta,omega_z,p0,p1,p2,p3,p4,E,J1,J2,K_drift");
    std::string row;
    std::size_t rows = 0;
    while (std::getline(is, row)) {
        if (row.empty())
            continue;
        ++rows;
        std::size_t commas = 0;
        for (char ch : row)
            if (ch == ',')
                ++commas;
        CHECK(commas == 13);
    }
    CHECK(rows == traj.size());
}

} // TEST_SUITE
