#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "rollball/equilibria.hpp"
#include "rollball/leaf.hpp"
#include "rollball/params.hpp"
#include "rollball/profile.hpp"
#include "rollball/routh.hpp"

using namespace rollball;

namespace {

const Params kPaper(0.4, 1.4, 0.0); // gamma = 1, mu = 2/7
const Profile kParab = Profile::parabolic(1.0);

} // namespace

TEST_SUITE("equilibria") {

TEST_CASE("parabolic stability blocks in closed form") {
    for (const double b : {1.0, 2.0}) {
        const Profile pr = Profile::parabolic(b);
        for (const double r : {0.7, 1.5}) {
            const DeltaBlock db = delta_block(kPaper, pr, r);
            const double gamma = kPaper.gamma, mu = kPaper.mu;
            CHECK(db.D00 == doctest::Approx(gamma * gamma * b * b * r).epsilon(1e-12));
            CHECK(db.D11 == doctest::Approx(-gamma * mu * b * b * b * r * r * r).epsilon(1e-12));
            CHECK(db.D04 > 0.0);
        }
    }
}

TEST_CASE("rotation threshold zeroes the cubic stability function") {
    const double pts[][2] = {{0.8, 0.5}, {1.4, -1.1}, {2.0, 0.25}};
    for (const auto& rv : pts) {
        const double Ot = omega_tilde(kPaper, kParab, rv[0], rv[1]);
        const double s3 = stability_S3(kPaper.with_omega(Ot), kParab, rv[0], rv[1]);
        CHECK(std::abs(s3) < 1e-10 * (1.0 + std::abs(Ot)));
        CHECK(std::abs(Ot) >= omega_tilde_m(kPaper, kParab, rv[0]) - 1e-9);
    }
}

TEST_CASE("threshold infimum is attained over circular speeds") {
    const double r = 1.0;
    const double om_m = omega_tilde_m(kPaper, kParab, r);
    double best = 1e300;
    for (int i = 1; i <= 4000; ++i) {
        const double v = 4.0 * i / 4000.0;
        best = std::min(best, std::abs(omega_tilde(kPaper, kParab, r, v)));
    }
    CHECK(om_m == doctest::Approx(best).epsilon(1e-5));
    // on the paraboloid the minimal threshold drops with radius
    CHECK(omega_tilde_m(kPaper, kParab, 0.5) > om_m);
    CHECK(omega_tilde_m(kPaper, kParab, 2.0) < om_m);
}

TEST_CASE("static circular orbits on a convex bowl are stable") {
    auto routh = routh_cache_get(kPaper, kParab, 8.0);
    for (const double v : {-1.2, 0.4, 0.9}) {
        const EquilibriumRecord rec = re3_record(kPaper, kParab, routh, 1.1, v);
        CHECK(rec.family == Family::RE3);
        CHECK(rec.v_theta == v);
        CHECK(rec.Omega == 0.0);
        CHECK(rec.omega_n == doctest::Approx(re3_omega_n(kPaper, kParab, 1.1, v)));
        CHECK(rec.S_value > 0.0);
        CHECK(rec.classification == Classification::Stable);
        CHECK(rec.field_residual < 1e-9);
    }
}

TEST_CASE("critical circle location on a rippled surface") {
    const Profile ridge = Profile::poly_p1({0.3, -0.6, 0.3});
    const auto radii = critical_radii(ridge, 0.2, 3.0, 600);
    REQUIRE(radii.size() == 1);
    CHECK(radii[0] == doctest::Approx(std::sqrt(2.0)).epsilon(1e-9));
    CHECK(critical_radii(kParab, 0.2, 3.0, 600).empty());
}

TEST_CASE("families one and two live on the critical circle") {
    const Params spin = kPaper.with_omega(1.0);
    const Profile ridge = Profile::poly_p1({0.3, -0.6, 0.3});
    auto routh = routh_cache_get(spin, ridge, 8.0);
    const double rc = std::sqrt(2.0);
    const std::vector<double> spins = {-1.0, 0.5, 2.0};
    const auto recs = re1_re2_records(spin, ridge, routh, rc, spins);
    REQUIRE(recs.size() == 2 * spins.size());
    int n1 = 0, n2 = 0;
    for (const auto& rec : recs) {
        CHECK(rec.r == doctest::Approx(rc));
        CHECK(rec.field_residual < 1e-9);
        CHECK(std::count(spins.begin(), spins.end(), rec.omega_n) == 1);
        if (rec.family == Family::RE1) {
            ++n1;
            CHECK(rec.v_theta == doctest::Approx(spin.mu * spin.Omega));
            CHECK(rec.S_value == doctest::Approx(stability_S1(spin, ridge, rc)));
        } else {
            ++n2;
            REQUIRE(rec.family == Family::RE2);
            CHECK(rec.v_theta == 0.0);
            CHECK(rec.S_value ==
                  doctest::Approx(stability_S2(spin, ridge, rc, rec.omega_n)));
        }
    }
    CHECK(n1 == static_cast<int>(spins.size()));
    CHECK(n2 == static_cast<int>(spins.size()));
}

TEST_CASE("spin threshold splits family two on a concave circle") {
    const Params spin = kPaper.with_omega(1.0);
    const Profile crater = Profile::poly_p1({-0.15, 0.3, -0.15});
    const double rc = std::sqrt(2.0);
    const double fpp = crater.eval_profile(rc).f_pp;
    REQUIRE(fpp < 0.0);
    const double w_star = (1.0 - std::abs(fpp)) / std::abs(fpp) * spin.Omega -
                          spin.gamma / (spin.mu * spin.mu * spin.Omega);
    CHECK(std::abs(stability_S2(spin, crater, rc, w_star)) < 1e-9);

    auto routh = routh_cache_get(spin, crater, 8.0);
    const auto recs =
        re1_re2_records(spin, crater, routh, rc, {w_star - 0.5, w_star, w_star + 0.5});
    Classification below = Classification::Marginal, at = Classification::Stable,
                   above = Classification::Stable;
    for (const auto& rec : recs) {
        if (rec.family != Family::RE2)
            continue;
        if (rec.omega_n < w_star - 0.1)
            below = rec.classification;
        else if (rec.omega_n > w_star + 0.1)
            above = rec.classification;
        else
            at = rec.classification;
    }
    CHECK(below == Classification::Stable);
    CHECK(at == Classification::Marginal);
    CHECK(above == Classification::Unstable);
}

TEST_CASE("branch signature transitions at the minimal threshold") {
    const double om_m = omega_tilde_m(kPaper, kParab, 1.0);
    const BranchSignature slow = branch_signature(kPaper.with_omega(0.8 * om_m), kParab, 1.0);
    CHECK(slow.neg == "S");
    CHECK(slow.pos == "S");
    CHECK(slow.zeros_neg.empty());
    CHECK(slow.zeros_pos.empty());

    const BranchSignature fast = branch_signature(kPaper.with_omega(1.2 * om_m), kParab, 1.0);
    CHECK(fast.neg == "S");
    CHECK(fast.pos == "SUS");
    REQUIRE(fast.zeros_pos.size() == 2);
    CHECK(fast.zeros_pos[0] < fast.zeros_pos[1]);
    CHECK(fast.zeros_pos[0] > 0.0);
}

TEST_CASE("leaf census split into stable wells and an unstable barrier") {
    auto routh0 = routh_cache_get(kPaper, kParab, 60.0);
    const LeafSystem quiet(kPaper, kParab, routh0, {2.0, 1.0});
    const auto one = equilibria_on_leaf(quiet, 0.05, 16.0, 1000);
    REQUIRE(one.size() == 1);
    CHECK(one[0].classification == Classification::Stable);
    CHECK(one[0].family == Family::RE3);

    const Params spin = kPaper.with_omega(1.0);
    auto routh = routh_cache_get(spin, kParab, 150.0);
    const LeafSystem leaf(spin, kParab, routh, {-10.0, -19.0});
    const auto recs = equilibria_on_leaf(leaf, 0.05, 60.0, 3000);
    REQUIRE(recs.size() == 3);
    CHECK(recs[0].r < recs[1].r);
    CHECK(recs[1].r < recs[2].r);
    CHECK(recs[0].classification == Classification::Stable);
    CHECK(recs[1].classification == Classification::Unstable);
    CHECK(recs[2].classification == Classification::Stable);
}

}
