// Release gate: every check below encodes one acceptance criterion, printed
// as a single PASS/FAIL line with the measured value and its tolerance. The
// process exits nonzero when any criterion fails.

#include <algorithm>
#include <array>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <sys/wait.h>

#include <Eigen/Dense>

#include "rollball/engine.hpp"
#include "rollball/equilibria.hpp"
#include "rollball/full_system.hpp"
#include "rollball/leaf.hpp"
#include "rollball/parabolic.hpp"
#include "rollball/parallel.hpp"
#include "rollball/params.hpp"
#include "rollball/profile.hpp"
#include "rollball/reduced.hpp"
#include "rollball/rng.hpp"
#include "rollball/routh.hpp"

#ifndef ROLLBALL_CLI_PATH
#error "ROLLBALL_CLI_PATH must point at the command-line binary"
#endif

namespace {

using namespace rollball;

constexpr std::uint64_t kSeed = 20260815;

int g_failures = 0;

void report(int id, const char* label, bool pass, const std::string& detail) {
    if (!pass)
        ++g_failures;
    std::printf("[%s] %2d %-24s %s\n", pass ? "PASS" : "FAIL", id, label, detail.c_str());
    std::fflush(stdout);
}

std::string fmt(const char* pattern, double a, double b = 0, double c = 0) {
    char buf[256];
    std::snprintf(buf, sizeof buf, pattern, a, b, c);
    return buf;
}

double norm4(const P4& a) {
    return std::sqrt(a[0] * a[0] + a[1] * a[1] + a[2] * a[2] + a[3] * a[3]);
}

P4 sample_q(const CounterRng& rng, std::uint64_t i) {
    const double r = rng.uniform(4 * i, 0.5, 2.2);
    return {0.5 * r * r, rng.uniform(4 * i + 1, -1.5, 1.5), rng.uniform(4 * i + 2, -1.5, 1.5),
            rng.uniform(4 * i + 3, -2.0, 2.0)};
}

const std::vector<Profile>& trio() {
    static const std::vector<Profile> profiles = {Profile::plane(), Profile::parabolic(1.0),
                                                  Profile::poly_p1({0.0, 1.0, 0.1})};
    return profiles;
}

/// Exact chart gradients of (J1, J2) out of the defining linear system;
/// independent re-derivation of the library's internal formula.
std::array<P4, 2> grad_J_chart(const Params& params, const Profile& profile,
                               const RouthSolution& routh, const P4& q) {
    const RouthCoeffs rc = routh_coeffs(params, profile, q[0]);
    std::array<double, 4> Um;
    std::array<double, 2> uv;
    routh.eval(q[0], Um, uv);
    const double det = Um[0] * Um[3] - Um[1] * Um[2];
    const double i11 = Um[3] / det, i12 = -Um[1] / det;
    const double i21 = -Um[2] / det, i22 = Um[0] / det;
    const double w1 = rc.G3 * q[3] + params.Omega * rc.g3;
    const double w2 = rc.G4 * q[2] + params.Omega * rc.g4;
    return {P4{-(i11 * w1 + i12 * w2), 0.0, i11, i12},
            P4{-(i21 * w1 + i22 * w2), 0.0, i21, i22}};
}

// 1. Conserved quantities stay put along a generic bounded orbit.
void criterion_conservation() {
    const Profile parab = Profile::parabolic(1.0);
    double worst = 0;
    int min_periods = 1 << 30;
    bool complete = true;
    for (const double Om : {0.0, 1.0}) {
        const Params params(0.4, 1.4, Om); // gamma = 1, mu = 2/7
        const ReducedStatePolar s0{1.2, 0.3, 0.7, -0.4};
        const Trajectory traj = integrate_reduced(params, parab, s0, 0.0, 80.0);
        complete = complete && traj.status == TrajStatus::Complete;
        const auto minima = radial_minima_times(traj);
        min_periods = std::min(min_periods, static_cast<int>(minima.size()) - 1);
        auto routh = routh_cache_get(params, parab, 8.0);
        const ConservationReport cr = conservation_report(params, parab, *routh, traj);
        worst = std::max({worst, cr.max_rel_E, cr.max_rel_J1, cr.max_rel_J2});
    }
    report(1, "conservation-drift", complete && min_periods >= 10 && worst < 1e-6,
           fmt("max rel drift of E, J1, J2 = %.3g over >= %.0f radial periods (tol 1e-6)",
               worst, static_cast<double>(min_periods)));
}

// 2 and 3. The bivector sends dE to the restricted field and kills dJ.
void criterion_poisson_identities() {
    CounterRng rng(kSeed);
    double worst_ham = 0, worst_cas = 0;
    std::uint64_t draw = 0;
    for (const Profile& profile : trio()) {
        for (const double Om : {0.0, 1.0}) {
            const Params params(0.4, 1.0, Om);
            auto routh = routh_cache_get(params, profile, 8.0);
            for (int i = 0; i < 100; ++i) {
                const P4 q = sample_q(rng, draw++);
                const P4 dE = energy_restricted_grad(params, profile, q);
                const P4 field = field_restricted(params, profile, q);
                const P4 lam = poisson_apply(params, profile, q, dE);
                P4 diff;
                for (int a = 0; a < 4; ++a)
                    diff[a] = lam[a] - field[a];
                worst_ham = std::max(worst_ham, norm4(diff) / (1.0 + norm4(field)));

                const auto dJs = grad_J_chart(params, profile, *routh, q);
                for (const P4& dJ : dJs)
                    worst_cas = std::max(worst_cas, norm4(poisson_apply(params, profile, q, dJ)));
            }
        }
    }
    report(2, "hamiltonian-identity", worst_ham < 1e-8,
           fmt("max ||L(dE) - X|| / (1 + ||X||) = %.3g at 600 sampled states (tol 1e-8)",
               worst_ham));
    report(3, "casimir-identity", worst_cas < 1e-7,
           fmt("max ||L(dJ_i)|| = %.3g at the same sample (tol 1e-7)", worst_cas));
}

// 4. The generic constrained-mechanics engine reproduces the hand-derived
// reduced equations, and its reaction matches the displayed components.
void criterion_engine_equivalence() {
    CounterRng rng(kSeed + 4);
    double worst_field = 0, worst_reaction = 0;
    std::uint64_t draw = 0;
    for (const Profile& profile : trio()) {
        for (const double Om : {0.0, 1.0}) {
            const Params params(0.4, 1.0, Om);
            const QuasiVelocitySystem sys = ball_system(params, profile);
            for (int i = 0; i < 168; ++i) {
                const std::uint64_t base = 8 * draw++;
                const double r = rng.uniform(base, 0.5, 2.2);
                const double theta = rng.uniform(base + 1, 0.0, 6.283185307179586);
                const double v_r = rng.uniform(base + 2, -1.5, 1.5);
                const double v_th = rng.uniform(base + 3, -1.5, 1.5);
                const double om_z = rng.uniform(base + 4, -2.0, 2.0);
                const auto om_xy =
                    constraint_omega_xy(params, profile, r, theta, v_r, v_th, om_z);

                Eigen::VectorXd q(2), v(5);
                q << r, theta;
                v << v_r, v_th, om_xy[0], om_xy[1], om_z;
                Eigen::VectorXd q_dot, v_dot;
                constrained_field(sys, q, v, q_dot, v_dot);

                double y[4] = {r, v_r, v_th, om_z};
                double d[4];
                polar_rhs(params, profile, y, d);
                const double ref =
                    1.0 + std::sqrt(d[0] * d[0] + d[1] * d[1] + d[2] * d[2] + d[3] * d[3]);
                const double df =
                    std::sqrt((q_dot(0) - d[0]) * (q_dot(0) - d[0]) +
                              (v_dot(0) - d[1]) * (v_dot(0) - d[1]) +
                              (v_dot(1) - d[2]) * (v_dot(1) - d[2]) +
                              (v_dot(4) - d[3]) * (v_dot(4) - d[3]));
                worst_field = std::max(worst_field, df / ref);

                const Eigen::VectorXd R = reaction_force(sys, q, v);
                const auto Rex = ball_reaction_explicit(params, profile, r, v_r, v_th, om_z);
                const double dr = std::abs(R(0) - Rex[0]) + std::abs(R(1) - Rex[1]) +
                                  std::abs(R(4) - Rex[2]);
                worst_reaction = std::max(worst_reaction, dr / (1.0 + R.norm()));
            }
        }
    }
    const bool pass = worst_field < 1e-8 && worst_reaction < 1e-9;
    report(4, "engine-equivalence", pass,
           fmt("max rel field deviation %.3g (tol 1e-8); reaction vs displayed %.3g "
               "(tol 1e-9) at 1008 states",
               worst_field, worst_reaction));
}

// 5. Numerically propagated transition data match the closed form.
void criterion_closed_form_oracle() {
    std::vector<double> grid;
    for (int i = 0; i < 121; ++i)
        grid.push_back(3.0 * i / 120.0);
    double worst = 0;
    for (const double b : {1.0, 2.0}) {
        for (const double mu : {2.0 / 7.0, 0.35}) {
            const double k = mu / (1.0 - mu);
            const Params params(k, 1.0, 0.0);
            const Profile profile = Profile::parabolic(b);
            auto routh = routh_cache_get(params, profile, 5.0);
            const ParabolicClosedForm cf(b, params.mu);
            worst = std::max(worst, oracle_compare(params, *routh, cf, grid));
        }
    }
    report(5, "closed-form-oracle", worst < 1e-6,
           fmt("max |(U,u)_num - (U,u)_exact| = %.3g on r in [0,3], 4 parameter pairs "
               "(tol 1e-6)",
               worst));
}

// 6. Reconstructed center path on the rotating plane against the exact circle.
void criterion_plane_circle() {
    const Params params(0.4, 1.0, 1.0); // mu = 2/7
    const Profile plane;
    const double w = params.mu * params.Omega;
    const double T = 2.0 * M_PI / w; // 7 pi
    const ReducedStatePolar s0{1.0, 0.3, 0.5, 0.2};
    const Trajectory traj = integrate_reduced(params, plane, s0, 0.0, T);
    const FullTrajectory full = reconstruct(params, plane, traj, 0.0, {1.0, 0.0, 0.0, 0.0});
    double worst = 0, scale = 0;
    bool complete = traj.status == TrajStatus::Complete && full.status == TrajStatus::Complete;
    for (int i = 0; i <= 400; ++i) {
        const double t = T * i / 400.0;
        const FullState fs = full.at(t);
        const double x = fs.r * std::cos(fs.theta);
        const double y = fs.r * std::sin(fs.theta);
        const auto exact = plane_exact_center(w, 1.0, 0.0, 0.3, 0.5, t);
        worst = std::max(worst, std::hypot(x - exact[0], y - exact[1]));
        scale = std::max({scale, std::abs(exact[0]), std::abs(exact[1])});
    }
    const double rel = worst / scale;
    report(6, "plane-exact-circle", complete && rel < 1e-6,
           fmt("max rel deviation from the closed-form circle = %.3g over one period "
               "T = 7 pi (tol 1e-6)",
               rel));
}

// 7. The stability functions carry the sign of the leaf-potential curvature.
void criterion_stability_signs() {
    CounterRng rng(kSeed + 7);
    const Profile parab = Profile::parabolic(1.0);
    const Profile crater = Profile::poly_p1({-0.15, 0.3, -0.15});
    int checked = 0, mismatches = 0;
    std::uint64_t draw = 0;
    for (const Profile* pr : {&parab, &crater}) {
        for (int i = 0; i < 25; ++i) {
            const double r = rng.uniform(3 * draw, 0.7, 2.0);
            const double v = (i % 2 ? 1.0 : -1.0) * rng.uniform(3 * draw + 1, 0.3, 1.5);
            const double Om = (i % 3 == 0) ? 1.0 : 0.0;
            ++draw;
            const Params params(0.4, 1.4, Om);
            auto routh = routh_cache_get(params, *pr, 8.0);
            const EquilibriumRecord rec = re3_record(params, *pr, routh, r, v);
            if (std::abs(rec.S_value) <= 1e-6)
                continue;
            ++checked;
            const LeafSystem leaf(params, *pr, routh, rec.j);
            if (rec.S_value * leaf.V_pp_fd(r) <= 0.0)
                ++mismatches;
        }
    }

    int checked_crit = 0, mismatches_crit = 0;
    {
        const Params params(0.4, 1.4, 1.0);
        const Profile ridge = Profile::poly_p1({0.3, -0.6, 0.3});
        const double rc = std::sqrt(2.0);
        auto routh = routh_cache_get(params, ridge, 8.0);
        const auto recs =
            re1_re2_records(params, ridge, routh, rc, {-2.0, -0.5, 0.5, 1.5, 3.0});
        for (const auto& rec : recs) {
            if (std::abs(rec.S_value) <= 1e-6)
                continue;
            ++checked_crit;
            const LeafSystem leaf(params, ridge, routh, rec.j);
            if (rec.S_value * leaf.V_pp_fd(rc) <= 0.0)
                ++mismatches_crit;
        }
    }
    const bool pass = mismatches == 0 && mismatches_crit == 0 && checked >= 40 &&
                      checked_crit >= 8;
    report(7, "stability-sign-coherence", pass,
           fmt("sign(S) vs FD potential curvature: 0 mismatches at %.0f of 50 circular and "
               "%.0f of 10 critical-radius equilibria above the 1e-6 gate",
               static_cast<double>(checked), static_cast<double>(checked_crit)));
}

// 8. Branch signature flips from (S,S) to (S,SUS) at the minimal threshold.
void criterion_bifurcation_structure() {
    const Params paper(0.4, 1.4, 0.0);
    const Profile parab = Profile::parabolic(1.0);
    const double om_m = omega_tilde_m(paper, parab, 1.0);
    int violations = 0, max_zeros = 0;
    for (int i = 0; i < 100; ++i) {
        const double Om = 2.0 * om_m * (i + 0.5) / 100.0;
        const BranchSignature sig = branch_signature(paper.with_omega(Om), parab, 1.0);
        max_zeros = std::max({max_zeros, static_cast<int>(sig.zeros_neg.size()),
                              static_cast<int>(sig.zeros_pos.size())});
        const bool want_split = Om > om_m;
        const bool is_plain = sig.neg == "S" && sig.pos == "S";
        const bool is_split = sig.neg == "S" && sig.pos == "SUS";
        if (want_split ? !is_split : !is_plain)
            ++violations;
    }
    report(8, "bifurcation-structure", violations == 0 && max_zeros <= 2,
           fmt("signature (S,S) below and (S,SUS) above threshold %.4g: %.0f violations; "
               "max zeros per branch %.0f (cap 2)",
               om_m, static_cast<double>(violations), static_cast<double>(max_zeros)));
}

// 9. Equilibrium counts per symplectic leaf over a label grid.
void criterion_leaf_census() {
    const Profile parab = Profile::parabolic(1.0);
    const Params paper(0.4, 1.4, 0.0);
    std::vector<double> grid;
    for (int i = 0; i < 20; ++i)
        grid.push_back(-5.0 + 10.0 * i / 19.0);

    auto routh0 = routh_cache_get(paper, parab, 150.0);
    std::atomic<int> bad_static{0};
    parallel_for(grid.size(), [&](std::size_t a) {
        for (const double j2 : grid) {
            const LeafSystem leaf(paper, parab, routh0, {grid[a], j2});
            const auto recs = equilibria_on_leaf(leaf, 0.05, 16.0, 1000);
            if (recs.size() != 1 || recs[0].classification != Classification::Stable)
                ++bad_static;
        }
    });

    const Params spin = paper.with_omega(1.0);
    auto routh1 = routh_cache_get(spin, parab, 150.0);
    std::atomic<int> bad_spin{0};
    parallel_for(grid.size(), [&](std::size_t a) {
        for (const double j2 : grid) {
            const LeafSystem leaf(spin, parab, routh1, {grid[a], j2});
            const auto recs = equilibria_on_leaf(leaf, 0.05, 16.0, 1000);
            const std::size_t n = recs.size();
            if (n < 1 || n > 3) {
                ++bad_spin;
                continue;
            }
            int unstable = 0;
            for (const auto& rec : recs)
                if (rec.classification == Classification::Unstable)
                    ++unstable;
            if (n == 3 && unstable != 1)
                ++bad_spin;
        }
    });
    report(9, "leaf-equilibrium-counts", bad_static == 0 && bad_spin == 0,
           fmt("20x20 label grid: static census violations %.0f, rotating census "
               "violations %.0f",
               static_cast<double>(bad_static.load()), static_cast<double>(bad_spin.load())));
}

// 10. D(E, J) has rank three away from equilibria and drops exactly there.
void criterion_integral_independence() {
    CounterRng rng(kSeed + 10);
    const Profile parab = Profile::parabolic(1.0);
    double min_noneq = 1e300, max_eq = 0;
    std::uint64_t draw = 0;
    for (const double Om : {0.0, 1.0}) {
        const Params params(0.4, 1.0, Om);
        auto routh = routh_cache_get(params, parab, 8.0);
        const auto sigma_ratio = [&](const P4& q) {
            Eigen::Matrix<double, 3, 4> Jm;
            const P4 dE = energy_restricted_grad(params, parab, q);
            const auto dJs = grad_J_chart(params, parab, *routh, q);
            for (int c = 0; c < 4; ++c) {
                Jm(0, c) = dE[c];
                Jm(1, c) = dJs[0][c];
                Jm(2, c) = dJs[1][c];
            }
            const Eigen::JacobiSVD<Eigen::Matrix<double, 3, 4>> svd(Jm);
            return svd.singularValues()(2) / svd.singularValues()(0);
        };
        for (int i = 0; i < 50; ++i) {
            const P4 q = sample_q(rng, draw++);
            if (norm4(field_restricted(params, parab, q)) < 1e-6)
                continue; // skip accidental near-equilibria
            min_noneq = std::min(min_noneq, sigma_ratio(q));
        }
        for (int i = 0; i < 10; ++i) {
            const double r = rng.uniform(4 * draw, 0.7, 2.0);
            const double v = (i % 2 ? 1.0 : -1.0) * rng.uniform(4 * draw + 1, 0.3, 1.5);
            ++draw;
            const EquilibriumRecord rec = re3_record(params, parab, routh, r, v);
            const ReducedStateP5 p =
                to_p5({rec.r, 0.0, rec.v_theta, rec.omega_n}, parab, params);
            max_eq = std::max(max_eq, sigma_ratio({p.p1, p.p2, p.p3, p.p4}));
        }
    }
    const double gap = min_noneq / std::max(max_eq, 1e-300);
    const bool pass = min_noneq > 1e-8 && max_eq < 1e-8 && gap >= 1e2;
    report(10, "integral-independence", pass,
           fmt("sigma3/sigma1 >= %.3g off equilibria, <= %.3g at 20 equilibria "
               "(gap %.3g, need >= 1e2)",
               min_noneq, max_eq, gap));
}

// 11. Reduced orbits close after one radial period; harmonic period law.
void criterion_periodicity() {
    const Params spin(0.4, 1.4, 1.0);
    const Profile parab = Profile::parabolic(1.0);
    auto routh = routh_cache_get(spin, parab, 150.0);

    const ReducedStatePolar s0{1.3, 0.4, 0.8, -0.3};
    const LeafLabel j = routh_J(spin, parab, *routh, to_p5(s0, parab, spin));
    const Trajectory traj = integrate_reduced(spin, parab, s0, 0.0, 40.0);
    const PeriodEstimate pe = estimate_period_and_rotation(traj);
    const bool returns = pe.kind == PeriodEstimate::Kind::PeriodicReduced &&
                         pe.return_distance < 1e-6 && std::abs(j.j1) > 1e-12;

    const LeafSystem leaf(spin, parab, routh, {1.0, 0.5});
    const auto recs = equilibria_on_leaf(leaf, 0.05, 16.0, 1000);
    double period_err = 1e300;
    if (!recs.empty() && recs[0].classification == Classification::Stable) {
        const double rstar = recs[0].r;
        const double T_pred =
            2.0 * M_PI * parab.eval_profile(rstar).F / std::sqrt(leaf.V_pp(rstar));
        const double r0 = rstar + 1e-3;
        const auto p34v = leaf.p34(0.5 * r0 * r0);
        const ReducedStatePolar small{r0, 0.0, p34v[0] / (r0 * r0), p34v[1]};
        const Trajectory osc = integrate_reduced(spin, parab, small, 0.0, 4.0 * T_pred);
        const auto minima = radial_minima_times(osc);
        if (minima.size() >= 3)
            period_err = std::abs(minima[1] - minima[0] - T_pred) / T_pred;
    }
    const bool pass = returns && period_err < 0.02;
    report(11, "periodicity", pass,
           fmt("return distance after one radial period %.3g (tol 1e-6); small-amplitude "
               "period error %.3g (tol 0.02)",
               pe.return_distance, period_err));
}

// 12. Negative control: a planted sign error must fail loudly end to end.
void criterion_negative_control() {
    namespace fs = std::filesystem;
    const auto stamp = std::chrono::steady_clock::now().time_since_epoch().count();
    const fs::path dir =
        fs::temp_directory_path() / ("rollball-acceptance-" + std::to_string(stamp));
    fs::create_directories(dir);
    const auto run = [&](const std::string& args, std::string& err_text) {
        const fs::path out = dir / "out.txt";
        const fs::path err = dir / "err.txt";
        const std::string cmd = "cd '" + dir.string() + "' && '" + ROLLBALL_CLI_PATH + "' " +
                                args + " > '" + out.string() + "' 2> '" + err.string() + "'";
        const int rc = std::system(cmd.c_str());
        std::ifstream in(err);
        std::ostringstream ss;
        ss << in.rdbuf();
        err_text = ss.str();
        return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
    };
    std::string err;
    const int healthy = run("verify --suite all", err);
    bool pass = healthy == 0;
    std::string detail = "healthy umbrella exit " + std::to_string(healthy);
    for (const char* fault : {"field-sign", "energy-sign"}) {
        const int rc = run(std::string("verify --suite all --inject-fault ") + fault, err);
        const bool named = err.find("hamiltonian-identity") != std::string::npos;
        pass = pass && rc == 1 && named;
        detail += std::string("; ") + fault + " exit " + std::to_string(rc) +
                  (named ? " naming the check" : " WITHOUT naming the check");
    }
    std::error_code ec;
    fs::remove_all(dir, ec);
    report(12, "negative-control", pass, detail);
}

} // namespace

int main() {
    std::printf("acceptance gate, seed %llu\n", static_cast<unsigned long long>(kSeed));
    criterion_conservation();
    criterion_poisson_identities();
    criterion_engine_equivalence();
    criterion_closed_form_oracle();
    criterion_plane_circle();
    criterion_stability_signs();
    criterion_bifurcation_structure();
    criterion_leaf_census();
    criterion_integral_independence();
    criterion_periodicity();
    criterion_negative_control();
    if (g_failures == 0) {
        std::printf("acceptance: all 12 criteria passed\n");
        return 0;
    }
    std::printf("acceptance: %d criteria FAILED\n", g_failures);
    return 1;
}
