#include "rollball/verify.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <memory>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "rollball/engine.hpp"
#include "rollball/equilibria.hpp"
#include "rollball/full_system.hpp"
#include "rollball/leaf.hpp"
#include "rollball/ode.hpp"
#include "rollball/parabolic.hpp"
#include "rollball/parallel.hpp"
#include "rollball/reduced.hpp"
#include "rollball/rng.hpp"
#include "rollball/rootfind.hpp"
#include "rollball/routh.hpp"

namespace rollball {

namespace {

void add(VerifyReport& rep, const char* name, double measured, double threshold,
         char relation = '<') {
    CheckResult c;
    c.name = name;
    c.measured = measured;
    c.threshold = threshold;
    c.relation = relation;
    c.pass = std::isfinite(measured) &&
             (relation == '<' ? measured < threshold : measured > threshold);
    rep.checks.push_back(std::move(c));
}

double norm4(const P4& a) {
    return std::sqrt(a[0] * a[0] + a[1] * a[1] + a[2] * a[2] + a[3] * a[3]);
}

/// Centered differences with a caller-chosen step scale. Functions routed
/// through the dense Routh table carry ~1e-12 interpolation noise, so their
/// difference quotients need a larger step than smooth closed forms.
template <typename Fn> P4 fd_grad_h(const Fn& f, const P4& q, double h_scale) {
    P4 g{};
    for (int i = 0; i < 4; ++i) {
        const double h = h_scale * (1.0 + std::abs(q[i]));
        P4 qp = q, qm = q;
        qp[i] += h;
        qm[i] -= h;
        g[i] = (f(qp) - f(qm)) / (2.0 * h);
    }
    return g;
}

/// Sample of the open stratum: p1 from r in [0.5, 2.2], the rest in boxes.
P4 sample_q(const CounterRng& rng, std::uint64_t i) {
    const double r = rng.uniform(4 * i, 0.5, 2.2);
    return {0.5 * r * r, rng.uniform(4 * i + 1, -1.5, 1.5), rng.uniform(4 * i + 2, -1.5, 1.5),
            rng.uniform(4 * i + 3, -2.0, 2.0)};
}

ReducedStateP5 lift_q(const P4& q) {
    ReducedStateP5 p;
    p.p1 = q[0];
    p.p2 = q[1];
    p.p3 = q[2];
    p.p4 = q[3];
    p.p0 = (q[1] * q[1] + q[2] * q[2]) / (4.0 * q[0]);
    return p;
}

const std::vector<Profile>& trio() {
    static const std::vector<Profile> profiles = {Profile::plane(), Profile::parabolic(1.0),
                                                  Profile::poly_p1({0.0, 1.0, 0.1})};
    return profiles;
}

/// Exact chart gradients of (J1, J2). Differentiating J = U^{-1}[(p3,p4) - Omega u]
/// with the defining system U' = G U, u' = G u + g collapses the p1 derivative
/// to -U^{-1}[G (p3,p4) + Omega g]; the (p3,p4) block is U^{-1} itself.
std::array<P4, 2> grad_J_chart(const Params& params, const Profile& profile,
                               const RouthSolution& routh, const P4& q) {
    const RouthCoeffs rc = routh_coeffs(params, profile, q[0]);
    std::array<double, 4> Um;
    std::array<double, 2> uv;
    routh.eval(q[0], Um, uv);
    const double det = Um[0] * Um[3] - Um[1] * Um[2]; // 1 up to table error (tr G = 0)
    const double i11 = Um[3] / det, i12 = -Um[1] / det;
    const double i21 = -Um[2] / det, i22 = Um[0] / det;
    const double w1 = rc.G3 * q[3] + params.Omega * rc.g3;
    const double w2 = rc.G4 * q[2] + params.Omega * rc.g4;
    return {P4{-(i11 * w1 + i12 * w2), 0.0, i11, i12},
            P4{-(i21 * w1 + i22 * w2), 0.0, i21, i22}};
}

Eigen::Matrix3d quat_to_matrix(const std::array<double, 4>& q) {
    const double w = q[0], x = q[1], y = q[2], z = q[3];
    Eigen::Matrix3d R;
    R << 1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y),
        2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x),
        2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y);
    return R;
}

} // namespace

bool VerifyReport::all_pass() const {
    for (const auto& c : checks)
        if (!c.pass)
            return false;
    return true;
}

const CheckResult* VerifyReport::first_failure() const {
    for (const auto& c : checks)
        if (!c.pass)
            return &c;
    return nullptr;
}

VerifyReport verify_poisson(std::uint64_t seed, FaultInjection fault) {
    VerifyReport rep;
    rep.suite = "poisson";
    CounterRng rng(seed);

    double worst_ham = 0, worst_grad = 0, worst_cas = 0, worst_cas_fd = 0, worst_anti = 0,
           worst_sympl = 0;
    std::uint64_t draw = 0;
    for (const Profile& profile : trio()) {
        for (double Om : {0.0, 1.0}) {
            const Params params(0.4, 1.0, Om);
            const Params params_flipped = params.with_omega(-Om);
            auto routh = routh_cache_get(params, profile, 8.0);
            for (int i = 0; i < 100; ++i) {
                const P4 q = sample_q(rng, draw++);

                // field/energy compatibility through the bivector
                const auto energy_used = [&](const P4& p) {
                    double e = energy_restricted(params, profile, p);
                    if (fault == FaultInjection::EnergySign) {
                        const double cF = profile.curly_F(p[0]);
                        e -= 2.0 * Om * (params.mu * p[3] * cF - p[2]);
                    }
                    return e;
                };
                const P4 dE = fd_grad(energy_used, q);
                const P4 field = fault == FaultInjection::FieldSign
                                     ? field_restricted(params_flipped, profile, q)
                                     : field_restricted(params, profile, q);
                const P4 lam = poisson_apply(params, profile, q, dE);
                P4 diff;
                for (int a = 0; a < 4; ++a)
                    diff[a] = lam[a] - field[a];
                worst_ham = std::max(worst_ham, norm4(diff) / (1.0 + norm4(field)));

                // hand-coded energy gradient against centered differences
                const P4 g_hand = energy_restricted_grad(params, profile, q);
                const P4 g_fd = fd_grad(
                    [&](const P4& p) { return energy_restricted(params, profile, p); }, q);
                P4 gd;
                for (int a = 0; a < 4; ++a)
                    gd[a] = g_hand[a] - g_fd[a];
                worst_grad = std::max(worst_grad, norm4(gd) / (1.0 + norm4(g_fd)));

                // both leaf labels annihilated by the bivector
                const auto dJs = grad_J_chart(params, profile, *routh, q);
                for (int which = 0; which < 2; ++which) {
                    const P4& dJ = dJs[which];
                    const P4 lamJ = poisson_apply(params, profile, q, dJ);
                    worst_cas = std::max(worst_cas, norm4(lamJ) / (1.0 + norm4(dJ)));

                    // and the label map itself differentiates to that gradient
                    const P4 dJ_fd = fd_grad_h(
                        [&](const P4& p) {
                            const LeafLabel j = routh_J(params, profile, *routh, lift_q(p));
                            return which == 0 ? j.j1 : j.j2;
                        },
                        q, 1e-4);
                    P4 dd;
                    for (int t = 0; t < 4; ++t)
                        dd[t] = dJ[t] - dJ_fd[t];
                    worst_cas_fd = std::max(worst_cas_fd, norm4(dd) / (1.0 + norm4(dJ)));
                }

                // antisymmetry on random covector pairs
                P4 a, b;
                for (int t = 0; t < 4; ++t) {
                    a[t] = rng.uniform(50000 + 8 * draw + t, -1.0, 1.0);
                    b[t] = rng.uniform(50000 + 8 * draw + 4 + t, -1.0, 1.0);
                }
                const P4 lam_b = poisson_apply(params, profile, q, b);
                const P4 lam_a = poisson_apply(params, profile, q, a);
                double ab = 0, ba = 0;
                for (int t = 0; t < 4; ++t) {
                    ab += a[t] * lam_b[t];
                    ba += b[t] * lam_a[t];
                }
                worst_anti = std::max(worst_anti, std::abs(ab + ba) / (1.0 + std::abs(ab)));

                // symplectic-form coefficient is the reciprocal of 2 p1 curlyF^2
                const double coef = leaf_symplectic_form(q[0], profile);
                const double cF = profile.curly_F(q[0]);
                worst_sympl =
                    std::max(worst_sympl, std::abs(coef * 2.0 * q[0] * cF * cF - 1.0));
            }
        }
    }
    add(rep, "hamiltonian-identity", worst_ham, 1e-8);
    add(rep, "hand-gradient-agreement", worst_grad, 1e-6);
    add(rep, "casimir-identity", worst_cas, 1e-7);
    add(rep, "casimir-gradient-fd-consistency", worst_cas_fd, 1e-5);
    add(rep, "poisson-antisymmetry", worst_anti, 1e-12);
    add(rep, "symplectic-reciprocal", worst_sympl, 1e-12);

    // restriction of the energy to a leaf is affine in the 1-dof leaf energy
    {
        const Params params(0.4, 1.0, 1.0);
        const Profile profile = Profile::parabolic(1.0);
        auto routh = routh_cache_get(params, profile, 8.0);
        const LeafSystem leaf(params, profile, routh, {1.0, 0.5});
        const double w = 0.7;
        std::vector<double> c1s, c0s;
        for (int i = 0; i < 24; ++i) {
            const double r = 0.4 + 2.0 * i / 23.0;
            const double x = 0.5 * r * r;
            const auto p34v = leaf.p34(x);
            const auto fe = profile.eval_profile(r);
            P4 q0{x, 0.0, p34v[0], p34v[1]};
            P4 qw{x, r * w, p34v[0], p34v[1]};
            const double e0 = energy_restricted(params, profile, q0);
            const double ew = energy_restricted(params, profile, qw);
            c1s.push_back((ew - e0) / (0.5 * fe.F * fe.F * w * w));
            c0s.push_back(e0);
        }
        double dev = 0;
        for (std::size_t i = 0; i < c1s.size(); ++i) {
            dev = std::max(dev, std::abs(c1s[i] - c1s[0]) / (1.0 + std::abs(c1s[0])));
            const double r = 0.4 + 2.0 * i / 23.0;
            const double r0 = 0.4;
            const double lhs = c0s[i] - c0s[0];
            const double rhs = c1s[0] * (leaf.V(r) - leaf.V(r0));
            dev = std::max(dev, std::abs(lhs - rhs) / (1.0 + std::abs(rhs)));
        }
        add(rep, "leaf-energy-affine", dev, 1e-9);
    }

    // leaf critical points are reduced equilibria and conversely
    {
        const Params params(0.4, 1.0, 1.0);
        const Profile profile = Profile::parabolic(1.0);
        auto routh = routh_cache_get(params, profile, 8.0);
        const LeafSystem leaf(params, profile, routh, {1.0, 0.0});
        double worst_fwd = 0;
        auto brs = bracket_roots([&](double r) { return leaf.V_p(r); }, 0.2, 6.0, 400);
        for (const auto& br : brs) {
            const double rstar = bisect([&](double r) { return leaf.V_p(r); }, br, 1e-13);
            const double x = 0.5 * rstar * rstar;
            const auto p34v = leaf.p34(x);
            const P4 q{x, 0.0, p34v[0], p34v[1]};
            const P4 f = field_restricted(params, profile, q);
            worst_fwd = std::max(worst_fwd, norm4(f) / (1.0 + norm4(q)));
        }
        add(rep, "critical-point-to-field-zero", worst_fwd, 1e-8);

        double worst_bwd = 0;
        for (int i = 0; i < 10; ++i) {
            const double r = rng.uniform(9000 + 2 * i, 0.7, 2.0);
            const double v = (i % 2 ? 1.0 : -1.0) * rng.uniform(9000 + 2 * i + 1, 0.3, 1.5);
            const EquilibriumRecord rec = re3_record(params, profile, routh, r, v);
            const LeafSystem own(params, profile, routh, rec.j);
            worst_bwd = std::max(worst_bwd, std::abs(own.V_p(r)));
        }
        add(rep, "field-zero-to-critical-point", worst_bwd, 1e-9);
    }
    return rep;
}

VerifyReport verify_engine(std::uint64_t seed) {
    VerifyReport rep;
    rep.suite = "engine";
    CounterRng rng(seed + 1);

    double worst_field = 0, worst_reaction = 0, worst_tangency = 0, worst_block = 0,
           worst_fd = 0, worst_proj = 0;
    std::uint64_t draw = 0;
    for (const Profile& profile : trio()) {
        for (double Om : {0.0, 1.0}) {
            const Params params(0.4, 1.0, Om);
            const QuasiVelocitySystem sys = ball_system(params, profile);
            const QuasiVelocitySystem sys_fd = ball_system_fd(params, profile);
            for (int i = 0; i < 1000; ++i) {
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
                const double df = std::sqrt(
                    (q_dot(0) - d[0]) * (q_dot(0) - d[0]) + (v_dot(0) - d[1]) * (v_dot(0) - d[1]) +
                    (v_dot(1) - d[2]) * (v_dot(1) - d[2]) + (v_dot(4) - d[3]) * (v_dot(4) - d[3]));
                worst_field = std::max(worst_field, df / ref);

                const Eigen::VectorXd R = reaction_force(sys, q, v);
                const auto Rex = ball_reaction_explicit(params, profile, r, v_r, v_th, om_z);
                const double dr = std::abs(R(0) - Rex[0]) + std::abs(R(1) - Rex[1]) +
                                  std::abs(R(4) - Rex[2]);
                worst_reaction = std::max(worst_reaction, dr / (1.0 + R.norm()));

                const Eigen::VectorXd sigma = engine_sigma(sys, q, v);
                const Eigen::VectorXd tang = sys.S(q) * v_dot + sigma;
                worst_tangency = std::max(worst_tangency, tang.norm() / (1.0 + v_dot.norm()));

                if (i < 100) {
                    Eigen::VectorXd q0(2);
                    q0 << r, 0.0;
                    Eigen::VectorXd v0(5);
                    const auto om_xy0 =
                        constraint_omega_xy(params, profile, r, 0.0, v_r, v_th, om_z);
                    v0 << v_r, v_th, om_xy0[0], om_xy0[1], om_z;
                    const Eigen::MatrixXd A = sys.A(q0);
                    const Eigen::MatrixXd S = sys.S(q0);
                    const Eigen::MatrixXd Minv =
                        (S * A.llt().solve(S.transpose())).inverse();
                    const double cF = profile.curly_F(0.5 * r * r);
                    Eigen::Matrix2d expect;
                    expect << params.mu, 0.0, 0.0, params.mu * cF * cF;
                    worst_block =
                        std::max(worst_block, (Minv - expect).cwiseAbs().maxCoeff());

                    const Eigen::VectorXd R_fd = reaction_force(sys_fd, q, v);
                    worst_fd = std::max(worst_fd, (R - R_fd).norm() / (1.0 + R.norm()));
                }

                // chart projection: pushforward of the polar field matches
                // the invariant-coordinate field (unit-direction centered
                // difference along the flow)
                {
                    const double nd =
                        std::sqrt(d[0] * d[0] + d[1] * d[1] + d[2] * d[2] + d[3] * d[3]);
                    if (nd > 1e-12) {
                        const double h = 1e-5;
                        const auto lift = [&](double s) {
                            return to_p5(ReducedStatePolar::from_omega_z(
                                             y[0] + s * d[0] / nd, y[1] + s * d[1] / nd,
                                             y[2] + s * d[2] / nd, y[3] + s * d[3] / nd,
                                             profile, params),
                                         profile, params);
                        };
                        const ReducedStateP5 pp = lift(h), pm = lift(-h);
                        const ReducedStateP5 p0 = lift(0.0);
                        const auto pf = vector_field_p5(params, profile, p0.as_array());
                        const auto ap = pp.as_array(), am = pm.as_array();
                        double dp = 0, refp = 0;
                        for (int t = 0; t < 5; ++t) {
                            const double fd_t = nd * (ap[t] - am[t]) / (2.0 * h);
                            dp = std::max(dp, std::abs(fd_t - pf[t]));
                            refp = std::max(refp, std::abs(pf[t]));
                        }
                        worst_proj = std::max(worst_proj, dp / (1.0 + refp));
                    }
                }
            }
        }
    }
    add(rep, "field-equivalence", worst_field, 1e-8);
    add(rep, "reaction-closed-form", worst_reaction, 1e-9);
    add(rep, "constraint-tangency", worst_tangency, 1e-10);
    add(rep, "multiplier-block-structure", worst_block, 1e-12);
    add(rep, "finite-difference-coefficients", worst_fd, 1e-6);
    add(rep, "chart-projection", worst_proj, 1e-9);

    // holonomic sanity: a point mass on the same surface conserves energy
    {
        const Params params(0.4, 1.0, 0.0);
        const Profile profile = Profile::parabolic(1.0);
        const QuasiVelocitySystem pt = surface_point_system(params, profile);
        const auto rhs = [&](double, const std::vector<double>& yv, std::vector<double>& dy) {
            Eigen::VectorXd q(2), v(2), q_dot, v_dot;
            q << yv[0], yv[1];
            v << yv[2], yv[3];
            constrained_field(pt, q, v, q_dot, v_dot);
            dy = {q_dot(0), q_dot(1), v_dot(0), v_dot(1)};
        };
        const auto energy = [&](const std::vector<double>& yv) {
            const auto fe = profile.eval_profile(yv[0]);
            return 0.5 * (fe.F * fe.F * yv[2] * yv[2] + yv[0] * yv[0] * yv[3] * yv[3]) +
                   params.g_hat * fe.f;
        };
        OdeOptions opt;
        opt.rtol = 1e-10;
        opt.atol = 1e-12;
        const OdeSolution sol = integrate_ode(rhs, {1.2, 0.0, 0.3, 0.8}, 0.0, 10.0, opt);
        const double e0 = energy(sol.states().front());
        double drift = 0;
        for (const auto& yv : sol.states())
            drift = std::max(drift, std::abs(energy(yv) - e0) / (1.0 + std::abs(e0)));
        add(rep, "holonomic-energy-drift", drift, 1e-8);
    }

    // attitude propagation: orthogonality and rotation-rate residual
    {
        const Params params(0.4, 1.0, 1.0);
        const Profile profile = Profile::parabolic(1.0);
        FullState fs0;
        fs0.r = 1.1;
        fs0.theta = 0.4;
        const double qn = std::sqrt(0.81 + 0.04 + 0.09 + 0.01);
        fs0.quat = {0.9 / qn, 0.2 / qn, 0.3 / qn, 0.1 / qn};
        fs0.v_r = 0.3;
        fs0.v_theta = 0.8;
        fs0.omega_z = 0.5;
        const OdeSolution sol = integrate_full(params, profile, fs0, 0.0, 5.0);

        double worst_orth = 0;
        for (int i = 0; i <= 50; ++i) {
            const double t = 5.0 * i / 50.0;
            const FullState fs = full_state_from_raw(sol.eval(t).data());
            const Eigen::Matrix3d R = quat_to_matrix(fs.quat);
            worst_orth = std::max(
                worst_orth,
                (R.transpose() * R - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff());
        }
        add(rep, "attitude-orthogonality", worst_orth, 1e-9);

        // the reduced block of the full flow shadows the reduced integration
        const ReducedStatePolar s0 = ReducedStatePolar::from_omega_z(
            fs0.r, fs0.v_r, fs0.v_theta, fs0.omega_z, profile, params);
        const Trajectory red = integrate_reduced(params, profile, s0, 0.0, 5.0);
        double worst_shadow = 0;
        for (int i = 0; i <= 100; ++i) {
            const double t = 5.0 * i / 100.0;
            const FullState ff = full_state_from_raw(sol.eval(t).data());
            const ReducedStatePolar rs = red.polar_at(t);
            const double omz = rs.omega_z(profile, params);
            worst_shadow = std::max({worst_shadow, std::abs(ff.r - rs.r),
                                     std::abs(ff.v_r - rs.v_r),
                                     std::abs(ff.v_theta - rs.v_theta),
                                     std::abs(ff.omega_z - omz)});
        }
        add(rep, "full-vs-reduced", worst_shadow, 1e-7);

        // staged reconstruction over the reduced flow reproduces the jointly
        // integrated angle and attitude
        const FullTrajectory ft = reconstruct(params, profile, red, fs0.theta, fs0.quat);
        double worst_rec = 0;
        for (int i = 0; i <= 50; ++i) {
            const double t = 5.0 * i / 50.0;
            const FullState ff = full_state_from_raw(sol.eval(t).data());
            const FullState fr = ft.at(t);
            const Eigen::Matrix3d dR =
                quat_to_matrix(ff.quat) - quat_to_matrix(fr.quat);
            worst_rec = std::max({worst_rec, dR.cwiseAbs().maxCoeff(),
                                  std::abs(ff.theta - fr.theta)});
        }
        add(rep, "attitude-reconstruction", worst_rec, 1e-6);
    }
    return rep;
}

VerifyReport verify_parabolic(std::uint64_t seed) {
    VerifyReport rep;
    rep.suite = "parabolic";
    CounterRng rng(seed + 2);

    std::vector<double> r_grid;
    for (int i = 0; i <= 50; ++i)
        r_grid.push_back(1e-3 + (3.0 - 1e-3) * i / 50.0);

    double worst_oracle = 0;
    for (double b : {1.0, 2.0}) {
        for (double mu : {2.0 / 7.0, 0.35}) {
            const double k = mu / (1.0 - mu);
            const Params params(k, 1.0, 0.0);
            const Profile profile = Profile::parabolic(b);
            auto routh = routh_cache_get(params, profile, 6.0);
            const ParabolicClosedForm cf(b, mu);
            worst_oracle = std::max(worst_oracle, oracle_compare(params, *routh, cf, r_grid));
        }
    }
    add(rep, "closed-form-oracle", worst_oracle, 1e-6);

    double worst_hyp = 0, worst_init = 0, worst_res = 0;
    for (const auto& bm : {std::array<double, 2>{1.0, 2.0 / 7.0}, {2.0, 0.35}}) {
        const ParabolicClosedForm cf(bm[0], bm[1]);
        for (int i = 1; i <= 100; ++i) {
            const double r = 3.0 * i / 100.0;
            const double c = cf.c(r), s = cf.s(r);
            worst_hyp = std::max(worst_hyp, std::abs(c * c - s * s - 1.0));
        }
        std::array<double, 4> U;
        std::array<double, 2> u;
        cf.eval(0.0, U, u);
        worst_init = std::max({worst_init, std::abs(U[0] - 1.0), std::abs(U[1]),
                               std::abs(U[2]), std::abs(U[3] - 1.0), std::abs(u[0]),
                               std::abs(u[1])});

        // closed form satisfies the auxiliary linear system in x = r^2/2
        const double k = bm[1] / (1.0 - bm[1]);
        const Params params(k, 1.0, 0.0);
        const Profile profile = Profile::parabolic(bm[0]);
        for (double r : {0.5, 1.0, 2.0}) {
            const double h = 1e-6 * (1.0 + r);
            std::array<double, 4> Up, Um, U0;
            std::array<double, 2> up, um, u0;
            cf.eval(r + h, Up, up);
            cf.eval(r - h, Um, um);
            cf.eval(r, U0, u0);
            const RouthCoeffs co = routh_coeffs(params, profile, 0.5 * r * r);
            // dX/dx = (1/r) dX/dr
            const std::array<double, 4> GU = {co.G3 * U0[2], co.G3 * U0[3], co.G4 * U0[0],
                                              co.G4 * U0[1]};
            for (int t = 0; t < 4; ++t) {
                const double fd = (Up[t] - Um[t]) / (2.0 * h * r);
                worst_res = std::max(worst_res, std::abs(fd - GU[t]));
            }
            const std::array<double, 2> Gu = {co.G3 * u0[1] + co.g3, co.G4 * u0[0] + co.g4};
            for (int t = 0; t < 2; ++t) {
                const double fd = (up[t] - um[t]) / (2.0 * h * r);
                worst_res = std::max(worst_res, std::abs(fd - Gu[t]));
            }
        }
    }
    add(rep, "hyperbolic-identity", worst_hyp, 1e-12);
    add(rep, "closed-form-initial-condition", worst_init, 1e-15);
    add(rep, "closed-form-ode-residual", worst_res, 1e-6);

    // rotation threshold: coefficient route against the explicit formula
    {
        double worst = 0;
        std::uint64_t draw = 0;
        for (double b : {0.5, 1.0, 2.0}) {
            const Params params(0.4, 1.0, 0.0);
            const Profile profile = Profile::parabolic(b);
            for (int i = 0; i < 50; ++i) {
                const double r = rng.uniform(2 * draw, 0.3, 3.0);
                const double v =
                    (i % 2 ? 1.0 : -1.0) * rng.uniform(2 * draw + 1, 0.05, 2.0);
                ++draw;
                const double via_delta = omega_tilde(params, profile, r, v);
                const double closed = parabolic_omega_tilde(params, b, r, v);
                worst = std::max(worst,
                                 std::abs(via_delta - closed) / (1.0 + std::abs(via_delta)));
            }
        }
        add(rep, "rotation-threshold-closed-form", worst, 1e-10);
    }

    // leaf-potential blowup laws at the vertex and at infinity
    {
        const Params params(0.4, 1.4, 1.0);
        const Profile profile = Profile::parabolic(1.0);
        auto routh = routh_cache_get(params, profile, 30000.0);
        const LeafSystem leaf(params, profile, routh, {1.0, 0.0});
        const AsymptoticsReport ar = parabolic_asymptotics_check(leaf);
        double dev_small = 0;
        for (double ratio : ar.small_r_ratio)
            dev_small = std::max(dev_small, std::abs(ratio - 1.0));
        if (!ar.small_r_ok)
            dev_small = std::max(dev_small, 1.0);
        add(rep, "vertex-blowup-law", dev_small, 0.05);
        double dev_quartic = std::abs(ar.quartic_ratio_near / ar.quartic_ratio_far - 1.0);
        if (!ar.quartic_checked || !ar.quartic_ok)
            dev_quartic = std::max(dev_quartic, 1.0);
        add(rep, "quartic-growth-law", dev_quartic, 0.10);

        const Params still(0.4, 1.4, 0.0);
        auto routh0 = routh_cache_get(still, profile, 500000.0);
        const LeafSystem leaf0(still, profile, routh0, {1.0, 0.0});
        const double rmin = golden_min([&](double r) { return leaf0.V(r); }, 0.05, 3.0, 1e-10);
        const double vmin = leaf0.V(rmin);
        const double margin =
            std::min(leaf0.V(1e-3), leaf0.V(1e3)) - vmin;
        add(rep, "static-coercive", margin, 10.0, '>');

        bool threw = false;
        try {
            const LeafSystem bad(still, profile, routh0, {0.0, 1.0});
            (void)parabolic_asymptotics_check(bad);
        } catch (const std::invalid_argument&) {
            threw = true;
        }
        add(rep, "vertex-leaf-refusal", threw ? 0.0 : 1.0, 0.5);
    }

    // static minima: reflection symmetry in the leaf label and shrink with j1
    {
        const Params params(0.4, 1.4, 0.0);
        const Profile profile = Profile::parabolic(1.0);
        auto routh = routh_cache_get(params, profile, 50.0);
        const std::array<double, 4> j1s = {1.0, 0.5, 0.25, 0.125};
        std::array<double, 4> rstar{};
        double worst_sym = 0;
        for (std::size_t i = 0; i < j1s.size(); ++i) {
            const LeafSystem lp(params, profile, routh, {j1s[i], 0.3});
            const LeafSystem lm(params, profile, routh, {-j1s[i], -0.3});
            rstar[i] = golden_min([&](double r) { return lp.V(r); }, 1e-3, 5.0, 1e-11);
            const double rm = golden_min([&](double r) { return lm.V(r); }, 1e-3, 5.0, 1e-11);
            worst_sym = std::max(worst_sym, std::abs(rstar[i] - rm));
        }
        add(rep, "minimum-label-symmetry", worst_sym, 1e-8);
        int violations = 0;
        for (std::size_t i = 1; i < j1s.size(); ++i)
            if (!(rstar[i] < rstar[i - 1]))
                ++violations;
        if (!(rstar[3] < rstar[0]))
            ++violations;
        add(rep, "minimum-shrinks-with-j1", violations, 0.5);
    }
    return rep;
}

VerifyReport verify_equilibria(std::uint64_t seed) {
    VerifyReport rep;
    rep.suite = "equilibria";
    CounterRng rng(seed + 3);

    const Profile parab = Profile::parabolic(1.0);
    const Profile bowl = Profile::poly_p1({0.0, 1.0, 0.1});
    const Profile ridge = Profile::poly_p1({0.3, -0.6, 0.3});   // critical circle at r = sqrt(2)
    const Profile crater = Profile::poly_p1({-0.15, 0.3, -0.15}); // same circle, concave

    // relative equilibria really sit at zeros of the reduced field
    {
        double worst = 0;
        for (double Om : {0.0, 1.0}) {
            const Params params(0.4, 1.0, Om);
            auto routh = routh_cache_get(params, parab, 8.0);
            for (int i = 0; i < 10; ++i) {
                const double r = rng.uniform(2 * i, 0.7, 2.2);
                const double v = (i % 2 ? 1.0 : -1.0) * rng.uniform(2 * i + 1, 0.3, 1.5);
                const EquilibriumRecord rec = re3_record(params, parab, routh, r, v);
                worst = std::max(worst, rec.field_residual);
            }
        }
        const Params params(0.4, 1.0, 1.0);
        auto routh = routh_cache_get(params, ridge, 8.0);
        for (const auto& rec : re1_re2_records(params, ridge, routh, std::sqrt(2.0),
                                               {-1.0, 0.5, 2.0}))
            worst = std::max(worst, rec.field_residual);
        add(rep, "equilibrium-field-zero", worst, 1e-9);
    }

    // the rotation threshold really zeroes the stability function
    {
        double worst = 0;
        std::uint64_t draw = 100;
        for (const Profile* pr : {&parab, &bowl}) {
            const Params params(0.4, 1.0, 0.0);
            for (int i = 0; i < 50; ++i) {
                const double r = rng.uniform(2 * draw, 0.4, 2.5);
                const double v = (i % 2 ? 1.0 : -1.0) * rng.uniform(2 * draw + 1, 0.1, 2.0);
                ++draw;
                double Ot;
                try {
                    Ot = omega_tilde(params, *pr, r, v);
                } catch (const std::domain_error&) {
                    continue;
                }
                const DeltaBlock db = delta_block(params, *pr, r);
                const double s3 = stability_S3(params.with_omega(Ot), *pr, r, v);
                const double scale = 1.0 + std::abs(db.D04) * std::pow(v, 4);
                worst = std::max(worst, std::abs(s3) / scale);
            }
        }
        add(rep, "threshold-zeroes-stability", worst, 1e-12);
    }

    // infimum threshold decreases with radius on the paraboloid
    {
        const Params params(0.4, 1.0, 0.0);
        double worst_gap = -1e300;
        double prev = 0;
        for (int i = 0; i < 30; ++i) {
            const double r = 0.2 + (5.0 - 0.2) * i / 29.0;
            const double om = omega_tilde_m(params, parab, r);
            if (i > 0)
                worst_gap = std::max(worst_gap, om - prev);
            prev = om;
        }
        add(rep, "min-threshold-decreasing", worst_gap, 0.0);
    }

    // branch signatures: static case all-stable, fast rotation S-U-S
    const Params paper(0.4, 1.4, 0.0); // gamma = 1, mu = 2/7
    {
        int violations = 0;
        const BranchSignature sig = branch_signature(paper, parab, 1.0);
        if (sig.neg != "S" || sig.pos != "S" || !sig.zeros_neg.empty() || !sig.zeros_pos.empty())
            ++violations;
        add(rep, "signature-static", violations, 0.5);

        const double om_m = omega_tilde_m(paper, parab, 1.0);
        const Params fast = paper.with_omega(1.2 * om_m);
        const BranchSignature sig2 = branch_signature(fast, parab, 1.0);
        int v2 = 0;
        if (sig2.pos != "SUS" || sig2.zeros_pos.size() != 2)
            ++v2;
        if (sig2.neg != "S" || !sig2.zeros_neg.empty())
            ++v2;
        add(rep, "signature-fast-rotation", v2, 0.5);

        // letters agree with the curvature of the leaf potential
        int v3 = 0;
        if (sig2.zeros_pos.size() == 2) {
            auto routh = routh_cache_get(fast, parab, 40.0);
            const double z1 = sig2.zeros_pos[0], z2 = sig2.zeros_pos[1];
            const std::array<double, 4> vs = {0.5 * z1, 0.5 * (z1 + z2), 1.5 * z2 + 0.5, -0.8};
            const std::array<char, 4> expect = {'S', 'U', 'S', 'S'};
            for (int t = 0; t < 4; ++t) {
                const EquilibriumRecord rec = re3_record(fast, parab, routh, 1.0, vs[t]);
                const LeafSystem own(fast, parab, routh, rec.j);
                const double vpp = own.V_pp(1.0);
                const char letter = vpp > 0 ? 'S' : 'U';
                if (letter != expect[t])
                    ++v3;
                const Classification cls = expect[t] == 'S' ? Classification::Stable
                                                            : Classification::Unstable;
                if (rec.classification != cls)
                    ++v3;
            }
        } else {
            v3 = 4;
        }
        add(rep, "signature-matches-potential", v3, 0.5);
    }

    // endpoint letters: near the axis the sign of f' f'', far out the sign
    // of the quartic coefficient
    {
        int violations = 0, used = 0;
        std::uint64_t draw = 400;
        const std::array<const Profile*, 3> profiles = {&parab, &bowl, &ridge};
        while (used < 20 && draw < 1000) {
            const Profile& pr = *profiles[draw % 3];
            const double r = rng.uniform(3 * draw, 0.6, 2.4);
            const double Om = rng.uniform(3 * draw + 1, 0.0, 2.0);
            ++draw;
            const auto fe = pr.eval_profile(r);
            const DeltaBlock db = delta_block(Params(0.4, 1.0, Om), pr, r);
            if (std::abs(fe.f_p * fe.f_pp) < 1e-2 || std::abs(db.D04) < 1e-6)
                continue;
            ++used;
            const Params params(0.4, 1.0, Om);
            try {
                const BranchSignature sig = branch_signature(params, pr, r);
                const char inner = fe.f_p * fe.f_pp > 0 ? 'S' : 'U';
                const char outer = db.D04 > 0 ? 'S' : 'U';
                if (sig.pos.front() != inner || sig.neg.back() != inner)
                    ++violations;
                if (sig.pos.back() != outer || sig.neg.front() != outer)
                    ++violations;
            } catch (const std::exception&) {
                ++violations;
            }
        }
        if (used < 20)
            violations += 20 - used;
        add(rep, "endpoint-letters", violations, 0.5);
    }

    // fast-rotation sign law at fixed circular speed
    {
        int violations = 0;
        const Params base(0.4, 1.0, 0.0);
        for (double v : {0.7, -0.7}) {
            {
                const DeltaBlock db = delta_block(base, parab, 1.0);
                const double d0 = db.D00 + db.D02 * v * v + db.D04 * std::pow(v, 4);
                const double Om = 10.0 * std::abs(d0 / (v * db.D11));
                const double s3 = stability_S3(base.with_omega(Om), parab, 1.0, v);
                const double want = (Om * v > 0 ? 1.0 : -1.0) * (db.D11 > 0 ? 1.0 : -1.0);
                if (s3 * want < 0)
                    ++violations;
            }
            {
                const DeltaBlock db = delta_block(base, ridge, 1.5);
                if (db.D11 <= 0)
                    ++violations;
                const double d0 = db.D00 + db.D02 * v * v + db.D04 * std::pow(v, 4);
                const double Om = 10.0 * std::abs(d0 / (v * db.D11));
                const double s3 = stability_S3(base.with_omega(Om), ridge, 1.5, v);
                const double want = (Om * v > 0 ? 1.0 : -1.0) * (db.D11 > 0 ? 1.0 : -1.0);
                if (s3 * want < 0)
                    ++violations;
            }
        }
        add(rep, "fast-rotation-sign-law", violations, 0.5);
    }

    // reversing the rotation together with the circular speed is a symmetry
    {
        double worst = 0;
        std::uint64_t draw = 2000;
        for (int i = 0; i < 30; ++i) {
            const Profile& pr = *std::array<const Profile*, 3>{&parab, &bowl,
                                                               &ridge}[i % 3];
            const double r = rng.uniform(4 * draw, 0.5, 2.0);
            const double v = rng.uniform(4 * draw + 1, -2.0, 2.0);
            const double om = rng.uniform(4 * draw + 2, -2.0, 2.0);
            const double Om = rng.uniform(4 * draw + 3, -2.0, 2.0);
            ++draw;
            const Params pos(0.4, 1.0, Om), neg(0.4, 1.0, -Om);
            const double s3a = stability_S3(pos, pr, r, v);
            const double s3b = stability_S3(neg, pr, r, -v);
            const double s2a = stability_S2(pos, pr, r, om);
            const double s2b = stability_S2(neg, pr, r, -om);
            worst = std::max(worst, std::abs(s3a - s3b) / (1.0 + std::abs(s3a)));
            worst = std::max(worst, std::abs(s2a - s2b) / (1.0 + std::abs(s2a)));
            if (std::abs(pr.eval_profile(r).f_p) > 1e-6 && std::abs(v) > 1e-3) {
                const double wa = re3_omega_n(pos, pr, r, v);
                const double wb = re3_omega_n(neg, pr, r, -v);
                worst = std::max(worst, std::abs(wa + wb) / (1.0 + std::abs(wa)));
            }
        }
        add(rep, "rotation-reflection", worst, 1e-12);
    }

    // spin thresholds on critical circles, both curvature signs, plus the
    // flat case which is stable for every spin
    {
        const double rc = std::sqrt(2.0);
        const Params params(0.4, 1.4, 1.0); // gamma = 1, mu = 2/7
        const double mu = params.mu, gamma = params.gamma, Om = params.Omega;

        const Profile hump = Profile::poly_p1({0.25, -0.5, 0.25}); // f'' = +0.5 at rc
        const double fpp_h = hump.eval_profile(rc).f_pp;
        const double w_h = -(1.0 + fpp_h) / fpp_h * Om - gamma / (mu * mu * Om);
        const double fpp_c = crater.eval_profile(rc).f_pp; // -0.6
        const double w_c = (1.0 - std::abs(fpp_c)) / std::abs(fpp_c) * Om -
                           gamma / (mu * mu * Om);

        double worst_zero = std::max(std::abs(stability_S2(params, hump, rc, w_h)),
                                     std::abs(stability_S2(params, crater, rc, w_c)));
        add(rep, "spin-threshold-zero", worst_zero, 1e-9);

        int violations = 0;
        if (!(stability_S2(params, hump, rc, w_h + 0.1) > 0))
            ++violations;
        if (!(stability_S2(params, hump, rc, w_h - 0.1) < 0))
            ++violations;
        if (!(stability_S2(params, crater, rc, w_c - 0.1) > 0))
            ++violations;
        if (!(stability_S2(params, crater, rc, w_c + 0.1) < 0))
            ++violations;
        const Profile flat = Profile::plane();
        for (double w : {-20.0, 0.0, 20.0})
            if (!(stability_S2(params, flat, 1.0, w) > 0))
                ++violations;
        add(rep, "spin-threshold-sides", violations, 0.5);
    }

    // leaf census on a label grid: static surface has a single stable
    // equilibrium per leaf; rotating surface one to three with exactly one
    // unstable when three
    {
        auto routh = routh_cache_get(paper, parab, 150.0);
        std::vector<double> grid;
        for (int i = 0; i < 20; ++i)
            grid.push_back(-5.0 + 10.0 * i / 19.0);

        std::atomic<int> bad_static{0};
        parallel_for(grid.size(), [&](std::size_t a) {
            for (double j2 : grid) {
                const LeafSystem leaf(paper, parab, routh, {grid[a], j2});
                const auto recs = equilibria_on_leaf(leaf, 0.05, 16.0, 1000);
                if (recs.size() != 1 || recs[0].classification != Classification::Stable)
                    ++bad_static;
            }
        });
        add(rep, "leaf-census-static", bad_static.load(), 0.5);

        const Params spin = paper.with_omega(1.0);
        auto routh2 = routh_cache_get(spin, parab, 150.0);
        std::atomic<int> bad_spin{0};
        parallel_for(grid.size(), [&](std::size_t a) {
            for (double j2 : grid) {
                const LeafSystem leaf(spin, parab, routh2, {grid[a], j2});
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
                if (n == 3 ? unstable != 1 : unstable != 0)
                    ++bad_spin;
            }
        });
        add(rep, "leaf-census-rotating", bad_spin.load(), 0.5);

        // the three-equilibrium regime sits at larger labels: one pinned leaf
        // must show the stable / unstable / stable radial ordering
        int bad_three = 0;
        {
            const LeafSystem leaf(spin, parab, routh2, {-10.0, -19.0});
            const auto recs = equilibria_on_leaf(leaf, 0.05, 60.0, 3000);
            if (recs.size() != 3 || recs[0].classification != Classification::Stable ||
                recs[1].classification != Classification::Unstable ||
                recs[2].classification != Classification::Stable)
                ++bad_three;
        }
        add(rep, "three-equilibrium-leaf", bad_three, 0.5);
    }
    return rep;
}

VerifyReport verify_conservation(std::uint64_t seed) {
    VerifyReport rep;
    rep.suite = "conservation";
    CounterRng rng(seed + 4);

    const Profile parab = Profile::parabolic(1.0);
    const Params paper0(0.4, 1.4, 0.0);
    const Params paper1(0.4, 1.4, 1.0);

    ReducedStatePolar s0;
    s0.r = 1.0;
    s0.v_r = 0.4;
    s0.v_theta = 0.9;
    s0.omega_n = 0.3;

    const auto drift_of = [&](const Params& params, const ReducedStatePolar& st, double t1,
                              double rtol) {
        IntegrateOptions opt;
        opt.rtol = rtol;
        opt.atol = rtol * 1e-2;
        const Trajectory traj = integrate_reduced(params, parab, st, 0.0, t1, opt);
        auto routh = routh_cache_get(params, parab, 8.0);
        const ConservationReport cr = conservation_report(params, parab, *routh, traj);
        return std::max({cr.max_rel_E, cr.max_rel_J1, cr.max_rel_J2, cr.max_rel_K});
    };

    add(rep, "drift-static", drift_of(paper0, s0, 60.0, 1e-10), 1e-6);
    add(rep, "drift-rotating", drift_of(paper1, s0, 60.0, 1e-10), 1e-6);

    {
        const double loose = drift_of(paper1, s0, 30.0, 1e-4);
        const double mid = drift_of(paper1, s0, 30.0, 1e-7);
        const double tight = drift_of(paper1, s0, 30.0, 1e-10);
        int violations = 0;
        if (!(loose > mid))
            ++violations;
        if (!(mid > tight))
            ++violations;
        add(rep, "drift-tolerance-ordering", violations, 0.5);
    }

    {
        const Params free(0.4, 1.0, 0.0);
        const Profile flat = Profile::plane();
        ReducedStatePolar sp;
        sp.r = 1.0;
        sp.v_r = 1.0;
        sp.v_theta = 0.5;
        sp.omega_n = 0.7;
        const Trajectory traj = integrate_reduced(free, flat, sp, 0.0, 5.0);
        auto routh = routh_cache_get(free, flat, 8.0);
        const ConservationReport cr = conservation_report(free, flat, *routh, traj);
        add(rep, "plane-free-motion-drift",
            std::max({cr.max_rel_E, cr.max_rel_J1, cr.max_rel_J2}), 1e-9);
    }

    // independence of (E, J1, J2) off equilibria, rank drop on them
    auto routh1 = routh_cache_get(paper1, parab, 8.0);
    const auto svals = [&](const Params& params, const P4& q) {
        Eigen::Matrix<double, 3, 4> Jm;
        const P4 dE = energy_restricted_grad(params, parab, q);
        const auto dJs = grad_J_chart(params, parab, *routh1, q);
        for (int col = 0; col < 4; ++col) {
            Jm(0, col) = dE[col];
            Jm(1, col) = dJs[0][col];
            Jm(2, col) = dJs[1][col];
        }
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(Jm);
        Eigen::JacobiSVD<Eigen::MatrixXd> svdJ(Jm.bottomRows(2));
        return std::array<double, 2>{svd.singularValues()(2) / svd.singularValues()(0),
                                     svdJ.singularValues()(1) / svdJ.singularValues()(0)};
    };

    double min_generic = 1e300, min_submersion = 1e300;
    for (int i = 0; i < 100; ++i) {
        const auto sv = svals(paper1, sample_q(rng, 50 + i));
        min_generic = std::min(min_generic, sv[0]);
        min_submersion = std::min(min_submersion, sv[1]);
    }
    double max_eq = 0;
    for (int i = 0; i < 20; ++i) {
        const double r = rng.uniform(700 + 2 * i, 0.7, 2.0);
        const double v = (i % 2 ? 1.0 : -1.0) * rng.uniform(700 + 2 * i + 1, 0.3, 1.2);
        const EquilibriumRecord rec = re3_record(paper1, parab, routh1, r, v);
        const P4 q{0.5 * r * r, 0.0, r * r * rec.v_theta, rec.omega_n};
        const auto sv = svals(paper1, q);
        max_eq = std::max(max_eq, sv[0]);
        min_submersion = std::min(min_submersion, sv[1]);
    }
    add(rep, "integral-rank-generic", min_generic, 1e-6, '>');
    add(rep, "integral-rank-equilibrium", max_eq, 1e-7);
    add(rep, "rank-gap", min_generic / max_eq, 100.0, '>');
    add(rep, "label-submersion", min_submersion, 1e-6, '>');

    // reversing the rotation: integrals and field transform by reflection
    {
        double worst_int = 0, worst_field = 0;
        std::uint64_t draw = 900;
        for (double Om : {0.0, 0.7, 2.0}) {
            const Params pos(0.4, 1.4, Om), neg(0.4, 1.4, -Om);
            auto routh_p = routh_cache_get(pos, parab, 8.0);
            for (int i = 0; i < 34; ++i) {
                const ReducedStateP5 p = lift_q(sample_q(rng, draw++));
                const ReducedStateP5 cp = reflect(p);
                const double ea = moving_energy(pos, parab, p);
                const double eb = moving_energy(neg, parab, cp);
                worst_int = std::max(worst_int, std::abs(ea - eb) / (1.0 + std::abs(ea)));
                const LeafLabel ja = routh_J(pos, parab, *routh_p, p);
                const LeafLabel jb = routh_J(neg, parab, *routh_p, cp);
                worst_int = std::max({worst_int,
                                      std::abs(ja.j1 + jb.j1) / (1.0 + std::abs(ja.j1)),
                                      std::abs(ja.j2 + jb.j2) / (1.0 + std::abs(ja.j2))});

                const auto xa = vector_field_p5(pos, parab, p.as_array());
                const auto xb = vector_field_p5(neg, parab, cp.as_array());
                const std::array<double, 5> want = {xa[0], xa[1], xa[2], -xa[3], -xa[4]};
                for (int t = 0; t < 5; ++t)
                    worst_field = std::max(worst_field, std::abs(want[t] - xb[t]) /
                                                            (1.0 + std::abs(xa[t])));
            }
        }
        add(rep, "reflection-integrals", worst_int, 1e-12);
        add(rep, "reflection-field-conjugacy", worst_field, 1e-12);
    }

    // the field is tangent to the membership variety
    {
        double worst = 0;
        for (int i = 0; i < 100; ++i) {
            const ReducedStateP5 p = lift_q(sample_q(rng, 1500 + i));
            const auto x = vector_field_p5(paper1, parab, p.as_array());
            const std::array<double, 5> gK = {-2.0 * p.p1, -2.0 * p.p0, p.p2, p.p3, 0.0};
            double dot = 0, ng = 0, nx = 0;
            for (int t = 0; t < 5; ++t) {
                dot += gK[t] * x[t];
                ng += gK[t] * gK[t];
                nx += x[t] * x[t];
            }
            worst = std::max(worst, std::abs(dot) / (1.0 + std::sqrt(ng * nx)));
        }
        add(rep, "membership-tangency", worst, 1e-12);
    }

    // ambient-chart integration keeps the membership defect within the
    // advertised multiple of the tolerance
    {
        const ReducedStateP5 p0 = to_p5(s0, parab, paper1);
        const double rtol = 1e-10;
        const auto rhs = [&](double, const std::vector<double>& y, std::vector<double>& dy) {
            const std::array<double, 5> arr = {y[0], y[1], y[2], y[3], y[4]};
            const auto f = vector_field_p5(paper1, parab, arr);
            dy.assign(f.begin(), f.end());
        };
        OdeOptions opt;
        opt.rtol = rtol;
        opt.atol = 1e-12;
        const auto a0 = p0.as_array();
        const OdeSolution sol =
            integrate_ode(rhs, {a0[0], a0[1], a0[2], a0[3], a0[4]}, 0.0, 10.0, opt);
        double worst_defect = 0;
        for (const auto& y : sol.states()) {
            const double K = 0.5 * (y[2] * y[2] + y[3] * y[3]) - 2.0 * y[0] * y[1];
            worst_defect = std::max(worst_defect, std::abs(K));
        }
        const double budget = rtol * static_cast<double>(sol.steps_accepted);
        add(rep, "membership-drift-budget", worst_defect / budget, 10.0);
    }

    // label then leaf parametrization is the identity on (p3, p4)
    {
        double worst = 0;
        for (int i = 0; i < 100; ++i) {
            const ReducedStateP5 p = lift_q(sample_q(rng, 1700 + i));
            const LeafLabel j = routh_J(paper1, parab, *routh1, p);
            const auto back = tilde_p34(*routh1, paper1.Omega, p.p1, j);
            worst = std::max(worst, (std::abs(back[0] - p.p3) + std::abs(back[1] - p.p4)) /
                                        (1.0 + std::abs(p.p3) + std::abs(p.p4)));
        }
        add(rep, "label-roundtrip", worst, 1e-10);
    }

    // coercive static potential confines the motion
    {
        ReducedStatePolar sb;
        sb.r = 1.0;
        sb.v_r = 0.8;
        sb.v_theta = 1.2;
        sb.omega_n = 0.5;
        const Trajectory traj = integrate_reduced(paper0, parab, sb, 0.0, 50.0);
        double max_norm = 0;
        for (std::size_t i = 0; i < traj.size(); ++i) {
            const ReducedStatePolar st = traj.polar_at_index(i);
            max_norm = std::max({max_norm, std::abs(st.r), std::abs(st.v_r),
                                 std::abs(st.v_theta), std::abs(st.omega_n)});
        }
        add(rep, "static-confinement", max_norm, 10.0);
    }
    return rep;
}

std::vector<VerifyReport> run_verify(const std::string& suite, std::uint64_t seed,
                                     FaultInjection fault) {
    std::vector<VerifyReport> out;
    if (suite == "poisson" || suite == "all")
        out.push_back(verify_poisson(seed, fault));
    if (suite == "engine" || suite == "all")
        out.push_back(verify_engine(seed));
    if (suite == "parabolic" || suite == "all")
        out.push_back(verify_parabolic(seed));
    if (suite == "equilibria" || suite == "all")
        out.push_back(verify_equilibria(seed));
    if (suite == "conservation" || suite == "all")
        out.push_back(verify_conservation(seed));
    if (out.empty())
        throw std::invalid_argument("run_verify: unknown suite '" + suite +
                                    "' (expected all, poisson, engine, parabolic, equilibria "
                                    "or conservation)");
    return out;
}

namespace {
void append_g17(std::string& s, double x) {
    char buf[40];
    if (!std::isfinite(x)) {
        std::snprintf(buf, sizeof buf, "%.17g", x > 0 ? 1e308 : -1e308);
    } else {
        std::snprintf(buf, sizeof buf, "%.17g", x);
    }
    s += buf;
}
} // namespace

void write_verify_json(std::ostream& os, const std::vector<VerifyReport>& reports) {
    bool all = true;
    for (const auto& rep : reports)
        all = all && rep.all_pass();
    std::string s;
    s += "{\n  \"pass\": ";
    s += all ? "true" : "false";
    s += ",\n  \"suites\": [\n";
    for (std::size_t i = 0; i < reports.size(); ++i) {
        const auto& rep = reports[i];
        s += "    {\"suite\": \"" + rep.suite + "\", \"pass\": ";
        s += rep.all_pass() ? "true" : "false";
        s += ", \"checks\": [\n";
        for (std::size_t c = 0; c < rep.checks.size(); ++c) {
            const auto& ck = rep.checks[c];
            s += "      {\"name\": \"" + ck.name + "\", \"measured\": ";
            append_g17(s, ck.measured);
            s += ", \"threshold\": ";
            append_g17(s, ck.threshold);
            s += ", \"relation\": \"";
            s += ck.relation;
            s += "\", \"pass\": ";
            s += ck.pass ? "true" : "false";
            s += "}";
            if (c + 1 < rep.checks.size())
                s += ",";
            s += "\n";
        }
        s += "    ]}";
        if (i + 1 < reports.size())
            s += ",";
        s += "\n";
    }
    s += "  ]\n}\n";
    os << s;
}

} // namespace rollball
