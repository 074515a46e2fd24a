#include "rollball/engine.hpp"

#include <cmath>
#include <iostream>
#include <stdexcept>

namespace rollball {

namespace {

Eigen::MatrixXd fd_dS(const QuasiVelocitySystem& sys, const Eigen::VectorXd& q, int j) {
    const double h = 1e-6 * (1.0 + std::abs(q[j]));
    Eigen::VectorXd qp = q, qm = q;
    qp[j] += h;
    qm[j] -= h;
    return (sys.S(qp) - sys.S(qm)) / (2.0 * h);
}

Eigen::VectorXd fd_ds(const QuasiVelocitySystem& sys, const Eigen::VectorXd& q, int j) {
    const double h = 1e-6 * (1.0 + std::abs(q[j]));
    Eigen::VectorXd qp = q, qm = q;
    qp[j] += h;
    qm[j] -= h;
    return (sys.s(qp) - sys.s(qm)) / (2.0 * h);
}

Eigen::VectorXd config_rates(const QuasiVelocitySystem& sys, const Eigen::VectorXd& q,
                             const Eigen::VectorXd& v) {
    if (sys.B)
        return sys.B(q).partialPivLu().solve(v).head(sys.m);
    return v.head(sys.m);
}

} // namespace

Eigen::VectorXd engine_sigma(const QuasiVelocitySystem& sys, const Eigen::VectorXd& q,
                             const Eigen::VectorXd& v) {
    Eigen::VectorXd sigma = Eigen::VectorXd::Zero(sys.n_constraints);
    if (sys.n_constraints == 0)
        return sigma;
    const Eigen::VectorXd qdot = config_rates(sys, q, v);
    for (int j = 0; j < sys.m; ++j) {
        const Eigen::MatrixXd dSj = sys.dS ? sys.dS(q, j) : fd_dS(sys, q, j);
        const Eigen::VectorXd dsj = sys.ds ? sys.ds(q, j) : fd_ds(sys, q, j);
        sigma += (dSj * v + dsj) * qdot[j];
    }
    return sigma;
}

Eigen::VectorXd reaction_force(const QuasiVelocitySystem& sys, const Eigen::VectorXd& q,
                               const Eigen::VectorXd& v, EngineDiagnostics* diag) {
    if (sys.n_constraints == 0) {
        if (diag) {
            diag->constraint_violation = 0.0;
            diag->condition = 1.0;
        }
        return Eigen::VectorXd::Zero(sys.n);
    }
    const Eigen::MatrixXd A = sys.A(q);
    const Eigen::MatrixXd S = sys.S(q);
    const Eigen::VectorXd sq = sys.s(q);
    const Eigen::VectorXd l = sys.ell(q, v);

    Eigen::LLT<Eigen::MatrixXd> llt(A);
    if (llt.info() != Eigen::Success)
        throw std::runtime_error("reaction_force: kinetic matrix is not positive definite");

    const Eigen::MatrixXd M = S * llt.solve(S.transpose());
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(M, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& sv = svd.singularValues();
    const double cond = sv(0) / sv(sv.size() - 1);
    const double violation = (S * v + sq).lpNorm<Eigen::Infinity>();
    if (diag) {
        diag->condition = cond;
        diag->constraint_violation = violation;
    }
    if (!(cond < 1e12))
        throw std::runtime_error("reaction_force: constraint block S A^-1 S^T is near singular");
    if (violation > 1e-8)
        std::cerr << "reaction_force: constraint violation |S v + s| = " << violation
                  << " exceeds 1e-8\n";

    const Eigen::VectorXd rhs = S * llt.solve(l) - engine_sigma(sys, q, v);
    return S.transpose() * svd.solve(rhs);
}

void constrained_field(const QuasiVelocitySystem& sys, const Eigen::VectorXd& q,
                       const Eigen::VectorXd& v, Eigen::VectorXd& q_dot, Eigen::VectorXd& v_dot,
                       EngineDiagnostics* diag) {
    const Eigen::VectorXd R = reaction_force(sys, q, v, diag);
    const Eigen::VectorXd l = sys.ell(q, v);
    v_dot = sys.A(q).llt().solve(R - l);
    q_dot = config_rates(sys, q, v);
}

QuasiVelocitySystem ball_system(const Params& params, const Profile& profile) {
    QuasiVelocitySystem sys;
    sys.n = 5;
    sys.m = 2;
    sys.n_constraints = 2;
    const double k = params.k, Om = params.Omega, gh = params.g_hat;

    sys.A = [profile, k](const Eigen::VectorXd& q) {
        const FEval g = profile.eval_profile(q[0]);
        Eigen::MatrixXd A = Eigen::MatrixXd::Zero(5, 5);
        A.diagonal() << g.F * g.F, q[0] * q[0], k, k, k;
        return A;
    };
    sys.S = [profile](const Eigen::VectorXd& q) {
        const FEval g = profile.eval_profile(q[0]);
        const double ct = std::cos(q[1]), st = std::sin(q[1]);
        Eigen::MatrixXd S(2, 5);
        S << g.F * ct, -q[0] * g.F * st, 0, -1, -g.f_p * st, //
            g.F * st, q[0] * g.F * ct, 1, 0, g.f_p * ct;
        return S;
    };
    sys.s = [profile, Om](const Eigen::VectorXd& q) {
        const FEval g = profile.eval_profile(q[0]);
        const double a = Om * (q[0] * g.F + g.f_p);
        Eigen::VectorXd s(2);
        s << a * std::sin(q[1]), -a * std::cos(q[1]);
        return s;
    };
    sys.ell = [profile, gh](const Eigen::VectorXd& q, const Eigen::VectorXd& v) {
        const FEval g = profile.eval_profile(q[0]);
        Eigen::VectorXd l = Eigen::VectorXd::Zero(5);
        l[0] = g.f_p * g.f_pp * v[0] * v[0] - q[0] * v[1] * v[1] + gh * g.f_p;
        l[1] = 2.0 * q[0] * v[0] * v[1];
        return l;
    };
    sys.dS = [profile](const Eigen::VectorXd& q, int j) {
        const FEval g = profile.eval_profile(q[0]);
        const double ct = std::cos(q[1]), st = std::sin(q[1]);
        Eigen::MatrixXd D = Eigen::MatrixXd::Zero(2, 5);
        if (j == 0) {
            const double Fp = g.f_p * g.f_pp / g.F;
            D << Fp * ct, -(g.F + q[0] * Fp) * st, 0, 0, -g.f_pp * st, //
                Fp * st, (g.F + q[0] * Fp) * ct, 0, 0, g.f_pp * ct;
        } else {
            D << -g.F * st, -q[0] * g.F * ct, 0, 0, -g.f_p * ct, //
                g.F * ct, -q[0] * g.F * st, 0, 0, -g.f_p * st;
        }
        return D;
    };
    sys.ds = [profile, Om](const Eigen::VectorXd& q, int j) {
        const FEval g = profile.eval_profile(q[0]);
        Eigen::VectorXd D(2);
        if (j == 0) {
            const double Fp = g.f_p * g.f_pp / g.F;
            const double d = Om * (g.F + q[0] * Fp + g.f_pp);
            D << d * std::sin(q[1]), -d * std::cos(q[1]);
        } else {
            const double a = Om * (q[0] * g.F + g.f_p);
            D << a * std::cos(q[1]), a * std::sin(q[1]);
        }
        return D;
    };
    return sys;
}

QuasiVelocitySystem ball_system_fd(const Params& params, const Profile& profile) {
    QuasiVelocitySystem sys = ball_system(params, profile);
    sys.dS = nullptr;
    sys.ds = nullptr;
    return sys;
}

std::array<double, 3> ball_reaction_explicit(const Params& params, const Profile& profile,
                                             double r, double v_r, double v_theta,
                                             double omega_z) {
    const FEval g = profile.eval_profile(r);
    const double f1 = g.f_p, f2 = g.f_pp, F = g.F, F2 = F * F;
    const double mu = params.mu, Om = params.Omega, gh = params.g_hat;
    const double bracket = 1.0 + f2 / F + r * f1 * f2 / F2;
    std::array<double, 3> R;
    R[0] = mu * (gh * f1 + (r * f1 * v_theta * v_theta + F * omega_z * v_theta) * f1) -
           Om * mu * (r * F + f1) * F * v_theta;
    R[1] = -mu * (r * f1 * v_r * v_theta + F * omega_z * v_r) * r * f2 / F2 +
           Om * mu * bracket * r * v_r;
    R[2] = -mu * (r * f1 / F * v_r * v_theta + v_r * omega_z) * f1 * f2 / F2 +
           Om * mu * bracket * f1 / F * v_r;
    return R;
}

QuasiVelocitySystem surface_point_system(const Params& params, const Profile& profile) {
    QuasiVelocitySystem sys;
    sys.n = 2;
    sys.m = 2;
    sys.n_constraints = 0;
    const double gh = params.g_hat;
    sys.A = [profile](const Eigen::VectorXd& q) {
        const FEval g = profile.eval_profile(q[0]);
        Eigen::MatrixXd A = Eigen::MatrixXd::Zero(2, 2);
        A.diagonal() << g.F * g.F, q[0] * q[0];
        return A;
    };
    sys.ell = [profile, gh](const Eigen::VectorXd& q, const Eigen::VectorXd& v) {
        const FEval g = profile.eval_profile(q[0]);
        Eigen::VectorXd l(2);
        l << g.f_p * g.f_pp * v[0] * v[0] - q[0] * v[1] * v[1] + gh * g.f_p,
            2.0 * q[0] * v[0] * v[1];
        return l;
    };
    return sys;
}

} // namespace rollball
