#pragma once

#include <array>
#include <functional>

#include <Eigen/Dense>

#include "rollball/params.hpp"
#include "rollball/profile.hpp"

namespace rollball {

/// Mechanical system with linear-affine constraints S(q) v + s(q) = 0 in
/// quasi-velocities v.  q is the block of configuration coordinates that S,
/// s and ell actually depend on; its length may be smaller than the velocity
/// dimension n when the remaining coordinates act by symmetry.
///
/// dS/ds give the analytic partial of S/s with respect to q[j]; when left
/// empty they are replaced by central differences with step 1e-6 (1 + |q_j|).
/// B empty means the identity quasi-velocity map.
struct QuasiVelocitySystem {
    int n = 0;             // quasi-velocity dimension
    int m = 0;             // differentiated configuration block size
    int n_constraints = 0; // rows of S; 0 means unconstrained

    std::function<Eigen::MatrixXd(const Eigen::VectorXd&)> A;
    std::function<Eigen::MatrixXd(const Eigen::VectorXd&)> B;
    std::function<Eigen::MatrixXd(const Eigen::VectorXd&)> S;
    std::function<Eigen::VectorXd(const Eigen::VectorXd&)> s;
    std::function<Eigen::VectorXd(const Eigen::VectorXd&, const Eigen::VectorXd&)> ell;
    std::function<Eigen::MatrixXd(const Eigen::VectorXd&, int)> dS;
    std::function<Eigen::VectorXd(const Eigen::VectorXd&, int)> ds;
};

struct EngineDiagnostics {
    double constraint_violation = 0; // ||S v + s||_inf at the evaluation point
    double condition = 0;            // cond(S A^-1 S^T)
};

/// Transpositional source term sigma_a = (dS_ai/dq_j v_i + ds_a/dq_j)(B^-1 v)_j.
Eigen::VectorXd engine_sigma(const QuasiVelocitySystem& sys, const Eigen::VectorXd& q,
                             const Eigen::VectorXd& v);

/// Constraint reaction R = S^T (S A^-1 S^T)^-1 (S A^-1 ell - sigma).
/// Throws when cond(S A^-1 S^T) > 1e12; warns on violations above 1e-8.
Eigen::VectorXd reaction_force(const QuasiVelocitySystem& sys, const Eigen::VectorXd& q,
                               const Eigen::VectorXd& v, EngineDiagnostics* diag = nullptr);

/// Equations of motion: q_dot = leading block of B^-1 v, v_dot = A^-1 (R - ell).
void constrained_field(const QuasiVelocitySystem& sys, const Eigen::VectorXd& q,
                       const Eigen::VectorXd& v, Eigen::VectorXd& q_dot, Eigen::VectorXd& v_dot,
                       EngineDiagnostics* diag = nullptr);

/// Rolling ball on the rotating surface as a QuasiVelocitySystem:
/// q = (r, theta), v = (v_r, v_theta, omega_x, omega_y, omega_z), with
/// analytic constraint derivatives.
QuasiVelocitySystem ball_system(const Params& params, const Profile& profile);

/// Same system with the analytic dS/ds dropped (finite-difference path).
QuasiVelocitySystem ball_system_fd(const Params& params, const Profile& profile);

/// Hand-coded displayed reaction components (R1, R2, R5) for the ball; these
/// are independent of theta and of (omega_x, omega_y) on the constraint set.
std::array<double, 3> ball_reaction_explicit(const Params& params, const Profile& profile,
                                             double r, double v_r, double v_theta,
                                             double omega_z);

/// Point mass sliding on the surface of revolution without constraints
/// (holonomic sanity system): n = m = 2, q = (r, theta).
QuasiVelocitySystem surface_point_system(const Params& params, const Profile& profile);

} // namespace rollball
