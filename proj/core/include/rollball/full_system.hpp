#pragma once

#include <array>
#include <ostream>
#include <vector>

#include "rollball/ode.hpp"
#include "rollball/params.hpp"
#include "rollball/profile.hpp"
#include "rollball/reduced.hpp"

namespace rollball {

/// Full chart state over r > 0: contact polar coordinates (r, theta),
/// attitude as a unit quaternion (w, x, y, z) taking body to space frame,
/// and the velocities (v_r, v_theta, omega_z). The horizontal angular
/// velocity components are enslaved by the rolling constraint.
struct FullState {
    double r = 1.0;
    double theta = 0.0;
    std::array<double, 4> quat{1.0, 0.0, 0.0, 0.0};
    double v_r = 0.0;
    double v_theta = 0.0;
    double omega_z = 0.0;
};

struct FullDeriv {
    double r_dot = 0, theta_dot = 0;
    std::array<double, 4> quat_dot{};
    double v_r_dot = 0, v_theta_dot = 0, omega_z_dot = 0;
};

/// Horizontal angular velocities (omega_x, omega_y) enforced by the rolling
/// constraint at the given state.
std::array<double, 2> constraint_omega_xy(const Params& params, const Profile& profile, double r,
                                          double theta, double v_r, double v_theta,
                                          double omega_z);

/// Full equations of motion. The attitude rate is the quaternion form of
/// the spatial angular velocity, qdot = (0, omega) q / 2.
FullDeriv full_vector_field(const Params& params, const Profile& profile, const FullState& fs);

/// Raw layout (r, theta, qw, qx, qy, qz, v_r, v_theta, omega_z).
std::vector<double> full_state_to_raw(const FullState& fs);
FullState full_state_from_raw(const double* y);

/// Direct integration of the full 9-dimensional field (attitude included);
/// used for cross-checks against the reduced flow. Adds a norm-restoring
/// feedback term to the quaternion rate so |q| stays at 1.
OdeSolution integrate_full(const Params& params, const Profile& profile, const FullState& fs0,
                           double t0, double t1, double rtol = 1e-10, double atol = 1e-12);

/// Angle/attitude reconstruction along a reduced trajectory: theta by
/// quadrature of v_theta, attitude by quaternion integration of the
/// constraint-completed angular velocity.
class FullTrajectory {
public:
    TrajStatus status = TrajStatus::Complete;

    double t_begin() const { return att_.t_begin(); }
    double t_end() const { return att_.t_end(); }
    const std::vector<double>& times() const { return att_.times(); }

    FullState at(double t) const;

    const Trajectory& reduced() const { return reduced_; }

private:
    friend FullTrajectory reconstruct(const Params& params, const Profile& profile,
                                      const Trajectory& reduced, double theta0,
                                      const std::array<double, 4>& quat0);
    Trajectory reduced_;
    OdeSolution att_; // (theta, qw, qx, qy, qz)
};

FullTrajectory reconstruct(const Params& params, const Profile& profile,
                           const Trajectory& reduced, double theta0,
                           const std::array<double, 4>& quat0);

/// CSV header t,r,theta,qw,qx,qy,qz,v_r,v_theta,omega_z, one row per
/// accepted attitude step, 17 significant digits.
void write_reconstruction_csv(std::ostream& os, const FullTrajectory& ft);

/// Quadrature of v_theta(t) over [ta, tb] from dense output.
double integrate_v_theta(const Trajectory& traj, double ta, double tb);

/// Times of the local minima of r(t) along a trajectory: scan for
/// negative-to-positive sign changes of v_r, refined by bisection.
std::vector<double> radial_minima_times(const Trajectory& traj);

struct PeriodEstimate {
    enum class Kind { Equilibrium, PeriodicReduced, Irregular, NonReturning };
    Kind kind = Kind::NonReturning;
    double T_radial = 0;
    double delta_theta = 0;
    double return_distance = 0; // polar-state distance after one radial period
    std::vector<double> minima_times;
};

/// Radial period, per-period rotation angle and periodicity classification
/// from a reduced trajectory with dense output.
PeriodEstimate estimate_period_and_rotation(const Trajectory& reduced);

/// Exact center-of-mass path for the plane profile at nonzero surface
/// rotation rate: solves xddot = -w ydot, yddot = w xdot with w = mu Omega.
std::array<double, 2> plane_exact_center(double mu_Omega, double x0, double y0, double xdot0,
                                         double ydot0, double t);

} // namespace rollball
