#pragma once

#include <array>

#include "rollball/ode.hpp"
#include "rollball/params.hpp"
#include "rollball/profile.hpp"

namespace rollball {

/// Point of the reduced space in invariant-polynomial coordinates:
/// p0 = |xdot|^2/2, p1 = |x|^2/2, p2 = x.xdot, p3 = x1 xdot2 - x2 xdot1,
/// p4 = omega.n. Membership in the reduced variety requires
/// 4 p0 p1 = p2^2 + p3^2 with p0, p1 >= 0.
struct ReducedStateP5 {
    double p0 = 0, p1 = 0, p2 = 0, p3 = 0, p4 = 0;

    std::array<double, 5> as_array() const { return {p0, p1, p2, p3, p4}; }
    static ReducedStateP5 from_array(const std::array<double, 5>& a) {
        return {a[0], a[1], a[2], a[3], a[4]};
    }
    /// Membership defect (p2^2+p3^2)/2 - 2 p0 p1; zero on the variety.
    double membership_defect() const { return 0.5 * (p2 * p2 + p3 * p3) - 2.0 * p0 * p1; }
};

/// Same point in polar quasi-velocities over the chart r > 0.
/// omega_n stores p4 = omega.n; the spin rate omega_z about the vertical
/// is profile- and Omega-dependent and exposed as an accessor.
struct ReducedStatePolar {
    double r = 1, v_r = 0, v_theta = 0, omega_n = 0;

    double omega_z(const Profile& profile, const Params& params) const;
    static ReducedStatePolar from_omega_z(double r, double v_r, double v_theta, double omega_z,
                                          const Profile& profile, const Params& params);
};

/// Derivative of (r, v_r, v_theta, omega_z) along the reduced flow.
struct PolarDeriv {
    double r_dot, v_r_dot, v_theta_dot, omega_z_dot;
};

/// Reduced field in p-coordinates; input as raw 5-array (p0..p4).
std::array<double, 5> vector_field_p5(const Params& params, const Profile& profile,
                                      const std::array<double, 5>& p);

/// Reduced field in the polar chart.
PolarDeriv vector_field_polar(const Params& params, const Profile& profile,
                              const ReducedStatePolar& s);

/// Raw polar right-hand side on y = (r, v_r, v_theta, omega_z).
void polar_rhs(const Params& params, const Profile& profile, const double* y, double* dydt);

/// Reflection conjugacy C(p0,p1,p2,p3,p4) = (p0,p1,p2,-p3,-p4); conjugates
/// the flow with Omega to the flow with -Omega.
ReducedStateP5 reflect(const ReducedStateP5& p);

ReducedStateP5 to_p5(const ReducedStatePolar& s, const Profile& profile, const Params& params);
ReducedStatePolar to_polar(const ReducedStateP5& p, const Profile& profile, const Params& params);

enum class TrajStatus {
    Complete,
    ApproachedVertex, // r fell below r_floor
    NonFinite,        // component exceeded overflow_cap or became non-finite
    StepUnderflow,    // integrator step collapsed (stiffness)
};

enum class Chart { Polar, P5 };

struct IntegrateOptions {
    double rtol = 1e-10;
    double atol = 1e-12;
    double r_floor = 1e-6;
    double overflow_cap = 1e8;
    double h_max = 0.0;
};

/// Reduced trajectory with dense output. States are stored in the chart
/// used for integration; accessors convert on demand.
class Trajectory {
public:
    TrajStatus status = TrajStatus::Complete;
    Chart chart = Chart::Polar;
    Params params;
    Profile profile;
    OdeSolution sol;

    double t_begin() const { return sol.t_begin(); }
    double t_end() const { return sol.t_end(); }
    std::size_t size() const { return sol.times().size(); }
    const std::vector<double>& times() const { return sol.times(); }

    /// Stored state of accepted step i, both charts.
    ReducedStatePolar polar_at_index(std::size_t i) const;
    ReducedStateP5 p5_at_index(std::size_t i) const;

    /// Dense-output state at time t.
    ReducedStatePolar polar_at(double t) const;
    ReducedStateP5 p5_at(double t) const;

    /// Membership defect of the stored state (identically 0 in the polar chart).
    double membership_defect_at_index(std::size_t i) const;

private:
    ReducedStatePolar polar_from_raw(const std::vector<double>& y) const;
    ReducedStateP5 p5_from_raw(const std::vector<double>& y) const;
};

/// Integrate the reduced dynamics from a polar-chart state.
Trajectory integrate_reduced(const Params& params, const Profile& profile,
                             const ReducedStatePolar& s0, double t0, double t1,
                             const IntegrateOptions& opt = {});

/// Integrate the reduced dynamics from a p-coordinates state. Uses the polar
/// chart when the state starts above the chart floor, the ambient
/// p-coordinates otherwise.
Trajectory integrate_reduced_p5(const Params& params, const Profile& profile,
                                const ReducedStateP5& p0, double t0, double t1,
                                const IntegrateOptions& opt = {});

} // namespace rollball
