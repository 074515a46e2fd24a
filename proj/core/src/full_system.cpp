#include "rollball/full_system.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace rollball {

std::array<double, 2> constraint_omega_xy(const Params& params, const Profile& profile, double r,
                                          double theta, double v_r, double v_theta,
                                          double omega_z) {
    const FEval g = profile.eval_profile(r);
    const double Om = params.Omega;
    const double ct = std::cos(theta), st = std::sin(theta);
    const double wx = (Om - omega_z) * g.f_p * ct + (Om * r * ct - v_r * st - r * v_theta * ct) * g.F;
    const double wy = (Om - omega_z) * g.f_p * st + (Om * r * st + v_r * ct - r * v_theta * st) * g.F;
    return {wx, wy};
}

namespace {

std::array<double, 4> quat_rate(const std::array<double, 4>& q, double wx, double wy, double wz) {
    return {0.5 * (-wx * q[1] - wy * q[2] - wz * q[3]),
            0.5 * (wx * q[0] + wy * q[3] - wz * q[2]),
            0.5 * (wy * q[0] + wz * q[1] - wx * q[3]),
            0.5 * (wz * q[0] + wx * q[2] - wy * q[1])};
}

void normalize_quat(std::array<double, 4>& q) {
    const double n = std::sqrt(q[0] * q[0] + q[1] * q[1] + q[2] * q[2] + q[3] * q[3]);
    if (n > 0.0)
        for (double& c : q)
            c /= n;
}

} // namespace

FullDeriv full_vector_field(const Params& params, const Profile& profile, const FullState& fs) {
    if (!(fs.r > 0.0))
        throw std::domain_error("full_vector_field: chart requires r > 0");
    double y[4] = {fs.r, fs.v_r, fs.v_theta, fs.omega_z};
    double dy[4];
    polar_rhs(params, profile, y, dy);
    const std::array<double, 2> w =
        constraint_omega_xy(params, profile, fs.r, fs.theta, fs.v_r, fs.v_theta, fs.omega_z);
    FullDeriv d;
    d.r_dot = dy[0];
    d.theta_dot = fs.v_theta;
    d.quat_dot = quat_rate(fs.quat, w[0], w[1], fs.omega_z);
    d.v_r_dot = dy[1];
    d.v_theta_dot = dy[2];
    d.omega_z_dot = dy[3];
    return d;
}

std::vector<double> full_state_to_raw(const FullState& fs) {
    return {fs.r,       fs.theta, fs.quat[0], fs.quat[1], fs.quat[2],
            fs.quat[3], fs.v_r,   fs.v_theta, fs.omega_z};
}

FullState full_state_from_raw(const double* y) {
    FullState fs;
    fs.r = y[0];
    fs.theta = y[1];
    fs.quat = {y[2], y[3], y[4], y[5]};
    fs.v_r = y[6];
    fs.v_theta = y[7];
    fs.omega_z = y[8];
    normalize_quat(fs.quat);
    return fs;
}

OdeSolution integrate_full(const Params& params, const Profile& profile, const FullState& fs0,
                           double t0, double t1, double rtol, double atol) {
    auto rhs = [&params, &profile](double, const std::vector<double>& y, std::vector<double>& dy) {
        FullState fs;
        fs.r = y[0];
        fs.theta = y[1];
        fs.quat = {y[2], y[3], y[4], y[5]};
        fs.v_r = y[6];
        fs.v_theta = y[7];
        fs.omega_z = y[8];
        const FullDeriv d = full_vector_field(params, profile, fs);
        const double n2 =
            y[2] * y[2] + y[3] * y[3] + y[4] * y[4] + y[5] * y[5];
        dy[0] = d.r_dot;
        dy[1] = d.theta_dot;
        for (int i = 0; i < 4; ++i)
            dy[2 + i] = d.quat_dot[i] + (1.0 - n2) * y[2 + i];
        dy[6] = d.v_r_dot;
        dy[7] = d.v_theta_dot;
        dy[8] = d.omega_z_dot;
    };
    OdeOptions opt;
    opt.rtol = rtol;
    opt.atol = atol;
    return integrate_ode(rhs, full_state_to_raw(fs0), t0, t1, opt);
}

FullState FullTrajectory::at(double t) const {
    const std::vector<double> a = att_.eval(t);
    const ReducedStatePolar s = reduced_.polar_at(t);
    FullState fs;
    fs.r = s.r;
    fs.theta = a[0];
    fs.quat = {a[1], a[2], a[3], a[4]};
    normalize_quat(fs.quat);
    fs.v_r = s.v_r;
    fs.v_theta = s.v_theta;
    fs.omega_z = s.omega_z(reduced_.profile, reduced_.params);
    return fs;
}

FullTrajectory reconstruct(const Params& params, const Profile& profile,
                           const Trajectory& reduced, double theta0,
                           const std::array<double, 4>& quat0) {
    FullTrajectory ft;
    ft.status = reduced.status;
    ft.reduced_ = reduced;

    auto rhs = [&params, &profile, &reduced](double t, const std::vector<double>& y,
                                             std::vector<double>& dy) {
        const ReducedStatePolar s = reduced.polar_at(t);
        const double wz = s.omega_z(profile, params);
        const std::array<double, 2> w =
            constraint_omega_xy(params, profile, s.r, y[0], s.v_r, s.v_theta, wz);
        const std::array<double, 4> q{y[1], y[2], y[3], y[4]};
        const std::array<double, 4> qd = quat_rate(q, w[0], w[1], wz);
        const double n2 = q[0] * q[0] + q[1] * q[1] + q[2] * q[2] + q[3] * q[3];
        dy[0] = s.v_theta;
        for (int i = 0; i < 4; ++i)
            dy[1 + i] = qd[i] + (1.0 - n2) * q[i];
    };

    std::array<double, 4> q0 = quat0;
    normalize_quat(q0);
    std::vector<double> y0 = {theta0, q0[0], q0[1], q0[2], q0[3]};
    OdeOptions opt;
    opt.rtol = 1e-11;
    opt.atol = 1e-13;
    ft.att_ = integrate_ode(rhs, y0, reduced.t_begin(), reduced.t_end(), opt);
    return ft;
}

void write_reconstruction_csv(std::ostream& os, const FullTrajectory& ft) {
    os << "t,r,theta,qw,qx,qy,qz,v_r,v_theta,omega_z\n";
    char buf[64];
    auto put = [&os, &buf](double v, char sep) {
        std::snprintf(buf, sizeof(buf), "%.17g%c", v, sep);
        os << buf;
    };
    for (double t : ft.times()) {
        const FullState fs = ft.at(t);
        put(t, ',');
        put(fs.r, ',');
        put(fs.theta, ',');
        put(fs.quat[0], ',');
        put(fs.quat[1], ',');
        put(fs.quat[2], ',');
        put(fs.quat[3], ',');
        put(fs.v_r, ',');
        put(fs.v_theta, ',');
        put(fs.omega_z, '\n');
    }
}

double integrate_v_theta(const Trajectory& traj, double ta, double tb) {
    // composite Simpson on dense output; v_theta is smooth along the flow
    const int n = 4096; // even
    const double h = (tb - ta) / n;
    double acc = traj.polar_at(ta).v_theta + traj.polar_at(tb).v_theta;
    for (int i = 1; i < n; ++i)
        acc += traj.polar_at(ta + i * h).v_theta * ((i % 2) ? 4.0 : 2.0);
    return acc * h / 3.0;
}

std::vector<double> radial_minima_times(const Trajectory& traj) {
    const double t0 = traj.t_begin(), t1 = traj.t_end();
    const int n = 20000;
    const double h = (t1 - t0) / n;
    std::vector<double> out;
    double prev = traj.polar_at(t0).v_r;
    for (int i = 1; i <= n; ++i) {
        const double t = t0 + i * h;
        const double cur = traj.polar_at(t).v_r;
        if (prev < 0.0 && cur >= 0.0) {
            double lo = t - h, hi = t;
            for (int it = 0; it < 80 && hi - lo > 1e-14 * (1.0 + std::abs(hi)); ++it) {
                const double mid = 0.5 * (lo + hi);
                (traj.polar_at(mid).v_r < 0.0 ? lo : hi) = mid;
            }
            out.push_back(0.5 * (lo + hi));
        }
        prev = cur;
    }
    return out;
}

PeriodEstimate estimate_period_and_rotation(const Trajectory& reduced) {
    PeriodEstimate est;
    const double t0 = reduced.t_begin(), t1 = reduced.t_end();
    const ReducedStatePolar s0 = reduced.polar_at(t0);

    double max_dr = 0.0, max_vr = 0.0;
    const int n = 2000;
    for (int i = 0; i <= n; ++i) {
        const ReducedStatePolar s = reduced.polar_at(t0 + (t1 - t0) * i / n);
        max_dr = std::max(max_dr, std::abs(s.r - s0.r));
        max_vr = std::max(max_vr, std::abs(s.v_r));
    }
    if (max_dr < 1e-9 * (1.0 + std::abs(s0.r)) && max_vr < 1e-9) {
        est.kind = PeriodEstimate::Kind::Equilibrium;
        return est;
    }

    est.minima_times = radial_minima_times(reduced);
    if (est.minima_times.size() < 2) {
        est.kind = PeriodEstimate::Kind::NonReturning;
        return est;
    }
    const double ta = est.minima_times[0], tb = est.minima_times[1];
    est.T_radial = tb - ta;
    est.delta_theta = integrate_v_theta(reduced, ta, tb);

    const ReducedStatePolar a = reduced.polar_at(ta);
    const ReducedStatePolar b = reduced.polar_at(tb);
    est.return_distance =
        std::sqrt((a.r - b.r) * (a.r - b.r) + (a.v_r - b.v_r) * (a.v_r - b.v_r) +
                  (a.v_theta - b.v_theta) * (a.v_theta - b.v_theta) +
                  (a.omega_n - b.omega_n) * (a.omega_n - b.omega_n));
    est.kind = est.return_distance < 1e-6 ? PeriodEstimate::Kind::PeriodicReduced
                                          : PeriodEstimate::Kind::Irregular;
    return est;
}

std::array<double, 2> plane_exact_center(double mu_Omega, double x0, double y0, double xdot0,
                                         double ydot0, double t) {
    if (mu_Omega == 0.0)
        return {x0 + xdot0 * t, y0 + ydot0 * t};
    const double w = mu_Omega;
    const double cw = std::cos(w * t), sw = std::sin(w * t);
    return {x0 - ydot0 / w + ydot0 / w * cw + xdot0 / w * sw,
            y0 + xdot0 / w + ydot0 / w * sw - xdot0 / w * cw};
}

} // namespace rollball
