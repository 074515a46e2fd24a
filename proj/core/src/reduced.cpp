#include "rollball/reduced.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace rollball {

double ReducedStatePolar::omega_z(const Profile& profile, const Params& params) const {
    const FEval g = profile.eval_profile(r);
    // invert p4 = -(F w_z + r f' v_theta) + Omega (r + f'/F) f'
    return (-omega_n - r * g.f_p * v_theta + params.Omega * (r + g.f_p / g.F) * g.f_p) / g.F;
}

ReducedStatePolar ReducedStatePolar::from_omega_z(double r, double v_r, double v_theta,
                                                  double omega_z, const Profile& profile,
                                                  const Params& params) {
    const FEval g = profile.eval_profile(r);
    ReducedStatePolar s;
    s.r = r;
    s.v_r = v_r;
    s.v_theta = v_theta;
    s.omega_n = -(g.F * omega_z + r * g.f_p * v_theta) + params.Omega * (r + g.f_p / g.F) * g.f_p;
    return s;
}

std::array<double, 5> vector_field_p5(const Params& params, const Profile& profile,
                                      const std::array<double, 5>& p) {
    const double p0 = p[0], p1 = p[1], p2 = p[2], p3 = p[3], p4 = p[4];
    if (!(p1 >= 0.0))
        throw std::domain_error("vector_field_p5: p1 must be >= 0");
    const PsiEval e = profile.eval_psi(p1);
    const double s1 = e.psi_p, s2 = e.psi_pp;
    const double Fc = e.curlyF, Fc2 = Fc * Fc, Fc3 = Fc2 * Fc;
    const double mu = params.mu, gam = params.gamma, Om = params.Omega;

    const double G3 = mu * (s1 + 2.0 * p1 * s2) * Fc2;
    const double G4 = (s1 * s1 * s1 - s2) * Fc2;
    const double g3 = mu * (1.0 + (s1 + 2.0 * p1 * s2) * Fc3);
    const double g4 = (1.0 + Fc * s1) * (s1 + 2.0 * p1 * s2) * Fc2;

    std::array<double, 5> X;
    X[0] = p2 * ((mu * p3 * p4 * s2 - p2 * p2 * s1 * s2 - gam * s1 - 2.0 * p0 * s1 * s1) * Fc2 +
                 Om * mu * p3 * (s1 * s1 + Fc * s2) * Fc2);
    X[1] = p2;
    X[2] = (2.0 * p0 - mu * p3 * p4 * s1 - 2.0 * gam * p1 * s1 - 2.0 * p1 * p2 * p2 * s1 * s2) * Fc2 -
           Om * mu * p3 * (1.0 + s1 * Fc) * Fc2;
    X[3] = p2 * (G3 * p4 + Om * g3);
    X[4] = p2 * (G4 * p3 + Om * g4);

    for (int i = 0; i < 5; ++i)
        if (!std::isfinite(X[i]))
            throw std::runtime_error("vector_field_p5: non-finite component X" +
                                     std::to_string(i));
    return X;
}

void polar_rhs(const Params& params, const Profile& profile, const double* y, double* dydt) {
    const double r = y[0], vr = y[1], vt = y[2], wz = y[3];
    if (!(r > 0.0))
        throw std::domain_error("polar_rhs: r must be > 0");
    const FEval g = profile.eval_profile(r);
    const double f1 = g.f_p, f2 = g.f_pp, F = g.F, F2 = F * F;
    const double mu = params.mu, gam = params.gamma, Om = params.Omega, k = params.k;

    dydt[0] = vr;
    dydt[1] = -gam * f1 / F2 - f1 * f2 / F2 * vr * vr + r * (1.0 + mu * f1 * f1) / F2 * vt * vt +
              mu * f1 / F * vt * wz - Om * mu * (r + f1 / F) * vt;
    dydt[2] = -(vr / r) * ((2.0 + mu * r * f1 * f2 / F2) * vt + mu * f2 / F * wz -
                           Om * mu * (1.0 + f2 / F + r * f1 * f2 / F2));
    dydt[3] = -vr * (1.0 / (1.0 + k)) * f1 / F *
              (r * f1 * f2 / F2 * vt + f2 / F * wz - Om * (1.0 + f2 / F + r * f1 * f2 / F2));
}

PolarDeriv vector_field_polar(const Params& params, const Profile& profile,
                              const ReducedStatePolar& s) {
    double y[4] = {s.r, s.v_r, s.v_theta, s.omega_z(profile, params)};
    double d[4];
    polar_rhs(params, profile, y, d);
    return {d[0], d[1], d[2], d[3]};
}

ReducedStateP5 reflect(const ReducedStateP5& p) { return {p.p0, p.p1, p.p2, -p.p3, -p.p4}; }

ReducedStateP5 to_p5(const ReducedStatePolar& s, const Profile& profile, const Params& params) {
    (void)profile;
    (void)params;
    ReducedStateP5 p;
    p.p1 = 0.5 * s.r * s.r;
    p.p2 = s.r * s.v_r;
    p.p3 = s.r * s.r * s.v_theta;
    p.p4 = s.omega_n;
    p.p0 = (p.p2 * p.p2 + p.p3 * p.p3) / (4.0 * p.p1);
    return p;
}

ReducedStatePolar to_polar(const ReducedStateP5& p, const Profile& profile, const Params& params) {
    (void)profile;
    (void)params;
    if (!(p.p1 > 0.0))
        throw std::domain_error("to_polar: p1 must be > 0 (chart covers r > 0 only)");
    ReducedStatePolar s;
    s.r = std::sqrt(2.0 * p.p1);
    s.v_r = p.p2 / s.r;
    s.v_theta = p.p3 / (2.0 * p.p1);
    s.omega_n = p.p4;
    return s;
}

ReducedStatePolar Trajectory::polar_from_raw(const std::vector<double>& y) const {
    if (chart == Chart::Polar)
        return ReducedStatePolar::from_omega_z(y[0], y[1], y[2], y[3], profile, params);
    return to_polar(ReducedStateP5{y[0], y[1], y[2], y[3], y[4]}, profile, params);
}

ReducedStateP5 Trajectory::p5_from_raw(const std::vector<double>& y) const {
    if (chart == Chart::Polar)
        return to_p5(ReducedStatePolar::from_omega_z(y[0], y[1], y[2], y[3], profile, params),
                     profile, params);
    return ReducedStateP5{y[0], y[1], y[2], y[3], y[4]};
}

ReducedStatePolar Trajectory::polar_at_index(std::size_t i) const {
    return polar_from_raw(sol.states()[i]);
}

ReducedStateP5 Trajectory::p5_at_index(std::size_t i) const { return p5_from_raw(sol.states()[i]); }

ReducedStatePolar Trajectory::polar_at(double t) const { return polar_from_raw(sol.eval(t)); }

ReducedStateP5 Trajectory::p5_at(double t) const { return p5_from_raw(sol.eval(t)); }

double Trajectory::membership_defect_at_index(std::size_t i) const {
    if (chart == Chart::Polar)
        return 0.0;
    const std::vector<double>& y = sol.states()[i];
    return ReducedStateP5{y[0], y[1], y[2], y[3], y[4]}.membership_defect();
}

namespace {

constexpr int kHaltVertex = 1;
constexpr int kHaltOverflow = 2;

Trajectory run_integration(const Params& params, const Profile& profile, Chart chart,
                           const std::vector<double>& y0, double t0, double t1,
                           const IntegrateOptions& opt) {
    Trajectory traj;
    traj.chart = chart;
    traj.params = params;
    traj.profile = profile;

    OdeRhs rhs;
    if (chart == Chart::Polar) {
        rhs = [&params, &profile](double, const std::vector<double>& y, std::vector<double>& d) {
            d.resize(4);
            polar_rhs(params, profile, y.data(), d.data());
        };
    } else {
        rhs = [&params, &profile](double, const std::vector<double>& y, std::vector<double>& d) {
            const std::array<double, 5> X =
                vector_field_p5(params, profile, {y[0], y[1], y[2], y[3], y[4]});
            d.assign(X.begin(), X.end());
        };
    }

    const double r_floor = opt.r_floor;
    const double cap = opt.overflow_cap;
    OdeHalt halt = [chart, r_floor, cap](double, const std::vector<double>& y) -> int {
        for (double v : y)
            if (!std::isfinite(v) || std::abs(v) > cap)
                return kHaltOverflow;
        const double r_like = (chart == Chart::Polar) ? y[0] : std::sqrt(std::max(0.0, 2.0 * y[1]));
        if (r_like < r_floor)
            return kHaltVertex;
        return 0;
    };

    OdeOptions oopt;
    oopt.rtol = opt.rtol;
    oopt.atol = opt.atol;
    oopt.h_max = opt.h_max;
    traj.sol = integrate_ode(rhs, y0, t0, t1, oopt, halt);

    switch (traj.sol.status) {
    case OdeStatus::Complete: traj.status = TrajStatus::Complete; break;
    case OdeStatus::StepUnderflow: traj.status = TrajStatus::StepUnderflow; break;
    case OdeStatus::Halted:
        traj.status = (traj.sol.halt_code == kHaltVertex) ? TrajStatus::ApproachedVertex
                                                          : TrajStatus::NonFinite;
        break;
    }
    return traj;
}

} // namespace

Trajectory integrate_reduced(const Params& params, const Profile& profile,
                             const ReducedStatePolar& s0, double t0, double t1,
                             const IntegrateOptions& opt) {
    if (!(s0.r > 0.0))
        throw std::domain_error("integrate_reduced: initial r must be > 0");
    const std::vector<double> y0 = {s0.r, s0.v_r, s0.v_theta, s0.omega_z(profile, params)};
    return run_integration(params, profile, Chart::Polar, y0, t0, t1, opt);
}

Trajectory integrate_reduced_p5(const Params& params, const Profile& profile,
                                const ReducedStateP5& p0, double t0, double t1,
                                const IntegrateOptions& opt) {
    const double r0 = std::sqrt(std::max(0.0, 2.0 * p0.p1));
    if (r0 > opt.r_floor)
        return integrate_reduced(params, profile, to_polar(p0, profile, params), t0, t1, opt);
    const std::vector<double> y0 = {p0.p0, p0.p1, p0.p2, p0.p3, p0.p4};
    return run_integration(params, profile, Chart::P5, y0, t0, t1, opt);
}

} // namespace rollball
