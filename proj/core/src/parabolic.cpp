#include "rollball/parabolic.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "rollball/equilibria.hpp"

namespace rollball {

ParabolicClosedForm::ParabolicClosedForm(double b, double mu) : b_(b), mu_(mu) {
    if (!(b > 0.0) || !std::isfinite(b))
        throw std::invalid_argument("ParabolicClosedForm: b must be positive");
    if (!(mu > 0.0) || !(mu < 0.5))
        throw std::invalid_argument("ParabolicClosedForm: mu must lie in (0, 1/2)");
    nu_ = std::sqrt(mu);
}

double ParabolicClosedForm::c(double r) const {
    const double F = std::sqrt(1.0 + b_ * b_ * r * r);
    return std::cosh(nu_ * std::log(F));
}

double ParabolicClosedForm::s(double r) const {
    const double F = std::sqrt(1.0 + b_ * b_ * r * r);
    return std::sinh(nu_ * std::log(F));
}

void ParabolicClosedForm::eval(double r, std::array<double, 4>& U, std::array<double, 2>& u) const {
    if (r < 0.0)
        throw std::domain_error("ParabolicClosedForm: r must be nonnegative");
    const double F2 = 1.0 + b_ * b_ * r * r;
    const double F = std::sqrt(F2);
    const double cv = std::cosh(nu_ * std::log(F));
    const double sv = std::sinh(nu_ * std::log(F));
    U = {cv, nu_ / b_ * sv, b_ / nu_ * sv, cv};
    if (F - 1.0 < 1e-8) {
        u = {0.0, 0.0};
        return;
    }
    const double mu = mu_, b = b_;
    u[0] = ((4.0 - 3.0 * mu) * (cv - 1.0) + (4.0 * b - (b + 1.0) * mu) * nu_ * sv +
            2.0 * mu * b * b * r * r) /
           ((4.0 - mu) * b * b);
    u[1] = ((4.0 * b - (b + 1.0) * mu) * cv + (4.0 - 3.0 * mu) / nu_ * sv -
            b * (4.0 - mu) / F + mu * F2) /
           ((4.0 - mu) * b);
}

double oracle_compare(const Params& params, const RouthSolution& routh,
                      const ParabolicClosedForm& cf, const std::vector<double>& r_grid) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), ":mu=%.17g", params.mu);
    const std::string expect = Profile::parabolic(cf.b()).fingerprint() + buf;
    if (routh.fingerprint() != expect || std::abs(params.mu - cf.mu()) > 1e-14)
        throw std::invalid_argument(
            "oracle_compare: Routh solution was built for different (b, mu) than the closed form");

    double worst = 0.0;
    for (double r : r_grid) {
        const double x = 0.5 * r * r;
        std::array<double, 4> Un, Ue;
        std::array<double, 2> un, ue;
        routh.eval(x, Un, un);
        cf.eval(r, Ue, ue);
        for (int i = 0; i < 4; ++i)
            worst = std::max(worst, std::abs(Un[i] - Ue[i]));
        for (int i = 0; i < 2; ++i)
            worst = std::max(worst, std::abs(un[i] - ue[i]));
    }
    return worst;
}

double parabolic_omega_tilde(const Params& params, double b, double r, double v_theta) {
    if (!(b > 0.0))
        throw std::invalid_argument("parabolic_omega_tilde: b must be positive");
    if (r <= 0.0 || v_theta == 0.0)
        throw std::domain_error("parabolic_omega_tilde: need r > 0 and v_theta != 0");
    const double mu = params.mu, gam = params.gamma;
    const double br2 = b * b * r * r;
    const double v = v_theta;
    return gam / (b * mu * r * r * v) + (2.0 / mu) * (1.0 / br2 + 1.0) * v +
           (1.0 / (b * gam * mu)) * (1.0 / br2 + 2.0 + mu * br2) * v * v * v;
}

AsymptoticsReport parabolic_asymptotics_check(const LeafSystem& leaf) {
    const LeafLabel j = leaf.label();
    if (j.j1 == 0.0)
        throw std::invalid_argument(
            "parabolic_asymptotics_check: j1 must be nonzero (leaf reaches the vertex)");

    AsymptoticsReport rep;
    const double radii[3] = {1e-2, 1e-3, 1e-4};
    for (int i = 0; i < 3; ++i)
        rep.small_r_ratio[i] = leaf.V(radii[i]) * 2.0 * radii[i] * radii[i] / (j.j1 * j.j1);
    rep.small_r_ok = true;
    for (int i = 0; i < 3; ++i) {
        if (std::abs(rep.small_r_ratio[i] - 1.0) > 0.05)
            rep.small_r_ok = false;
    }
    for (int i = 1; i < 3; ++i) {
        if (std::abs(rep.small_r_ratio[i] - 1.0) > std::abs(rep.small_r_ratio[i - 1] - 1.0))
            rep.small_r_ok = false;
    }

    if (leaf.params().Omega != 0.0) {
        rep.quartic_checked = true;
        rep.quartic_ratio_near = leaf.V(100.0) / 1e8;
        rep.quartic_ratio_far = leaf.V(200.0) / 1.6e9;
        rep.quartic_ok = rep.quartic_ratio_near > 0.0 && rep.quartic_ratio_far > 0.0 &&
                         std::abs(rep.quartic_ratio_far / rep.quartic_ratio_near - 1.0) < 0.10;
    }
    return rep;
}

std::vector<SurfaceSample> equilibrium_surface_scan(const Params& params, const Profile& profile,
                                                    std::shared_ptr<RouthSolution> routh,
                                                    const std::vector<double>& j1_grid,
                                                    const std::vector<double>& j2_grid,
                                                    double r_min, double r_max, int n_grid) {
    std::vector<SurfaceSample> out;
    for (double j1 : j1_grid) {
        for (double j2 : j2_grid) {
            LeafSystem leaf(params, profile, routh, {j1, j2});
            for (const EquilibriumRecord& e : equilibria_on_leaf(leaf, r_min, r_max, n_grid)) {
                SurfaceSample s;
                s.j1 = j1;
                s.j2 = j2;
                s.r = e.r;
                s.v_theta = e.v_theta;
                s.omega_n = e.omega_n;
                s.stable = e.classification == Classification::Stable     ? 1
                           : e.classification == Classification::Unstable ? 0
                                                                          : -1;
                out.push_back(s);
            }
        }
    }
    return out;
}

} // namespace rollball
