#pragma once

#include <array>
#include <memory>
#include <vector>

#include "rollball/leaf.hpp"
#include "rollball/params.hpp"
#include "rollball/profile.hpp"
#include "rollball/routh.hpp"

namespace rollball {

/// Exact solution of the auxiliary linear system for the paraboloid
/// f(r) = b r^2 / 2, used as an independent oracle against the numerically
/// propagated RouthSolution.
class ParabolicClosedForm {
public:
    ParabolicClosedForm(double b, double mu);

    double b() const { return b_; }
    double mu() const { return mu_; }

    /// cosh / sinh of sqrt(mu) * log F(r).
    double c(double r) const;
    double s(double r) const;

    /// U row-major 2x2 and u at r >= 0.  u is set to exactly zero when
    /// F - 1 < 1e-8 (the formula cancels algebraically there).
    void eval(double r, std::array<double, 4>& U, std::array<double, 2>& u) const;

private:
    double b_, mu_, nu_;
};

/// Max over the grid of the entrywise deviations |U_num - U_exact| and
/// |u_num - u_exact|.  Throws std::invalid_argument when the Routh solution
/// was built for a different profile or mu than the closed form.
double oracle_compare(const Params& params, const RouthSolution& routh,
                      const ParabolicClosedForm& cf, const std::vector<double>& r_grid);

/// Surface-rotation threshold for a non-critical circular motion on the
/// paraboloid f = b r^2 / 2, in explicit closed form.
double parabolic_omega_tilde(const Params& params, double b, double r, double v_theta);

struct AsymptoticsReport {
    /// V(r) * 2 r^2 / j1^2 at r = 1e-2, 1e-3, 1e-4.
    std::array<double, 3> small_r_ratio{};
    bool small_r_ok = false;
    /// V(r) / r^4 at r = 100 and 200 (rotating case only).
    double quartic_ratio_near = 0, quartic_ratio_far = 0;
    bool quartic_checked = false;
    bool quartic_ok = false;
};

/// Confirms the leaf potential blowup laws on a paraboloid: V ~ j1^2/(2 r^2)
/// as r -> 0 and, when Omega != 0, V ~ const * r^4 as r -> infinity.
/// Requires j1 != 0 (otherwise the leaf reaches the vertex).
AsymptoticsReport parabolic_asymptotics_check(const LeafSystem& leaf);

/// One sampled leaf equilibrium for the equilibria-surface scan.
struct SurfaceSample {
    double j1, j2, r, v_theta, omega_n;
    int stable; // 1 stable, 0 unstable, -1 marginal
};

/// Leaf equilibria over a rectangular grid of leaf labels; one row per
/// equilibrium found in [r_min, r_max].
std::vector<SurfaceSample> equilibrium_surface_scan(const Params& params, const Profile& profile,
                                                    std::shared_ptr<RouthSolution> routh,
                                                    const std::vector<double>& j1_grid,
                                                    const std::vector<double>& j2_grid,
                                                    double r_min, double r_max, int n_grid);

} // namespace rollball
