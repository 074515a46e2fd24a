#pragma once

#include <array>
#include <memory>

#include "rollball/ode.hpp"
#include "rollball/params.hpp"
#include "rollball/profile.hpp"
#include "rollball/routh.hpp"

namespace rollball {

/// Coordinates (p1, p2, p3, p4) on the open stratum r > 0, where p0 is
/// eliminated through 4 p0 p1 = p2^2 + p3^2.
using P4 = std::array<double, 4>;

/// Restricted energy E(p1..p4) with p0 eliminated.
double energy_restricted(const Params& params, const Profile& profile, const P4& q);

/// Hand-coded gradient of energy_restricted.
P4 energy_restricted_grad(const Params& params, const Profile& profile, const P4& q);

/// Centered finite-difference gradient of any scalar of (p1..p4)
/// (step 1e-6 * (1+|coordinate|)).
template <typename Fn> P4 fd_grad(const Fn& f, const P4& q) {
    P4 g{};
    for (int i = 0; i < 4; ++i) {
        const double h = 1e-6 * (1.0 + std::abs(q[i]));
        P4 qp = q, qm = q;
        qp[i] += h;
        qm[i] -= h;
        g[i] = (f(qp) - f(qm)) / (2.0 * h);
    }
    return g;
}

/// Restricted reduced field (dp1..dp4) on the open stratum.
P4 field_restricted(const Params& params, const Profile& profile, const P4& q);

/// Apply the rank-two Poisson bivector at q to a covector dH.
P4 poisson_apply(const Params& params, const Profile& profile, const P4& q, const P4& dH);

/// Coefficient of dp2 ^ dp1 in the leaf symplectic form, 1/(2 p1 curlyF^2).
double leaf_symplectic_form(double p1, const Profile& profile);

/// One-degree-of-freedom system on a symplectic leaf: radial dynamics with
/// effective potential V_j(r) = W_j(r^2/2), carrying analytic first and
/// second derivatives through the auxiliary linear ODE.
class LeafSystem {
public:
    LeafSystem(const Params& params, const Profile& profile, std::shared_ptr<RouthSolution> routh,
               const LeafLabel& j);

    const Params& params() const { return params_; }
    const Profile& profile() const { return profile_; }
    const LeafLabel& label() const { return j_; }
    const RouthSolution& routh() const { return *routh_; }

    /// Effective potential in x = p1 > 0 and its two derivatives.
    double W(double x) const;
    double W_p(double x) const;
    double W_pp(double x) const;

    /// Radial forms V(r) = W(r^2/2), V' = r W', V'' = W' + r^2 W''.
    double V(double r) const;
    double V_p(double r) const;
    double V_pp(double r) const;
    /// Centered finite-difference second derivative of V (self-check).
    double V_pp_fd(double r) const;

    /// Leaf values of (p3, p4) at x = p1.
    std::array<double, 2> p34(double x) const;

    /// Second-order radial field: returns (r_dot, r_ddot) of
    /// F^2 r'' + F F' r'^2 + V' = 0.
    std::array<double, 2> leaf_vector_field(double r, double r_dot) const;

    /// Conserved leaf energy F^2 r'^2 / 2 + V.
    double leaf_energy(double r, double r_dot) const;

    /// Integrate the leaf dynamics (r, r_dot) with the shared RK pair.
    OdeSolution integrate(double r0, double r_dot0, double t0, double t1, double rtol = 1e-10,
                          double atol = 1e-12) const;

private:
    Params params_;
    Profile profile_;
    std::shared_ptr<RouthSolution> routh_;
    LeafLabel j_;
};

} // namespace rollball
