#pragma once

#include <array>
#include <memory>
#include <mutex>
#include <ostream>
#include <string>

#include "rollball/params.hpp"
#include "rollball/profile.hpp"
#include "rollball/reduced.hpp"

namespace rollball {

/// Leaf label: value of the conserved pair (J1, J2) naming a symplectic leaf.
struct LeafLabel {
    double j1 = 0, j2 = 0;
};

/// Coefficients of the auxiliary linear system at x = p1:
/// U' = G U, u' = G u + g with G = [[0, G3], [G4, 0]], g = (g3, g4).
/// They depend only on the profile and mu, not on Omega or gamma.
struct RouthCoeffs {
    double G3, G4, g3, g4;
};
RouthCoeffs routh_coeffs(const Params& params, const Profile& profile, double x);

/// Dense solution (U(x), u(x)) of the auxiliary system on [0, x_max] with
/// U(0) = identity, u(0) = 0.
///
/// Stored as cubic Hermite data on integrator step endpoints with
/// derivatives from the ODE itself; immutable snapshots are swapped in
/// atomically when the range auto-extends, so lookups are concurrency-safe.
class RouthSolution {
public:
    RouthSolution(const Params& params, const Profile& profile, double x_max, double tol = 1e-12);

    /// U row-major 2x2 and u at x >= 0; extends the range on demand.
    void eval(double x, std::array<double, 4>& U, std::array<double, 2>& u) const;
    /// Same, plus x-derivatives from the Hermite interpolant (for residual
    /// diagnostics).
    void eval_with_derivative(double x, std::array<double, 4>& U, std::array<double, 2>& u,
                              std::array<double, 4>& dU, std::array<double, 2>& du) const;

    double x_max() const;
    const std::string& fingerprint() const { return fingerprint_; }
    double tol() const { return tol_; }

private:
    struct Node {
        double x;
        std::array<double, 4> U, dU;
        std::array<double, 2> u, du;
    };
    struct Table {
        std::vector<Node> nodes;
    };

    Params params_;
    Profile profile_;
    double tol_;
    std::string fingerprint_;
    mutable std::mutex mutex_;
    mutable std::shared_ptr<const Table> table_;

    std::shared_ptr<const Table> snapshot() const;
    void extend_to(double x) const;
    static std::shared_ptr<const Table> integrate_table(const Params& params,
                                                        const Profile& profile, const Node& from,
                                                        double x_hi, double tol);
};

/// Process-wide cache of RouthSolution keyed by (profile fingerprint, mu);
/// one entry serves every Omega and gamma.
std::shared_ptr<RouthSolution> routh_cache_get(const Params& params, const Profile& profile,
                                               double x_max);

/// Routh first integrals J = U(p1)^{-1} [(p3, p4) - Omega u(p1)].
LeafLabel routh_J(const Params& params, const Profile& profile, const RouthSolution& routh,
                  const ReducedStateP5& p);

/// Leaf parametrization (p~3, p~4)(p1) = U(p1) j + Omega u(p1).
std::array<double, 2> tilde_p34(const RouthSolution& routh, double Omega, double p1,
                                const LeafLabel& j);

/// Moving energy E(p) (conserved for every Omega).
double moving_energy(const Params& params, const Profile& profile, const ReducedStateP5& p);

/// Drift maxima of the conserved quantities along a trajectory.
struct ConservationReport {
    double E0 = 0;
    LeafLabel J0;
    double max_abs_E = 0, max_abs_J1 = 0, max_abs_J2 = 0, max_abs_K = 0;
    double max_rel_E = 0, max_rel_J1 = 0, max_rel_J2 = 0, max_rel_K = 0;
};
ConservationReport conservation_report(const Params& params, const Profile& profile,
                                       const RouthSolution& routh, const Trajectory& traj);

/// Trajectory CSV: header t,r,v_r,v_theta,omega_z,p0,p1,p2,p3,p4,E,J1,J2,K_drift,
/// one row per accepted step, 17 significant digits.
void write_trajectory_csv(std::ostream& os, const Params& params, const Profile& profile,
                          const RouthSolution& routh, const Trajectory& traj);

} // namespace rollball
