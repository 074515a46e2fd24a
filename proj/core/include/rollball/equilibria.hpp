#pragma once

#include <string>
#include <vector>

#include "rollball/leaf.hpp"
#include "rollball/params.hpp"
#include "rollball/profile.hpp"
#include "rollball/routh.hpp"

namespace rollball {

enum class Family { RE1, RE2, RE3 };
enum class Classification { Stable, Unstable, Marginal };

constexpr double kSEps = 1e-9;        // marginal band for S-values
constexpr double kCriticalFp = 1e-10; // |f'| below this counts as critical radius

/// A reduced equilibrium with its leafwise-stability data.
struct EquilibriumRecord {
    Family family;
    double r;
    double v_theta; // Omega*mu (RE1), 0 (RE2), free nonzero (RE3)
    double omega_n;
    double Omega;
    double S_value;
    Classification classification;
    LeafLabel j;
    double field_residual; // norm of the restricted field at the state
};

const char* family_name(Family f);
const char* classification_name(Classification c);

/// Spin rate making (r, 0, v_theta, omega_n) an equilibrium on a
/// non-critical parallel (f'(r) != 0, v_theta != 0).
double re3_omega_n(const Params& params, const Profile& profile, double r, double v_theta);

/// Stability functions; positive means leafwise-stable.
double stability_S1(const Params& params, const Profile& profile, double r);
double stability_S2(const Params& params, const Profile& profile, double r, double omega_n);
double stability_S3(const Params& params, const Profile& profile, double r, double v_theta);

/// Coefficients of S3 = D00 + D02 v^2 + D04 v^4 + Omega D11 v.
struct DeltaBlock {
    double D00, D02, D04, D11;
};
DeltaBlock delta_block(const Params& params, const Profile& profile, double r);

/// Rotation rate at which S3(r, v_theta, .) vanishes (requires D11 != 0).
double omega_tilde(const Params& params, const Profile& profile, double r, double v_theta);
/// Infimum of |omega_tilde| over v_theta != 0 at fixed r.
double omega_tilde_m(const Params& params, const Profile& profile, double r);

/// Stability pattern of the RE3 family at fixed (r, Omega): the sequence of
/// leafwise-stable (S) / unstable (U) components left to right on each
/// v_theta sign-branch, with the S3 zero locations.
struct BranchSignature {
    std::string neg, pos;
    std::vector<double> zeros_neg, zeros_pos;
};
BranchSignature branch_signature(const Params& params, const Profile& profile, double r);

/// All critical points of the leaf potential in [r_min, r_max], classified.
std::vector<EquilibriumRecord> equilibria_on_leaf(const LeafSystem& leaf, double r_min,
                                                  double r_max, int n_grid);

/// RE1 and RE2 records at a critical radius, one pair per omega_n.
std::vector<EquilibriumRecord> re1_re2_records(const Params& params, const Profile& profile,
                                               std::shared_ptr<RouthSolution> routh,
                                               double r_critical,
                                               const std::vector<double>& omega_n_list);

/// Make an RE3 record at (r, v_theta) with the matching omega_n.
EquilibriumRecord re3_record(const Params& params, const Profile& profile,
                             std::shared_ptr<RouthSolution> routh, double r, double v_theta);

/// Radii with f'(r) = 0 in [r_min, r_max] via bracketed bisection.
std::vector<double> critical_radii(const Profile& profile, double r_min, double r_max, int n_grid);

} // namespace rollball
