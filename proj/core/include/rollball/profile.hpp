#pragma once

#include <string>
#include <vector>

namespace rollball {

/// Derivative stack of the generatrix in the radial variable r.
struct FEval {
    double f;
    double f_p;
    double f_pp;
    double F; // sqrt(1 + f'^2)
};

/// Derivative stack in the half-squared-radius variable x = r^2/2,
/// where the generatrix is f(r) = psi(r^2/2).
struct PsiEval {
    double psi;
    double psi_p;
    double psi_pp;
    double psi_ppp;
    double curlyF; // 1/sqrt(1 + 2 x psi'^2) = 1/F(sqrt(2x))
};

/// Result of scanning the rolling-admissibility inequality
/// f'' > -(1 + f'^2)^{3/2} on a radial grid.
struct AdmissibilityReport {
    bool ok = true;
    std::vector<double> violating_radii;
};

/// A surface-of-revolution profile, specified through psi so that
/// smoothness and evenness of f are automatic.
///
/// Immutable after construction; all evaluators are pure.
class Profile {
public:
    enum class Kind { Parabolic, Plane, PolyP1, Table };

    /// Defaults to the plane.
    Profile() = default;

    /// f = (b/2) r^2, i.e. psi(x) = b x, b > 0.
    static Profile parabolic(double b);
    /// f = 0.
    static Profile plane();
    /// psi(x) = sum_i coeffs[i] x^i.
    static Profile poly_p1(std::vector<double> coeffs);
    /// Cubic-spline interpolant of (p1, psi) samples; p1 strictly increasing
    /// and starting at 0.
    static Profile table(std::vector<double> p1, std::vector<double> psi);

    Kind kind() const { return kind_; }
    /// Height-curvature coefficient; only meaningful for Kind::Parabolic.
    double b() const { return b_; }

    /// Evaluate psi and derivatives at x = p1 >= 0.
    PsiEval eval_psi(double p1) const;
    /// Evaluate f and derivatives at r >= 0.
    FEval eval_profile(double r) const;
    /// Shorthand for eval_psi(p1).curlyF.
    double curly_F(double p1) const { return eval_psi(p1).curlyF; }

    AdmissibilityReport check_admissibility(double r_max, int n_grid) const;

    /// Stable identity for caching: kind plus defining numbers.
    std::string fingerprint() const;

private:
    Kind kind_ = Kind::Plane;
    double b_ = 0.0;
    std::vector<double> coeffs_;
    // tabulated spline data
    std::vector<double> tx_, ty_, tm_; // knots, values, second derivatives
    PsiEval eval_table(double x) const;
};

} // namespace rollball
