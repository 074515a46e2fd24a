#include "rollball/profile.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace rollball {

Profile Profile::parabolic(double b) {
    if (!std::isfinite(b) || b <= 0.0)
        throw std::invalid_argument("Profile: parabolic coefficient b must be finite and > 0");
    Profile p;
    p.kind_ = Kind::Parabolic;
    p.b_ = b;
    p.coeffs_ = {0.0, b};
    return p;
}

Profile Profile::plane() {
    Profile p;
    p.kind_ = Kind::Plane;
    p.coeffs_ = {};
    return p;
}

Profile Profile::poly_p1(std::vector<double> coeffs) {
    for (double c : coeffs)
        if (!std::isfinite(c))
            throw std::invalid_argument("Profile: non-finite polynomial coefficient");
    Profile p;
    p.kind_ = Kind::PolyP1;
    p.coeffs_ = std::move(coeffs);
    return p;
}

Profile Profile::table(std::vector<double> p1, std::vector<double> psi) {
    if (p1.size() != psi.size() || p1.size() < 3)
        throw std::invalid_argument("Profile: table needs >= 3 samples with matching lengths");
    if (p1.front() != 0.0)
        throw std::invalid_argument("Profile: table must start at p1 = 0");
    for (size_t i = 0; i < p1.size(); ++i) {
        if (!std::isfinite(p1[i]) || !std::isfinite(psi[i]))
            throw std::invalid_argument("Profile: non-finite table entry");
        if (i > 0 && p1[i] <= p1[i - 1])
            throw std::invalid_argument("Profile: table p1 must be strictly increasing");
    }
    Profile p;
    p.kind_ = Kind::Table;
    p.tx_ = std::move(p1);
    p.ty_ = std::move(psi);

    // natural cubic spline second derivatives (tridiagonal solve)
    const size_t n = p.tx_.size();
    std::vector<double> a(n, 0.0), b(n, 0.0), c(n, 0.0), d(n, 0.0);
    b[0] = 1.0;
    b[n - 1] = 1.0;
    for (size_t i = 1; i + 1 < n; ++i) {
        const double h0 = p.tx_[i] - p.tx_[i - 1];
        const double h1 = p.tx_[i + 1] - p.tx_[i];
        a[i] = h0 / 6.0;
        b[i] = (h0 + h1) / 3.0;
        c[i] = h1 / 6.0;
        d[i] = (p.ty_[i + 1] - p.ty_[i]) / h1 - (p.ty_[i] - p.ty_[i - 1]) / h0;
    }
    for (size_t i = 1; i < n; ++i) {
        const double w = a[i] / b[i - 1];
        b[i] -= w * c[i - 1];
        d[i] -= w * d[i - 1];
    }
    p.tm_.assign(n, 0.0);
    p.tm_[n - 1] = d[n - 1] / b[n - 1];
    for (size_t i = n - 1; i-- > 0;)
        p.tm_[i] = (d[i] - c[i] * p.tm_[i + 1]) / b[i];
    return p;
}

PsiEval Profile::eval_table(double x) const {
    // clamp-free: extrapolate with the end cubic (callers should stay in range)
    size_t i = 1;
    while (i + 1 < tx_.size() && x > tx_[i])
        ++i;
    const double x0 = tx_[i - 1], x1 = tx_[i];
    const double h = x1 - x0;
    const double A = (x1 - x) / h, B = (x - x0) / h;
    PsiEval e{};
    e.psi = A * ty_[i - 1] + B * ty_[i] +
            ((A * A * A - A) * tm_[i - 1] + (B * B * B - B) * tm_[i]) * h * h / 6.0;
    e.psi_p = (ty_[i] - ty_[i - 1]) / h -
              (3.0 * A * A - 1.0) / 6.0 * h * tm_[i - 1] +
              (3.0 * B * B - 1.0) / 6.0 * h * tm_[i];
    e.psi_pp = A * tm_[i - 1] + B * tm_[i];
    e.psi_ppp = (tm_[i] - tm_[i - 1]) / h;
    return e;
}

PsiEval Profile::eval_psi(double p1) const {
    if (!(p1 >= 0.0))
        throw std::domain_error("Profile::eval_psi: p1 must be >= 0");
    PsiEval e{};
    if (kind_ == Kind::Table) {
        e = eval_table(p1);
    } else {
        // polynomial in x = p1 (plane and parabolic are special cases)
        double v = 0.0, d1 = 0.0, d2 = 0.0, d3 = 0.0;
        for (size_t i = coeffs_.size(); i-- > 0;) {
            v = v * p1 + coeffs_[i];
            if (i >= 1) d1 = d1 * p1 + static_cast<double>(i) * coeffs_[i];
            if (i >= 2) d2 = d2 * p1 + static_cast<double>(i * (i - 1)) * coeffs_[i];
            if (i >= 3) d3 = d3 * p1 + static_cast<double>(i * (i - 1) * (i - 2)) * coeffs_[i];
        }
        e.psi = v;
        e.psi_p = d1;
        e.psi_pp = d2;
        e.psi_ppp = d3;
    }
    e.curlyF = 1.0 / std::sqrt(1.0 + 2.0 * p1 * e.psi_p * e.psi_p);
    if (!std::isfinite(e.psi) || !std::isfinite(e.psi_p) || !std::isfinite(e.psi_pp) ||
        !std::isfinite(e.curlyF))
        throw std::runtime_error("Profile::eval_psi: non-finite evaluation");
    return e;
}

FEval Profile::eval_profile(double r) const {
    if (!(r >= 0.0))
        throw std::domain_error("Profile::eval_profile: r must be >= 0");
    const PsiEval e = eval_psi(0.5 * r * r);
    FEval g{};
    g.f = e.psi;
    g.f_p = r * e.psi_p;
    g.f_pp = e.psi_p + r * r * e.psi_pp;
    g.F = std::sqrt(1.0 + g.f_p * g.f_p);
    return g;
}

AdmissibilityReport Profile::check_admissibility(double r_max, int n_grid) const {
    if (!(r_max > 0.0) || n_grid < 2)
        throw std::invalid_argument("check_admissibility: need r_max > 0 and n_grid >= 2");
    AdmissibilityReport rep;
    for (int i = 0; i < n_grid; ++i) {
        const double r = r_max * static_cast<double>(i) / (n_grid - 1);
        const FEval g = eval_profile(r);
        if (g.f_pp <= -g.F * g.F * g.F) {
            rep.ok = false;
            rep.violating_radii.push_back(r);
        }
    }
    return rep;
}

std::string Profile::fingerprint() const {
    std::ostringstream os;
    os.precision(17);
    switch (kind_) {
    case Kind::Parabolic: os << "parabolic:" << b_; break;
    case Kind::Plane: os << "plane"; break;
    case Kind::PolyP1:
        os << "poly_p1:";
        for (double c : coeffs_) os << c << ",";
        break;
    case Kind::Table:
        os << "table:";
        for (size_t i = 0; i < tx_.size(); ++i) os << tx_[i] << "=" << ty_[i] << ",";
        break;
    }
    return os.str();
}

} // namespace rollball
