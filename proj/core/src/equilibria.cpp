#include "rollball/equilibria.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "rollball/reduced.hpp"
#include "rollball/rootfind.hpp"

namespace rollball {

const char* family_name(Family f) {
    switch (f) {
    case Family::RE1: return "RE1";
    case Family::RE2: return "RE2";
    default: return "RE3";
    }
}

const char* classification_name(Classification c) {
    switch (c) {
    case Classification::Stable: return "leafwise-stable";
    case Classification::Unstable: return "leafwise-unstable";
    default: return "marginal";
    }
}

double re3_omega_n(const Params& params, const Profile& profile, double r, double v_theta) {
    const FEval g = profile.eval_profile(r);
    if (std::abs(g.f_p) < kCriticalFp)
        throw std::domain_error("re3_omega_n: r is a critical radius (f'(r) = 0)");
    if (v_theta == 0.0)
        throw std::domain_error("re3_omega_n: v_theta must be nonzero");
    const double mu = params.mu, gam = params.gamma, Om = params.Omega;
    return r * v_theta / (mu * g.f_p) - gam / (mu * v_theta) - Om * (r / g.f_p + 1.0 / g.F);
}

double stability_S1(const Params& params, const Profile& profile, double r) {
    const FEval g = profile.eval_profile(r);
    const double mu = params.mu;
    return mu * mu * params.Omega * params.Omega + params.gamma * g.f_pp;
}

double stability_S2(const Params& params, const Profile& profile, double r, double omega_n) {
    const FEval g = profile.eval_profile(r);
    const double mu = params.mu, Om = params.Omega;
    return mu * mu * Om * Om +
           (params.gamma + mu * mu * omega_n * Om + mu * mu * Om * Om) * g.f_pp;
}

DeltaBlock delta_block(const Params& params, const Profile& profile, double r) {
    const FEval g = profile.eval_profile(r);
    const double f1 = g.f_p, f2 = g.f_pp, F2 = g.F * g.F;
    const double mu = params.mu, gam = params.gamma;
    DeltaBlock d;
    d.D00 = gam * gam * f1 * f2;
    d.D02 = 2.0 * gam * F2 * f1;
    d.D04 = (1.0 + mu * f1 * f1) * r * F2 + (1.0 - mu) * r * r * f1 * f2;
    d.D11 = gam * mu * (r * f2 - F2 * f1);
    return d;
}

double stability_S3(const Params& params, const Profile& profile, double r, double v_theta) {
    if (v_theta == 0.0)
        throw std::domain_error("stability_S3: v_theta must be nonzero");
    const DeltaBlock d = delta_block(params, profile, r);
    const double v2 = v_theta * v_theta;
    return d.D00 + d.D02 * v2 + d.D04 * v2 * v2 + params.Omega * d.D11 * v_theta;
}

double omega_tilde(const Params& params, const Profile& profile, double r, double v_theta) {
    if (v_theta == 0.0)
        throw std::domain_error("omega_tilde: v_theta must be nonzero");
    const DeltaBlock d = delta_block(params, profile, r);
    if (std::abs(d.D11) < 1e-14)
        throw std::domain_error("omega_tilde: degenerate branch (D11 = 0 at this radius)");
    return -(d.D00 / v_theta + d.D02 * v_theta + d.D04 * v_theta * v_theta * v_theta) / d.D11;
}

namespace {

double v_cap_for(const Params& params, const DeltaBlock& d) {
    if (std::abs(d.D04) < 1e-12)
        return 1e4;
    const double v1 = std::pow(100.0 * std::abs(d.D00) / std::abs(d.D04), 0.25);
    const double v2 = std::sqrt(100.0 * std::abs(d.D02) / std::abs(d.D04));
    const double v3 = std::cbrt(100.0 * std::abs(params.Omega * d.D11) / std::abs(d.D04));
    return std::max(10.0, 1.1 * std::max({v1, v2, v3}));
}

} // namespace

double omega_tilde_m(const Params& params, const Profile& profile, double r) {
    const DeltaBlock d = delta_block(params, profile, r);
    if (std::abs(d.D11) < 1e-14)
        throw std::domain_error("omega_tilde_m: degenerate branch (D11 = 0 at this radius)");
    const double cap = v_cap_for(params, d);
    double best = std::numeric_limits<double>::infinity();
    for (int branch = 0; branch < 2; ++branch) {
        const double sign = (branch == 0) ? -1.0 : 1.0;
        auto absot = [&](double lv) {
            return std::abs(omega_tilde(params, profile, r, sign * std::exp(lv)));
        };
        // coarse log-grid then golden refinement around the best cell
        const double llo = std::log(1e-4), lhi = std::log(cap);
        const int n = 200;
        double lbest = llo;
        double fbest = absot(llo);
        for (int i = 1; i < n; ++i) {
            const double lv = llo + (lhi - llo) * i / (n - 1);
            const double fv = absot(lv);
            if (fv < fbest) {
                fbest = fv;
                lbest = lv;
            }
        }
        const double dl = (lhi - llo) / (n - 1);
        const double lref = golden_min(absot, std::max(llo, lbest - dl),
                                       std::min(lhi, lbest + dl), 1e-12);
        best = std::min(best, absot(lref));
    }
    return best;
}

namespace {

std::pair<std::string, std::vector<double>> scan_branch(const Params& params,
                                                        const Profile& profile, double r,
                                                        double sign, double cap) {
    auto S = [&](double v) { return stability_S3(params, profile, r, v); };
    // log-spaced magnitudes, ordered left to right on the v_theta axis
    const int n = 400;
    std::vector<double> vs(n);
    for (int i = 0; i < n; ++i) {
        const double lv = std::log(1e-4) + (std::log(cap) - std::log(1e-4)) * i / (n - 1);
        vs[i] = sign * std::exp(lv);
    }
    if (sign < 0)
        std::reverse(vs.begin(), vs.end());

    std::vector<double> zeros;
    std::string letters;
    double prev = S(vs[0]);
    letters.push_back(prev > 0 ? 'S' : 'U');
    for (int i = 1; i < n; ++i) {
        const double cur = S(vs[i]);
        if ((prev > 0) != (cur > 0)) {
            const double z = bisect(S, {vs[i - 1], vs[i]}, 1e-13 * (1.0 + std::abs(vs[i])));
            zeros.push_back(z);
            letters.push_back(cur > 0 ? 'S' : 'U');
        }
        prev = cur;
    }
    if (zeros.size() > 2)
        throw std::runtime_error(
            "branch_signature: more than two stability transitions on one branch "
            "(numerical inconsistency)");
    return {letters, zeros};
}

} // namespace

BranchSignature branch_signature(const Params& params, const Profile& profile, double r) {
    const FEval g = profile.eval_profile(r);
    if (std::abs(g.f_p) < kCriticalFp)
        throw std::domain_error("branch_signature: r is a critical radius (f'(r) = 0)");
    const DeltaBlock d = delta_block(params, profile, r);
    const double cap = v_cap_for(params, d);
    BranchSignature sig;
    auto neg = scan_branch(params, profile, r, -1.0, cap);
    auto pos = scan_branch(params, profile, r, +1.0, cap);
    sig.neg = neg.first;
    sig.zeros_neg = neg.second;
    sig.pos = pos.first;
    sig.zeros_pos = pos.second;
    return sig;
}

namespace {

Classification classify(double S) {
    if (S > kSEps)
        return Classification::Stable;
    if (S < -kSEps)
        return Classification::Unstable;
    return Classification::Marginal;
}

double restricted_field_norm(const Params& params, const Profile& profile,
                             const ReducedStatePolar& s) {
    const ReducedStateP5 p = to_p5(s, profile, params);
    const P4 X = field_restricted(params, profile, {p.p1, p.p2, p.p3, p.p4});
    return std::sqrt(X[0] * X[0] + X[1] * X[1] + X[2] * X[2] + X[3] * X[3]);
}

} // namespace

EquilibriumRecord re3_record(const Params& params, const Profile& profile,
                             std::shared_ptr<RouthSolution> routh, double r, double v_theta) {
    EquilibriumRecord rec;
    rec.family = Family::RE3;
    rec.r = r;
    rec.v_theta = v_theta;
    rec.omega_n = re3_omega_n(params, profile, r, v_theta);
    rec.Omega = params.Omega;
    rec.S_value = stability_S3(params, profile, r, v_theta);
    rec.classification = classify(rec.S_value);
    ReducedStatePolar s{r, 0.0, v_theta, rec.omega_n};
    rec.j = routh_J(params, profile, *routh, to_p5(s, profile, params));
    rec.field_residual = restricted_field_norm(params, profile, s);
    return rec;
}

std::vector<EquilibriumRecord> re1_re2_records(const Params& params, const Profile& profile,
                                               std::shared_ptr<RouthSolution> routh,
                                               double r_critical,
                                               const std::vector<double>& omega_n_list) {
    const FEval g = profile.eval_profile(r_critical);
    if (std::abs(g.f_p) >= kCriticalFp)
        throw std::domain_error("re1_re2_records: r_critical is not a critical radius");
    std::vector<EquilibriumRecord> out;
    for (double wn : omega_n_list) {
        EquilibriumRecord rec;
        rec.r = r_critical;
        rec.omega_n = wn;
        rec.Omega = params.Omega;

        rec.family = Family::RE1;
        rec.v_theta = params.Omega * params.mu;
        rec.S_value = stability_S1(params, profile, r_critical);
        rec.classification = classify(rec.S_value);
        ReducedStatePolar s1{r_critical, 0.0, rec.v_theta, wn};
        rec.j = routh_J(params, profile, *routh, to_p5(s1, profile, params));
        rec.field_residual = restricted_field_norm(params, profile, s1);
        out.push_back(rec);

        if (params.Omega != 0.0) {
            EquilibriumRecord r2 = rec;
            r2.family = Family::RE2;
            r2.v_theta = 0.0;
            r2.S_value = stability_S2(params, profile, r_critical, wn);
            r2.classification = classify(r2.S_value);
            ReducedStatePolar s2{r_critical, 0.0, 0.0, wn};
            r2.j = routh_J(params, profile, *routh, to_p5(s2, profile, params));
            r2.field_residual = restricted_field_norm(params, profile, s2);
            out.push_back(r2);
        }
    }
    return out;
}

std::vector<EquilibriumRecord> equilibria_on_leaf(const LeafSystem& leaf, double r_min,
                                                  double r_max, int n_grid) {
    if (!(r_min > 0.0) || !(r_max > r_min) || n_grid < 2)
        throw std::invalid_argument("equilibria_on_leaf: need 0 < r_min < r_max, n_grid >= 2");
    const Params& params = leaf.params();
    const Profile& profile = leaf.profile();

    auto Vp = [&leaf](double r) { return leaf.V_p(r); };
    std::vector<EquilibriumRecord> out;
    for (const Bracket& b : bracket_roots(Vp, r_min, r_max, n_grid)) {
        const double r = bisect(Vp, b, 1e-12);
        const double x = 0.5 * r * r;
        const std::array<double, 2> p = leaf.p34(x);
        const double v_theta = p[0] / (2.0 * x);
        const double omega_n = p[1];

        EquilibriumRecord rec;
        rec.r = r;
        rec.v_theta = v_theta;
        rec.omega_n = omega_n;
        rec.Omega = params.Omega;
        rec.j = leaf.label();

        const FEval g = profile.eval_profile(r);
        if (std::abs(g.f_p) < kCriticalFp) {
            // critical parallel: v_theta is Omega*mu (RE1) or 0 (RE2)
            const bool re1 = std::abs(v_theta - params.Omega * params.mu) <= std::abs(v_theta) ||
                             params.Omega == 0.0;
            rec.family = re1 ? Family::RE1 : Family::RE2;
            rec.S_value = re1 ? stability_S1(params, profile, r)
                              : stability_S2(params, profile, r, omega_n);
        } else {
            rec.family = Family::RE3;
            rec.S_value = (v_theta != 0.0) ? stability_S3(params, profile, r, v_theta) : 0.0;
        }
        // classify by the leaf potential curvature; marginal when flat
        const double vpp = leaf.V_pp(r);
        if (std::abs(vpp) < kSEps)
            rec.classification = Classification::Marginal;
        else
            rec.classification = (vpp > 0.0) ? Classification::Stable : Classification::Unstable;

        ReducedStatePolar s{r, 0.0, v_theta, omega_n};
        rec.field_residual = restricted_field_norm(params, profile, s);
        out.push_back(rec);
    }
    return out;
}

std::vector<double> critical_radii(const Profile& profile, double r_min, double r_max,
                                   int n_grid) {
    auto fp = [&profile](double r) { return profile.eval_profile(r).f_p; };
    std::vector<double> out;
    for (const Bracket& b : bracket_roots(fp, r_min, r_max, n_grid))
        out.push_back(bisect(fp, b, 1e-14));
    return out;
}

} // namespace rollball
