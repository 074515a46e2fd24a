#include "rollball/leaf.hpp"

#include <cmath>
#include <stdexcept>

#include "rollball/reduced.hpp"

namespace rollball {

double energy_restricted(const Params& params, const Profile& profile, const P4& q) {
    if (!(q[0] > 0.0))
        throw std::domain_error("energy_restricted: p1 must be > 0");
    ReducedStateP5 p{0.0, q[0], q[1], q[2], q[3]};
    p.p0 = (p.p2 * p.p2 + p.p3 * p.p3) / (4.0 * p.p1);
    return moving_energy(params, profile, p);
}

P4 energy_restricted_grad(const Params& params, const Profile& profile, const P4& q) {
    const double p1 = q[0], p2 = q[1], p3 = q[2], p4 = q[3];
    if (!(p1 > 0.0))
        throw std::domain_error("energy_restricted_grad: p1 must be > 0");
    const PsiEval e = profile.eval_psi(p1);
    const double s1 = e.psi_p, s2 = e.psi_pp;
    const double Fc = e.curlyF, Fc2 = Fc * Fc, Fc4 = Fc2 * Fc2;
    const double mu = params.mu, gam = params.gamma, Om = params.Omega;
    const double Fcp = -Fc * Fc2 * s1 * (s1 + 2.0 * p1 * s2);
    const double Tp = 1.0 - s1 * (s1 + 2.0 * p1 * s2) * Fc4;
    P4 g;
    g[0] = gam * s1 - (p2 * p2 + p3 * p3) / (4.0 * p1 * p1) + p2 * p2 * s1 * s2 +
           Om * mu * p4 * Fcp + Om * Om * mu * Tp;
    g[1] = p2 / (2.0 * p1 * Fc2);
    g[2] = p3 / (2.0 * p1) - Om;
    g[3] = mu * p4 + Om * mu * Fc;
    return g;
}

P4 field_restricted(const Params& params, const Profile& profile, const P4& q) {
    if (!(q[0] > 0.0))
        throw std::domain_error("field_restricted: p1 must be > 0");
    const double p0 = (q[1] * q[1] + q[2] * q[2]) / (4.0 * q[0]);
    const std::array<double, 5> X =
        vector_field_p5(params, profile, {p0, q[0], q[1], q[2], q[3]});
    return {X[1], X[2], X[3], X[4]};
}

P4 poisson_apply(const Params& params, const Profile& profile, const P4& q, const P4& dH) {
    if (!(q[0] > 0.0))
        throw std::domain_error("poisson_apply: p1 must be > 0");
    const double p1 = q[0], p3 = q[2], p4 = q[3];
    const RouthCoeffs c = routh_coeffs(params, profile, p1);
    const double Om = params.Omega;
    const double c3 = c.G3 * p4 + Om * c.g3;
    const double c4 = c.G4 * p3 + Om * c.g4;
    const double a = 2.0 * p1 * profile.curly_F(p1) * profile.curly_F(p1);
    // Lambda = a * d/dp2 ^ Y with Y = d/dp1 + c3 d/dp3 + c4 d/dp4
    const double dH_Y = dH[0] + c3 * dH[2] + c4 * dH[3];
    P4 out;
    out[0] = a * dH[1];
    out[1] = -a * dH_Y;
    out[2] = a * dH[1] * c3;
    out[3] = a * dH[1] * c4;
    return out;
}

double leaf_symplectic_form(double p1, const Profile& profile) {
    if (!(p1 > 0.0))
        throw std::domain_error("leaf_symplectic_form: p1 must be > 0");
    const double Fc = profile.curly_F(p1);
    return 1.0 / (2.0 * p1 * Fc * Fc);
}

LeafSystem::LeafSystem(const Params& params, const Profile& profile,
                       std::shared_ptr<RouthSolution> routh, const LeafLabel& j)
    : params_(params), profile_(profile), routh_(std::move(routh)), j_(j) {
    if (!routh_)
        throw std::invalid_argument("LeafSystem: null RouthSolution");
    if (!std::isfinite(j.j1) || !std::isfinite(j.j2))
        throw std::invalid_argument("LeafSystem: non-finite leaf label");
}

std::array<double, 2> LeafSystem::p34(double x) const {
    return tilde_p34(*routh_, params_.Omega, x, j_);
}

double LeafSystem::W(double x) const {
    if (!(x > 0.0))
        throw std::domain_error("LeafSystem::W: p1 must be > 0");
    const PsiEval e = profile_.eval_psi(x);
    const std::array<double, 2> p = p34(x);
    const double mu = params_.mu, gam = params_.gamma, Om = params_.Omega;
    const double Fc = e.curlyF;
    return gam * e.psi + p[0] * p[0] / (4.0 * x) + 0.5 * mu * p[1] * p[1] +
           Om * (mu * p[1] * Fc - p[0]) +
           Om * Om * mu * x * (1.0 - Fc * Fc * e.psi_p * e.psi_p);
}

namespace {

struct LeafDerivs {
    double p3, p4, dp3, dp4, ddp3, ddp4; // leaf functions and x-derivatives
    double Fc, Fcp, Fcpp;                // curlyF stack
    double Tp, Tpp;                      // derivatives of x (1 - curlyF^2 psi'^2)
    PsiEval e;
};

LeafDerivs leaf_derivs(const Params& params, const Profile& profile, const RouthSolution& routh,
                       double Omega, const LeafLabel& j, double x) {
    LeafDerivs L;
    L.e = profile.eval_psi(x);
    const double s1 = L.e.psi_p, s2 = L.e.psi_pp, s3 = L.e.psi_ppp;
    const double Fc = L.e.curlyF, Fc2 = Fc * Fc, Fc3 = Fc2 * Fc, Fc4 = Fc2 * Fc2;
    const double mu = params.mu;

    const double q = s1 + 2.0 * x * s2;  // (x psi'^2)' / psi' when psi' != 0
    const double qp = 3.0 * s2 + 2.0 * x * s3;
    const double wp = s1 * q;            // d/dx (x psi'^2)
    const double wpp = s2 * q + s1 * qp; // second derivative

    L.Fc = Fc;
    L.Fcp = -Fc3 * wp;
    L.Fcpp = -3.0 * Fc2 * L.Fcp * wp - Fc3 * wpp;
    L.Tp = 1.0 - wp * Fc4;
    L.Tpp = -wpp * Fc4 - wp * 4.0 * Fc3 * L.Fcp;

    const RouthCoeffs c = routh_coeffs(params, profile, x);
    const double G3p = mu * (qp * Fc2 + q * 2.0 * Fc * L.Fcp);
    const double G4p = (3.0 * s1 * s1 * s2 - s3) * Fc2 + (s1 * s1 * s1 - s2) * 2.0 * Fc * L.Fcp;
    const double g3p = mu * (qp * Fc3 + q * 3.0 * Fc2 * L.Fcp);
    const double g4p = (L.Fcp * s1 + Fc * s2) * q * Fc2 + (1.0 + Fc * s1) * qp * Fc2 +
                       (1.0 + Fc * s1) * q * 2.0 * Fc * L.Fcp;

    const std::array<double, 2> p = tilde_p34(routh, Omega, x, j);
    L.p3 = p[0];
    L.p4 = p[1];
    L.dp3 = c.G3 * L.p4 + Omega * c.g3;
    L.dp4 = c.G4 * L.p3 + Omega * c.g4;
    L.ddp3 = G3p * L.p4 + c.G3 * L.dp4 + Omega * g3p;
    L.ddp4 = G4p * L.p3 + c.G4 * L.dp3 + Omega * g4p;
    return L;
}

} // namespace

double LeafSystem::W_p(double x) const {
    if (!(x > 0.0))
        throw std::domain_error("LeafSystem::W_p: p1 must be > 0");
    const LeafDerivs L = leaf_derivs(params_, profile_, *routh_, params_.Omega, j_, x);
    const double mu = params_.mu, gam = params_.gamma, Om = params_.Omega;
    return gam * L.e.psi_p + L.p3 * L.dp3 / (2.0 * x) - L.p3 * L.p3 / (4.0 * x * x) +
           mu * L.p4 * L.dp4 + Om * (mu * (L.dp4 * L.Fc + L.p4 * L.Fcp) - L.dp3) +
           Om * Om * mu * L.Tp;
}

double LeafSystem::W_pp(double x) const {
    if (!(x > 0.0))
        throw std::domain_error("LeafSystem::W_pp: p1 must be > 0");
    const LeafDerivs L = leaf_derivs(params_, profile_, *routh_, params_.Omega, j_, x);
    const double mu = params_.mu, gam = params_.gamma, Om = params_.Omega;
    const double A = (L.dp3 * L.dp3 + L.p3 * L.ddp3) / (2.0 * x) - L.p3 * L.dp3 / (x * x) +
                     L.p3 * L.p3 / (2.0 * x * x * x);
    return gam * L.e.psi_pp + A + mu * (L.dp4 * L.dp4 + L.p4 * L.ddp4) +
           Om * (mu * (L.ddp4 * L.Fc + 2.0 * L.dp4 * L.Fcp + L.p4 * L.Fcpp) - L.ddp3) +
           Om * Om * mu * L.Tpp;
}

double LeafSystem::V(double r) const {
    if (!(r > 0.0))
        throw std::domain_error("LeafSystem::V: r must be > 0");
    return W(0.5 * r * r);
}

double LeafSystem::V_p(double r) const { return r * W_p(0.5 * r * r); }

double LeafSystem::V_pp(double r) const {
    const double x = 0.5 * r * r;
    return W_p(x) + r * r * W_pp(x);
}

double LeafSystem::V_pp_fd(double r) const {
    const double h = 1e-5 * (1.0 + r);
    return (V(r + h) - 2.0 * V(r) + V(r - h)) / (h * h);
}

std::array<double, 2> LeafSystem::leaf_vector_field(double r, double r_dot) const {
    if (!(r > 0.0))
        throw std::domain_error("LeafSystem::leaf_vector_field: r must be > 0");
    const FEval g = profile_.eval_profile(r);
    const double F2 = g.F * g.F;
    const double FFp = g.f_p * g.f_pp; // F F' = f' f''
    return {r_dot, -(FFp * r_dot * r_dot + V_p(r)) / F2};
}

double LeafSystem::leaf_energy(double r, double r_dot) const {
    const FEval g = profile_.eval_profile(r);
    return 0.5 * g.F * g.F * r_dot * r_dot + V(r);
}

OdeSolution LeafSystem::integrate(double r0, double r_dot0, double t0, double t1, double rtol,
                                  double atol) const {
    OdeRhs rhs = [this](double, const std::vector<double>& y, std::vector<double>& d) {
        const std::array<double, 2> f = leaf_vector_field(y[0], y[1]);
        d.assign(f.begin(), f.end());
    };
    OdeOptions opt;
    opt.rtol = rtol;
    opt.atol = atol;
    return integrate_ode(rhs, {r0, r_dot0}, t0, t1, opt);
}

} // namespace rollball
