#include "rollball/routh.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <stdexcept>

#include "rollball/ode.hpp"

namespace rollball {

RouthCoeffs routh_coeffs(const Params& params, const Profile& profile, double x) {
    const PsiEval e = profile.eval_psi(x);
    const double s1 = e.psi_p, s2 = e.psi_pp;
    const double Fc = e.curlyF, Fc2 = Fc * Fc;
    RouthCoeffs c;
    c.G3 = params.mu * (s1 + 2.0 * x * s2) * Fc2;
    c.G4 = (s1 * s1 * s1 - s2) * Fc2;
    c.g3 = params.mu * (1.0 + (s1 + 2.0 * x * s2) * Fc2 * Fc);
    c.g4 = (1.0 + Fc * s1) * (s1 + 2.0 * x * s2) * Fc2;
    return c;
}

namespace {

// y = (U00, U01, U10, U11, u0, u1)
void routh_rhs(const Params& params, const Profile& profile, double x, const double* y,
               double* dy) {
    const RouthCoeffs c = routh_coeffs(params, profile, x);
    dy[0] = c.G3 * y[2];
    dy[1] = c.G3 * y[3];
    dy[2] = c.G4 * y[0];
    dy[3] = c.G4 * y[1];
    dy[4] = c.G3 * y[5] + c.g3;
    dy[5] = c.G4 * y[4] + c.g4;
}

// Caps Hermite interpolation error. The coefficient matrix decays like 1/x,
// so the solution varies on the scale of x itself and the node spacing can
// grow proportionally without losing interpolation accuracy.
constexpr double kNodeSpacing = 0.025;

double node_spacing_cap(double x) { return kNodeSpacing * std::max(1.0, x); }

} // namespace

std::shared_ptr<const RouthSolution::Table> RouthSolution::integrate_table(
    const Params& params, const Profile& profile, const Node& from, double x_hi, double tol) {
    auto table = std::make_shared<Table>();
    table->nodes.push_back(from);

    if (x_hi <= from.x)
        return table;

    OdeRhs rhs = [&params, &profile](double x, const std::vector<double>& y,
                                     std::vector<double>& d) {
        d.resize(6);
        routh_rhs(params, profile, x, y.data(), d.data());
    };

    // Integrate in geometric segments so h_max can track the local scale.
    double x_lo = from.x;
    std::vector<double> y0 = {from.U[0], from.U[1], from.U[2], from.U[3], from.u[0], from.u[1]};
    while (x_lo < x_hi) {
        const double x_seg = std::min(x_hi, std::max(x_lo + 1.0, 2.0 * x_lo));
        OdeOptions opt;
        opt.rtol = tol;
        opt.atol = tol;
        opt.h_max = node_spacing_cap(x_lo);
        const OdeSolution sol = integrate_ode(rhs, y0, x_lo, x_seg, opt);
        if (sol.status != OdeStatus::Complete)
            throw std::runtime_error("RouthSolution: auxiliary integration failed at x = " +
                                     std::to_string(sol.t_end()));

        for (std::size_t i = 1; i < sol.times().size(); ++i) {
            Node nd;
            nd.x = sol.times()[i];
            const std::vector<double>& y = sol.states()[i];
            nd.U = {y[0], y[1], y[2], y[3]};
            nd.u = {y[4], y[5]};
            double dy[6];
            routh_rhs(params, profile, nd.x, y.data(), dy);
            nd.dU = {dy[0], dy[1], dy[2], dy[3]};
            nd.du = {dy[4], dy[5]};
            table->nodes.push_back(nd);
        }
        y0 = sol.states().back();
        x_lo = x_seg;
    }
    return table;
}

RouthSolution::RouthSolution(const Params& params, const Profile& profile, double x_max,
                             double tol)
    : params_(params), profile_(profile), tol_(tol) {
    if (!(x_max > 0.0))
        throw std::invalid_argument("RouthSolution: x_max must be > 0");
    char buf[64];
    std::snprintf(buf, sizeof(buf), ":mu=%.17g", params.mu);
    fingerprint_ = profile.fingerprint() + buf;

    Node origin;
    origin.x = 0.0;
    origin.U = {1.0, 0.0, 0.0, 1.0};
    origin.u = {0.0, 0.0};
    double y0[6] = {1, 0, 0, 1, 0, 0};
    double dy[6];
    routh_rhs(params_, profile_, 0.0, y0, dy);
    origin.dU = {dy[0], dy[1], dy[2], dy[3]};
    origin.du = {dy[4], dy[5]};

    table_ = integrate_table(params_, profile_, origin, x_max, tol_);
}

std::shared_ptr<const RouthSolution::Table> RouthSolution::snapshot() const {
    std::lock_guard<std::mutex> lk(mutex_);
    return table_;
}

double RouthSolution::x_max() const { return snapshot()->nodes.back().x; }

void RouthSolution::extend_to(double x) const {
    std::lock_guard<std::mutex> lk(mutex_);
    if (x <= table_->nodes.back().x)
        return;
    double target = table_->nodes.back().x;
    while (target < x)
        target *= 2.0;
    // re-integrate from the last cached node into a fresh immutable table
    auto extension = integrate_table(params_, profile_, table_->nodes.back(), target, tol_);
    auto merged = std::make_shared<Table>();
    merged->nodes = table_->nodes;
    merged->nodes.insert(merged->nodes.end(), extension->nodes.begin() + 1,
                         extension->nodes.end());
    table_ = merged;
}

void RouthSolution::eval_with_derivative(double x, std::array<double, 4>& U,
                                         std::array<double, 2>& u, std::array<double, 4>& dU,
                                         std::array<double, 2>& du) const {
    if (!(x >= 0.0))
        throw std::domain_error("RouthSolution::eval: x must be >= 0");
    auto table = snapshot();
    if (x > table->nodes.back().x) {
        extend_to(x);
        table = snapshot();
    }
    const std::vector<Node>& nd = table->nodes;
    std::size_t lo = 0, hi = nd.size() - 1;
    while (hi - lo > 1) {
        const std::size_t mid = (lo + hi) / 2;
        if (nd[mid].x <= x)
            lo = mid;
        else
            hi = mid;
    }
    const Node& a = nd[lo];
    const Node& b = nd[hi];
    const double h = b.x - a.x;
    if (h <= 0.0) {
        U = a.U;
        u = a.u;
        dU = a.dU;
        du = a.du;
        return;
    }
    const double s = (x - a.x) / h;
    // cubic Hermite basis and its derivative
    const double h00 = (1 + 2 * s) * (1 - s) * (1 - s), h10 = s * (1 - s) * (1 - s),
                 h01 = s * s * (3 - 2 * s), h11 = s * s * (s - 1);
    const double g00 = 6 * s * (s - 1) / h, g10 = (1 - s) * (1 - 3 * s),
                 g01 = -6 * s * (s - 1) / h, g11 = s * (3 * s - 2);
    for (int i = 0; i < 4; ++i) {
        U[i] = h00 * a.U[i] + h10 * h * a.dU[i] + h01 * b.U[i] + h11 * h * b.dU[i];
        dU[i] = g00 * a.U[i] + g10 * a.dU[i] + g01 * b.U[i] + g11 * b.dU[i];
    }
    for (int i = 0; i < 2; ++i) {
        u[i] = h00 * a.u[i] + h10 * h * a.du[i] + h01 * b.u[i] + h11 * h * b.du[i];
        du[i] = g00 * a.u[i] + g10 * a.du[i] + g01 * b.u[i] + g11 * b.du[i];
    }
}

void RouthSolution::eval(double x, std::array<double, 4>& U, std::array<double, 2>& u) const {
    std::array<double, 4> dU;
    std::array<double, 2> du;
    eval_with_derivative(x, U, u, dU, du);
}

std::shared_ptr<RouthSolution> routh_cache_get(const Params& params, const Profile& profile,
                                               double x_max) {
    static std::mutex cache_mutex;
    static std::map<std::string, std::shared_ptr<RouthSolution>> cache;
    char buf[64];
    std::snprintf(buf, sizeof(buf), ":mu=%.17g", params.mu);
    const std::string key = profile.fingerprint() + buf;
    std::lock_guard<std::mutex> lk(cache_mutex);
    auto it = cache.find(key);
    if (it != cache.end()) {
        std::array<double, 4> U;
        std::array<double, 2> u;
        it->second->eval(x_max, U, u); // force range extension if needed
        return it->second;
    }
    auto sol = std::make_shared<RouthSolution>(params, profile, x_max);
    cache[key] = sol;
    return sol;
}

LeafLabel routh_J(const Params& params, const Profile& profile, const RouthSolution& routh,
                  const ReducedStateP5& p) {
    (void)profile;
    std::array<double, 4> U;
    std::array<double, 2> u;
    routh.eval(p.p1, U, u);
    const double det = U[0] * U[3] - U[1] * U[2];
    if (!(std::abs(det) > 1e-300))
        throw std::runtime_error("routh_J: singular fundamental matrix");
    const double a = p.p3 - params.Omega * u[0];
    const double b = p.p4 - params.Omega * u[1];
    LeafLabel j;
    j.j1 = (U[3] * a - U[1] * b) / det;
    j.j2 = (-U[2] * a + U[0] * b) / det;
    return j;
}

std::array<double, 2> tilde_p34(const RouthSolution& routh, double Omega, double p1,
                                const LeafLabel& j) {
    std::array<double, 4> U;
    std::array<double, 2> u;
    routh.eval(p1, U, u);
    return {U[0] * j.j1 + U[1] * j.j2 + Omega * u[0], U[2] * j.j1 + U[3] * j.j2 + Omega * u[1]};
}

double moving_energy(const Params& params, const Profile& profile, const ReducedStateP5& p) {
    if (!(p.p1 >= 0.0))
        throw std::domain_error("moving_energy: p1 must be >= 0");
    const PsiEval e = profile.eval_psi(p.p1);
    const double s1 = e.psi_p, Fc = e.curlyF, Fc2 = Fc * Fc;
    const double mu = params.mu, gam = params.gamma, Om = params.Omega;
    return gam * e.psi + p.p0 + 0.5 * p.p2 * p.p2 * s1 * s1 + 0.5 * mu * p.p4 * p.p4 +
           Om * (mu * p.p4 * Fc - p.p3) + Om * Om * mu * p.p1 * (1.0 - Fc2 * s1 * s1);
}

ConservationReport conservation_report(const Params& params, const Profile& profile,
                                       const RouthSolution& routh, const Trajectory& traj) {
    if (traj.size() == 0)
        throw std::invalid_argument("conservation_report: empty trajectory");
    ConservationReport rep;
    for (std::size_t i = 0; i < traj.size(); ++i) {
        const ReducedStateP5 p = traj.p5_at_index(i);
        const double E = moving_energy(params, profile, p);
        const LeafLabel J = routh_J(params, profile, routh, p);
        const double K = traj.membership_defect_at_index(i);
        if (i == 0) {
            rep.E0 = E;
            rep.J0 = J;
        }
        rep.max_abs_E = std::max(rep.max_abs_E, std::abs(E - rep.E0));
        rep.max_abs_J1 = std::max(rep.max_abs_J1, std::abs(J.j1 - rep.J0.j1));
        rep.max_abs_J2 = std::max(rep.max_abs_J2, std::abs(J.j2 - rep.J0.j2));
        rep.max_abs_K = std::max(rep.max_abs_K, std::abs(K));
    }
    rep.max_rel_E = rep.max_abs_E / (1.0 + std::abs(rep.E0));
    rep.max_rel_J1 = rep.max_abs_J1 / (1.0 + std::abs(rep.J0.j1));
    rep.max_rel_J2 = rep.max_abs_J2 / (1.0 + std::abs(rep.J0.j2));
    rep.max_rel_K = rep.max_abs_K;
    return rep;
}

void write_trajectory_csv(std::ostream& os, const Params& params, const Profile& profile,
                          const RouthSolution& routh, const Trajectory& traj) {
    os << "t,r,v_r,v_theta,omega_z,p0,p1,p2,p3,p4,E,J1,J2,K_drift\n";
    char buf[32];
    auto put = [&os, &buf](double v, char sep) {
        std::snprintf(buf, sizeof(buf), "%.17g", v);
        os << buf << sep;
    };
    for (std::size_t i = 0; i < traj.size(); ++i) {
        const double t = traj.times()[i];
        const ReducedStatePolar s = traj.polar_at_index(i);
        const ReducedStateP5 p = traj.p5_at_index(i);
        const double E = moving_energy(params, profile, p);
        const LeafLabel J = routh_J(params, profile, routh, p);
        const double K = traj.membership_defect_at_index(i);
        put(t, ',');
        put(s.r, ',');
        put(s.v_r, ',');
        put(s.v_theta, ',');
        put(s.omega_z(profile, params), ',');
        put(p.p0, ',');
        put(p.p1, ',');
        put(p.p2, ',');
        put(p.p3, ',');
        put(p.p4, ',');
        put(E, ',');
        put(J.j1, ',');
        put(J.j2, ',');
        put(K, '\n');
    }
}

} // namespace rollball
