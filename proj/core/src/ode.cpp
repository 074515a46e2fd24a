#include "rollball/ode.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace rollball {

namespace {

// Dormand-Prince 5(4) tableau
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                 b6 = 11.0 / 84;
// embedded error coefficients (order-5 minus order-4 weights)
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;
// continuous-extension coefficients
constexpr double d1 = -12715105075.0 / 11282082432.0, d3 = 87487479700.0 / 32700410799.0,
                 d4 = -10690763975.0 / 1880347072.0, d5 = 701980252875.0 / 199316789632.0,
                 d6 = -1453857185.0 / 822651844.0, d7 = 69997945.0 / 29380423.0;

bool all_finite(const std::vector<double>& v) {
    for (double x : v)
        if (!std::isfinite(x)) return false;
    return true;
}

double initial_step(const OdeRhs& f, double t0, const std::vector<double>& y0,
                    const std::vector<double>& f0, const OdeOptions& opt, double span) {
    const std::size_t n = y0.size();
    double d0 = 0.0, d1n = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double sk = opt.atol + opt.rtol * std::abs(y0[i]);
        d0 += (y0[i] / sk) * (y0[i] / sk);
        d1n += (f0[i] / sk) * (f0[i] / sk);
    }
    d0 = std::sqrt(d0 / n);
    d1n = std::sqrt(d1n / n);
    double h = (d0 < 1e-5 || d1n < 1e-5) ? 1e-6 : 0.01 * d0 / d1n;
    h = std::min(h, span);
    // one Euler probe to estimate the second derivative scale; fall back to
    // the first-derivative guess when the probe leaves the domain of f
    std::vector<double> y1(n), f1(n);
    for (std::size_t i = 0; i < n; ++i)
        y1[i] = y0[i] + h * f0[i];
    try {
        f(t0 + h, y1, f1);
    } catch (const std::exception&) {
        return h;
    }
    double d2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double sk = opt.atol + opt.rtol * std::abs(y0[i]);
        d2 += ((f1[i] - f0[i]) / sk) * ((f1[i] - f0[i]) / sk);
    }
    d2 = std::sqrt(d2 / n) / h;
    const double dm = std::max(d1n, d2);
    const double h1 = (dm <= 1e-15) ? std::max(1e-6, h * 1e-3) : std::pow(0.01 / dm, 0.2);
    return std::min({100.0 * h, h1, span});
}

} // namespace

void OdeSolution::eval(double t, std::vector<double>& out) const {
    if (segs_.empty()) {
        out = y_.front();
        return;
    }
    // locate segment by binary search on start times
    std::size_t lo = 0, hi = segs_.size() - 1;
    if (t <= segs_.front().t0)
        lo = 0;
    else if (t >= segs_.back().t0)
        lo = hi;
    else {
        while (hi - lo > 1) {
            const std::size_t mid = (lo + hi) / 2;
            if (segs_[mid].t0 <= t)
                lo = mid;
            else
                hi = mid;
        }
    }
    const DenseSegment& s = segs_[lo];
    const std::size_t n = s.rcont.size() / 5;
    double th = (t - s.t0) / s.h;
    th = std::clamp(th, 0.0, 1.0);
    const double th1 = 1.0 - th;
    out.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double r1 = s.rcont[i], r2 = s.rcont[n + i], r3 = s.rcont[2 * n + i],
                     r4 = s.rcont[3 * n + i], r5 = s.rcont[4 * n + i];
        out[i] = r1 + th * (r2 + th1 * (r3 + th * (r4 + th1 * r5)));
    }
}

OdeSolution integrate_ode(const OdeRhs& f, const std::vector<double>& y0, double t0, double t1,
                          const OdeOptions& opt, const OdeHalt& halt) {
    if (!(t1 > t0))
        throw std::invalid_argument("integrate_ode: requires t1 > t0");
    if (!(opt.rtol > 0.0) || !(opt.atol > 0.0))
        throw std::invalid_argument("integrate_ode: tolerances must be > 0");

    const std::size_t n = y0.size();
    const double span = t1 - t0;
    const double hmax = (opt.h_max > 0.0) ? std::min(opt.h_max, span) : span;

    OdeSolution sol;
    sol.t_.push_back(t0);
    sol.y_.push_back(y0);

    std::vector<double> y = y0, ynew(n), ytmp(n);
    std::vector<double> k1(n), k2(n), k3(n), k4(n), k5(n), k6(n), k7(n);
    double t = t0;
    f(t, y, k1);
    if (!all_finite(k1))
        throw std::runtime_error("integrate_ode: non-finite derivative at initial state");

    double h = (opt.h_init > 0.0) ? std::min(opt.h_init, hmax)
                                  : initial_step(f, t0, y, k1, opt, hmax);

    std::size_t nstep = 0;
    while (t < t1) {
        if (++nstep > opt.max_steps)
            throw std::runtime_error("integrate_ode: exceeded max_steps");
        if (h < 1e-14 * std::max(1.0, std::abs(t))) {
            sol.status = OdeStatus::StepUnderflow;
            return sol;
        }
        if (t + h > t1)
            h = t1 - t;

        // A trial step may probe states outside the right-hand side's domain
        // (e.g. r <= 0 near the vertex); treat a throwing stage as a rejected
        // step so the halt predicate can stop the run at an accepted state.
        bool stage_ok = true;
        try {
            for (std::size_t i = 0; i < n; ++i)
                ytmp[i] = y[i] + h * a21 * k1[i];
            f(t + c2 * h, ytmp, k2);
            for (std::size_t i = 0; i < n; ++i)
                ytmp[i] = y[i] + h * (a31 * k1[i] + a32 * k2[i]);
            f(t + c3 * h, ytmp, k3);
            for (std::size_t i = 0; i < n; ++i)
                ytmp[i] = y[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
            f(t + c4 * h, ytmp, k4);
            for (std::size_t i = 0; i < n; ++i)
                ytmp[i] = y[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
            f(t + c5 * h, ytmp, k5);
            for (std::size_t i = 0; i < n; ++i)
                ytmp[i] = y[i] +
                          h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i]);
            f(t + h, ytmp, k6);
            for (std::size_t i = 0; i < n; ++i)
                ynew[i] = y[i] + h * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i] + b6 * k6[i]);
            f(t + h, ynew, k7);
        } catch (const std::exception&) {
            stage_ok = false;
        }

        double err = 0.0;
        bool finite = stage_ok && all_finite(ynew) && all_finite(k7);
        if (finite) {
            for (std::size_t i = 0; i < n; ++i) {
                const double sk = opt.atol + opt.rtol * std::max(std::abs(y[i]), std::abs(ynew[i]));
                const double ei = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] +
                                       e6 * k6[i] + e7 * k7[i]);
                err += (ei / sk) * (ei / sk);
            }
            err = std::sqrt(err / n);
        } else {
            err = 2.0; // force rejection and shrink
        }

        if (err <= 1.0) {
            DenseSegment seg;
            seg.t0 = t;
            seg.h = h;
            seg.rcont.resize(5 * n);
            for (std::size_t i = 0; i < n; ++i) {
                const double ydiff = ynew[i] - y[i];
                const double bspl = h * k1[i] - ydiff;
                seg.rcont[i] = y[i];
                seg.rcont[n + i] = ydiff;
                seg.rcont[2 * n + i] = bspl;
                seg.rcont[3 * n + i] = ydiff - h * k7[i] - bspl;
                seg.rcont[4 * n + i] = h * (d1 * k1[i] + d3 * k3[i] + d4 * k4[i] + d5 * k5[i] +
                                            d6 * k6[i] + d7 * k7[i]);
            }
            sol.segs_.push_back(std::move(seg));

            t += h;
            y.swap(ynew);
            k1.swap(k7); // FSAL
            sol.t_.push_back(t);
            sol.y_.push_back(y);
            ++sol.steps_accepted;

            if (halt) {
                const int code = halt(t, y);
                if (code != 0) {
                    sol.status = OdeStatus::Halted;
                    sol.halt_code = code;
                    return sol;
                }
            }
            const double fac = std::clamp(0.9 * std::pow(err > 1e-300 ? err : 1e-300, -0.2), 1.0, 5.0);
            h = std::min(h * fac, hmax);
        } else {
            ++sol.steps_rejected;
            const double fac = std::clamp(0.9 * std::pow(err, -0.2), 0.2, 1.0);
            h *= fac;
        }
    }
    sol.status = OdeStatus::Complete;
    return sol;
}

} // namespace rollball
