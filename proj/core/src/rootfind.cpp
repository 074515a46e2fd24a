#include "rollball/rootfind.hpp"

#include <cmath>
#include <stdexcept>

namespace rollball {

std::vector<Bracket> bracket_roots(const std::function<double(double)>& fn, double lo, double hi,
                                   int n) {
    if (n < 2 || !(hi > lo))
        throw std::invalid_argument("bracket_roots: need n >= 2 and hi > lo");
    std::vector<Bracket> out;
    double x0 = lo, f0 = fn(lo);
    for (int i = 1; i < n; ++i) {
        const double x1 = lo + (hi - lo) * static_cast<double>(i) / (n - 1);
        const double f1 = fn(x1);
        if (f0 == 0.0)
            out.push_back({x0, x0});
        else if (f0 * f1 < 0.0)
            out.push_back({x0, x1});
        x0 = x1;
        f0 = f1;
    }
    if (f0 == 0.0)
        out.push_back({x0, x0});
    return out;
}

double bisect(const std::function<double(double)>& fn, Bracket b, double tol) {
    if (b.lo == b.hi)
        return b.lo;
    double lo = b.lo, hi = b.hi;
    double flo = fn(lo);
    if (flo == 0.0)
        return lo;
    if (flo * fn(hi) > 0.0)
        throw std::invalid_argument("bisect: no sign change in bracket");
    while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        const double fm = fn(mid);
        if (fm == 0.0)
            return mid;
        if (flo * fm < 0.0)
            hi = mid;
        else {
            lo = mid;
            flo = fm;
        }
    }
    return 0.5 * (lo + hi);
}

double golden_min(const std::function<double(double)>& fn, double lo, double hi, double tol) {
    const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
    double a = lo, b = hi;
    double x1 = b - phi * (b - a), x2 = a + phi * (b - a);
    double f1 = fn(x1), f2 = fn(x2);
    while (b - a > tol) {
        if (f1 < f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - phi * (b - a);
            f1 = fn(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + phi * (b - a);
            f2 = fn(x2);
        }
    }
    return 0.5 * (a + b);
}

} // namespace rollball
