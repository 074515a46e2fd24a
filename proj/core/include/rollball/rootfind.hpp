#pragma once

#include <functional>
#include <vector>

namespace rollball {

struct Bracket {
    double lo, hi;
};

/// Scan [lo, hi] on a uniform grid of n points and collect sign-change
/// brackets of fn (endpoints with exact zeros are treated as sign changes).
std::vector<Bracket> bracket_roots(const std::function<double(double)>& fn, double lo, double hi,
                                   int n);

/// Bisection on a sign-change bracket to absolute tolerance tol in x.
double bisect(const std::function<double(double)>& fn, Bracket b, double tol);

/// Golden-section minimization of fn on [lo, hi] to tolerance tol in x.
double golden_min(const std::function<double(double)>& fn, double lo, double hi, double tol);

} // namespace rollball
