#pragma once

#include <stdexcept>
#include <cmath>

namespace rollball {

/// Physical constants of the rolling-ball system.
///
/// k is the dimensionless inertia ratio of the ball (2/5 for a homogeneous
/// sphere), g_hat the rescaled gravity, Omega the angular velocity of the
/// surface about its axis. The derived combinations mu = k/(1+k) and
/// gamma = g_hat/(1+k) appear throughout the reduced equations.
struct Params {
    double k = 0.4;
    double g_hat = 1.0;
    double Omega = 0.0;
    double mu = 0.0;
    double gamma = 0.0;

    Params() { finalize(); }
    Params(double k_, double g_hat_, double Omega_) : k(k_), g_hat(g_hat_), Omega(Omega_) {
        finalize();
    }

    /// Recompute mu, gamma from k, g_hat and validate ranges.
    void finalize() {
        if (!std::isfinite(k) || k <= 0.0 || k >= 1.0)
            throw std::invalid_argument("Params: k must lie in (0, 1)");
        if (!std::isfinite(g_hat) || g_hat < 0.0)
            throw std::invalid_argument("Params: g_hat must be finite and >= 0");
        if (!std::isfinite(Omega))
            throw std::invalid_argument("Params: Omega must be finite");
        mu = k / (1.0 + k);
        gamma = g_hat / (1.0 + k);
    }

    /// Same system with the surface rotation reversed.
    Params with_omega(double Om) const { return Params(k, g_hat, Om); }
};

} // namespace rollball
