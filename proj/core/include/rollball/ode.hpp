#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace rollball {

/// Right-hand side dy/dt = f(t, y); writes the derivative into dydt.
using OdeRhs = std::function<void(double t, const std::vector<double>& y, std::vector<double>& dydt)>;

/// Post-step inspection hook; a nonzero return halts integration and is
/// stored as OdeSolution::halt_code.
using OdeHalt = std::function<int(double t, const std::vector<double>& y)>;

enum class OdeStatus {
    Complete,      // reached t_end
    Halted,        // halt hook fired (see halt_code)
    StepUnderflow, // step size collapsed below machine resolution
};

struct OdeOptions {
    double rtol = 1e-10;
    double atol = 1e-12;
    double h_init = 0.0; // 0: automatic
    double h_max = 0.0;  // 0: whole interval
    std::size_t max_steps = 20000000;
};

/// One accepted step's quartic interpolant, in the classic five-coefficient
/// continuous-extension form.
struct DenseSegment {
    double t0;
    double h;
    std::vector<double> rcont; // 5 * n, layout [coef][component]
};

/// Dense-output solution of a single forward integration.
class OdeSolution {
public:
    OdeStatus status = OdeStatus::Complete;
    int halt_code = 0;
    std::size_t steps_accepted = 0;
    std::size_t steps_rejected = 0;

    const std::vector<double>& times() const { return t_; }
    const std::vector<std::vector<double>>& states() const { return y_; }
    double t_begin() const { return t_.front(); }
    double t_end() const { return t_.back(); }
    std::size_t dim() const { return y_.empty() ? 0 : y_.front().size(); }

    /// Interpolated state at t (clamped to the covered interval).
    void eval(double t, std::vector<double>& out) const;
    std::vector<double> eval(double t) const {
        std::vector<double> out(dim());
        eval(t, out);
        return out;
    }

    // populated by integrate_ode
    std::vector<double> t_;
    std::vector<std::vector<double>> y_;
    std::vector<DenseSegment> segs_;
};

/// Adaptive Dormand-Prince 5(4) with dense output and FSAL.
///
/// Integrates forward from t0 to t1 (t1 > t0). The optional halt hook is
/// evaluated on every accepted step.
OdeSolution integrate_ode(const OdeRhs& f, const std::vector<double>& y0, double t0, double t1,
                          const OdeOptions& opt = {}, const OdeHalt& halt = {});

} // namespace rollball
