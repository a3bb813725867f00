#pragma once

// Damped Newton iteration x <- x - alpha*d for the fitting objective E.
// The step is taken from the Gauss-Newton least-squares system by default
// (min |F d - G|, solved by rank-tolerant QR), which behaves like the full
// Newton step near a zero-residual minimum and stays a descent direction
// far from one. The literal appendix system J d = R with the full Hessian
// and Gaussian elimination is available as an alternate step method.
//
// alpha starts at 1 and halves until E strictly decreases; the returned
// point therefore never has a larger E than the start.

#include <cmath>
#include <cstdint>

#include "ledfit/derivatives.hpp"
#include "ledfit/linalg.hpp"
#include "ledfit/model.hpp"

namespace ledfit {

enum class StepMethod {
    GaussNewtonQR,   // least-squares step on the residual Jacobian
    FullHessianGE,   // appendix Hessian, Gaussian elimination
};

enum class Termination {
    Converged,
    MaxIterations,
    SingularSystem,
    DampingExhausted,
};

inline const char* to_string(Termination t) {
    switch (t) {
        case Termination::Converged: return "Converged";
        case Termination::MaxIterations: return "MaxIterations";
        case Termination::SingularSystem: return "SingularSystem";
        case Termination::DampingExhausted: return "DampingExhausted";
    }
    return "Unknown";
}

struct NewtonOptions {
    int max_iterations = 50;
    double delta_tolerance = 1e-10;  // on the range-scaled step norm
    int max_damping_halvings = 20;
    StepMethod step_method = StepMethod::GaussNewtonQR;
    std::vector<double>* step_norms = nullptr;  // optional per-iteration trace (scaled, accepted)
};

struct FitResult {
    ModelParams params;
    double rms = 0.0;
    double rmsp = 0.0;
    double e = 0.0;
    int iterations = 0;
    Termination termination = Termination::MaxIterations;
};

namespace detail {

inline double scaled_norm(const Vector9& d, double alpha = 1.0) {
    double acc = 0.0;
    for (int i = 0; i < kParamCount; ++i) {
        const double v = alpha * d[i] / component_range(i);
        acc += v * v;
    }
    return std::sqrt(acc);
}

inline FitResult finish(const ModelParams& p, const IntensitySamples& s, double e, int iterations,
                        Termination term) {
    FitResult r;
    r.params = p;
    r.e = e;
    r.rms = std::sqrt(e);
    double total = 0.0;
    for (double v : s.candela) total += v;
    r.rmsp = total > 0.0 ? 100.0 * static_cast<double>(s.size()) * r.rms / total
                         : std::numeric_limits<double>::quiet_NaN();
    r.iterations = iterations;
    r.termination = term;
    return r;
}

}  // namespace detail

inline FitResult newton_optimize(const ModelParams& p0, const IntensitySamples& s,
                                 const NewtonOptions& opts = {}) {
    ModelParams p = p0;

    // Candidates sitting exactly on the cos = 0 singular set are nudged off
    // it so the derivative factors stay finite.
    for (int k = 0; k < kTerms; ++k) {
        for (double phi : s.phi) {
            const double raw = phi - p.b[k];
            if (raw == 90.0 || raw == -90.0) {
                p.b[k] += 1e-9;
                break;
            }
        }
    }

    double e = eval_e(p, s);
    if (!std::isfinite(e)) return detail::finish(p0, s, eval_e(p0, s), 0, Termination::SingularSystem);

    int iterations = 0;
    for (int iter = 0; iter < opts.max_iterations; ++iter) {
        TermCache cache = build_cache(p, s);

        std::optional<Vector9> d;
        if (opts.step_method == StepMethod::GaussNewtonQR) {
            std::vector<std::array<double, kParamCount>> jac = cache.f;
            std::vector<double> rhs = cache.g;
            d = solve_least_squares(jac, rhs);
        } else {
            const GradientVector r = gradient(cache);
            const HessianMatrix j = hessian(p, cache, s.i_max);
            d = solve_linear_9(j, r);
        }
        if (!d) return detail::finish(p, s, e, iterations, Termination::SingularSystem);

        if (detail::scaled_norm(*d) < opts.delta_tolerance)
            return detail::finish(p, s, e, iterations, Termination::Converged);

        double alpha = 1.0;
        bool accepted = false;
        ModelParams trial;
        double trial_e = 0.0;
        for (int h = 0; h <= opts.max_damping_halvings; ++h) {
            trial = p;
            for (int i = 0; i < kParamCount; ++i)
                trial.set_component(i, p.component(i) - alpha * (*d)[i]);
            trial_e = eval_e(trial, s);
            if (std::isfinite(trial_e) && trial_e < e) {
                accepted = true;
                break;
            }
            alpha *= 0.5;
        }
        if (!accepted) return detail::finish(p, s, e, iterations, Termination::DampingExhausted);

        p = trial;
        e = trial_e;
        ++iterations;
        if (opts.step_norms) opts.step_norms->push_back(detail::scaled_norm(*d, alpha));
        if (detail::scaled_norm(*d, alpha) < opts.delta_tolerance)
            return detail::finish(p, s, e, iterations, Termination::Converged);
    }
    return detail::finish(p, s, e, iterations, Termination::MaxIterations);
}

}  // namespace ledfit
