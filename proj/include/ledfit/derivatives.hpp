#pragma once

// Analytic first- and second-order derivatives of the mean squared residual
//
//   E(a,b,c) = (1/N) sum_i G_i^2,   G_i = I(phi_i; a,b,c) - I_m(phi_i)
//
// in the flat parameter order (a1,a2,a3,b1,b2,b3,c1,c2,c3). Because b is
// stored in degrees, every differentiation with respect to b carries one
// pi/180 factor. The uniform constant 2/N from differentiating E is applied
// to both the gradient and the Hessian; the Newton step J^-1 R is invariant
// to it.
//
// At a combined angle of exactly 90 degrees, ln(cos) and negative cosine
// powers diverge; that term's derivative factors are all defined as zero
// (the residual itself keeps its limit value). Clamped terms contribute
// nothing anywhere.

#include <array>
#include <cmath>
#include <vector>

#include "ledfit/model.hpp"

namespace ledfit {

using GradientVector = std::array<double, kParamCount>;
using HessianMatrix = std::array<std::array<double, kParamCount>, kParamCount>;

/// Per-sample, per-term factors shared by the residual, the gradient and
/// the Hessian. f[i][j] is dG_i/dx_j; g[i] is the residual at sample i.
struct TermCache {
    std::size_t n = 0;
    std::vector<double> g;                                  // residuals G_i
    std::vector<std::array<double, kParamCount>> f;         // Jacobian rows
    // raw per-term quantities, needed for the second-order S factors
    std::vector<std::array<double, kTerms>> cosv, sinv, lncos;
    std::vector<std::array<double, kTerms>> pow_c, pow_cm1, pow_cm2;
    std::vector<std::array<bool, kTerms>> dead;             // clamped or singular
};

inline TermCache build_cache(const ModelParams& p, const IntensitySamples& s) {
    const std::size_t n = s.size();
    TermCache cache;
    cache.n = n;
    cache.g.resize(n);
    cache.f.assign(n, {});
    cache.cosv.assign(n, {});
    cache.sinv.assign(n, {});
    cache.lncos.assign(n, {});
    cache.pow_c.assign(n, {});
    cache.pow_cm1.assign(n, {});
    cache.pow_cm2.assign(n, {});
    cache.dead.assign(n, {});

    const double imax = s.i_max;
    for (std::size_t i = 0; i < n; ++i) {
        double model = 0.0;
        for (int k = 0; k < kTerms; ++k) {
            const TermAngle t = term_angle(s.phi[i], p.b[k]);
            if (t.clamped) {
                cache.dead[i][k] = true;
                continue;
            }
            const double value_pow = term_power(t.theta, p.c[k]);  // 0^0 = 1 at the boundary
            model += p.a[k] * value_pow;
            if (t.theta == 90.0) {
                // singular set: value contributes, derivative factors do not
                cache.dead[i][k] = true;
                continue;
            }
            const double cv = std::cos(t.theta * kDegToRad);
            const double sv = t.sign * std::sin(t.theta * kDegToRad);
            cache.cosv[i][k] = cv;
            cache.sinv[i][k] = sv;
            cache.lncos[i][k] = std::log(cv);
            cache.pow_c[i][k] = value_pow;
            cache.pow_cm1[i][k] = std::pow(cv, p.c[k] - 1.0);
            cache.pow_cm2[i][k] = std::pow(cv, p.c[k] - 2.0);
        }
        cache.g[i] = imax * model - s.candela[i];

        for (int k = 0; k < kTerms; ++k) {
            if (cache.dead[i][k]) continue;
            // dG/da_k, dG/db_k (per degree), dG/dc_k
            cache.f[i][k] = imax * cache.pow_c[i][k];
            cache.f[i][3 + k] =
                imax * p.a[k] * p.c[k] * cache.pow_cm1[i][k] * cache.sinv[i][k] * kDegToRad;
            cache.f[i][6 + k] = imax * p.a[k] * cache.pow_c[i][k] * cache.lncos[i][k];
        }
    }
    return cache;
}

/// Gradient of E: entry j is (2/N) sum_i G_i * dG_i/dx_j.
inline GradientVector gradient(const TermCache& cache) {
    GradientVector r{};
    for (std::size_t i = 0; i < cache.n; ++i)
        for (int j = 0; j < kParamCount; ++j) r[j] += cache.g[i] * cache.f[i][j];
    const double scale = 2.0 / static_cast<double>(cache.n);
    for (double& v : r) v *= scale;
    return r;
}

inline GradientVector gradient(const ModelParams& p, const IntensitySamples& s) {
    return gradient(build_cache(p, s));
}

/// Hessian of E: (2/N) sum_i [F_r F_s + G_i * d2G_i/dx_r dx_s]. The
/// second-order corrections are nonzero only when both parameters belong
/// to the same term; they are built from the cached cosine powers and
/// symmetrized by construction.
inline HessianMatrix hessian(const ModelParams& p, const TermCache& cache, double i_max) {
    HessianMatrix h{};
    const double n = static_cast<double>(cache.n);

    for (std::size_t i = 0; i < cache.n; ++i) {
        const auto& f = cache.f[i];
        for (int r = 0; r < kParamCount; ++r)
            for (int c = 0; c <= r; ++c) h[r][c] += f[r] * f[c];

        for (int k = 0; k < kTerms; ++k) {
            if (cache.dead[i][k]) continue;
            const double g = cache.g[i];
            const double sv = cache.sinv[i][k];
            const double ln = cache.lncos[i][k];
            const double ak = p.a[k];
            const double ck = p.c[k];
            // d2G/(da db): I_max c cos^{c-1} sin * D
            h[3 + k][k] += g * i_max * ck * cache.pow_cm1[i][k] * sv * kDegToRad;
            // d2G/(da dc): I_max cos^c ln(cos)
            h[6 + k][k] += g * i_max * cache.pow_c[i][k] * ln;
            // d2G/db^2: I_max a c cos^{c-2} (c sin^2 - 1) * D^2
            h[3 + k][3 + k] += g * i_max * ak * ck * cache.pow_cm2[i][k] *
                               (ck * sv * sv - 1.0) * kDegToRad * kDegToRad;
            // d2G/(db dc): I_max a cos^{c-1} sin (c ln(cos) + 1) * D
            h[6 + k][3 + k] +=
                g * i_max * ak * cache.pow_cm1[i][k] * sv * (ck * ln + 1.0) * kDegToRad;
            // d2G/dc^2: I_max a cos^c ln(cos)^2
            h[6 + k][6 + k] += g * i_max * ak * cache.pow_c[i][k] * ln * ln;
        }
    }

    const double scale = 2.0 / n;
    for (int r = 0; r < kParamCount; ++r) {
        for (int c = 0; c <= r; ++c) {
            h[r][c] *= scale;
            h[c][r] = h[r][c];
        }
    }
    return h;
}

inline HessianMatrix hessian(const ModelParams& p, const IntensitySamples& s) {
    return hessian(p, build_cache(p, s), s.i_max);
}

}  // namespace ledfit
