#pragma once

// Sum-of-three cosine-power model for LED luminous intensity curves:
//
//   I(phi) = I_max * sum_k a_k * cos(phi - b_k)^c_k        k = 1..3
//
// Angles are kept in degrees (matching photometric files and the parameter
// grids); conversion to radians happens only inside the trig calls.
// Two physical restrictions apply to each term:
//   * back-side clamp: a term is dark when |phi - b_k| > 90 degrees,
//   * mirroring: negative combined angles are reflected, which leaves the
//     cosine unchanged and flips the sign of sine factors in derivatives.

#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <vector>

namespace ledfit {

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kDegToRad = kPi / 180.0;
inline constexpr int kTerms = 3;
inline constexpr int kParamCount = 9;

/// Model coefficients. a: amplitudes, b: angular offsets in degrees,
/// c: exponents. Canonical search ranges are a in [0,1], b in [-90,90],
/// c in [0,100]; Newton iterates may leave them.
struct ModelParams {
    std::array<double, 3> a{0.0, 0.0, 0.0};
    std::array<double, 3> b{0.0, 0.0, 0.0};
    std::array<double, 3> c{0.0, 0.0, 0.0};

    // Flat view in the fixed order (a1,a2,a3,b1,b2,b3,c1,c2,c3).
    double component(int i) const {
        return i < 3 ? a[i] : (i < 6 ? b[i - 3] : c[i - 6]);
    }
    void set_component(int i, double v) {
        if (i < 3) a[i] = v;
        else if (i < 6) b[i - 3] = v;
        else c[i - 6] = v;
    }

    bool operator==(const ModelParams&) const = default;
};

/// Width of each component's canonical range, used to scale step norms.
inline double component_range(int i) {
    return i < 3 ? 1.0 : (i < 6 ? 180.0 : 100.0);
}

/// One measured (or synthesized) intensity vector: ordered samples of
/// (polar angle in degrees, candela) plus the maximum candela value.
struct IntensitySamples {
    std::vector<double> phi;      // strictly increasing, first = 0 for standard input
    std::vector<double> candela;  // same length as phi
    double i_max = 0.0;           // max over candela

    std::size_t size() const { return phi.size(); }

    static IntensitySamples from_pairs(std::vector<double> phis, std::vector<double> values) {
        IntensitySamples s;
        s.phi = std::move(phis);
        s.candela = std::move(values);
        for (double v : s.candela) s.i_max = std::max(s.i_max, v);
        return s;
    }
};

/// Combined angle of one term after the physical restrictions.
/// theta is the reflected angle in [0, 90]; sign multiplies sine factors
/// in derivatives (cosine is even, so values are unaffected).
struct TermAngle {
    double theta = 0.0;
    double sign = 1.0;
    bool clamped = false;
};

inline TermAngle term_angle(double phi_deg, double b_deg) {
    const double raw = phi_deg - b_deg;
    if (raw > 90.0 || raw < -90.0) return {0.0, 1.0, true};
    if (raw < 0.0) return {-raw, -1.0, false};
    return {raw, 1.0, false};
}

/// cos(theta) with theta in degrees, treating the 90-degree boundary as an
/// exact zero so the clamp rule and the power rules below stay consistent.
inline double term_cos(double theta_deg) {
    return theta_deg == 90.0 ? 0.0 : std::cos(theta_deg * kDegToRad);
}

/// Value of one term without its amplitude: cos^c(theta). 0^0 evaluates
/// to 1 (std::pow already follows that convention).
inline double term_power(double theta_deg, double c) {
    return std::pow(term_cos(theta_deg), c);
}

/// Eq.-style model evaluation at a single polar angle.
inline double eval_intensity(const ModelParams& p, double phi_deg, double i_max) {
    double sum = 0.0;
    for (int k = 0; k < kTerms; ++k) {
        const TermAngle t = term_angle(phi_deg, p.b[k]);
        if (t.clamped) continue;
        sum += p.a[k] * term_power(t.theta, p.c[k]);
    }
    return i_max * sum;
}

/// Mean squared residual E = (1/N) sum (I(phi_i) - I_m(phi_i))^2.
inline double eval_e(const ModelParams& p, const IntensitySamples& s) {
    const std::size_t n = s.size();
    if (n == 0) return 0.0;
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double g = eval_intensity(p, s.phi[i], s.i_max) - s.candela[i];
        acc += g * g;
    }
    return acc / static_cast<double>(n);
}

inline double rms(const ModelParams& p, const IntensitySamples& s) {
    return std::sqrt(eval_e(p, s));
}

/// Relative RMS error in percent: 100 * N * rms / sum(I_m).
inline double rmsp(const ModelParams& p, const IntensitySamples& s) {
    double total = 0.0;
    for (double v : s.candela) total += v;
    if (total <= 0.0) throw std::domain_error("rmsp: dark instance (sum of measured intensity is zero)");
    return 100.0 * static_cast<double>(s.size()) * rms(p, s) / total;
}

struct ObjectiveValue {
    double rms = 0.0;
    double rmsp = 0.0;
    double e = 0.0;
};

inline ObjectiveValue objective(const ModelParams& p, const IntensitySamples& s) {
    ObjectiveValue o;
    o.e = eval_e(p, s);
    o.rms = std::sqrt(o.e);
    double total = 0.0;
    for (double v : s.candela) total += v;
    o.rmsp = total > 0.0 ? 100.0 * static_cast<double>(s.size()) * o.rms / total
                         : std::numeric_limits<double>::quiet_NaN();
    return o;
}

}  // namespace ledfit
