#pragma once

// Dense solvers for the 9-parameter fitting problem: Gaussian elimination
// with partial pivoting for the 9x9 Newton system, and a Householder QR
// with column pivoting for rank-tolerant least-squares steps. Both are
// deterministic; no BLAS dependency for a 9-column problem.

#include <array>
#include <cmath>
#include <cstddef>
#include <optional>
#include <vector>

#include "ledfit/derivatives.hpp"

namespace ledfit {

using Vector9 = std::array<double, kParamCount>;

/// Solve J * d = r by Gaussian elimination with partial pivoting.
/// Returns nullopt when a pivot falls below 1e-14 * max|J| (singular system).
inline std::optional<Vector9> solve_linear_9(const HessianMatrix& j, const GradientVector& r) {
    double a[kParamCount][kParamCount + 1];
    double norm = 0.0;
    for (int row = 0; row < kParamCount; ++row) {
        for (int col = 0; col < kParamCount; ++col) {
            a[row][col] = j[row][col];
            norm = std::max(norm, std::abs(j[row][col]));
        }
        a[row][kParamCount] = r[row];
    }
    if (!(norm > 0.0) || !std::isfinite(norm)) return std::nullopt;
    const double pivot_floor = 1e-14 * norm;

    for (int col = 0; col < kParamCount; ++col) {
        int pivot_row = col;
        for (int row = col + 1; row < kParamCount; ++row)
            if (std::abs(a[row][col]) > std::abs(a[pivot_row][col])) pivot_row = row;
        if (std::abs(a[pivot_row][col]) < pivot_floor) return std::nullopt;
        if (pivot_row != col)
            for (int k = col; k <= kParamCount; ++k) std::swap(a[col][k], a[pivot_row][k]);
        for (int row = col + 1; row < kParamCount; ++row) {
            const double factor = a[row][col] / a[col][col];
            if (factor == 0.0) continue;
            for (int k = col; k <= kParamCount; ++k) a[row][k] -= factor * a[col][k];
        }
    }

    Vector9 d{};
    for (int row = kParamCount - 1; row >= 0; --row) {
        double acc = a[row][kParamCount];
        for (int k = row + 1; k < kParamCount; ++k) acc -= a[row][k] * d[k];
        d[row] = acc / a[row][row];
    }
    for (double v : d)
        if (!std::isfinite(v)) return std::nullopt;
    return d;
}

/// Minimize |A x - b| over x for an n x 9 matrix A (n >= 1), by Householder
/// QR with column pivoting. Columns whose pivot falls below rcond times the
/// leading pivot are dropped and their solution components set to zero,
/// which handles rank-deficient systems (dark or constant terms) gracefully.
/// Returns nullopt if the inputs are not finite.
inline std::optional<Vector9> solve_least_squares(std::vector<std::array<double, kParamCount>>& a,
                                                  std::vector<double>& b, double rcond = 1e-12) {
    const std::size_t n = a.size();
    if (n == 0) return std::nullopt;

    std::array<int, kParamCount> perm{};
    std::array<double, kParamCount> col_norm{};
    for (int c = 0; c < kParamCount; ++c) {
        perm[c] = c;
        double acc = 0.0;
        for (std::size_t i = 0; i < n; ++i) acc += a[i][c] * a[i][c];
        if (!std::isfinite(acc)) return std::nullopt;
        col_norm[c] = acc;
    }
    for (double v : b)
        if (!std::isfinite(v)) return std::nullopt;

    const int max_rank = static_cast<int>(std::min<std::size_t>(n, kParamCount));
    double leading_pivot = 0.0;
    int rank = 0;
    std::array<double, kParamCount> rdiag{};

    for (int step = 0; step < max_rank; ++step) {
        // move the column with the largest remaining norm into position
        int best = step;
        for (int c = step + 1; c < kParamCount; ++c)
            if (col_norm[c] > col_norm[best]) best = c;
        if (best != step) {
            for (std::size_t i = 0; i < n; ++i) std::swap(a[i][step], a[i][best]);
            std::swap(col_norm[step], col_norm[best]);
            std::swap(perm[step], perm[best]);
        }

        double sigma = 0.0;
        for (std::size_t i = step; i < n; ++i) sigma += a[i][step] * a[i][step];
        const double alpha = std::sqrt(sigma);
        if (step == 0) leading_pivot = alpha;
        if (!(alpha > rcond * leading_pivot)) break;

        // Householder vector v stored in place of column `step`
        const double pivot = a[step][step] >= 0.0 ? -alpha : alpha;
        const double v0 = a[step][step] - pivot;
        const double vnorm2 = sigma - a[step][step] * a[step][step] + v0 * v0;
        rdiag[step] = pivot;
        a[step][step] = v0;
        if (vnorm2 > 0.0) {
            for (int c = step + 1; c < kParamCount; ++c) {
                double dot = 0.0;
                for (std::size_t i = step; i < n; ++i) dot += a[i][step] * a[i][c];
                const double f = 2.0 * dot / vnorm2;
                for (std::size_t i = step; i < n; ++i) a[i][c] -= f * a[i][step];
            }
            double dot = 0.0;
            for (std::size_t i = step; i < n; ++i) dot += a[i][step] * b[i];
            const double f = 2.0 * dot / vnorm2;
            for (std::size_t i = step; i < n; ++i) b[i] -= f * a[i][step];
        }
        for (int c = step + 1; c < kParamCount; ++c) {
            col_norm[c] -= a[step][c] * a[step][c];
            if (col_norm[c] < 0.0) col_norm[c] = 0.0;
        }
        ++rank;
    }
    if (rank == 0) return std::nullopt;

    std::array<double, kParamCount> y{};
    for (int row = rank - 1; row >= 0; --row) {
        double acc = b[row];
        for (int c = row + 1; c < rank; ++c) acc -= a[row][c] * y[c];
        y[row] = acc / rdiag[row];
    }
    Vector9 x{};
    for (int c = 0; c < rank; ++c) x[perm[c]] = y[c];
    for (double v : x)
        if (!std::isfinite(v)) return std::nullopt;
    return x;
}

}  // namespace ledfit
