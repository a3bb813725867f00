#include <gtest/gtest.h>

#include "ledfit/generator.hpp"
#include "ledfit/linalg.hpp"
#include "ledfit/newton.hpp"
#include "ledfit/rng.hpp"
#include "ledfit/search.hpp"

using namespace ledfit;

namespace {

double norm9(const Vector9& v) {
    double acc = 0.0;
    for (double x : v) acc += x * x;
    return std::sqrt(acc);
}

double matrix_norm(const HessianMatrix& j) {
    double acc = 0.0;
    for (const auto& row : j)
        for (double x : row) acc += x * x;
    return std::sqrt(acc);
}

TEST(SolveLinear9, Identity) {
    HessianMatrix j{};
    for (int i = 0; i < kParamCount; ++i) j[i][i] = 1.0;
    GradientVector r{};
    for (int i = 0; i < kParamCount; ++i) r[i] = i - 4.0;
    const auto d = solve_linear_9(j, r);
    ASSERT_TRUE(d.has_value());
    for (int i = 0; i < kParamCount; ++i) EXPECT_DOUBLE_EQ((*d)[i], r[i]);
}

TEST(SolveLinear9, ZeroRowIsSingular) {
    HessianMatrix j{};
    for (int i = 0; i < kParamCount; ++i) j[i][i] = 1.0;
    for (int c = 0; c < kParamCount; ++c) j[4][c] = 0.0;
    GradientVector r{};
    r[0] = 1.0;
    EXPECT_FALSE(solve_linear_9(j, r).has_value());
}

TEST(SolveLinear9, ResidualContractOnRandomSystems) {
    Rng rng(41);
    for (int trial = 0; trial < 1000; ++trial) {
        HessianMatrix j{};
        GradientVector r{};
        for (int row = 0; row < kParamCount; ++row) {
            for (int col = 0; col < kParamCount; ++col) j[row][col] = rng.next_double(-1.0, 1.0);
            j[row][row] += 10.0;  // keep the systems well conditioned
            r[row] = rng.next_double(-5.0, 5.0);
        }
        const auto d = solve_linear_9(j, r);
        ASSERT_TRUE(d.has_value());
        Vector9 res{};
        for (int row = 0; row < kParamCount; ++row) {
            res[row] = -r[row];
            for (int col = 0; col < kParamCount; ++col) res[row] += j[row][col] * (*d)[col];
        }
        EXPECT_LE(norm9(res), 1e-8 * (matrix_norm(j) * norm9(*d) + norm9(r)));
    }
}

TEST(SolveLeastSquares, AgreesWithSquareSolveWhenWellPosed) {
    Rng rng(42);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<std::array<double, kParamCount>> a(40);
        std::vector<double> b(40);
        HessianMatrix jn{};
        GradientVector rn{};
        for (std::size_t i = 0; i < a.size(); ++i) {
            for (int c = 0; c < kParamCount; ++c) a[i][c] = rng.next_double(-1.0, 1.0);
            b[i] = rng.next_double(-1.0, 1.0);
        }
        for (int r = 0; r < kParamCount; ++r)
            for (int c = 0; c < kParamCount; ++c) {
                for (std::size_t i = 0; i < a.size(); ++i) jn[r][c] += a[i][r] * a[i][c];
            }
        for (int r = 0; r < kParamCount; ++r)
            for (std::size_t i = 0; i < a.size(); ++i) rn[r] += a[i][r] * b[i];

        auto acopy = a;
        auto bcopy = b;
        const auto x_ls = solve_least_squares(acopy, bcopy);
        const auto x_ne = solve_linear_9(jn, rn);
        ASSERT_TRUE(x_ls.has_value());
        ASSERT_TRUE(x_ne.has_value());
        for (int i = 0; i < kParamCount; ++i) EXPECT_NEAR((*x_ls)[i], (*x_ne)[i], 1e-8);
    }
}

TEST(SolveLeastSquares, DropsDeadColumns) {
    Rng rng(43);
    std::vector<std::array<double, kParamCount>> a(30);
    std::vector<double> b(30);
    for (std::size_t i = 0; i < a.size(); ++i) {
        for (int c = 0; c < kParamCount; ++c) a[i][c] = rng.next_double(-1.0, 1.0);
        a[i][5] = 0.0;  // dead column, as a constant term produces
        b[i] = rng.next_double(-1.0, 1.0);
    }
    const auto x = solve_least_squares(a, b);
    ASSERT_TRUE(x.has_value());
    EXPECT_DOUBLE_EQ((*x)[5], 0.0);
}

TEST(NewtonOptimize, ExactStartConvergesImmediately) {
    Rng rng(44);
    for (int trial = 0; trial < 20; ++trial) {
        const auto inst = generate_instance(rng);
        const FitResult fit = newton_optimize(inst.truth, inst.samples);
        EXPECT_EQ(fit.termination, Termination::Converged);
        EXPECT_LE(fit.iterations, 1);
        EXPECT_LT(fit.rms, 1e-10);
    }
}

TEST(NewtonOptimize, PerturbedStartRecovers) {
    Rng rng(45);
    NewtonOptions opts;
    opts.max_iterations = 10;
    opts.delta_tolerance = 1e-12;
    int recovered = 0;
    const int total = 30;
    for (int trial = 0; trial < total; ++trial) {
        const auto inst = generate_instance(rng);
        ModelParams p0 = inst.truth;
        for (int i = 0; i < kParamCount; ++i)
            p0.set_component(i, p0.component(i) * (1.0 + rng.next_double(-0.01, 0.01)));
        const FitResult fit = newton_optimize(p0, inst.samples, opts);
        if (fit.rms < 1e-8 && fit.iterations <= 10) ++recovered;
    }
    EXPECT_GE(recovered, total - 2);
}

TEST(NewtonOptimize, MonotoneSafeguard) {
    Rng rng(46);
    for (int trial = 0; trial < 40; ++trial) {
        const auto inst = generate_instance(rng);
        const ModelParams p0 = random_params(rng);
        const double e0 = eval_e(p0, inst.samples);
        const FitResult fit = newton_optimize(p0, inst.samples);
        EXPECT_LE(fit.e, e0);
    }
}

TEST(NewtonOptimize, FixedPointStaysPut) {
    Rng rng(47);
    const auto inst = generate_instance(rng);
    const FitResult first = newton_optimize(inst.truth, inst.samples);
    const FitResult again = newton_optimize(first.params, inst.samples);
    for (int i = 0; i < kParamCount; ++i)
        EXPECT_NEAR(again.params.component(i), first.params.component(i),
                    1e-8 * component_range(i));
}

TEST(NewtonOptimize, Deterministic) {
    Rng rng(48);
    const auto inst = generate_instance(rng);
    const ModelParams p0 = random_params(rng);
    const FitResult a = newton_optimize(p0, inst.samples);
    const FitResult b = newton_optimize(p0, inst.samples);
    EXPECT_EQ(a.iterations, b.iterations);
    EXPECT_EQ(a.termination, b.termination);
    for (int i = 0; i < kParamCount; ++i)
        EXPECT_EQ(a.params.component(i), b.params.component(i));  // bitwise
}

TEST(NewtonOptimize, SuperlinearTail) {
    // step norms of the last iterations before convergence shrink at an
    // increasing rate
    Rng rng(49);
    int checked = 0;
    for (int trial = 0; trial < 25 && checked < 10; ++trial) {
        const auto inst = generate_instance(rng);
        ModelParams p0 = inst.truth;
        for (int i = 0; i < kParamCount; ++i)
            p0.set_component(i, p0.component(i) * (1.0 + rng.next_double(-0.01, 0.01)));
        std::vector<double> norms;
        NewtonOptions opts;
        opts.delta_tolerance = 1e-12;
        opts.step_norms = &norms;
        const FitResult fit = newton_optimize(p0, inst.samples, opts);
        if (fit.termination != Termination::Converged) continue;
        // ignore steps already at the floating-point floor, where ratios
        // are rounding noise
        while (!norms.empty() && norms.back() < 1e-10) norms.pop_back();
        if (norms.size() < 4) continue;
        const std::size_t n = norms.size();
        const double r1 = norms[n - 2] / norms[n - 3];
        const double r2 = norms[n - 1] / norms[n - 2];
        EXPECT_LT(r2, r1) << "trial " << trial;
        ++checked;
    }
    EXPECT_GE(checked, 5);
}

TEST(NewtonOptimize, FullHessianModeSingularOnConstantTerm) {
    // at a zero-residual point with c1 = 0 the b1 row of the appendix
    // system vanishes: the literal Gaussian-elimination path reports a
    // singular system at the first iteration and returns the start unchanged
    ModelParams truth;
    truth.a = {0.4, 0.3, 0.2};
    truth.b = {10.0, 40.0, 70.0};
    truth.c = {0.0, 3.0, 5.0};
    IntensitySamples s;
    for (int deg = 0; deg <= 90; ++deg) {
        s.phi.push_back(deg);
        s.candela.push_back(eval_intensity(truth, deg, 1000.0));
    }
    for (double v : s.candela) s.i_max = std::max(s.i_max, v);
    for (int k = 0; k < kTerms; ++k) truth.a[k] *= 1000.0 / s.i_max;

    NewtonOptions opts;
    opts.step_method = StepMethod::FullHessianGE;
    const FitResult fit = newton_optimize(truth, s, opts);
    EXPECT_EQ(fit.termination, Termination::SingularSystem);
    EXPECT_EQ(fit.iterations, 0);
    for (int i = 0; i < kParamCount; ++i) EXPECT_EQ(fit.params.component(i), truth.component(i));
}

TEST(NewtonOptimize, GaussNewtonHandlesConstantTerm) {
    // the default least-squares step drops the dead direction instead
    Rng rng(51);
    const auto inst = generate_instance(rng);
    ModelParams p0 = inst.truth;
    p0.c[0] = 0.0;
    const FitResult fit = newton_optimize(p0, inst.samples);
    EXPECT_NE(fit.termination, Termination::SingularSystem);
    EXPECT_LE(fit.e, eval_e(p0, inst.samples));
}

TEST(NewtonOptimize, FullHessianModeConvergesNearTruth) {
    Rng rng(52);
    const auto inst = generate_instance(rng);
    ModelParams p0 = inst.truth;
    for (int i = 0; i < kParamCount; ++i)
        p0.set_component(i, p0.component(i) * (1.0 + 1e-5));
    NewtonOptions opts;
    opts.step_method = StepMethod::FullHessianGE;
    const FitResult fit = newton_optimize(p0, inst.samples, opts);
    EXPECT_LT(fit.rms, 1e-6);
}

}  // namespace
