#include "pinto/parareal.hpp"

#include "oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <set>

using namespace pinto;
using namespace pinto::parareal;

namespace {

constexpr double lambda = -0.7;
constexpr double dT = 0.5;
constexpr int slices = 8;

double fine_scalar(double u)
{
    const double h = dT / 100.0;
    for (int i = 0; i < 100; ++i) u += h * lambda * u;
    return u;
}

double coarse_scalar(double u) { return u + dT * lambda * u; }

Problem<double, double> scalar_problem()
{
    Problem<double, double> p;
    p.fine = [](const double& u, int) { return fine_scalar(u); };
    p.coarse = [](const double& u, int) { return coarse_scalar(u); };
    p.add_fine = [](const double& a, const double& b, const double& c) { return a + (b - c); };
    p.add_coarse = p.add_fine;
    p.increment = [](const double& a, const double& b) { return std::abs(a - b) / std::abs(b); };
    return p;
}

SliceGrid grid() { return {0.0, dT, slices}; }

Config config(int k_max, double eps = 0.0)
{
    Config c;
    c.mode = Mode::classical;
    c.max_iterations = k_max;
    c.epsilon = eps;
    return c;
}

// Two-component fine state, scalar coarse state.
using Pair2 = std::array<double, 2>;

Problem<Pair2, double> micro_macro_problem()
{
    Problem<Pair2, double> p;
    p.fine = [](const Pair2& u, int) { return Pair2{fine_scalar(u[0]), fine_scalar(u[1]) * 0.999}; };
    p.coarse = [](const double& u, int) { return coarse_scalar(u); };
    p.lift = [](const double& g) { return Pair2{g, g}; };
    p.restrict = [](const Pair2& u) { return 0.5 * (u[0] + u[1]); };
    p.add_fine = [](const Pair2& a, const Pair2& b, const Pair2& c) { return Pair2{a[0] + (b[0] - c[0]), a[1] + (b[1] - c[1])}; };
    p.add_coarse = [](const double& a, const double& b, const double& c) { return a + (b - c); };
    p.increment = [](const Pair2& a, const Pair2& b) {
        return std::max(std::abs(a[0] - b[0]), std::abs(a[1] - b[1])) / std::max(std::abs(b[0]), std::abs(b[1]));
    };
    return p;
}

}  // namespace

TEST(Parareal, SpeedupEstimate)
{
    EXPECT_EQ(speedup_estimate(3.6, 1, 10), 1.8);
    EXPECT_EQ(speedup_estimate(3.6, 2, 10), 1.2);
    EXPECT_EQ(speedup_estimate(3.6, 3, 10), 0.9);
    // slice-limited regime
    EXPECT_EQ(speedup_estimate(100.0, 4, 8), 2.0);
    EXPECT_THROW(speedup_estimate(0.0, 1, 10), Error);
    EXPECT_THROW(speedup_estimate(3.6, 0, 10), Error);
}

TEST(Parareal, ConfigValidation)
{
    Config c = config(9);
    EXPECT_THROW(c.validate(grid()), Error);
    c.max_iterations = 0;
    EXPECT_THROW(c.validate(grid()), Error);
    c.max_iterations = 3;
    c.epsilon = -1.0;
    EXPECT_THROW(c.validate(grid()), Error);
    EXPECT_THROW((SliceGrid{0.0, 0.0, 3}).validate(), Error);
    EXPECT_THROW((SliceGrid{0.0, 1.0, 0}).validate(), Error);
}

TEST(Parareal, ClassicalMatchesHandRolledRecursion)
{
    const auto expected = oracle::scalar_parareal(1.0, slices, slices, fine_scalar, coarse_scalar);
    const auto run = parareal::run<double, double>(1.0, grid(), config(slices), scalar_problem(), {}, true);
    ASSERT_EQ(run.history.size(), static_cast<std::size_t>(slices + 1));
    for (int k = 0; k <= slices; ++k)
        for (int n = 0; n <= slices; ++n) EXPECT_EQ(run.history[k].U[n], expected[k][n]) << "k " << k << " n " << n;
    EXPECT_EQ(run.outcome, Outcome::finite_termination);
    EXPECT_EQ(run.iterations_done, slices);
}

TEST(Parareal, ExactSlicesAfterEachIteration)
{
    std::vector<double> serial{1.0};
    for (int n = 1; n <= slices; ++n) serial.push_back(fine_scalar(serial.back()));
    const auto run = parareal::run<double, double>(1.0, grid(), config(slices), scalar_problem(), {}, true);
    for (int k = 1; k <= slices; ++k)
        for (int n = 1; n <= k; ++n) EXPECT_EQ(run.history[k].U[n], serial[n]);
}

TEST(Parareal, MicroMacroFiniteTermination)
{
    Config c = config(slices);
    c.mode = Mode::micro_macro;
    std::vector<Pair2> serial{{1.0, 2.0}};
    const auto p = micro_macro_problem();
    for (int n = 1; n <= slices; ++n) serial.push_back(p.fine(serial.back(), n));
    const auto run = parareal::run<Pair2, double>({1.0, 2.0}, grid(), c, p, {}, true);
    for (int k = 1; k <= slices; ++k)
        for (int n = 1; n <= k; ++n) EXPECT_EQ(run.history[k].U[n], serial[n]) << "k " << k << " n " << n;
}

TEST(Parareal, MicroMacroCorrectionOrder)
{
    const auto p = micro_macro_problem();
    const Pair2 f{3.0, 5.0};
    const Pair2 u = correct_micro_macro<Pair2, double>(10.0, f, 9.5, p, false);
    // R(F) = 4, tilde = 4.5; U = F + (L(4.5) - L(4))
    EXPECT_EQ(u[0], 3.5);
    EXPECT_EQ(u[1], 5.5);
    // equal coarse values give F back bitwise
    EXPECT_EQ((correct_micro_macro<Pair2, double>(0.1, f, 0.1, p, false)), f);
}

TEST(Parareal, InitialSweepIsSerialCoarse)
{
    Config c = config(1);
    c.mode = Mode::micro_macro;
    const auto it = initial_coarse_sweep<Pair2, double>({1.0, 3.0}, grid(), micro_macro_problem(), Mode::micro_macro);
    double g = 2.0;
    for (int n = 1; n <= slices; ++n) {
        g = coarse_scalar(g);
        EXPECT_EQ(*it.G[n], g);
        EXPECT_EQ(it.U[n], (Pair2{g, g}));
    }
}

TEST(Parareal, StopsOnTolerance)
{
    const auto run = parareal::run<double, double>(1.0, grid(), config(slices, 1e-3), scalar_problem());
    EXPECT_EQ(run.outcome, Outcome::converged);
    EXPECT_LT(run.iterations_done, slices);
    EXPECT_LE(run.iterations.back().increment, 1e-3);
    EXPECT_GT(run.iterations[run.iterations_done - 1].increment, 1e-3);
}

TEST(Parareal, StopsOnIterationLimit)
{
    const auto run = parareal::run<double, double>(1.0, grid(), config(2), scalar_problem());
    EXPECT_EQ(run.outcome, Outcome::max_iterations);
    EXPECT_EQ(run.iterations_done, 2);
    EXPECT_EQ(run.iterations.size(), 3u);
}

TEST(Parareal, ObserverSeesEveryIteration)
{
    std::vector<int> seen;
    parareal::run<double, double>(1.0, grid(), config(3), scalar_problem(),
                                  [&](const Iteration& rec, const Iterate<double, double>& it) {
                                      seen.push_back(rec.k);
                                      EXPECT_EQ(it.U.size(), static_cast<std::size_t>(slices + 1));
                                      for (int n = 1; n < rec.k; ++n)
                                          EXPECT_EQ(rec.status[n - 1], SliceStatus::converged);
                                  });
    EXPECT_EQ(seen, (std::vector<int>{0, 1, 2, 3}));
}

TEST(Parareal, SerialAndParallelSweepsAgree)
{
    Config a = config(slices);
    a.parallel = false;
    Config b = config(slices);
    b.workers = 4;
    const auto ra = parareal::run<double, double>(1.0, grid(), a, scalar_problem(), {}, true);
    const auto rb = parareal::run<double, double>(1.0, grid(), b, scalar_problem(), {}, true);
    for (int k = 0; k <= slices; ++k) EXPECT_EQ(ra.history[k].U, rb.history[k].U);
}

namespace {

Problem<double, double> failing_problem(std::set<std::pair<int, int>> fail, const int* iteration)
{
    auto p = scalar_problem();
    p.fine = [fail, iteration](const double& u, int n) {
        if (fail.count({*iteration, n})) throw std::runtime_error("injected");
        return fine_scalar(u);
    };
    return p;
}

}  // namespace

TEST(Parareal, SkipUpdateKeepsPreviousIterate)
{
    int iteration = 0;
    auto p = failing_problem({{1, 3}}, &iteration);
    Config c = config(slices);
    c.failure = FailurePolicy::skip_update;
    const auto run = parareal::run<double, double>(
        1.0, grid(), c, p, [&](const Iteration& rec, const Iterate<double, double>&) { iteration = rec.k + 1; }, true);
    const auto& u0 = run.history[0].U;
    const auto& u1 = run.history[1].U;
    EXPECT_EQ(u1[3], u0[3]);
    EXPECT_EQ(run.iterations[1].status[2], SliceStatus::fine_failed);
    // slices before the failure are untouched by it
    const auto clean = oracle::scalar_parareal(1.0, slices, 1, fine_scalar, coarse_scalar);
    EXPECT_EQ(u1[1], clean[1][1]);
    EXPECT_EQ(u1[2], clean[1][2]);
    // slices after it update from the kept value
    for (int n = 4; n <= slices; ++n) {
        EXPECT_EQ(u1[n], fine_scalar(u0[n - 1]) + (coarse_scalar(u1[n - 1]) - coarse_scalar(u0[n - 1])));
        EXPECT_NE(u1[n], u0[n]);
    }
}

TEST(Parareal, AbortPolicyNamesSliceAndIteration)
{
    int iteration = 0;
    auto p = failing_problem({{2, 5}}, &iteration);
    try {
        parareal::run<double, double>(1.0, grid(), config(slices), p,
                                      [&](const Iteration& rec, const Iterate<double, double>&) { iteration = rec.k + 1; });
        FAIL() << "expected a failure";
    } catch (const Failure& f) {
        EXPECT_EQ(f.iteration(), 2);
        EXPECT_EQ(f.slice(), 5);
        EXPECT_EQ(f.phase(), "fine");
    }
}

TEST(Parareal, CoarseFailureReinitialises)
{
    int calls = 0;
    auto p = scalar_problem();
    p.coarse = [&calls](const double& u, int n) {
        // fail the first re-solve of slice 4 after the initial sweep
        if (n == 4 && ++calls == 2) throw std::runtime_error("coarse blow-up");
        return coarse_scalar(u);
    };
    Config c = config(3);
    c.failure = FailurePolicy::reinit_from_previous;
    const auto run = parareal::run<double, double>(1.0, grid(), c, p, {}, true);
    EXPECT_EQ(run.iterations[1].status[3], SliceStatus::coarse_failed);
    EXPECT_EQ(*run.history[1].G[4], *run.history[0].G[4]);
    EXPECT_FALSE(run.iterations[1].messages.empty());
}

TEST(Parareal, CoarseFailureInInitialSweepAborts)
{
    auto p = scalar_problem();
    p.coarse = [](const double&, int n) -> double {
        if (n == 2) throw std::runtime_error("bad");
        return 0.0;
    };
    Config c = config(3);
    c.failure = FailurePolicy::skip_update;
    EXPECT_THROW((parareal::run<double, double>(1.0, grid(), c, p)), Failure);
}

TEST(Parareal, ClampAfterUpdate)
{
    auto p = scalar_problem();
    int clamps = 0;
    p.clamp_fine = [&clamps](double& u) {
        ++clamps;
        u = std::min(u, 0.5);
    };
    Config c = config(2);
    c.clamp = ClampPolicy::after_update;
    const auto run = parareal::run<double, double>(1.0, grid(), c, p);
    EXPECT_GT(clamps, 0);
    for (int n = 1; n <= slices; ++n) EXPECT_LE(run.U[n], 0.5);
}

TEST(Parareal, StoppingMeasure)
{
    const std::vector<double> a{1.0, 2.0, 4.0}, b{1.0, 2.2, 4.0};
    const std::function<double(const double&, const double&)> inc = [](const double& x, const double& y) {
        return std::abs(x - y);
    };
    EXPECT_NEAR(stopping_measure(a, b, inc), 0.2, 1e-15);
    EXPECT_TRUE(stopping_check(0.01, 0.01));
    EXPECT_FALSE(stopping_check(0.011, 0.01));
}
