#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "optbench/baselines.hpp"

using namespace optbench;

namespace {

Objective concave_1d() {
    return Objective(1, [](const Point& x) { return -0.5 * x.squaredNorm(); }, [](const Point& x) -> Point { return -x; });
}

Objective flat(std::size_t d) {
    return Objective(d, [](const Point&) { return 2.0; }, [](const Point& x) -> Point { return Point::Zero(x.size()); });
}

// Plain Nesterov momentum, y = x + (1 - theta)(x - x_prev), no restarts.
std::vector<Point> nesterov_path(const Objective& h, Point x, double eta, double theta, std::size_t n) {
    std::vector<Point> path;
    Point prev = x;
    for (std::size_t k = 0; k < n; ++k) {
        const Point y = x + (1.0 - theta) * (x - prev);
        prev = x;
        x = y - eta * h.gradient(y);
        path.push_back(x);
    }
    return path;
}

double rel(const Point& a, const Point& b) { return (a - b).norm() / std::max(1e-300, b.norm()); }

}  // namespace

TEST(GradientDescent, ZeroGradientStaysPut) {
    const RunRecord r = gd_run(flat(3), Eigen::Vector3d(1, 2, 3), 0.5, 10);
    EXPECT_EQ(r.summary.final_point, Point(Eigen::Vector3d(1, 2, 3)));
}

TEST(GradientDescent, OneStepMinimizer) {
    const Objective f = quadratic_objective(Eigen::VectorXd::Ones(1));
    const RunRecord r = gd_run(f, Point::Ones(1), 1.0, 1, true);
    EXPECT_EQ(r.path[0](0), 0.0);
}

TEST(GradientDescent, GeometricContraction) {
    const Objective f = quadratic_objective(Eigen::VectorXd::Constant(1, 2.0));
    const RunRecord r = gd_run(f, Point::Ones(1), 0.25, 30, true);
    for (std::size_t k = 0; k < 30; ++k) EXPECT_DOUBLE_EQ(r.path[k](0), std::pow(0.5, double(k + 1)));
    EXPECT_EQ(r.rows.size(), 30u);
    EXPECT_EQ(r.rows[0].f, f.value(Point::Ones(1)));
    EXPECT_EQ(r.summary.total_grad_evals, 30u);
}

TEST(GradientDescent, RejectsNonPositiveStep) {
    EXPECT_THROW(gd_run(flat(1), Point::Ones(1), 0.0, 1), ParameterError);
}

TEST(Nce, ThetaOneReducesToGradientDescent) {
    Rng rng(Seed{1});
    Eigen::VectorXd lambda(6);
    for (auto& l : lambda) l = 0.5 + rng.uniform();
    const Objective f = quadratic_objective(lambda);
    const Point x0 = Point::Ones(6);
    const RunRecord gd = gd_run(f, x0, 0.4, 100, true);
    for (bool check : {false, true}) {
        NceParams p{0.4, 1.0, 0.5, 0.01, check};
        const RunRecord nce = nce_run(f, x0, p, 100, true);
        for (std::size_t k = 0; k < 100; ++k) EXPECT_LE((nce.path[k] - gd.path[k]).norm(), 1e-12);
        EXPECT_EQ(nce.summary.safeguard_triggers, 0u);
    }
}

TEST(Nce, TriggeredWithLargeVelocityZeroesMomentum) {
    const Objective f = concave_1d();
    NceState s{Point::Constant(1, 0.1), Point::Constant(1, 0.2)};
    NceParams p{0.1, 0.5, 0.5, 0.05, true};
    const NceStepInfo info = nce_step(f, s, p, 1);
    EXPECT_TRUE(info.triggered);
    EXPECT_DOUBLE_EQ(s.x(0), 0.1);
    EXPECT_EQ(s.v(0), 0.0);
}

TEST(Nce, TieBreakPrefersPlus) {
    const Objective f = concave_1d();
    NceState s{Point::Zero(1), Point::Constant(1, 1e-3)};
    NceParams p{0.1, 0.5, 0.5, 0.05, true};
    EXPECT_TRUE(nce_step(f, s, p, 1).triggered);
    EXPECT_DOUBLE_EQ(s.x(0), 0.05);
    EXPECT_EQ(s.v(0), 0.0);

    const NceState neg = negative_curvature_exploitation(f, Point::Zero(1), Point::Constant(1, -1e-3), 0.05);
    EXPECT_DOUBLE_EQ(neg.x(0), -0.05);
    const NceState zero = negative_curvature_exploitation(f, Point::Ones(1), Point::Zero(1), 0.05);
    EXPECT_EQ(zero.x(0), 1.0);
}

TEST(Nce, TriggeredStepNeverIncreasesValue) {
    // f = x1^2 - x2^2 / 2 + x1 x2 / 4: indefinite
    const Objective f(2,
                      [](const Point& x) { return x(0) * x(0) - 0.5 * x(1) * x(1) + 0.25 * x(0) * x(1); },
                      [](const Point& x) -> Point { return Eigen::Vector2d(2 * x(0) + 0.25 * x(1), -x(1) + 0.25 * x(0)); });
    Rng rng(Seed{3});
    int triggered = 0;
    for (int t = 0; t < 500; ++t) {
        NceState s{Eigen::Vector2d(rng.normal(), rng.normal()), Eigen::Vector2d(0.1 * rng.normal(), 0.1 * rng.normal())};
        const double before = f.value(s.x);
        NceParams p{0.1, 0.3, 0.2, 0.1, true};
        if (nce_step(f, s, p, 1).triggered) {
            ++triggered;
            EXPECT_LE(f.value(s.x), before);
            EXPECT_EQ(s.v.norm(), 0.0);
        }
    }
    EXPECT_GT(triggered, 10);
}

TEST(Restart, TinyThresholdIsGradientDescent) {
    const Objective f = quadratic_objective(Eigen::Vector3d(0.5, 1.0, 2.0));
    const Point x0 = Eigen::Vector3d(1, -1, 0.5);
    RestartParams p{1e-16, 1000, 0.3, 0.1, 100};
    const RestartResult r = restarted_nm_run(f, x0, p, true);
    const RunRecord gd = gd_run(f, x0, 0.3, 100, true);
    ASSERT_EQ(r.record.path.size(), 100u);
    for (std::size_t k = 0; k < 100; ++k) EXPECT_LE(rel(r.record.path[k], gd.path[k]), 1e-10);
    EXPECT_EQ(r.restarts, 100u);
    EXPECT_FALSE(r.completed);
}

TEST(Restart, HugeThresholdIsPlainNesterov) {
    const Objective f = quadratic_objective(Eigen::Vector3d(0.5, 1.0, 2.0));
    const Point x0 = Eigen::Vector3d(1, -1, 0.5);
    RestartParams p{1e16, 100, 0.3, 0.1, 1000};
    const RestartResult r = restarted_nm_run(f, x0, p, true);
    const auto want = nesterov_path(f, x0, 0.3, 0.1, 100);
    for (std::size_t k = 0; k < 100; ++k) EXPECT_LE(rel(r.record.path[k], want[k]), 1e-10);
    EXPECT_EQ(r.restarts, 0u);
    EXPECT_TRUE(r.completed);
}

TEST(Restart, StatisticMatchesRecomputation) {
    const Objective f = quadratic_objective(Eigen::Vector2d(1.0, 3.0));
    RestartParams p{1e16, 50, 0.2, 0.2, 50};
    const RestartResult r = restarted_nm_run(f, Eigen::Vector2d(2, 1), p, true);
    for (std::size_t k = 1; k <= 50; ++k) {
        double sum = 0.0;
        Point a = Eigen::Vector2d(2, 1);
        for (std::size_t t = 0; t < k; ++t) {
            sum += (r.record.path[t] - a).squaredNorm();
            a = r.record.path[t];
        }
        const double want = double(k) * sum;
        EXPECT_LE(std::abs(r.statistic[k - 1] - want), 1e-10 * want);
    }
}

TEST(Restart, ZeroGradientOutputsStart) {
    RestartParams p{1.0, 20, 0.1, 0.5, 100};
    const RestartResult r = restarted_nm_run(flat(2), Eigen::Vector2d(3, 4), p);
    EXPECT_EQ(r.y_hat, Point(Eigen::Vector2d(3, 4)));
    EXPECT_EQ(r.restarts, 0u);
    EXPECT_TRUE(r.completed);
}

TEST(Restart, OutputAveragesFirstHalfArgmin) {
    const Objective f = quadratic_objective(Eigen::VectorXd::Ones(1));
    RestartParams p{1e16, 6, 0.5, 1.0, 100};
    const RestartResult r = restarted_nm_run(f, Point::Ones(1), p, true);
    // theta = 1: y^k = x^k = 0.5^k; steps shrink, so K0 = K - 1 and y_hat averages y^0..y^5
    double avg = 0.0;
    for (int k = 0; k < 6; ++k) avg += std::pow(0.5, k) / 6.0;
    EXPECT_DOUBLE_EQ(r.y_hat(0), avg);
}

TEST(Restart, RejectsBadParameters) {
    EXPECT_THROW(restarted_nm_run(flat(1), Point::Ones(1), RestartParams{0.0, 5, 0.1, 0.5, 10}), ParameterError);
    EXPECT_THROW(restarted_nm_run(flat(1), Point::Ones(1), RestartParams{1.0, 5, 0.1, 0.0, 10}), ParameterError);
}
