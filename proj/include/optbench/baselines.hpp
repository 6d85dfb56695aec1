#ifndef OPTBENCH_BASELINES_HPP
#define OPTBENCH_BASELINES_HPP

#include <cstddef>
#include <cstdint>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "optbench/errors.hpp"
#include "optbench/objective.hpp"
#include "optbench/trace.hpp"

namespace optbench {

namespace detail {

inline void check_start(const Objective& h, const Point& x0) {
    if (static_cast<std::size_t>(x0.size()) != h.dim()) throw ShapeError("x0 dimension does not match objective");
    if (!all_finite(x0)) throw DomainError("x0 has non-finite coordinates");
}

inline void track_best(RunSummary& s, double grad_norm, const Point& at) {
    if (grad_norm < s.best_grad_norm) {
        s.best_grad_norm = grad_norm;
        s.best_point = at;
        s.best_kind = BestKind::iterate;
    }
}

inline Point checked_gradient(const Objective& h, const Point& at, std::size_t iter) {
    if (!all_finite(at)) throw NumericalFailure("non-finite iterate", iter);
    Point g = h.gradient(at);
    if (!all_finite(g)) throw NumericalFailure("non-finite gradient", iter);
    return g;
}

inline TraceRow make_row(std::size_t iter, double f, double grad_norm, std::uint64_t evals) {
    TraceRow row;
    row.iter = iter;
    row.f = f;
    row.grad_norm_y = grad_norm;
    row.grad_evals = evals;
    return row;
}

}  // namespace detail

/// x_{k+1} = x_k - gamma grad f(x_k), n steps. Row k is recorded at x_{k-1}.
inline RunRecord gd_run(const Objective& h, const Point& x0, double gamma, std::size_t n, bool record_path = false) {
    if (!(gamma > 0.0)) throw ParameterError("gradient descent step must be positive");
    detail::check_start(h, x0);
    RunRecord rec;
    rec.algo = "gd";
    rec.rows.reserve(n);
    Point x = x0;
    for (std::size_t k = 1; k <= n; ++k) {
        const Point g = detail::checked_gradient(h, x, k);
        const double gn = g.norm();
        detail::track_best(rec.summary, gn, x);
        if (detail::outside_region(h, x)) ++rec.summary.region_violations;
        rec.rows.push_back(detail::make_row(k, h.value(x), gn, k));
        x -= gamma * g;
        if (record_path) rec.path.push_back(x);
    }
    if (!all_finite(x)) throw NumericalFailure("non-finite iterate", n);
    rec.summary.final_point = std::move(x);
    rec.summary.total_grad_evals = n;
    if (rec.summary.best_point.size() == 0) rec.summary.best_point = x0;
    return rec;
}

/// Nesterov momentum with negative-curvature exploitation.
struct NceParams {
    double eta = 0.0;       // step size
    double theta = 1.0;     // momentum y = x + (1 - theta) v
    double gamma_nc = 0.0;  // non-convexity threshold of the safeguard test
    double s = 0.0;         // negative-curvature step radius
    bool curvature_check = true;
};

struct NceState {
    Point x;
    Point v;
};

/// Returns (x, 0) when ||v|| >= s or v = 0; otherwise the better of x +- s v/||v|| (ties to +).
inline NceState negative_curvature_exploitation(const Objective& h, const Point& x, const Point& v, double s) {
    const double vn = v.norm();
    NceState out{x, Point::Zero(x.size())};
    if (vn >= s || vn == 0.0) return out;
    const Point delta = (s / vn) * v;
    Point plus = x + delta;
    Point minus = x - delta;
    out.x = h.value(minus) < h.value(plus) ? std::move(minus) : std::move(plus);
    return out;
}

struct NceStepInfo {
    double f_y = 0.0;
    double grad_norm_y = 0.0;
    bool triggered = false;
};

/// One iteration: y = x + (1-theta) v; x+ = y - eta grad f(y); v+ = x+ - x, replaced by the
/// curvature step when f(x) <= f(y) + <grad f(y), x - y> - gamma/2 ||x - y||^2.
/// The test is skipped when y = x: a zero segment carries no curvature information.
inline NceStepInfo nce_step(const Objective& h, NceState& state, const NceParams& p, std::size_t iter) {
    const Point y = state.x + (1.0 - p.theta) * state.v;
    const Point g = detail::checked_gradient(h, y, iter);
    NceStepInfo info;
    info.f_y = h.value(y);
    info.grad_norm_y = g.norm();
    Point x_next = y - p.eta * g;
    Point v_next = x_next - state.x;
    const Point gap = state.x - y;
    if (p.curvature_check && gap.squaredNorm() > 0.0) {
        const double fx = h.value(state.x);
        if (fx <= info.f_y + g.dot(gap) - 0.5 * p.gamma_nc * gap.squaredNorm()) {
            NceState nc = negative_curvature_exploitation(h, state.x, state.v, p.s);
            x_next = std::move(nc.x);
            v_next = std::move(nc.v);
            info.triggered = true;
        }
    }
    state.x = std::move(x_next);
    state.v = std::move(v_next);
    return info;
}

inline RunRecord nce_run(const Objective& h, const Point& x0, const NceParams& p, std::size_t n,
                         bool record_path = false) {
    if (!(p.eta > 0.0) || !(p.s > 0.0) || !(p.theta > 0.0 && p.theta <= 1.0))
        throw ParameterError("NCE needs eta > 0, s > 0, 0 < theta <= 1");
    detail::check_start(h, x0);
    RunRecord rec;
    rec.algo = "nce";
    rec.rows.reserve(n);
    NceState state{x0, Point::Zero(x0.size())};
    for (std::size_t k = 1; k <= n; ++k) {
        const Point y = state.x + (1.0 - p.theta) * state.v;
        if (detail::outside_region(h, y)) ++rec.summary.region_violations;
        const NceStepInfo info = nce_step(h, state, p, k);
        detail::track_best(rec.summary, info.grad_norm_y, y);
        if (info.triggered) ++rec.summary.safeguard_triggers;
        rec.rows.push_back(detail::make_row(k, info.f_y, info.grad_norm_y, k));
        if (record_path) rec.path.push_back(state.x);
    }
    if (!all_finite(state.x)) throw NumericalFailure("non-finite iterate", n);
    rec.summary.final_point = std::move(state.x);
    rec.summary.total_grad_evals = n;
    if (rec.summary.best_point.size() == 0) rec.summary.best_point = x0;
    return rec;
}

/// Nesterov momentum restarted whenever k * sum_{t<k} ||x^{t+1} - x^t||^2 exceeds B^2.
struct RestartParams {
    double B = 1.0;
    std::size_t K = 100;  // inner iterations needed to finish
    double eta = 0.0;
    double theta = 1.0;
    std::size_t max_iters = 100000;  // total gradient budget across restarts
};

struct RestartResult {
    Point y_hat;
    RunRecord record;
    std::size_t restarts = 0;
    bool completed = false;  // reached k = K; false when the budget ran out first
    std::vector<double> statistic;  // restart statistic after each iteration, before any reset
};

/// Output y_hat averages y^0..y^{K0} of the last epoch, K0 = argmin_{floor(K/2) <= k < K} ||x^{k+1} - x^k||.
/// If the budget ends mid-epoch the same rule is applied with the epoch length reached so far.
inline RestartResult restarted_nm_run(const Objective& h, const Point& x0, const RestartParams& p,
                                      bool record_path = false) {
    if (!(p.B > 0.0) || p.K < 1 || !(p.eta > 0.0) || !(p.theta > 0.0 && p.theta <= 1.0) || p.max_iters < 1)
        throw ParameterError("restarted NM needs B > 0, K >= 1, eta > 0, 0 < theta <= 1, max_iters >= 1");
    detail::check_start(h, x0);
    RestartResult out;
    RunRecord& rec = out.record;
    rec.algo = "restarted-nm";

    Point x_prev = x0;
    Point x = x0;
    std::size_t k = 0;
    double residual_sum = 0.0;
    std::vector<Point> epoch_y;
    std::vector<double> epoch_step;
    const double b2 = p.B * p.B;
    std::size_t total = 0;
    while (k < p.K && total < p.max_iters) {
        ++total;
        Point y = x + (1.0 - p.theta) * (x - x_prev);
        const Point g = detail::checked_gradient(h, y, total);
        const double gn = g.norm();
        detail::track_best(rec.summary, gn, y);
        if (detail::outside_region(h, y)) ++rec.summary.region_violations;
        rec.rows.push_back(detail::make_row(total, h.value(y), gn, total));

        Point x_next = y - p.eta * g;
        const double step = (x_next - x).norm();
        residual_sum += step * step;
        epoch_y.push_back(std::move(y));
        epoch_step.push_back(step);
        x_prev = std::move(x);
        x = std::move(x_next);
        ++k;
        if (record_path) rec.path.push_back(x);

        const double stat = static_cast<double>(k) * residual_sum;
        out.statistic.push_back(stat);
        if (stat > b2) {
            x_prev = x;
            k = 0;
            residual_sum = 0.0;
            epoch_y.clear();
            epoch_step.clear();
            ++out.restarts;
        }
    }
    out.completed = k >= p.K;
    rec.summary.safeguard_triggers = out.restarts;

    if (k == 0) {
        out.y_hat = x;
    } else {
        std::size_t k0 = k / 2;
        for (std::size_t j = k / 2; j < k; ++j)
            if (epoch_step[j] < epoch_step[k0]) k0 = j;
        Point acc = Point::Zero(x.size());
        for (std::size_t j = 0; j <= k0; ++j) acc += epoch_y[j];
        out.y_hat = acc / static_cast<double>(k0 + 1);
    }
    rec.summary.final_point = x;
    rec.summary.total_grad_evals = total;
    if (rec.summary.best_point.size() == 0) rec.summary.best_point = x0;
    return out;
}

}  // namespace optbench

#endif  // OPTBENCH_BASELINES_HPP
