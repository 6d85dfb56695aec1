#ifndef OPTBENCH_CNA_HPP
#define OPTBENCH_CNA_HPP

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <utility>

#include "optbench/errors.hpp"
#include "optbench/objective.hpp"
#include "optbench/rng.hpp"
#include "optbench/trace.hpp"

namespace optbench {

/// Parameters of the continuized Nesterov dynamics.
///
/// Between jumps (x, z) follow the linear flow dx = eta (z - x) dt, dz = eta' (x - z) dt;
/// at each jump x takes a gradient step of size gamma and z one of size gamma'.
/// alpha = eta + eta' is the contraction rate of x - z.
struct CnaParams {
    double gamma = 0.0;
    double gamma_prime = 0.0;
    double eta = 0.0;
    double eta_prime = 0.0;
    double alpha = 0.0;
};

/// Validates and assembles a parameter tuple. alpha may be passed when it is known exactly
/// (e.g. n^{-1/7}); it must agree with eta + eta' to 1e-14.
inline CnaParams make_cna_params(double gamma, double gamma_prime, double eta, double eta_prime,
                                 std::optional<double> alpha = std::nullopt) {
    const double sum = eta + eta_prime;
    const double a = alpha.value_or(sum);
    if (!(gamma > 0.0) || !(gamma_prime > 0.0)) throw ParameterError("step sizes must be positive");
    if (!(a > 0.0)) throw ParameterError("alpha = eta + eta' must be positive");
    if (std::abs(a - sum) > 1e-14 * std::max(1.0, std::abs(a)))
        throw ParameterError("alpha must equal eta + eta'");
    if (gamma_prime < gamma) throw ParameterError("gamma' must be >= gamma");
    if (eta_prime < -eta) throw ParameterError("eta' must be >= -eta");
    return CnaParams{gamma, gamma_prime, eta, eta_prime, a};
}

/// Schedule for L-smooth objectives: gamma <= 1/L, eta = sqrt(gamma/2), gamma' = gamma + eta.
/// The mean over realizations of min_i ||grad f(y_i)||^2 then decays like 4 (f(x0) - f*) / (gamma k).
inline CnaParams params_smooth(double lipschitz, std::optional<double> gamma, double eta_prime) {
    if (!(lipschitz > 0.0)) throw ParameterError("L must be positive");
    const double g = gamma.value_or(1.0 / lipschitz);
    if (!(g > 0.0)) throw ParameterError("gamma must be positive");
    if (g > 1.0 / lipschitz) throw ParameterError("gamma must be <= 1/L");
    const double eta = std::sqrt(g / 2.0);
    if (!(eta_prime > -eta)) throw ParameterError("eta' must be > -sqrt(gamma/2)");
    return make_cna_params(g, g + eta, eta, eta_prime);
}

/// Schedule for objectives with Lipschitz gradient and Hessian, tuned to a horizon of n steps:
/// gamma = 1/L, eta = sqrt(gamma/2), alpha = n^{-1/7}, eta' = alpha - eta.
inline CnaParams params_hessian(double lipschitz, std::size_t n) {
    if (!(lipschitz > 0.0)) throw ParameterError("L must be positive");
    if (n < 8) throw ParameterError("horizon n must be >= 8");
    const double g = 1.0 / lipschitz;
    const double eta = std::sqrt(g / 2.0);
    const double alpha = std::pow(static_cast<double>(n), -1.0 / 7.0);
    return make_cna_params(g, g + eta, eta, alpha - eta, alpha);
}

/// Schedule under the strong growth condition with constant rho:
/// gamma = 1/(rho L), eta = sqrt(gamma/(2 rho)), gamma' = gamma + eta.
inline CnaParams params_sgc(double lipschitz, double rho, double eta_prime) {
    if (!(rho >= 1.0)) throw DomainError("rho must be >= 1");
    if (!(lipschitz > 0.0)) throw ParameterError("L must be positive");
    const double g = 1.0 / (rho * lipschitz);
    const double eta = std::sqrt(g / (2.0 * rho));
    if (!(eta_prime > -eta)) throw ParameterError("eta' must be > -sqrt(gamma/(2 rho))");
    return make_cna_params(g, g + eta, eta, eta_prime);
}

namespace detail {

// 1 - e^{-x} via expm1: accurate for tiny x where the naive form cancels.
inline double one_minus_exp_neg(double x) { return -std::expm1(-x); }

}  // namespace detail

/// a = (eta/alpha)(1 - e^{-alpha tau}); y = x + a (z - x).
inline double momentum_coefficient(const CnaParams& p, double tau) {
    return p.eta / p.alpha * detail::one_minus_exp_neg(p.alpha * tau);
}

/// c = (eta'/alpha)(1 - e^{-alpha tau}); z flows to z + c (x - z).
/// Equivalent to the beta (y - z) form but finite when eta' + eta e^{-alpha tau} = 0.
inline double z_flow_coefficient(const CnaParams& p, double tau) {
    return p.eta_prime / p.alpha * detail::one_minus_exp_neg(p.alpha * tau);
}

/// Exact solution of the inter-jump linear flow after time tau.
inline std::pair<Point, Point> ode_flow_closed_form(const Point& x, const Point& z, const CnaParams& p,
                                                    double tau) {
    const Point diff = z - x;
    return {x + momentum_coefficient(p, tau) * diff, z - z_flow_coefficient(p, tau) * diff};
}

/// Streaming state of the Poisson-weighted average xbar_k = sum_i lambda_{i,k} y_i with
/// lambda_{i,k} proportional to e^{alpha T_i}. Weights are stored rescaled by e^{-alpha T_k},
/// so s_prime = sum_{j<=k} e^{alpha (T_j - T_k)} lies in [1, k].
struct AvgState {
    double s_prime = 0.0;
    Point xbar;
    std::size_t k = 0;
};

/// Adds y observed one increment tau after the previous point.
inline AvgState streaming_average_update(AvgState avg, double tau, const Point& y, double alpha) {
    if (avg.k == 0) {
        avg.s_prime = 1.0;
        avg.xbar = y;
    } else {
        const double decayed = std::exp(-alpha * tau) * avg.s_prime;
        avg.s_prime = 1.0 + decayed;
        avg.xbar = (decayed * avg.xbar + y) / avg.s_prime;
    }
    ++avg.k;
    return avg;
}

struct CnaState {
    Point x_tilde;
    Point z_tilde;
    AvgState avg;
    double best_grad_norm = std::numeric_limits<double>::infinity();
    Point best_point;
    BestKind best_kind = BestKind::ytilde;
    std::size_t k = 0;

    /// x_tilde = z_tilde = x0, empty average.
    static CnaState start(const Point& x0) {
        CnaState s;
        s.x_tilde = x0;
        s.z_tilde = x0;
        s.best_point = x0;
        return s;
    }
};

struct StepInfo {
    Point y;
    double grad_norm_y = 0.0;
    std::optional<double> grad_norm_xbar;
    std::uint64_t grad_evals = 0;  // gradients used by this step
};

/// One jump of the continuized algorithm, in place:
///   y  = x + a (z - x)
///   x+ = y - gamma g
///   z+ = z + c (x - z) - gamma' g,   g = grad f(y)
/// then folds y into the weighted average. With eval_xbar, also evaluates grad f(xbar)
/// (one extra, counted gradient). A noise seed switches to the stochastic oracle.
inline StepInfo step(CnaState& state, const CnaParams& p, double tau, const Objective& h, bool eval_xbar,
                     std::optional<Seed> noise_seed = std::nullopt) {
    if (static_cast<std::size_t>(state.x_tilde.size()) != h.dim() ||
        static_cast<std::size_t>(state.z_tilde.size()) != h.dim())
        throw ShapeError("state dimension does not match objective");
    const std::size_t iter = state.k + 1;

    const double a = momentum_coefficient(p, tau);
    const double c = z_flow_coefficient(p, tau);
    const Point diff = state.z_tilde - state.x_tilde;

    StepInfo info;
    info.y = state.x_tilde + a * diff;
    if (!all_finite(info.y)) throw NumericalFailure("non-finite momentum point", iter);

    const Point g = noise_seed ? h.stochastic_gradient(info.y, *noise_seed) : h.gradient(info.y);
    info.grad_evals = 1;
    if (!all_finite(g)) throw NumericalFailure("non-finite gradient", iter);

    state.x_tilde = info.y - p.gamma * g;
    state.z_tilde = state.z_tilde - c * diff - p.gamma_prime * g;
    state.avg = streaming_average_update(std::move(state.avg), tau, info.y, p.alpha);

    info.grad_norm_y = g.norm();
    if (info.grad_norm_y < state.best_grad_norm) {
        state.best_grad_norm = info.grad_norm_y;
        state.best_point = info.y;
        state.best_kind = BestKind::ytilde;
    }
    if (eval_xbar) {
        const Point gx = h.gradient(state.avg.xbar);
        ++info.grad_evals;
        if (!all_finite(gx)) throw NumericalFailure("non-finite gradient at average", iter);
        info.grad_norm_xbar = gx.norm();
        if (*info.grad_norm_xbar < state.best_grad_norm) {
            state.best_grad_norm = *info.grad_norm_xbar;
            state.best_point = state.avg.xbar;
            state.best_kind = BestKind::xbar;
        }
    }
    state.k = iter;
    return info;
}

/// When the gradient at the running average is evaluated during a run.
struct EvalSchedule {
    enum class Kind { never, every, stride, final };
    Kind kind = Kind::never;
    std::size_t stride = 1;

    static EvalSchedule never() { return {Kind::never, 1}; }
    static EvalSchedule every() { return {Kind::every, 1}; }
    static EvalSchedule final() { return {Kind::final, 1}; }
    static EvalSchedule every_m(std::size_t m) { return {Kind::stride, m == 0 ? 1 : m}; }
    /// stride(ceil(n/100))
    static EvalSchedule default_for(std::size_t n) { return every_m((n + 99) / 100); }

    /// iter is 1-based; the last iteration is always evaluated for stride and final.
    bool due(std::size_t iter, std::size_t n) const {
        switch (kind) {
            case Kind::never: return false;
            case Kind::every: return true;
            case Kind::stride: return iter % stride == 0 || iter == n;
            case Kind::final: return iter == n;
        }
        return false;
    }
};

/// Full run of n jumps from x_tilde = z_tilde = x0. Jump times come from spawn_stream(seed, 0);
/// when h has a stochastic oracle, per-step noise seeds come from spawn_stream(seed, 1).
inline RunRecord run(const Objective& h, const Point& x0, std::size_t n, Seed seed, const CnaParams& p,
                     EvalSchedule schedule, bool record_path = false) {
    if (n == 0) throw EmptyScheduleError("run needs n >= 1");
    if (static_cast<std::size_t>(x0.size()) != h.dim()) throw ShapeError("x0 dimension does not match objective");
    const JumpSchedule jumps = sample_increments(spawn_stream(seed, 0), n);
    const Seed noise_root = spawn_stream(seed, 1);

    RunRecord rec;
    rec.algo = "cna";
    rec.seed = seed;
    rec.rows.reserve(n);
    if (record_path) rec.path.reserve(n);

    CnaState state = CnaState::start(x0);
    std::uint64_t evals = 0;
    std::uint64_t xbar_evals = 0;
    for (std::size_t k = 0; k < n; ++k) {
        const double tau = jumps.increment(k);
        std::optional<Seed> noise;
        if (h.has_stochastic_gradient()) noise = spawn_stream(noise_root, k);
        const bool at_xbar = schedule.due(k + 1, n);
        StepInfo info = step(state, p, tau, h, at_xbar, noise);
        evals += info.grad_evals;
        if (at_xbar) ++xbar_evals;
        if (detail::outside_region(h, info.y)) ++rec.summary.region_violations;

        TraceRow row;
        row.iter = k + 1;
        row.time = jumps.time(k);
        row.tau = tau;
        row.f = h.value(info.y);
        row.grad_norm_y = info.grad_norm_y;
        row.grad_norm_xbar = info.grad_norm_xbar;
        row.grad_evals = evals;
        rec.rows.push_back(row);
        if (record_path) rec.path.push_back(state.x_tilde);
    }

    rec.summary.best_kind = state.best_kind;
    rec.summary.best_grad_norm = state.best_grad_norm;
    rec.summary.best_point = std::move(state.best_point);
    rec.summary.final_point = std::move(state.x_tilde);
    rec.summary.total_grad_evals = evals;
    rec.summary.xbar_grad_evals = xbar_evals;
    return rec;
}

}  // namespace optbench

#endif  // OPTBENCH_CNA_HPP
