#ifndef OPTBENCH_OBJECTIVE_HPP
#define OPTBENCH_OBJECTIVE_HPP

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <utility>

#include <Eigen/Dense>

#include "optbench/errors.hpp"
#include "optbench/rng.hpp"

namespace optbench {

using Point = Eigen::VectorXd;

inline bool all_finite(const Point& x) { return x.allFinite(); }

/// Known regularity constants of an objective. All optional.
struct ObjectiveTraits {
    std::optional<double> lipschitz_grad;   // L
    std::optional<double> lipschitz_hess;   // L2
    std::optional<double> sgc_rho;          // strong growth constant of the stochastic oracle
    std::optional<double> optimum_value;    // f*
    // Squared Frobenius radius of the region where the constants above are valid.
    std::optional<double> region_radius_sq;
};

/// Type-erased objective f: R^d -> R with gradient and optional stochastic gradient.
///
/// Copies share one atomic gradient counter. Use with_fresh_counter() to get a replica that
/// counts on its own (one per Monte Carlo trial).
class Objective {
public:
    using ValueFn = std::function<double(const Point&)>;
    using GradFn = std::function<Point(const Point&)>;
    using StochGradFn = std::function<Point(const Point&, Seed)>;

    Objective(std::size_t dim, ValueFn value, GradFn grad, ObjectiveTraits traits = {})
        : dim_(dim),
          value_(std::move(value)),
          grad_(std::move(grad)),
          traits_(traits),
          grad_evals_(std::make_shared<std::atomic<std::uint64_t>>(0)) {}

    Objective(std::size_t dim, ValueFn value, GradFn grad, StochGradFn stoch_grad, ObjectiveTraits traits)
        : Objective(dim, std::move(value), std::move(grad), traits) {
        if (!traits_.sgc_rho || *traits_.sgc_rho < 1.0)
            throw DomainError("stochastic oracle requires a strong growth constant rho >= 1");
        stoch_grad_ = std::move(stoch_grad);
    }

    std::size_t dim() const noexcept { return dim_; }
    const ObjectiveTraits& traits() const noexcept { return traits_; }
    bool has_stochastic_gradient() const noexcept { return static_cast<bool>(stoch_grad_); }

    double value(const Point& x) const {
        check(x);
        return value_(x);
    }

    Point gradient(const Point& x) const {
        check(x);
        grad_evals_->fetch_add(1, std::memory_order_relaxed);
        return grad_(x);
    }

    Point stochastic_gradient(const Point& x, Seed seed) const {
        if (!stoch_grad_) throw DomainError("objective has no stochastic gradient oracle");
        check(x);
        grad_evals_->fetch_add(1, std::memory_order_relaxed);
        return stoch_grad_(x, seed);
    }

    std::uint64_t grad_evals() const noexcept { return grad_evals_->load(std::memory_order_relaxed); }
    void reset_counter() const noexcept { grad_evals_->store(0, std::memory_order_relaxed); }

    Objective with_fresh_counter() const {
        Objective copy = *this;
        copy.grad_evals_ = std::make_shared<std::atomic<std::uint64_t>>(0);
        return copy;
    }

    // Raw callables, for building derived objectives without double counting.
    const ValueFn& value_fn() const noexcept { return value_; }
    const GradFn& grad_fn() const noexcept { return grad_; }

private:
    void check(const Point& x) const {
        if (static_cast<std::size_t>(x.size()) != dim_)
            throw ShapeError("point has dimension " + std::to_string(x.size()) + ", objective expects " +
                             std::to_string(dim_));
        if (!all_finite(x)) throw DomainError("point has non-finite coordinates");
    }

    std::size_t dim_;
    ValueFn value_;
    GradFn grad_;
    StochGradFn stoch_grad_;
    ObjectiveTraits traits_;
    std::shared_ptr<std::atomic<std::uint64_t>> grad_evals_;
};

/// f(x) = 1/2 sum_i lambda_i x_i^2.  L = max lambda, f* = 0.
inline Objective quadratic_objective(const Eigen::VectorXd& eigenvalues) {
    if (eigenvalues.size() == 0) throw DomainError("quadratic needs at least one eigenvalue");
    if (!eigenvalues.allFinite() || (eigenvalues.array() <= 0.0).any())
        throw DomainError("quadratic eigenvalues must be positive and finite");
    ObjectiveTraits traits;
    traits.lipschitz_grad = eigenvalues.maxCoeff();
    traits.lipschitz_hess = 0.0;
    traits.optimum_value = 0.0;
    return Objective(
        static_cast<std::size_t>(eigenvalues.size()),
        [lambda = eigenvalues](const Point& x) { return 0.5 * (lambda.array() * x.array().square()).sum(); },
        [lambda = eigenvalues](const Point& x) -> Point { return lambda.cwiseProduct(x); },
        traits);
}

/// Symmetric low-rank factorization target: M* is d x d with a symmetric Gaussian r x r
/// leading block and zeros elsewhere. gamma_cap is sigma_max(M*).
struct MatFacProblem {
    std::size_t d = 0;
    std::size_t r = 0;
    Eigen::MatrixXd mstar;
    double gamma_cap = 0.0;
    // min f: ||M*||_F^2 minus the squares of the r largest positive eigenvalues
    double optimum_value = 0.0;
};

/// Largest singular value of a symmetric matrix by power iteration on M^T M.
inline double sigma_max_power_iteration(const Eigen::MatrixXd& m, Rng& rng, double tol = 1e-10,
                                        int max_iters = 10000) {
    const auto n = m.rows();
    if (n == 0) return 0.0;
    Eigen::VectorXd v(n);
    for (Eigen::Index i = 0; i < n; ++i) v(i) = rng.normal();
    if (v.norm() == 0.0) v.setOnes();
    v.normalize();
    double sigma = 0.0;
    for (int it = 0; it < max_iters; ++it) {
        Eigen::VectorXd w = m.transpose() * (m * v);
        const double wn = w.norm();
        if (wn == 0.0) return 0.0;
        const double next = std::sqrt(v.dot(w));  // Rayleigh quotient of M^T M
        v = w / wn;
        if (std::abs(next - sigma) <= tol * next) return next;
        sigma = next;
    }
    return sigma;
}

inline MatFacProblem build_mstar(Seed seed, std::size_t d, std::size_t r) {
    if (r < 1 || r > d) throw DomainError("matrix factorization needs 1 <= r <= d");
    Rng rng(seed);
    MatFacProblem p;
    p.d = d;
    p.r = r;
    p.mstar = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
    for (std::size_t j = 0; j < r; ++j) {
        for (std::size_t i = 0; i <= j; ++i) {
            const double g = rng.normal();
            p.mstar(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = g;
            p.mstar(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = g;
        }
    }
    p.gamma_cap = sigma_max_power_iteration(p.mstar, rng);
    const auto rr = static_cast<Eigen::Index>(r);
    const Eigen::VectorXd eig = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(
        p.mstar.topLeftCorner(rr, rr), Eigen::EigenvaluesOnly).eigenvalues();
    double kept = 0.0;
    for (Eigen::Index i = 0; i < eig.size(); ++i) kept += eig(i) > 0.0 ? eig(i) * eig(i) : 0.0;
    p.optimum_value = std::max(0.0, p.mstar.squaredNorm() - kept);
    return p;
}

/// f(U) = ||U U^T - M*||_F^2 over U in R^{d x r}, flattened column-major.
/// grad f(U) = 4 (U U^T - M*) U.  L = 8 Gamma and L2 = 12 sqrt(Gamma) on ||U||_F^2 < Gamma.
inline Objective matfac_objective(const MatFacProblem& p) {
    const auto d = static_cast<Eigen::Index>(p.d);
    const auto r = static_cast<Eigen::Index>(p.r);
    auto mstar = std::make_shared<const Eigen::MatrixXd>(p.mstar);
    ObjectiveTraits traits;
    traits.lipschitz_grad = 8.0 * p.gamma_cap;
    traits.lipschitz_hess = 12.0 * std::sqrt(p.gamma_cap);
    traits.region_radius_sq = p.gamma_cap;
    traits.optimum_value = p.optimum_value;
    return Objective(
        p.d * p.r,
        [mstar, d, r](const Point& x) {
            Eigen::Map<const Eigen::MatrixXd> u(x.data(), d, r);
            return (u * u.transpose() - *mstar).squaredNorm();
        },
        [mstar, d, r](const Point& x) -> Point {
            Eigen::Map<const Eigen::MatrixXd> u(x.data(), d, r);
            const Eigen::MatrixXd g = 4.0 * (u * u.transpose() - *mstar) * u;
            return Eigen::Map<const Eigen::VectorXd>(g.data(), g.size());
        },
        traits);
}

/// Central differences, one coordinate at a time. Uses value(), so no gradient is counted.
inline Point finite_diff_grad(const Objective& h, const Point& x, double step) {
    if (!(step > 0.0)) throw DomainError("finite-difference step must be positive");
    Point g(x.size());
    Point probe = x;
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        const double xi = x(i);
        probe(i) = xi + step;
        const double up = h.value(probe);
        probe(i) = xi - step;
        const double down = h.value(probe);
        probe(i) = xi;
        g(i) = (up - down) / (2.0 * step);
    }
    return g;
}

/// Stochastic oracle grad f(x) (1 + zeta), zeta ~ U[-a, a] drawn from the call's seed.
/// E ||g||^2 = (1 + a^2/3) ||grad f||^2, so the strong growth condition needs rho >= 1 + a^2/3.
inline Objective wrap_stochastic(const Objective& h, double noise_scale, double rho) {
    if (!(rho >= 1.0)) throw DomainError("strong growth constant rho must be >= 1");
    if (!(noise_scale >= 0.0) || !std::isfinite(noise_scale)) throw DomainError("noise scale must be >= 0");
    if (1.0 + noise_scale * noise_scale / 3.0 > rho * (1.0 + 1e-12))
        throw DomainError("noise scale too large for the requested rho (need 1 + a^2/3 <= rho)");
    ObjectiveTraits traits = h.traits();
    traits.sgc_rho = rho;
    auto grad = h.grad_fn();
    return Objective(
        h.dim(), h.value_fn(), grad,
        [grad, noise_scale](const Point& x, Seed seed) -> Point {
            if (noise_scale == 0.0) return grad(x);
            Rng rng(seed);
            const double zeta = noise_scale * (2.0 * rng.uniform() - 1.0);
            return grad(x) * (1.0 + zeta);
        },
        traits);
}

}  // namespace optbench

#endif  // OPTBENCH_OBJECTIVE_HPP
