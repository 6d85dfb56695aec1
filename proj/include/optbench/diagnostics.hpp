#ifndef OPTBENCH_DIAGNOSTICS_HPP
#define OPTBENCH_DIAGNOSTICS_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <optional>
#include <string_view>
#include <vector>

#include "optbench/errors.hpp"
#include "optbench/parallel.hpp"
#include "optbench/rng.hpp"

namespace optbench {

// Random functionals of the jump times that the Lipschitz-Hessian guarantee is conditioned on:
//   H0^i = sum_{j<=i} (T_i - T_j) e^{-alpha (T_i - T_j)}
//   H1^i = sum_{j<=i} e^{-alpha (T_i - T_j)}
//   H2^i = sum_{j<=i} (i - j) e^{-alpha (T_i - T_j)}
//   Delta_n = alpha^2 sum_{i<=n} (H1^i)^2
// None of them depend on the objective.

struct HTriple {
    double h0 = 0.0;
    double h1 = 0.0;
    double h2 = 0.0;
};

/// Streaming values of H0^i, H1^i, H2^i and the partial sum of Delta, O(1) per jump.
struct DiagAccumulators {
    double h0 = 0.0;
    double h1 = 0.0;
    double h2 = 0.0;
    double delta_partial = 0.0;
    std::size_t i = 0;
    double alpha = 0.0;

    HTriple values() const { return {h0, h1, h2}; }
};

inline DiagAccumulators make_accumulators(double alpha) {
    if (!(alpha > 0.0)) throw DomainError("alpha must be positive");
    DiagAccumulators acc;
    acc.alpha = alpha;
    return acc;
}

/// Advances from index i-1 to i, where tau = T_i - T_{i-1}. Factoring e^{-alpha tau} out of
/// each sum gives
///   H1^i = 1 + e H1^{i-1},  H0^i = e (H0^{i-1} + tau H1^{i-1}),  H2^i = e (H2^{i-1} + H1^{i-1}).
inline DiagAccumulators diag_update(DiagAccumulators acc, double tau) {
    if (acc.i == 0) {
        acc.h0 = 0.0;
        acc.h1 = 1.0;
        acc.h2 = 0.0;
    } else {
        const double e = std::exp(-acc.alpha * tau);
        const double prev_h1 = acc.h1;
        acc.h0 = e * (acc.h0 + tau * prev_h1);
        acc.h2 = e * (acc.h2 + prev_h1);
        acc.h1 = 1.0 + e * prev_h1;
    }
    acc.delta_partial += acc.alpha * acc.alpha * acc.h1 * acc.h1;
    ++acc.i;
    return acc;
}

/// Closed-form expectations. With q = 1/(1+alpha) and E[e^{-alpha Gamma(m,1)}] = q^m:
///   E[H1^i] = sum_{m<i} q^m,  E[H2^i] = sum_{m<i} m q^m,  E[H0^i] = sum_{m<i} m q^{m+1}.
inline HTriple expected_H(std::size_t i, double alpha) {
    if (i < 1) throw DomainError("index i must be >= 1");
    if (!(alpha > 0.0)) throw DomainError("alpha must be positive");
    if (i == 1) return {0.0, 1.0, 0.0};  // exact; the general formula rounds H1 to 1 - ulp
    const double q = 1.0 / (1.0 + alpha);
    const double di = static_cast<double>(i);
    HTriple e;
    e.h1 = (1.0 + alpha - std::pow(1.0 + alpha, 1.0 - di)) / alpha;
    // sum_{m=1}^{N} m q^m = q (1 - (N+1) q^N + N q^{N+1}) / (1-q)^2 with N = i - 1
    const double big_n = di - 1.0;
    const double weighted =
        q * (1.0 - (big_n + 1.0) * std::pow(q, big_n) + big_n * std::pow(q, big_n + 1.0)) / ((1.0 - q) * (1.0 - q));
    e.h2 = weighted;
    e.h0 = q * weighted;
    return e;
}

/// Exact E[Delta_n].
inline double expected_delta(std::size_t n, double alpha) {
    if (n < 1) throw DomainError("n must be >= 1");
    if (!(alpha > 0.0)) throw DomainError("alpha must be positive");
    if (n == 1) return alpha * alpha;  // Delta_1 = alpha^2 deterministically
    const double dn = static_cast<double>(n);
    const double tail2 = -std::expm1(-dn * std::log1p(2.0 * alpha));  // 1 - (1+2a)^{-n}
    const double tail1 = -std::expm1(-dn * std::log1p(alpha));        // 1 - (1+a)^{-n}
    return (2.0 + alpha) * (1.0 + 2.0 * alpha) / 2.0 * dn +
           (1.0 + 2.0 * alpha) * (1.0 + 1.5 * alpha) / (2.0 * alpha) * tail2 -
           2.0 * (1.0 + alpha) * (1.0 + 2.0 * alpha) / alpha * tail1;
}

/// Linear upper bound (1 + 3 alpha/2)(1 + 2 alpha) n on E[Delta_n].
inline double expected_delta_upper(std::size_t n, double alpha) {
    if (n < 1) throw DomainError("n must be >= 1");
    if (!(alpha > 0.0)) throw DomainError("alpha must be positive");
    return (1.0 + 1.5 * alpha) * (1.0 + 2.0 * alpha) * static_cast<double>(n);
}

inline double delta_n(const JumpSchedule& schedule, double alpha) {
    if (schedule.count() == 0) throw EmptyScheduleError("Delta_n needs n >= 1");
    auto acc = make_accumulators(alpha);
    for (double tau : schedule.increments()) acc = diag_update(acc, tau);
    return acc.delta_partial;
}

enum class HComponent { H0, H1, H2 };

inline std::string_view to_string(HComponent c) {
    switch (c) {
        case HComponent::H0: return "H0";
        case HComponent::H1: return "H1";
        case HComponent::H2: return "H2";
    }
    return "?";
}

struct Violation {
    std::size_t i = 0;
    HComponent which = HComponent::H0;
};

/// Membership of a realization in the event
///   { for all i: H0^i <= C E[H0^i], H1^i <= C E[H1^i], H2^i <= (C/alpha) E[H2^i] }.
struct AnVerdict {
    bool member = true;
    std::optional<Violation> first_violation;
    double C = 0.0;
};

/// Per-index bounds C E[H0], C E[H1], (C/alpha) E[H2].
inline HTriple condition_bounds(std::size_t i, double alpha, double C) {
    const HTriple e = expected_H(i, alpha);
    return {C * e.h0, C * e.h1, C / alpha * e.h2};
}

inline std::optional<HComponent> first_failed(const HTriple& h, const HTriple& bound) {
    if (h.h0 > bound.h0) return HComponent::H0;
    if (h.h1 > bound.h1) return HComponent::H1;
    if (h.h2 > bound.h2) return HComponent::H2;
    return std::nullopt;
}

inline AnVerdict a_n_verdict(const JumpSchedule& schedule, double alpha, double C) {
    if (!(C > 0.0)) throw DomainError("C must be positive");
    AnVerdict verdict;
    verdict.C = C;
    auto acc = make_accumulators(alpha);
    for (double tau : schedule.increments()) {
        acc = diag_update(acc, tau);
        if (auto which = first_failed(acc.values(), condition_bounds(acc.i, alpha, C))) {
            verdict.member = false;
            verdict.first_violation = Violation{acc.i, *which};
            break;
        }
    }
    return verdict;
}

struct Histogram {
    std::vector<double> edges;  // bins + 1 edges
    std::vector<std::size_t> counts;

    std::size_t bins() const noexcept { return counts.size(); }
    std::size_t total() const noexcept { return std::accumulate(counts.begin(), counts.end(), std::size_t{0}); }
};

namespace detail {

// linear-interpolation quantile of sorted data
inline double quantile_sorted(const std::vector<double>& s, double p) {
    const double pos = p * static_cast<double>(s.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, s.size() - 1);
    return s[lo] + (pos - static_cast<double>(lo)) * (s[hi] - s[lo]);
}

}  // namespace detail

/// Freedman-Diaconis binning: width 2 IQR / N^{1/3}. Degenerate data (zero spread or zero IQR)
/// falls back to a single bin, or to sqrt(N) bins when only the IQR vanishes.
inline Histogram freedman_diaconis(std::vector<double> values, std::size_t max_bins = 10000) {
    Histogram hist;
    if (values.empty()) return hist;
    std::sort(values.begin(), values.end());
    const double lo = values.front();
    const double hi = values.back();
    if (!(hi > lo)) {
        hist.edges = {lo, hi};
        hist.counts = {values.size()};
        return hist;
    }
    const double iqr = detail::quantile_sorted(values, 0.75) - detail::quantile_sorted(values, 0.25);
    const double n = static_cast<double>(values.size());
    std::size_t bins;
    if (iqr > 0.0) {
        const double width = 2.0 * iqr / std::cbrt(n);
        bins = static_cast<std::size_t>(std::ceil((hi - lo) / width));
    } else {
        bins = static_cast<std::size_t>(std::ceil(std::sqrt(n)));
    }
    bins = std::clamp<std::size_t>(bins, 1, max_bins);
    const double width = (hi - lo) / static_cast<double>(bins);
    hist.edges.resize(bins + 1);
    for (std::size_t b = 0; b <= bins; ++b) hist.edges[b] = lo + width * static_cast<double>(b);
    hist.edges.back() = hi;
    hist.counts.assign(bins, 0);
    for (double v : values) {
        auto b = static_cast<std::size_t>((v - lo) / width);
        hist.counts[std::min(b, bins - 1)] += 1;
    }
    return hist;
}

enum class McQuantity { H0, H1, H2, delta, delta_ratio, an_membership };

struct McRequest {
    McQuantity quantity = McQuantity::delta;
    std::size_t n = 1;
    std::size_t index = 0;  // i for the H quantities; 0 means i = n
    double alpha = 0.0;     // 0 means n^{-1/7}
    double C = 5.0;
    std::size_t trials = 2;
    Seed seed{};
    bool centered = false;  // subtract the closed-form expectation from H samples
};

struct McStats {
    double mean = 0.0;
    double std_error = 0.0;
    double min = 0.0;
    double max = 0.0;
    Histogram histogram;
    std::vector<double> samples;  // indexed by trial
};

inline double default_alpha(std::size_t n) { return std::pow(static_cast<double>(n), -1.0 / 7.0); }

/// Sample mean, standard error, extrema and Freedman-Diaconis histogram.
inline McStats summarize(std::vector<double> samples) {
    McStats st;
    const double n = static_cast<double>(samples.size());
    if (samples.empty()) return st;
    st.mean = std::accumulate(samples.begin(), samples.end(), 0.0) / n;
    double ss = 0.0;
    for (double v : samples) ss += (v - st.mean) * (v - st.mean);
    st.std_error = samples.size() > 1 ? std::sqrt(ss / (n - 1.0) / n) : 0.0;
    const auto [mn, mx] = std::minmax_element(samples.begin(), samples.end());
    st.min = *mn;
    st.max = *mx;
    st.histogram = freedman_diaconis(samples);
    st.samples = std::move(samples);
    return st;
}

/// Trial t draws its jump times from spawn_stream(seed, t); the reduction runs in trial order.
inline McStats monte_carlo_stats(const McRequest& req, std::size_t workers = 0) {
    if (req.trials < 2) throw DomainError("Monte Carlo needs at least 2 trials");
    if (req.n < 1) throw DomainError("n must be >= 1");
    const double alpha = req.alpha > 0.0 ? req.alpha : default_alpha(req.n);
    const std::size_t index = req.index == 0 ? req.n : req.index;
    if (index > req.n) throw DomainError("index must be <= n");
    const bool is_h = req.quantity == McQuantity::H0 || req.quantity == McQuantity::H1 || req.quantity == McQuantity::H2;
    const double expected_delta_n = expected_delta(req.n, alpha);
    const HTriple expected_at_index = expected_H(index, alpha);

    std::vector<double> samples(req.trials);
    parallel_for(
        req.trials,
        [&](std::size_t t) {
            Rng rng(spawn_stream(req.seed, t));
            auto acc = make_accumulators(alpha);
            const std::size_t steps = is_h ? index : req.n;
            bool member = true;
            for (std::size_t k = 0; k < steps; ++k) {
                acc = diag_update(acc, rng.exponential());
                if (req.quantity == McQuantity::an_membership && member &&
                    first_failed(acc.values(), condition_bounds(acc.i, alpha, req.C)))
                    member = false;
            }
            double v = 0.0;
            switch (req.quantity) {
                case McQuantity::H0: v = acc.h0 - (req.centered ? expected_at_index.h0 : 0.0); break;
                case McQuantity::H1: v = acc.h1 - (req.centered ? expected_at_index.h1 : 0.0); break;
                case McQuantity::H2: v = acc.h2 - (req.centered ? expected_at_index.h2 : 0.0); break;
                case McQuantity::delta: v = acc.delta_partial; break;
                case McQuantity::delta_ratio: v = acc.delta_partial / expected_delta_n; break;
                case McQuantity::an_membership: v = member ? 1.0 : 0.0; break;
            }
            samples[t] = v;
        },
        workers);
    return summarize(std::move(samples));
}

}  // namespace optbench

#endif  // OPTBENCH_DIAGNOSTICS_HPP
