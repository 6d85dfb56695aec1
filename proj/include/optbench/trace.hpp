#ifndef OPTBENCH_TRACE_HPP
#define OPTBENCH_TRACE_HPP

#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "optbench/objective.hpp"
#include "optbench/rng.hpp"

namespace optbench {

/// Which kind of point holds the smallest gradient norm seen by a run.
enum class BestKind { iterate, ytilde, xbar };

inline std::string_view to_string(BestKind k) {
    switch (k) {
        case BestKind::ytilde: return "ytilde";
        case BestKind::xbar: return "xbar";
        case BestKind::iterate: break;
    }
    return "iterate";
}

/// One row per iteration, recorded at the point where the iteration's gradient was taken.
/// time and tau are zero for deterministic algorithms.
struct TraceRow {
    std::size_t iter = 0;
    double time = 0.0;
    double tau = 0.0;
    double f = 0.0;
    double grad_norm_y = 0.0;
    std::optional<double> grad_norm_xbar;
    std::uint64_t grad_evals = 0;
};

struct RunSummary {
    BestKind best_kind = BestKind::iterate;
    double best_grad_norm = std::numeric_limits<double>::infinity();
    Point best_point;
    Point final_point;
    std::uint64_t total_grad_evals = 0;
    std::uint64_t xbar_grad_evals = 0;
    // iterations whose gradient point left the objective's region of validity
    std::size_t region_violations = 0;
    // negative-curvature steps or restarts taken by the safeguarded baselines
    std::size_t safeguard_triggers = 0;
};

struct RunRecord {
    std::string algo;
    Seed seed{};
    std::vector<TraceRow> rows;
    RunSummary summary;
    // iterates after each step, only filled when requested
    std::vector<Point> path;
};

namespace detail {

inline bool outside_region(const Objective& h, const Point& x) {
    const auto& r2 = h.traits().region_radius_sq;
    return r2 && x.squaredNorm() >= *r2;
}

}  // namespace detail

}  // namespace optbench

#endif  // OPTBENCH_TRACE_HPP
