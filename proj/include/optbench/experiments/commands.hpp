#ifndef OPTBENCH_EXPERIMENTS_COMMANDS_HPP
#define OPTBENCH_EXPERIMENTS_COMMANDS_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "optbench/baselines.hpp"
#include "optbench/cna.hpp"
#include "optbench/diagnostics.hpp"
#include "optbench/experiments/config.hpp"
#include "optbench/experiments/csv.hpp"
#include "optbench/objective.hpp"
#include "optbench/parallel.hpp"
#include "optbench/rng.hpp"

namespace optbench::experiments {

/// Files written plus human-readable summary pairs (also printed by the CLI).
struct CommandResult {
    std::vector<std::filesystem::path> files;
    std::vector<std::pair<std::string, std::string>> summary;

    void note(std::string key, std::string value) { summary.emplace_back(std::move(key), std::move(value)); }
    void note(std::string key, double value) { note(std::move(key), format_double(value)); }
};

namespace detail {

inline std::filesystem::path prepare_out_dir(const ExperimentConfig& cfg) {
    std::filesystem::path dir(cfg.out_dir);
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw std::runtime_error("cannot create output directory '" + dir.string() + "': " + ec.message());
    return dir;
}

inline void emit(CommandResult& res, const CsvTable& table, const std::filesystem::path& path) {
    table.write(path);
    res.files.push_back(path);
}

inline bool is_paper(const ExperimentConfig& cfg) { return cfg.preset == Preset::paper; }

inline double resolve_alpha(const ExperimentConfig& cfg, std::size_t n) {
    const double a = cfg.alpha.value_or(default_alpha(n));
    if (!(a > 0.0)) throw ConfigError("key 'alpha': must be positive");
    return a;
}

inline std::size_t require_positive(std::size_t v, const char* key) {
    if (v == 0) throw ConfigError(std::string("key '") + key + "': must be >= 1");
    return v;
}

/// An objective together with how to draw its starting point.
struct Problem {
    std::string kind;
    Objective objective;
    std::optional<MatFacProblem> matfac;
    Point x0_fixed;          // quadratic
    double init_std = 0.0;   // matfac

    Point start(Seed seed) const {
        if (!matfac) return x0_fixed;
        Rng rng(seed);
        Point x(static_cast<Eigen::Index>(objective.dim()));
        for (auto& v : x) v = init_std * rng.normal();
        return x;
    }
};

inline Problem build_problem(const ExperimentConfig& cfg, Seed problem_seed, std::string default_kind) {
    const std::string kind = cfg.problem.value_or(default_kind);
    if (kind == "quadratic") {
        Eigen::VectorXd lambda;
        if (!cfg.eigenvalues.empty()) {
            if (cfg.d && *cfg.d != cfg.eigenvalues.size())
                throw ConfigError("key 'd' disagrees with the number of eigenvalues");
            lambda = Eigen::Map<const Eigen::VectorXd>(cfg.eigenvalues.data(),
                                                       static_cast<Eigen::Index>(cfg.eigenvalues.size()));
        } else {
            lambda = Eigen::VectorXd::Ones(static_cast<Eigen::Index>(require_positive(cfg.d.value_or(10), "d")));
        }
        Objective h = quadratic_objective(lambda);
        Point x0 = Point::Constant(lambda.size(), cfg.x0);
        return Problem{kind, std::move(h), std::nullopt, std::move(x0), 0.0};
    }
    if (kind == "matfac") {
        const std::size_t d = cfg.d.value_or(is_paper(cfg) ? 200 : 60);
        const std::size_t r = cfg.r.value_or(is_paper(cfg) ? 50 : 15);
        MatFacProblem p = build_mstar(problem_seed, d, r);
        // default start sits inside the ball ||U||_F^2 < Gamma where L = 8 Gamma holds: E||U0||^2 = Gamma/2
        const double init = cfg.init_std.value_or(std::sqrt(p.gamma_cap / (2.0 * static_cast<double>(d * r))));
        if (!(init >= 0.0)) throw ConfigError("key 'init_std': must be >= 0");
        Objective h = matfac_objective(p);
        return Problem{kind, std::move(h), std::move(p), Point{}, init};
    }
    throw ConfigError("key 'problem': unknown problem '" + kind + "'");
}

inline Objective maybe_stochastic(const ExperimentConfig& cfg, const Objective& h) {
    if (cfg.noise == 0.0) {
        if (cfg.rho) throw ConfigError("key 'rho' needs noise > 0");
        return h;
    }
    const double rho = cfg.rho.value_or(1.0 + cfg.noise * cfg.noise / 3.0);
    return wrap_stochastic(h, cfg.noise, rho);
}

inline double lipschitz_of(const Objective& h) {
    if (!h.traits().lipschitz_grad) throw ConfigError("problem has no known gradient Lipschitz constant");
    return *h.traits().lipschitz_grad;
}

inline CnaParams cna_params_for(const ExperimentConfig& cfg, const Objective& h, std::size_t n) {
    const double L = lipschitz_of(h);
    const std::string kind = cfg.params.value_or(h.has_stochastic_gradient() ? "sgc" : "smooth");
    if (kind == "smooth") return params_smooth(L, cfg.gamma, cfg.eta_prime);
    if (kind == "hessian") return params_hessian(L, n);
    if (kind == "sgc") return params_sgc(L, h.traits().sgc_rho.value_or(cfg.rho.value_or(1.0)), cfg.eta_prime);
    throw ConfigError("key 'params': unknown schedule '" + kind + "'");
}

inline void add_trace_rows(CsvTable& t, const RunRecord& rec, std::size_t stride = 1) {
    const std::size_t n = rec.rows.size();
    for (const auto& row : rec.rows) {
        if (stride > 1 && row.iter % stride != 0 && row.iter != n) continue;
        t.add_row({rec.algo, rec.seed.value, row.iter, row.grad_evals, row.f, row.grad_norm_y, row.grad_norm_xbar});
    }
}

}  // namespace detail

/// Per-trial H values against C-scaled expectations, plus the per-index max margin across trials.
inline CommandResult cmd_verify_conditions(const ExperimentConfig& cfg) {
    const std::size_t n = detail::require_positive(cfg.n.value_or(10000), "n");
    const std::size_t trials = detail::require_positive(cfg.trials.value_or(100), "trials");
    const double alpha = detail::resolve_alpha(cfg, n);
    if (!(cfg.C > 0.0)) throw ConfigError("key 'C': must be positive");
    // per-trial rows thinned to about 1000 indices per trial unless asked otherwise
    const std::size_t stride = std::max<std::size_t>(1, cfg.log_stride.value_or((n + 999) / 1000));
    const auto dir = detail::prepare_out_dir(cfg);

    std::vector<HTriple> bounds(n);
    for (std::size_t i = 1; i <= n; ++i) bounds[i - 1] = condition_bounds(i, alpha, cfg.C);

    struct TrialOut {
        CsvTable rows{kConditionsHeader};
        std::vector<HTriple> margins;
        bool member = true;
    };
    std::vector<TrialOut> out(trials);
    const Seed master{cfg.seed};
    parallel_for(
        trials,
        [&](std::size_t t) {
            Rng rng(spawn_stream(master, t));
            auto acc = make_accumulators(alpha);
            TrialOut& o = out[t];
            o.margins.resize(n);
            for (std::size_t i = 1; i <= n; ++i) {
                acc = diag_update(acc, rng.exponential());
                const HTriple& b = bounds[i - 1];
                const bool violated = first_failed(acc.values(), b).has_value();
                if (violated) o.member = false;
                o.margins[i - 1] = {acc.h0 - b.h0, acc.h1 - b.h1, acc.h2 - b.h2};
                if (i % stride == 0 || i == n || i == 1)
                    o.rows.add_row({t, i, acc.h0, acc.h1, acc.h2, b.h0, b.h1, b.h2, violated});
            }
        },
        cfg.threads);

    CsvTable conditions(kConditionsHeader);
    CsvTable maxima(kConditionsMaxHeader);
    std::size_t members = 0;
    for (const auto& o : out) {
        conditions.append(o.rows);
        members += o.member ? 1 : 0;
    }
    const double lowest = -std::numeric_limits<double>::infinity();
    double worst0 = lowest, worst1 = lowest, worst2 = lowest;
    for (std::size_t i = 0; i < n; ++i) {
        HTriple m{lowest, lowest, lowest};
        for (const auto& o : out) {
            m.h0 = std::max(m.h0, o.margins[i].h0);
            m.h1 = std::max(m.h1, o.margins[i].h1);
            m.h2 = std::max(m.h2, o.margins[i].h2);
        }
        worst0 = std::max(worst0, m.h0);
        worst1 = std::max(worst1, m.h1);
        worst2 = std::max(worst2, m.h2);
        maxima.add_row({i + 1, m.h0, m.h1, m.h2});
    }

    CommandResult res;
    detail::emit(res, conditions, dir / "conditions.csv");
    detail::emit(res, maxima, dir / "conditions_max.csv");
    res.note("n", std::to_string(n));
    res.note("trials", std::to_string(trials));
    res.note("alpha", alpha);
    res.note("C", cfg.C);
    res.note("membership_fraction", static_cast<double>(members) / static_cast<double>(trials));
    res.note("violating_fraction", static_cast<double>(trials - members) / static_cast<double>(trials));
    res.note("max_margin0", worst0);
    res.note("max_margin1", worst1);
    res.note("max_margin2", worst2);
    return res;
}

/// Per-trial Delta_n / E[Delta_n], and min/mean/max envelopes of the running ratio Delta_i / E[Delta_i].
inline CommandResult cmd_delta_ratio(const ExperimentConfig& cfg) {
    const std::size_t n = detail::require_positive(cfg.n.value_or(1000), "n");
    const std::size_t trials = cfg.trials.value_or(100);
    if (trials < 2) throw ConfigError("key 'trials': delta-ratio needs at least 2 trials");
    const double alpha = detail::resolve_alpha(cfg, n);
    const auto dir = detail::prepare_out_dir(cfg);

    std::vector<double> expected(n);
    for (std::size_t i = 1; i <= n; ++i) expected[i - 1] = expected_delta(i, alpha);

    std::vector<std::vector<double>> running(trials);
    const Seed master{cfg.seed};
    parallel_for(
        trials,
        [&](std::size_t t) {
            Rng rng(spawn_stream(master, t));
            auto acc = make_accumulators(alpha);
            auto& r = running[t];
            r.resize(n);
            for (std::size_t i = 0; i < n; ++i) {
                acc = diag_update(acc, rng.exponential());
                r[i] = acc.delta_partial;
            }
        },
        cfg.threads);

    CsvTable ratio(kRatioHeader);
    std::vector<double> finals(trials);
    for (std::size_t t = 0; t < trials; ++t) {
        const double delta = running[t][n - 1];
        finals[t] = delta / expected[n - 1];
        ratio.add_row({t, n, delta, expected[n - 1], finals[t]});
    }
    CsvTable envelope(kRatioEnvelopeHeader);
    for (std::size_t i = 0; i < n; ++i) {
        double lo = std::numeric_limits<double>::infinity(), hi = -lo, sum = 0.0;
        for (std::size_t t = 0; t < trials; ++t) {
            const double v = running[t][i] / expected[i];
            lo = std::min(lo, v);
            hi = std::max(hi, v);
            sum += v;
        }
        envelope.add_row({i + 1, lo, sum / static_cast<double>(trials), hi});
    }
    const McStats st = summarize(finals);

    CommandResult res;
    detail::emit(res, ratio, dir / "ratio.csv");
    detail::emit(res, envelope, dir / "ratio_envelope.csv");
    res.note("n", std::to_string(n));
    res.note("trials", std::to_string(trials));
    res.note("alpha", alpha);
    res.note("expected_delta", expected[n - 1]);
    res.note("mean_ratio", st.mean);
    res.note("std_error", st.std_error);
    res.note("min_ratio", st.min);
    res.note("max_ratio", st.max);
    return res;
}

/// Histograms of the centered laws H_j^i - E[H_j^i] for the configured indices.
inline CommandResult cmd_histograms(const ExperimentConfig& cfg) {
    const std::size_t n = detail::require_positive(cfg.n.value_or(100), "n");
    const std::size_t trials = detail::require_positive(cfg.trials.value_or(10000), "trials");
    const double alpha = detail::resolve_alpha(cfg, n);
    std::vector<std::size_t> indices = cfg.indices.empty() ? std::vector<std::size_t>{2, 10, 100} : cfg.indices;
    for (auto i : indices)
        if (i < 1 || i > n) throw ConfigError("key 'indices': every index must lie in [1, n]");
    const auto dir = detail::prepare_out_dir(cfg);

    // samples[t][slot] for slot over indices
    std::vector<std::vector<HTriple>> samples(trials);
    const Seed master{cfg.seed};
    const std::size_t last = *std::max_element(indices.begin(), indices.end());
    parallel_for(
        trials,
        [&](std::size_t t) {
            Rng rng(spawn_stream(master, t));
            auto acc = make_accumulators(alpha);
            std::vector<HTriple> at(indices.size());
            for (std::size_t i = 1; i <= last; ++i) {
                acc = diag_update(acc, rng.exponential());
                for (std::size_t s = 0; s < indices.size(); ++s)
                    if (indices[s] == i) at[s] = acc.values();
            }
            samples[t] = std::move(at);
        },
        cfg.threads);

    CsvTable hist(kHistogramHeader);
    CommandResult res;
    for (HComponent comp : {HComponent::H0, HComponent::H1, HComponent::H2}) {
        for (std::size_t s = 0; s < indices.size(); ++s) {
            const HTriple e = expected_H(indices[s], alpha);
            std::vector<double> centered(trials);
            for (std::size_t t = 0; t < trials; ++t) {
                const HTriple& h = samples[t][s];
                switch (comp) {
                    case HComponent::H0: centered[t] = h.h0 - e.h0; break;
                    case HComponent::H1: centered[t] = h.h1 - e.h1; break;
                    case HComponent::H2: centered[t] = h.h2 - e.h2; break;
                }
            }
            const McStats st = summarize(std::move(centered));
            for (std::size_t b = 0; b < st.histogram.bins(); ++b)
                hist.add_row({to_string(comp), indices[s], st.histogram.edges[b], st.histogram.edges[b + 1],
                              st.histogram.counts[b]});
            const std::string tag = std::string(to_string(comp)) + "_i" + std::to_string(indices[s]);
            res.note(tag + "_centered_mean", st.mean);
            res.note(tag + "_std_error", st.std_error);
            res.note(tag + "_bins", std::to_string(st.histogram.bins()));
        }
    }
    detail::emit(res, hist, dir / "histograms.csv");
    res.note("n", std::to_string(n));
    res.note("trials", std::to_string(trials));
    res.note("alpha", alpha);
    return res;
}

/// Gradient descent vs CNA on symmetric matrix factorization, both with gamma = 1/(8 sigma_max).
inline CommandResult cmd_matfac(const ExperimentConfig& cfg) {
    ExperimentConfig local = cfg;
    if (local.problem && *local.problem != "matfac") throw ConfigError("key 'problem': matfac experiment needs matfac");
    local.problem = "matfac";
    const std::size_t n = cfg.n.value_or(detail::is_paper(cfg) ? 2000 : 1000);
    if (n < 8) throw ConfigError("key 'n': matfac needs n >= 8 for the Hessian schedule");
    const std::size_t runs = detail::require_positive(cfg.runs.value_or(cfg.trials.value_or(10)), "runs");
    const Seed master{cfg.seed};
    const detail::Problem prob = detail::build_problem(local, spawn_stream(master, 0), "matfac");
    const double L = detail::lipschitz_of(prob.objective);
    const double gamma = cfg.gamma.value_or(1.0 / L);
    CnaParams params = params_hessian(L, n);
    if (cfg.gamma) {
        const double eta = std::sqrt(gamma / 2.0);
        params = make_cna_params(gamma, gamma + eta, eta, params.alpha - eta, params.alpha);
    }
    const EvalSchedule schedule = parse_eval_schedule(cfg.eval_schedule.value_or("never"), n);
    const auto dir = detail::prepare_out_dir(cfg);

    std::vector<RunRecord> gd(runs), cna(runs);
    parallel_for(
        runs,
        [&](std::size_t k) {
            const Objective h = prob.objective.with_fresh_counter();
            const Point x0 = prob.start(spawn_stream(spawn_stream(master, 1), k));
            const Seed run_seed = spawn_stream(spawn_stream(master, 2), k);
            gd[k] = gd_run(h, x0, gamma, n);
            gd[k].seed = run_seed;
            cna[k] = run(h, x0, n, run_seed, params, schedule);
        },
        cfg.threads);

    CsvTable trace(kTraceHeader);
    for (std::size_t k = 0; k < runs; ++k) {
        detail::add_trace_rows(trace, gd[k], cfg.log_stride.value_or(1));
        detail::add_trace_rows(trace, cna[k], cfg.log_stride.value_or(1));
    }
    const double fstar = prob.matfac->optimum_value;
    CsvTable mean(kMeanTraceHeader);
    auto mean_rows = [&](const std::vector<RunRecord>& recs) {
        std::vector<double> f(n, 0.0), ev(n, 0.0);
        for (const auto& rec : recs)
            for (std::size_t i = 0; i < n; ++i) {
                f[i] += rec.rows[i].f / static_cast<double>(runs);
                ev[i] += static_cast<double>(rec.rows[i].grad_evals) / static_cast<double>(runs);
            }
        for (std::size_t i = 0; i < n; ++i) mean.add_row({recs.front().algo, i + 1, ev[i], f[i], f[i] - fstar});
        return std::pair{std::move(f), std::move(ev)};
    };
    const auto [gd_f, gd_ev] = mean_rows(gd);
    const auto [cna_f, cna_ev] = mean_rows(cna);

    // Compare at the largest gradient budget both reached: GD row `budget`, last CNA row within it.
    const auto budget = static_cast<std::size_t>(std::min(gd_ev.back(), cna_ev.back()));
    std::size_t cna_row = 0;
    while (cna_row + 1 < n && cna_ev[cna_row + 1] <= static_cast<double>(budget)) ++cna_row;
    const double gd_final = gd_f[budget - 1];
    const double cna_final = cna_f[cna_row];
    std::size_t violations = 0;
    for (const auto& rec : cna) violations += rec.summary.region_violations;
    for (const auto& rec : gd) violations += rec.summary.region_violations;

    CommandResult res;
    detail::emit(res, trace, dir / "trace.csv");
    detail::emit(res, mean, dir / "matfac_mean.csv");
    res.note("d", std::to_string(prob.matfac->d));
    res.note("r", std::to_string(prob.matfac->r));
    res.note("sigma_max", prob.matfac->gamma_cap);
    res.note("gamma", gamma);
    res.note("alpha", params.alpha);
    res.note("init_std", prob.init_std);
    res.note("f_star", fstar);
    res.note("budget_grad_evals", std::to_string(budget));
    res.note("gd_mean_f", gd_final);
    res.note("cna_mean_f", cna_final);
    res.note("cna_le_gd", cna_final <= gd_final ? "true" : "false");
    res.note("region_violations", std::to_string(violations));
    return res;
}

/// Log-spaced checkpoints 1, 2, ..., ending at n (ratio ~1.25 once past the small integers).
inline std::vector<std::size_t> log_grid(std::size_t n) {
    std::vector<std::size_t> ks;
    for (std::size_t k = 1; k < n;) {
        ks.push_back(k);
        k = std::max(k + 1, static_cast<std::size_t>(std::ceil(static_cast<double>(k) * 1.25)));
    }
    ks.push_back(n);
    return ks;
}

/// Mean over seeds of min_{i<k} ||grad f(y_i)||^2 against 4 (f(x0) - f*) / (gamma k).
inline CommandResult cmd_smooth_rate(const ExperimentConfig& cfg) {
    const std::size_t n = detail::require_positive(cfg.n.value_or(2000), "n");
    const std::size_t runs = cfg.runs.value_or(cfg.trials.value_or(200));
    if (runs < 2) throw ConfigError("key 'runs': smooth-rate needs at least 2 seeds");
    const Seed master{cfg.seed};
    const detail::Problem prob = detail::build_problem(cfg, spawn_stream(master, 0), "quadratic");
    if (!prob.objective.traits().optimum_value) throw ConfigError("smooth-rate needs a problem with known f*");
    const double fstar = *prob.objective.traits().optimum_value;
    const CnaParams params = params_smooth(detail::lipschitz_of(prob.objective), cfg.gamma, cfg.eta_prime);
    const std::vector<std::size_t> grid = log_grid(n);
    const auto dir = detail::prepare_out_dir(cfg);

    struct Out {
        std::vector<double> min_sq;  // per grid point
        double gap = 0.0;
        RunRecord rec;
    };
    std::vector<Out> out(runs);
    parallel_for(
        runs,
        [&](std::size_t k) {
            const Objective h = prob.objective.with_fresh_counter();
            const Point x0 = prob.start(spawn_stream(spawn_stream(master, 1), k));
            Out& o = out[k];
            o.gap = h.value(x0) - fstar;
            o.rec = run(h, x0, n, spawn_stream(spawn_stream(master, 2), k), params, EvalSchedule::never());
            double running = std::numeric_limits<double>::infinity();
            std::size_t g = 0;
            for (const auto& row : o.rec.rows) {
                running = std::min(running, row.grad_norm_y * row.grad_norm_y);
                if (g < grid.size() && row.iter == grid[g]) {
                    o.min_sq.push_back(running);
                    ++g;
                }
            }
        },
        cfg.threads);

    double mean_gap = 0.0;
    for (const auto& o : out) mean_gap += o.gap / static_cast<double>(runs);

    CsvTable rate(kRateHeader);
    CsvTable trace(kTraceHeader);
    bool all_hold = true;
    for (std::size_t g = 0; g < grid.size(); ++g) {
        std::vector<double> v(runs);
        for (std::size_t k = 0; k < runs; ++k) v[k] = out[k].min_sq[g];
        const McStats st = summarize(std::move(v));
        const double bound = 4.0 * mean_gap / (params.gamma * static_cast<double>(grid[g]));
        const bool holds = st.mean <= bound;
        all_hold = all_hold && holds;
        rate.add_row({grid[g], st.mean, st.std_error, bound, holds});
    }
    for (const auto& o : out)
        for (std::size_t k : grid) {
            const TraceRow& row = o.rec.rows[k - 1];
            trace.add_row({o.rec.algo, o.rec.seed.value, row.iter, row.grad_evals, row.f, row.grad_norm_y,
                           row.grad_norm_xbar});
        }

    CommandResult res;
    detail::emit(res, rate, dir / "rate.csv");
    detail::emit(res, trace, dir / "trace.csv");
    res.note("n", std::to_string(n));
    res.note("runs", std::to_string(runs));
    res.note("gamma", params.gamma);
    res.note("eta_prime", params.eta_prime);
    res.note("mean_initial_gap", mean_gap);
    res.note("bound_holds_everywhere", all_hold ? "true" : "false");
    return res;
}

/// One configured optimizer run on one problem.
inline CommandResult cmd_run(const ExperimentConfig& cfg) {
    const std::size_t n = detail::require_positive(cfg.n.value_or(100), "n");
    const Seed master{cfg.seed};
    const detail::Problem prob = detail::build_problem(cfg, spawn_stream(master, 0), "quadratic");
    const Objective h = detail::maybe_stochastic(cfg, prob.objective);
    const Point x0 = prob.start(spawn_stream(master, 1));
    const double L = detail::lipschitz_of(h);

    RunRecord rec;
    CommandResult res;
    if (cfg.optimizer == "cna") {
        const CnaParams p = detail::cna_params_for(cfg, h, n);
        rec = run(h, x0, n, master, p, parse_eval_schedule(cfg.eval_schedule.value_or("auto"), n));
        res.note("gamma", p.gamma);
        res.note("gamma_prime", p.gamma_prime);
        res.note("eta", p.eta);
        res.note("eta_prime", p.eta_prime);
        res.note("alpha", p.alpha);
    } else if (cfg.optimizer == "gd") {
        const double gamma = cfg.gamma.value_or(1.0 / L);
        rec = gd_run(h, x0, gamma, n);
        res.note("gamma", gamma);
    } else if (cfg.optimizer == "nce") {
        NceParams p;
        p.eta = cfg.eta.value_or(1.0 / L);
        p.theta = cfg.theta.value_or(0.1);
        p.gamma_nc = cfg.gamma_nc.value_or(p.theta * p.theta / p.eta);
        p.s = cfg.s.value_or(0.01);
        rec = nce_run(h, x0, p, n);
        res.note("eta", p.eta);
        res.note("theta", p.theta);
        res.note("gamma_nc", p.gamma_nc);
        res.note("s", p.s);
    } else if (cfg.optimizer == "restarted-nm") {
        RestartParams p;
        p.eta = cfg.eta.value_or(1.0 / L);
        p.theta = cfg.theta.value_or(0.1);
        p.B = cfg.B.value_or(1.0);
        p.K = cfg.K.value_or(n);
        p.max_iters = n;
        RestartResult rr = restarted_nm_run(h, x0, p);
        rec = std::move(rr.record);
        res.note("eta", p.eta);
        res.note("theta", p.theta);
        res.note("B", p.B);
        res.note("K", std::to_string(p.K));
        res.note("restarts", std::to_string(rr.restarts));
        res.note("completed", rr.completed ? "true" : "false");
        res.note("f_y_hat", h.value(rr.y_hat));
    } else {
        throw ConfigError("key 'optimizer': unknown optimizer '" + cfg.optimizer + "'");
    }
    rec.seed = master;

    const auto dir = detail::prepare_out_dir(cfg);
    CsvTable trace(kTraceHeader);
    detail::add_trace_rows(trace, rec, cfg.log_stride.value_or(1));
    res.note("algo", rec.algo);
    res.note("problem", prob.kind);
    res.note("n", std::to_string(n));
    res.note("total_grad_evals", std::to_string(rec.summary.total_grad_evals));
    res.note("xbar_grad_evals", std::to_string(rec.summary.xbar_grad_evals));
    res.note("best_kind", std::string(to_string(rec.summary.best_kind)));
    res.note("best_grad_norm", rec.summary.best_grad_norm);
    res.note("final_f", h.value(rec.summary.final_point));
    res.note("region_violations", std::to_string(rec.summary.region_violations));
    res.note("safeguard_triggers", std::to_string(rec.summary.safeguard_triggers));
    CsvTable summary(kSummaryHeader);
    for (const auto& [k, v] : res.summary) summary.add_row({k, v});
    detail::emit(res, trace, dir / "trace.csv");
    detail::emit(res, summary, dir / "summary.csv");
    return res;
}

inline CommandResult dispatch(Experiment e, const ExperimentConfig& cfg) {
    switch (e) {
        case Experiment::verify_conditions: return cmd_verify_conditions(cfg);
        case Experiment::delta_ratio: return cmd_delta_ratio(cfg);
        case Experiment::histograms: return cmd_histograms(cfg);
        case Experiment::matfac: return cmd_matfac(cfg);
        case Experiment::smooth_rate: return cmd_smooth_rate(cfg);
        case Experiment::run: return cmd_run(cfg);
    }
    throw ConfigError("unknown experiment");
}

}  // namespace optbench::experiments

#endif  // OPTBENCH_EXPERIMENTS_COMMANDS_HPP
