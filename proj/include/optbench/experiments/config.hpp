#ifndef OPTBENCH_EXPERIMENTS_CONFIG_HPP
#define OPTBENCH_EXPERIMENTS_CONFIG_HPP

// Flat key-value configuration.
//
//   # comment until end of line
//   key = value
//
// One assignment per line, surrounding whitespace ignored, blank lines allowed. Keys are
// case-sensitive and must be among known_keys(); repeated keys are an error. Lists are
// comma-separated. Values are validated when applied to an ExperimentConfig.

#include <algorithm>
#include <array>
#include <charconv>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "optbench/cna.hpp"
#include "optbench/errors.hpp"

namespace optbench::experiments {

enum class Experiment { verify_conditions, delta_ratio, histograms, matfac, smooth_rate, run };

inline constexpr std::array<std::pair<std::string_view, Experiment>, 6> kExperimentNames{{
    {"verify-conditions", Experiment::verify_conditions},
    {"delta-ratio", Experiment::delta_ratio},
    {"histograms", Experiment::histograms},
    {"matfac", Experiment::matfac},
    {"smooth-rate", Experiment::smooth_rate},
    {"run", Experiment::run},
}};

inline std::string_view to_string(Experiment e) {
    for (const auto& [name, value] : kExperimentNames)
        if (value == e) return name;
    return "?";
}

inline Experiment parse_experiment(std::string_view s) {
    for (const auto& [name, value] : kExperimentNames)
        if (name == s) return value;
    throw ConfigError("unknown experiment '" + std::string(s) + "'");
}

enum class Preset { desk, paper };

/// Everything an experiment reads. Unset optionals take experiment-specific defaults.
struct ExperimentConfig {
    std::optional<Experiment> experiment;
    Preset preset = Preset::desk;
    std::optional<std::size_t> n;
    std::optional<std::size_t> trials;
    std::uint64_t seed = 42;
    double C = 5.0;
    std::optional<double> alpha;
    std::string out_dir = ".";
    std::size_t threads = 0;  // 0: hardware concurrency
    std::optional<std::size_t> log_stride;  // keep every m-th CSV row; unset: experiment default

    // problem
    std::optional<std::string> problem;  // quadratic | matfac
    std::optional<std::size_t> d;
    std::optional<std::size_t> r;
    std::vector<double> eigenvalues;
    double x0 = 1.0;                  // quadratic start: every coordinate set to this value
    std::optional<double> init_std;   // matfac start: U entries N(0, init_std^2)
    double noise = 0.0;
    std::optional<double> rho;

    // optimizer
    std::string optimizer = "cna";         // cna | gd | nce | restarted-nm
    std::optional<std::string> params;     // cna schedule: smooth | hessian | sgc
    std::optional<std::string> eval_schedule;
    std::optional<double> gamma;
    double eta_prime = 0.1;
    std::optional<double> eta;
    std::optional<double> theta;
    std::optional<double> gamma_nc;
    std::optional<double> s;
    std::optional<double> B;
    std::optional<std::size_t> K;
    std::optional<std::size_t> runs;
    std::vector<std::size_t> indices;
};

inline const std::vector<std::string_view>& known_keys() {
    static const std::vector<std::string_view> keys{
        "experiment", "preset", "n",   "trials",  "seed",      "C",        "alpha",         "out_dir", "threads",
        "log_stride", "problem", "d",  "r",       "eigenvalues", "x0",     "init_std",      "noise",   "rho",
        "optimizer",  "params",  "eval_schedule", "gamma",     "eta_prime", "eta",          "theta",   "gamma_nc",
        "s",          "B",       "K",  "runs",    "indices"};
    return keys;
}

namespace detail {

inline std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

inline double parse_double(std::string_view key, std::string_view v) {
    try {
        std::size_t used = 0;
        const std::string str(v);
        const double out = std::stod(str, &used);
        if (used != str.size()) throw std::invalid_argument("trailing characters");
        return out;
    } catch (const std::exception&) {
        throw ConfigError("key '" + std::string(key) + "': expected a number, got '" + std::string(v) + "'");
    }
}

template <typename Int>
Int parse_int(std::string_view key, std::string_view v) {
    Int out{};
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc{} || ptr != v.data() + v.size())
        throw ConfigError("key '" + std::string(key) + "': expected a nonnegative integer, got '" + std::string(v) +
                          "'");
    return out;
}

inline std::vector<std::string_view> split_list(std::string_view v) {
    std::vector<std::string_view> out;
    while (!v.empty()) {
        const auto comma = v.find(',');
        out.push_back(trim(v.substr(0, comma)));
        if (comma == std::string_view::npos) break;
        v.remove_prefix(comma + 1);
    }
    return out;
}

}  // namespace detail

using KeyValues = std::map<std::string, std::string, std::less<>>;

/// Parses the flat key-value grammar. Unknown or repeated keys are rejected with the offending key.
inline KeyValues parse_key_values(std::string_view text) {
    KeyValues kv;
    std::size_t line_no = 0;
    while (!text.empty()) {
        const auto nl = text.find('\n');
        std::string_view line = text.substr(0, nl);
        text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = detail::trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string_view::npos)
            throw ConfigError("line " + std::to_string(line_no) + ": expected 'key = value'");
        const auto key = detail::trim(line.substr(0, eq));
        const auto value = detail::trim(line.substr(eq + 1));
        const auto& keys = known_keys();
        if (std::find(keys.begin(), keys.end(), key) == keys.end())
            throw ConfigError("unknown config key '" + std::string(key) + "'");
        if (value.empty()) throw ConfigError("key '" + std::string(key) + "' has an empty value");
        if (!kv.emplace(std::string(key), std::string(value)).second)
            throw ConfigError("config key '" + std::string(key) + "' given twice");
    }
    return kv;
}

inline KeyValues read_config_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_key_values(buf.str());
}

/// Applies parsed pairs on top of cfg (later sources override earlier ones).
inline void apply_config(ExperimentConfig& cfg, const KeyValues& kv) {
    using detail::parse_double;
    using detail::parse_int;
    for (const auto& [key, v] : kv) {
        if (key == "experiment") cfg.experiment = parse_experiment(v);
        else if (key == "preset") {
            if (v == "desk") cfg.preset = Preset::desk;
            else if (v == "paper") cfg.preset = Preset::paper;
            else throw ConfigError("key 'preset': expected desk or paper, got '" + v + "'");
        }
        else if (key == "n") cfg.n = parse_int<std::size_t>(key, v);
        else if (key == "trials") cfg.trials = parse_int<std::size_t>(key, v);
        else if (key == "seed") cfg.seed = parse_int<std::uint64_t>(key, v);
        else if (key == "C") cfg.C = parse_double(key, v);
        else if (key == "alpha") cfg.alpha = parse_double(key, v);
        else if (key == "out_dir") cfg.out_dir = v;
        else if (key == "threads") cfg.threads = parse_int<std::size_t>(key, v);
        else if (key == "log_stride") cfg.log_stride = parse_int<std::size_t>(key, v);
        else if (key == "problem") cfg.problem = v;
        else if (key == "d") cfg.d = parse_int<std::size_t>(key, v);
        else if (key == "r") cfg.r = parse_int<std::size_t>(key, v);
        else if (key == "eigenvalues") {
            cfg.eigenvalues.clear();
            for (auto item : detail::split_list(v)) cfg.eigenvalues.push_back(parse_double(key, item));
        }
        else if (key == "x0") cfg.x0 = parse_double(key, v);
        else if (key == "init_std") cfg.init_std = parse_double(key, v);
        else if (key == "noise") cfg.noise = parse_double(key, v);
        else if (key == "rho") cfg.rho = parse_double(key, v);
        else if (key == "optimizer") cfg.optimizer = v;
        else if (key == "params") cfg.params = v;
        else if (key == "eval_schedule") cfg.eval_schedule = v;
        else if (key == "gamma") cfg.gamma = parse_double(key, v);
        else if (key == "eta_prime") cfg.eta_prime = parse_double(key, v);
        else if (key == "eta") cfg.eta = parse_double(key, v);
        else if (key == "theta") cfg.theta = parse_double(key, v);
        else if (key == "gamma_nc") cfg.gamma_nc = parse_double(key, v);
        else if (key == "s") cfg.s = parse_double(key, v);
        else if (key == "B") cfg.B = parse_double(key, v);
        else if (key == "K") cfg.K = parse_int<std::size_t>(key, v);
        else if (key == "runs") cfg.runs = parse_int<std::size_t>(key, v);
        else if (key == "indices") {
            cfg.indices.clear();
            for (auto item : detail::split_list(v)) cfg.indices.push_back(parse_int<std::size_t>(key, item));
        }
        else throw ConfigError("unknown config key '" + key + "'");
    }
}

/// never | every | final | stride:<m> | auto (stride ceil(n/100))
inline EvalSchedule parse_eval_schedule(std::string_view s, std::size_t n) {
    if (s == "never") return EvalSchedule::never();
    if (s == "every") return EvalSchedule::every();
    if (s == "final") return EvalSchedule::final();
    if (s == "auto") return EvalSchedule::default_for(n);
    if (s.starts_with("stride:")) {
        const auto m = detail::parse_int<std::size_t>("eval_schedule", s.substr(7));
        if (m == 0) throw ConfigError("key 'eval_schedule': stride must be >= 1");
        return EvalSchedule::every_m(m);
    }
    throw ConfigError("key 'eval_schedule': unknown schedule '" + std::string(s) + "'");
}

}  // namespace optbench::experiments

#endif  // OPTBENCH_EXPERIMENTS_CONFIG_HPP
