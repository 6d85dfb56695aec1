#ifndef OPTBENCH_RNG_HPP
#define OPTBENCH_RNG_HPP

#include <cmath>
#include <concepts>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <random>
#include <span>
#include <vector>

#include "optbench/errors.hpp"

namespace optbench {

/// 64-bit seed. Identical seeds and identical request sequences give identical streams.
struct Seed {
    std::uint64_t value = 0;

    friend bool operator==(Seed, Seed) = default;
};

namespace detail {

// splitmix64 finalizer; a bijection on 64-bit words
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

}  // namespace detail

/// Deterministic sub-seed for an independent stream. Distinct indices give distinct seeds.
constexpr Seed spawn_stream(Seed seed, std::uint64_t stream_index) noexcept {
    // mix the parent first so that (s, i) and (s + 1, i - 1) do not collide
    return Seed{detail::mix64(detail::mix64(seed.value) + 0xD1B54A32D192ED03ULL * (stream_index + 1))};
}

template <typename G>
concept Uniform64Generator = std::uniform_random_bit_generator<G> &&
    std::same_as<typename G::result_type, std::uint64_t> &&
    (G::min() == 0) && (G::max() == std::numeric_limits<std::uint64_t>::max());

/// Uniform draw on (0, 1] with 53 bits of resolution.
template <Uniform64Generator G>
double uniform_open_closed(G& gen) {
    return static_cast<double>((gen() >> 11) + 1) * 0x1.0p-53;
}

/// Unit-rate exponential via inverse CDF tau = -ln(u). u = 1 (tau = 0) is redrawn, so tau > 0.
template <Uniform64Generator G>
double exponential_unit(G& gen) {
    for (;;) {
        const double u = uniform_open_closed(gen);
        if (u < 1.0) return -std::log(u);
    }
}

/// Single-owner random source. Parallel trials each build their own from spawn_stream.
class Rng {
public:
    using result_type = std::uint64_t;

    explicit Rng(Seed seed) : engine_(detail::mix64(seed.value)) {}

    static constexpr result_type min() { return std::mt19937_64::min(); }
    static constexpr result_type max() { return std::mt19937_64::max(); }
    result_type operator()() { return engine_(); }

    double uniform() { return uniform_open_closed(*this); }
    double exponential() { return exponential_unit(*this); }
    double normal() { return normal_(engine_); }

private:
    std::mt19937_64 engine_;
    std::normal_distribution<double> normal_;
};

/// Realized jump process: increments tau_k ~ Exp(1) and jump times T_k = tau_1 + ... + tau_k.
/// Index 0 holds tau_1 / T_1; T_0 = 0 is implicit.
class JumpSchedule {
public:
    JumpSchedule() = default;

    explicit JumpSchedule(std::vector<double> increments) : increments_(std::move(increments)) {
        times_.reserve(increments_.size());
        double t = 0.0;
        for (double tau : increments_) {
            t += tau;
            times_.push_back(t);
        }
    }

    std::span<const double> increments() const noexcept { return increments_; }
    std::span<const double> times() const noexcept { return times_; }
    std::size_t count() const noexcept { return increments_.size(); }

    double increment(std::size_t k) const { return increments_.at(k); }
    double time(std::size_t k) const { return times_.at(k); }

private:
    std::vector<double> increments_;
    std::vector<double> times_;
};

template <Uniform64Generator G>
JumpSchedule sample_increments(G& gen, std::size_t n) {
    if (n == 0) throw EmptyScheduleError("jump schedule must contain at least one increment");
    std::vector<double> tau(n);
    for (auto& t : tau) t = exponential_unit(gen);
    return JumpSchedule(std::move(tau));
}

inline JumpSchedule sample_increments(Seed seed, std::size_t n) {
    Rng rng(seed);
    return sample_increments(rng, n);
}

}  // namespace optbench

#endif  // OPTBENCH_RNG_HPP
