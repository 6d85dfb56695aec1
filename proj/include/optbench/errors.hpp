#ifndef OPTBENCH_ERRORS_HPP
#define OPTBENCH_ERRORS_HPP

#include <cstddef>
#include <stdexcept>
#include <string>

namespace optbench {

/// Invalid argument outside a function's domain (nonpositive eigenvalue, r > d, rho < 1, ...).
class DomainError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Parameter schedule violates its admissibility constraints.
class ParameterError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Point dimension does not match the objective.
class ShapeError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class EmptyScheduleError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A gradient or iterate became NaN/Inf. Carries the iteration at which it happened.
class NumericalFailure : public std::runtime_error {
public:
    NumericalFailure(const std::string& what, std::size_t iteration)
        : std::runtime_error(what + " at iteration " + std::to_string(iteration)),
          iteration_(iteration) {}

    std::size_t iteration() const noexcept { return iteration_; }

private:
    std::size_t iteration_;
};

/// Bad experiment configuration (unknown key, malformed value, unknown tag).
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace optbench

#endif  // OPTBENCH_ERRORS_HPP
