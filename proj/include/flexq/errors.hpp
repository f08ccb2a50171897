#ifndef FLEXQ_ERRORS_HPP
#define FLEXQ_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace flexq {

// Base class for all library errors so callers can catch in one place.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

class InvalidParameter : public Error {
public:
    explicit InvalidParameter(const std::string& msg) : Error(msg) {}
};

// Holding cost fails the nondecreasing/convex requirements.
class NonConvexCost : public Error {
public:
    explicit NonConvexCost(const std::string& msg) : Error(msg) {}
};

// Tabular holding cost queried past the table end with extrapolation disabled.
class TabularOutOfRange : public Error {
public:
    explicit TabularOutOfRange(const std::string& msg) : Error(msg) {}
};

// The holding-cost growth condition provably fails for the given rates.
class AssumptionViolated : public Error {
public:
    explicit AssumptionViolated(const std::string& msg) : Error(msg) {}
};

// An extracted threshold landed within the safety margin of the state cap.
class TruncationTooTight : public Error {
public:
    TruncationTooTight(const std::string& msg, int suggested_x_max)
        : Error(msg), suggested_x_max(suggested_x_max) {}
    int suggested_x_max;
};

class NoConvergence : public Error {
public:
    explicit NoConvergence(const std::string& msg) : Error(msg) {}
};

// Burden failed the monotonicity the threshold extraction relies on; this
// signals a solver or truncation defect, not a legitimate outcome.
class NonMonotoneBurden : public Error {
public:
    explicit NonMonotoneBurden(const std::string& msg) : Error(msg) {}
};

class SingularSystem : public Error {
public:
    explicit SingularSystem(const std::string& msg) : Error(msg) {}
};

class NotStabilized : public Error {
public:
    NotStabilized(const std::string& msg, int stages) : Error(msg), stages(stages) {}
    int stages;
};

class ConfigError : public Error {
public:
    explicit ConfigError(const std::string& msg) : Error(msg) {}
};

} // namespace flexq

#endif
