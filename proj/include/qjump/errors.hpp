#pragma once

#include <stdexcept>
#include <string>

namespace qjump {

// Error categories map to CLI exit codes (see tools/qjump.cpp).
enum class ErrorCategory { config = 2, io = 3, model = 4, analysis = 5 };

class Error : public std::runtime_error {
public:
    Error(ErrorCategory cat, const std::string& msg)
        : std::runtime_error(msg), category_(cat) {}
    ErrorCategory category() const { return category_; }

private:
    ErrorCategory category_;
};

class ConfigError : public Error {
public:
    explicit ConfigError(const std::string& msg) : Error(ErrorCategory::config, msg) {}
};

// Config text could not be parsed; carries the 1-based line number.
class ParseError : public ConfigError {
public:
    ParseError(int line, const std::string& msg)
        : ConfigError("line " + std::to_string(line) + ": " + msg), line_(line) {}
    int line() const { return line_; }

private:
    int line_;
};

class UnknownKeyError : public ConfigError {
public:
    UnknownKeyError(int line, const std::string& key)
        : ConfigError("line " + std::to_string(line) + ": unknown key '" + key + "'") {}
};

class OutOfRangeError : public ConfigError {
public:
    explicit OutOfRangeError(const std::string& msg) : ConfigError(msg) {}
};

class IoError : public Error {
public:
    explicit IoError(const std::string& msg) : Error(ErrorCategory::io, msg) {}
};

// Integrator state became NaN/Inf; usually means dt is too large.
class NonFiniteState : public Error {
public:
    explicit NonFiniteState(const std::string& msg) : Error(ErrorCategory::model, msg) {}
    NonFiniteState(long trajectory_index, const std::string& msg)
        : Error(ErrorCategory::model,
                "trajectory " + std::to_string(trajectory_index) + ": " + msg),
          trajectory_index_(trajectory_index) {}
    long trajectory_index() const { return trajectory_index_; }

private:
    long trajectory_index_ = -1;
};

// potential() requires V != 0; use adiabatic_rhs directly in that case.
class DegenerateInteraction : public Error {
public:
    explicit DegenerateInteraction(const std::string& msg) : Error(ErrorCategory::model, msg) {}
};

class EmptySeries : public Error {
public:
    explicit EmptySeries(const std::string& msg) : Error(ErrorCategory::analysis, msg) {}
};

class NoSecondPeak : public Error {
public:
    explicit NoSecondPeak(const std::string& msg) : Error(ErrorCategory::analysis, msg) {}
};

class AllZeroCounts : public Error {
public:
    explicit AllZeroCounts(const std::string& msg) : Error(ErrorCategory::analysis, msg) {}
};

class InsufficientData : public Error {
public:
    explicit InsufficientData(const std::string& msg) : Error(ErrorCategory::analysis, msg) {}
};

} // namespace qjump
