#pragma once

#include <stdexcept>
#include <string>

namespace memkernel {

/// Root of every error the library throws. `code()` is the CLI exit status
/// class the error maps to (2 = configuration/contract, 3 = numerical).
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what, int code = 3) : std::runtime_error(what), code_(code) {}
    int code() const noexcept { return code_; }

private:
    int code_;
};

// Argument outside the mathematical domain (non-finite input, negative norm, ...).
class DomainError : public Error {
public:
    explicit DomainError(const std::string& what) : Error("domain error: " + what, 2) {}
};

class UnsupportedOrder : public Error {
public:
    explicit UnsupportedOrder(int n)
        : Error("unsupported Bessel order " + std::to_string(n) + " (only 0 and 1)", 2) {}
};

// Pointwise kernel requested below SeriesControl::t_floor.
class EvaluationWindowError : public Error {
public:
    explicit EvaluationWindowError(const std::string& what)
        : Error("evaluation window: " + what, 2) {}
};

// Laplace variable outside the half-plane of absolute convergence.
class ConvergenceDomainError : public Error {
public:
    explicit ConvergenceDomainError(const std::string& what)
        : Error("outside convergence half-plane: " + what, 2) {}
};

class InsufficientTruncation : public Error {
public:
    InsufficientTruncation(const std::string& what, int needed)
        : Error("insufficient image truncation: " + what, 3), needed_(needed) {}
    /// Smallest image count that would satisfy the tail bound.
    int needed() const noexcept { return needed_; }

private:
    int needed_;
};

class InsufficientModes : public Error {
public:
    explicit InsufficientModes(const std::string& what) : Error("insufficient modes: " + what, 3) {}
};

class NonConvergence : public Error {
public:
    explicit NonConvergence(const std::string& what) : Error("non-convergence: " + what, 3) {}
};

class NumericalFailure : public Error {
public:
    explicit NumericalFailure(const std::string& what) : Error("numerical failure: " + what, 3) {}
};

class SourceEvaluationError : public Error {
public:
    explicit SourceEvaluationError(const std::string& what)
        : Error("source evaluation: " + what, 3) {}
};

class MappingInfeasible : public Error {
public:
    explicit MappingInfeasible(const std::string& what) : Error("mapping infeasible: " + what, 2) {}
};

class StabilityError : public Error {
public:
    explicit StabilityError(const std::string& what) : Error("stability bound violated: " + what, 2) {}
};

class BlowUp : public Error {
public:
    explicit BlowUp(const std::string& what) : Error("blow-up: " + what, 3) {}
};

class ConfigError : public Error {
public:
    explicit ConfigError(const std::string& what) : Error("config: " + what, 2) {}
};

}  // namespace memkernel
