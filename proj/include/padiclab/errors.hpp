#pragma once

#include <stdexcept>
#include <string>

namespace padiclab {

// Base class for every failure the library raises on purpose.  Callers that
// need to distinguish outcomes catch the concrete type; the CLI maps a few of
// them to dedicated exit codes.
struct Error : std::runtime_error {
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

struct DivisionByZero : Error {
    explicit DivisionByZero(const std::string& w = "division by zero") : Error(w) {}
};

struct IncompatibleFields : Error {
    explicit IncompatibleFields(const std::string& w) : Error(w) {}
};

// A result is indistinguishable from zero at the available precision, or an
// operation needs more certified digits than its inputs carry.
struct PrecisionLoss : Error {
    explicit PrecisionLoss(const std::string& w) : Error(w) {}
};

struct ResourceLimit : Error {
    explicit ResourceLimit(const std::string& w) : Error(w) {}
};

struct HenselPreconditionFailed : Error {
    explicit HenselPreconditionFailed(const std::string& w) : Error(w) {}
};

// Solving inside the declared field is impossible; carries the index of the
// first obstructed digit when raised by the backward solver.
struct ExtensionRequired : Error {
    int obstructed_digit = -1;
    explicit ExtensionRequired(const std::string& w, int digit = -1)
        : Error(w), obstructed_digit(digit) {}
};

struct RamifiedFieldUnsupported : Error {
    explicit RamifiedFieldUnsupported(const std::string& w) : Error(w) {}
};

// Residue reduction asked of an element with val < 0.
struct NegativeValuation : Error {
    explicit NegativeValuation(const std::string& w) : Error(w) {}
};

struct SigmaInapplicable : Error {
    explicit SigmaInapplicable(const std::string& w) : Error(w) {}
};

struct InvalidDegree : Error {
    explicit InvalidDegree(const std::string& w) : Error(w) {}
};

struct NonIntegralCoefficient : Error {
    explicit NonIntegralCoefficient(const std::string& w) : Error(w) {}
};

struct NotPeriodic : Error {
    explicit NotPeriodic(const std::string& w) : Error(w) {}
};

struct NonConvergence : Error {
    explicit NonConvergence(const std::string& w) : Error(w) {}
};

struct ChartInstability : Error {
    explicit ChartInstability(const std::string& w) : Error(w) {}
};

struct DepthInsufficient : Error {
    explicit DepthInsufficient(const std::string& w) : Error(w) {}
};

struct ZeroVector : Error {
    explicit ZeroVector(const std::string& w = "all coordinates are zero") : Error(w) {}
};

struct ConfigError : Error {
    explicit ConfigError(const std::string& w) : Error(w) {}
};

// An experiment driver detected a violation of a verified statement; the CLI
// turns this into exit code 2.
struct TheoremViolation : Error {
    explicit TheoremViolation(const std::string& w) : Error(w) {}
};

} // namespace padiclab
