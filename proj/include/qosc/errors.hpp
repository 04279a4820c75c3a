// errors.hpp — exception types shared by the qosc library and CLI

#pragma once

#include <stdexcept>
#include <string>

namespace qosc {

// Argument outside the mathematical domain of a function (negative alpha,
// non-finite argument, non-positive frequency, ...).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// Inconsistent user configuration (manifold far from resonance, bad ranges).
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Failure of a numerical procedure (eigensolver, propagation accuracy).
class NumericError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A retained perturbative term has a denominator below the guard.
class SmallDenominatorError : public NumericError {
public:
    SmallDenominatorError(int p, int P, double denominator)
        : NumericError("second-order sum: denominator " + std::to_string(denominator) +
                       " below guard at (p=" + std::to_string(p) + ", P=" + std::to_string(P) +
                       "); unhandled near-degeneracy"),
          p_(p), P_(P) {}

    int p() const noexcept { return p_; }
    int P() const noexcept { return P_; }

private:
    int p_;
    int P_;
};

// Basis truncation too small for the requested object.
class TruncationError : public NumericError {
public:
    TruncationError(std::string cutoff, double leakage)
        : NumericError("truncation leakage " + std::to_string(leakage) + " exceeds tolerance; raise " +
                       cutoff),
          cutoff_(std::move(cutoff)), leakage_(leakage) {}

    const std::string& cutoff() const noexcept { return cutoff_; }
    double leakage() const noexcept { return leakage_; }

private:
    std::string cutoff_;
    double leakage_;
};

} // namespace qosc
