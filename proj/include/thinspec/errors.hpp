#pragma once

#include <stdexcept>
#include <string>

namespace thinspec {

/// Base of every error raised by the toolkit.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A matrix expected to lie in SU(1,1) does not, to tolerance.
class NotInGroup : public Error {
public:
    using Error::Error;
};

/// An operation that needs an elliptic SU(1,1) element was handed something else.
class NotElliptic : public Error {
public:
    using Error::Error;
};

/// An internal numerical consistency check failed (e.g. a real-energy
/// discriminant came out complex, or a band set broke the Floquet count bound).
class NumericalAssertion : public Error {
public:
    using Error::Error;
};

class OutOfDisk : public Error {
public:
    using Error::Error;
};

class NotInBandInterior : public Error {
public:
    using Error::Error;
};

class EmptySet : public Error {
public:
    using Error::Error;
};

/// A randomized search ran out of budget. Retrying with another seed is legitimate.
class BudgetExhausted : public Error {
public:
    using Error::Error;
};

class NTooSmall : public Error {
public:
    NTooSmall(const std::string& what, long long minimal_n) : Error(what), minimal_n_(minimal_n) {}
    long long minimal_n() const noexcept { return minimal_n_; }

private:
    long long minimal_n_;
};

/// A schedule stage cannot meet its constraints; what() carries the diagnostics.
class StageInfeasible : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

}  // namespace thinspec
