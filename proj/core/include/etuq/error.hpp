#pragma once

#include <stdexcept>
#include <string>

namespace etuq {

/// Argument outside the operation's domain (bad interval, index, length).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// A size cap was exceeded (rule level, enumeration size, TT rank product).
class CapacityError : public std::length_error {
public:
    using std::length_error::length_error;
};

/// Numerical breakdown: singular systems, non-convergence, rank deficiency.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid or unreadable configuration / input file.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace etuq
