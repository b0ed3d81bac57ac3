#pragma once

#include <stdexcept>
#include <string>

namespace pandora {

/// Malformed instance data (bad probabilities, negative costs, empty supports).
class InvalidInstance : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Input exceeds a configured enumeration or DP size limit.
class SizeError : public std::length_error {
public:
    using std::length_error::length_error;
};

/// Argument outside an operation's domain (wrong support, bad epsilon, ...).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Text or JSON that could not be parsed.
class ParseError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A generated object failed its own invariants.
class ConstructionError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

}  // namespace pandora
