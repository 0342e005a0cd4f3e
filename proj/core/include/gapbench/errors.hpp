#pragma once

#include <stdexcept>
#include <string>

namespace gapbench {

/// A query was made outside the domain it is defined on (e.g. ray origin outside the map).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// A map specification violates its generation preconditions.
class GenerationError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Rejection sampling gave up.
class InfeasibleError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// No free path between two grid cells.
class UnreachableError : public std::runtime_error {
public:
    UnreachableError() : std::runtime_error("goal unreachable") {}
};

/// Malformed frame or message on the algorithm wire.
class ProtocolError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// The algorithm under test misbehaved (exception, timeout, non-finite output, transport loss).
class AlgorithmFault : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A metric is undefined for its input.
class MetricError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Internal invariant between two computed quantities does not hold.
class ConsistencyError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// Invalid campaign configuration.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace gapbench
