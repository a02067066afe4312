#pragma once

#include <stdexcept>
#include <string>

namespace nhsl {

/// Base class for all errors thrown by this library.
class error : public std::runtime_error {
public:
    explicit error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Malformed user input: bad radii, bad grids, bad parameter ranges.
class validation_error : public error {
public:
    using error::error;
};

/// Missing or inconsistent configuration (unknown keys, absent sections).
class config_error : public error {
public:
    using error::error;
};

/// Mathematically invalid request: closed line-gap, empty truncation window.
class domain_error : public error {
public:
    using error::error;
};

/// Required symmetry violated beyond tolerance (chirality, block structure).
class symmetry_error : public error {
public:
    using error::error;
};

/// A dense kernel failed or produced an unusable result (ill-separated
/// spectral clusters, ambiguous numerical rank, unreliable quadrature,
/// ambiguous eigenvalue tracking).
class numerical_error : public error {
public:
    using error::error;
};

class not_implemented_error : public error {
public:
    using error::error;
};

} // namespace nhsl
