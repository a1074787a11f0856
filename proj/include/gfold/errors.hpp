#pragma once

#include <stdexcept>
#include <string>

namespace gfold {

// Base class for all domain errors raised by this library.  CLI maps these
// to exit code 2; anything else escaping is a genuine bug.
class error : public std::runtime_error {
public:
    explicit error(const std::string& what) : std::runtime_error(what) {}
};

class invalid_angle : public error {
public:
    using error::error;
};

class non_rational_angle : public error {
public:
    using error::error;
};

class index_error : public error {
public:
    using error::error;
};

class gluing_mismatch : public error {
public:
    using error::error;
};

class edge_length_mismatch : public error {
public:
    using error::error;
};

class disconnected_complex : public error {
public:
    using error::error;
};

class non_integer_genus : public error {
public:
    using error::error;
};

class reflection_condition_violated : public error {
public:
    using error::error;
};

class geometry_mismatch : public error {
public:
    using error::error;
};

class parameter_constraint : public error {
public:
    using error::error;
};

class parse_error : public error {
public:
    using error::error;
};

// Raised when a probe point lands on the separating curves of a cylinder
// decomposition, so the height-split ratio is not defined.
class point_on_boundary : public error {
public:
    using error::error;
};

class start_at_singularity : public error {
public:
    using error::error;
};

class start_on_boundary : public error {
public:
    using error::error;
};

// Raised when a direction admits no cylinder decomposition, so the
// height-split construction has nothing to split against.
class no_cylinder_decomposition : public error {
public:
    using error::error;
};

} // namespace gfold
