#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace pdfem {

using Vec3 = std::array<double, 3>;

enum class Physics { thermal, elastic };

inline int dofs_per_node(Physics p, int dim) {
    return p == Physics::thermal ? 1 : dim;
}

inline const char* physics_name(Physics p) {
    return p == Physics::thermal ? "thermal" : "elastic";
}

/// Base class for all errors raised by the library.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Bad user input: negative resolution, invalid material, config mistakes.
class ValidationError : public Error {
public:
    explicit ValidationError(const std::string& msg) : Error(msg) {}
};

/// Malformed input file. Carries the 1-based line number of the offending line.
class ParseError : public Error {
public:
    ParseError(const std::string& source, long line, const std::string& msg)
        : Error(source + ":" + std::to_string(line) + ": " + msg), line_(line) {}
    long line() const { return line_; }

private:
    long line_;
};

/// Degenerate or inverted element geometry (non-positive Jacobian).
class GeometryError : public Error {
public:
    explicit GeometryError(const std::string& msg) : Error(msg) {}
};

/// A point could not be located inside the structured grid.
class LocationError : public Error {
public:
    explicit LocationError(const std::string& msg) : Error(msg) {}
};

/// Pure-Neumann right-hand side not orthogonal to the rigid modes.
class EquilibriumError : public Error {
public:
    explicit EquilibriumError(const std::string& msg) : Error(msg) {}
};

} // namespace pdfem
