#pragma once

#include <stdexcept>
#include <string>

namespace mpa {

// Root of the library's exception hierarchy.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Bad call-site arguments (dimension mismatch, out-of-range parameters).
class InvalidArgument : public Error {
public:
    using Error::Error;
};

// Structurally unusable data (empty dataset, single-class labels,
// more than two distinct label values).
class InvalidData : public Error {
public:
    using Error::Error;
};

// CSV cell that cannot be interpreted; carries 1-based row/column.
class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t row, std::size_t col)
        : Error(what + " (row " + std::to_string(row) + ", col " + std::to_string(col) + ")"),
          row_(row), col_(col) {}
    std::size_t row() const { return row_; }
    std::size_t col() const { return col_; }

private:
    std::size_t row_;
    std::size_t col_;
};

// Affinely dependent control points, coincident class centroids, or a
// failed random initialization.
class DegenerateGeometry : public Error {
public:
    using Error::Error;
};

// Knot abscissae not strictly increasing (minimum gap 1e-9).
class InvalidKnots : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

} // namespace mpa
