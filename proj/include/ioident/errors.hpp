#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ioident {

/// Base class for all library errors.
class Error : public std::runtime_error {
  public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Malformed textual input: expressions, signal specs, model files, CSV.
class ParseError : public Error {
  public:
    explicit ParseError(const std::string& msg, std::size_t offset = 0)
        : Error(msg), offset_(offset) {}
    /// Byte offset of the offending position in the input, when known.
    std::size_t offset() const { return offset_; }

  private:
    std::size_t offset_ = 0;
};

/// Violated precondition or inconsistent arguments (dimension mismatch,
/// unknown name, value out of domain).
class InvalidArgument : public Error {
  public:
    explicit InvalidArgument(const std::string& msg) : Error(msg) {}
};

/// Numerical failure at run time: divergence, singular matrix,
/// non-convergence, empty likelihood.
class NumericError : public Error {
  public:
    explicit NumericError(const std::string& msg) : Error(msg) {}
};

} // namespace ioident
