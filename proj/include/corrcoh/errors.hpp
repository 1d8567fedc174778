#pragma once

#include <stdexcept>
#include <string>

namespace corrcoh {

/// Invalid argument: wrong dimensions, unknown labels, non-orthonormal bases.
class ArgumentError : public std::invalid_argument {
 public:
  explicit ArgumentError(const std::string& what) : std::invalid_argument(what) {}
};

/// A state or operator exceeds the configured desk-scale limits.
class SizeError : public std::length_error {
 public:
  explicit SizeError(const std::string& what) : std::length_error(what) {}
};

/// A matrix failed a density-matrix or ket invariant. The message names the invariant.
class ValidationError : public std::runtime_error {
 public:
  explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

/// No feasible candidate exists for an extension search.
class SearchError : public std::runtime_error {
 public:
  explicit SearchError(const std::string& what) : std::runtime_error(what) {}
};

/// Malformed input file.
class ParseError : public std::runtime_error {
 public:
  explicit ParseError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace corrcoh
