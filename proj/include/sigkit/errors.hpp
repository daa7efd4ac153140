#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace sigkit {

/// Base of every error raised by the library. Input problems and internal
/// invariant violations are kept apart so front ends can map them to
/// different exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad user input: malformed descriptors, out-of-range arguments, limits.
class InputError : public Error {
 public:
  using Error::Error;
};

/// Carries a witness: for a monotonicity failure, masks smaller ⊂ larger
/// with φ(smaller)=1 and φ(larger)=0; for a boundary failure both equal the
/// offending mask (∅ or the full set).
class NotSemicoherent : public InputError {
 public:
  NotSemicoherent(const std::string& what, std::uint32_t smaller, std::uint32_t larger)
      : InputError(what), smaller_(smaller), larger_(larger) {}
  std::uint32_t smaller() const { return smaller_; }
  std::uint32_t larger() const { return larger_; }
  bool is_boundary_failure() const { return smaller_ == larger_; }

 private:
  std::uint32_t smaller_;
  std::uint32_t larger_;
};

class SizeLimitExceeded : public InputError {
 public:
  using InputError::InputError;
};

class DimensionMismatch : public InputError {
 public:
  using InputError::InputError;
};

class OutOfRange : public InputError {
 public:
  using InputError::InputError;
};

class EmptyPathList : public InputError {
 public:
  using InputError::InputError;
};

class PathOutOfRange : public InputError {
 public:
  using InputError::InputError;
};

class SubsetOutOfRange : public InputError {
 public:
  using InputError::InputError;
};

class EmptySetList : public InputError {
 public:
  using InputError::InputError;
};

class ParseError : public InputError {
 public:
  using InputError::InputError;
};

/// A computed object broke one of its defining invariants (negative
/// signature entry, tail not monotone, ...). Signals a bad quality function
/// or a bug, never silently repaired.
class InvariantViolation : public Error {
 public:
  using Error::Error;
};

/// The sampler kept drawing vectors with tied (or nonpositive) entries.
class TieResampleExhausted : public Error {
 public:
  using Error::Error;
};

}  // namespace sigkit
