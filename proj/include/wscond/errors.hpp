#pragma once

#include <stdexcept>
#include <string>

namespace wscond {

// Root of all engine errors. The CLI maps each subclass to an exit code.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input: unknown variable, out-of-domain value, bad file, bad schema.
class ValidationError : public Error {
 public:
  using Error::Error;
};

// A configured cap (nodes, descriptors, worlds) or a deadline was exceeded.
class ResourceError : public Error {
 public:
  using Error::Error;
};

// The wall-clock deadline of a computation passed.
class DeadlineExceeded : public ResourceError {
 public:
  DeadlineExceeded() : ResourceError("instance too hard: deadline exceeded") {}
};

// Conditioning on evidence whose confidence is zero.
class UnsatisfiableEvidence : public Error {
 public:
  UnsatisfiableEvidence() : Error("unsatisfiable evidence") {}
};

}  // namespace wscond
