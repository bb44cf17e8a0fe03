#pragma once

#include <stdexcept>
#include <string>

namespace rigidity {

enum class ErrorKind {
  ModelMismatch,   // point/tangent handed to the wrong model
  CutLocus,        // log/sphere op requested at or beyond the injectivity radius
  Precondition,    // documented precondition violated
  Convergence,     // iterative scheme hit its iteration cap
  Refinement,      // interval comparison undecidable at current precision
  Parameter,       // malformed parameter (bad radius, bad grammar, ...)
  Diagnostics,     // internal consistency check tripped (e.g. non-monotone lens samples)
  Internal,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

}  // namespace rigidity
