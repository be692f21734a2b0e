// SPDX-License-Identifier: Apache-2.0
#ifndef CARPETDIM_ERROR_HPP
#define CARPETDIM_ERROR_HPP

#include <stdexcept>
#include <string>

namespace carpetdim {

enum class ErrorKind {
  MalformedSpec,
  ParseError,
  IoError,
  InfeasibleLayout,
  PerturbationTooLarge,
  TooDeep,
  DegenerateFamily,
  NonContractive,
  NonPrimitive,
  NoConvergence,
  BracketFailure,
  NoRootInUnitInterval,
  IterationLimit,
};

const char* to_string(ErrorKind kind);

/// Exception carrying a module error kind.  The CLI maps kinds onto exit codes.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// 1 = validation / hypothesis failure, 2 = numeric non-convergence, 3 = I/O or parse.
int exit_code(ErrorKind kind);

}  // namespace carpetdim

#endif  // CARPETDIM_ERROR_HPP
