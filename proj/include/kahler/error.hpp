#pragma once

#include <stdexcept>
#include <string>

namespace kahler {

/// Base of every failure raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A documented precondition of an operation does not hold.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// Positivity or convexity failed; carries where.
class PositivityError : public Error {
 public:
  PositivityError(const std::string& what, double location)
      : Error(what), location_(location) {}
  double location() const noexcept { return location_; }

 private:
  double location_;
};

/// Right-hand side of a ddbar equation does not integrate to zero.
class CompatibilityError : public Error {
 public:
  CompatibilityError(const std::string& what, double total)
      : Error(what), total_(total) {}
  double total() const noexcept { return total_; }

 private:
  double total_;
};

/// The contraction V -| omega is not dbar-exact / Im V is not Hamiltonian.
class ObstructionError : public Error {
 public:
  ObstructionError(const std::string& what, double obstruction)
      : Error(what), obstruction_(obstruction) {}
  double obstruction() const noexcept { return obstruction_; }

 private:
  double obstruction_;
};

}  // namespace kahler
