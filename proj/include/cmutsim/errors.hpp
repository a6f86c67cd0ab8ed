#pragma once

#include <stdexcept>
#include <string>

namespace cmutsim {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Input or state violates a documented invariant; message names the field
// and the offending values.
class ValidationError : public Error {
 public:
  using Error::Error;
};

// Argument outside the mathematical domain of an operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

// Malformed input file; message names the line/field where parsing stopped.
class ParseError : public Error {
 public:
  using Error::Error;
};

// Membrane touches the bottom of the cavity (w >= gap height).
class ContactError : public Error {
 public:
  using Error::Error;
};

// Linear-algebra failure (singular system) or solver misconfiguration.
class SolverError : public Error {
 public:
  using Error::Error;
};

}  // namespace cmutsim
