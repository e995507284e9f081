#pragma once

#include <stdexcept>
#include <string>

namespace bcsnmr {

// All library failures derive from Error so callers can map them onto exit
// codes without string matching.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ArgumentError : public Error {
 public:
  using Error::Error;
};

// Requested size exceeds what the dense representation supports.
class CapacityError : public Error {
 public:
  using Error::Error;
};

// A pulse program that cannot be replayed or parsed.
class ProgramError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

// Inputs are well formed but violate a numerical precondition of the
// requested operation (e.g. exact compilation of a non-commuting Hamiltonian).
class PreconditionError : public Error {
 public:
  using Error::Error;
};

class InsufficientPeaksError : public Error {
 public:
  using Error::Error;
};

}  // namespace bcsnmr
