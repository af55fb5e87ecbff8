#pragma once
#include <stdexcept>
#include <string>

namespace tlsnoise {

// Base class for every error this library raises on purpose.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A dipole and an observation site coincide (closer than the hard cutoff).
class ZeroDistance : public Error {
 public:
  using Error::Error;
};

// A value fails its type contract (non-finite, non-unit orientation, ...).
class ValidationError : public Error {
 public:
  using Error::Error;
};

// A layer region has zero in-plane measure where a density is required.
class DegenerateLayer : public Error {
 public:
  using Error::Error;
};

// An auto-spectrum is zero at a grid frequency, so normalization is undefined.
class DegenerateSpectrum : public Error {
 public:
  using Error::Error;
};

// An integration or averaging range is empty.
class EmptyRange : public Error {
 public:
  using Error::Error;
};

// A candidate grid does not cover the frequencies a computation needs.
class GridCoverage : public Error {
 public:
  using Error::Error;
};

// Two sequences that must be conformant are not.
class LengthMismatch : public Error {
 public:
  using Error::Error;
};

// Adaptive quadrature hit its refinement cap before reaching tolerance.
class QuadratureFailure : public Error {
 public:
  using Error::Error;
};

// A root bracket has the same sign at both ends.
class NoBracket : public Error {
 public:
  using Error::Error;
};

// An interval argument is out of order or out of domain.
class InvalidRange : public Error {
 public:
  using Error::Error;
};

// A file could not be parsed; carries the 1-based line number when known.
class ParseError : public Error {
 public:
  ParseError(const std::string& msg, long line = 0)
      : Error(line > 0 ? msg + " (line " + std::to_string(line) + ")" : msg),
        line_(line) {}
  long line() const { return line_; }

 private:
  long line_;
};

// Every hypothesis has zero likelihood; the posterior is undefined.
class AllRejected : public Error {
 public:
  using Error::Error;
};

}  // namespace tlsnoise
