#pragma once

#include <stdexcept>
#include <string>

namespace cdtopo {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// The reduced stiffness system could not be factorized or solved to the
// residual contract; usually the boundary conditions do not suppress all
// rigid-body modes.
class SingularSystem : public Error {
 public:
  using Error::Error;
};

// theta = varsigma * a_e - c_e vanished, so the dual cubic has the root 0.
class DegenerateTheta : public Error {
 public:
  using Error::Error;
};

class TooLarge : public Error {
 public:
  using Error::Error;
};

class NotConverged : public Error {
 public:
  using Error::Error;
};

class BisectionFailure : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace cdtopo
