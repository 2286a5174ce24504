#pragma once

#include <stdexcept>
#include <string>

namespace sttrace {

/// Base of all errors raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid user configuration (mesh size, time step, config file).
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// A level-set gradient vanished where a normal was required.
class DegenerateGradientError : public Error {
 public:
  using Error::Error;
};

/// All three vertex values of a triangle are zero.
class DegenerateCutError : public Error {
 public:
  using Error::Error;
};

/// Newton inversion of the mesh deformation failed or left the deformed region.
class InversionError : public Error {
 public:
  using Error::Error;
};

/// A point could not be located in the active region.
class LookupError : public Error {
 public:
  using Error::Error;
};

/// Singular Jacobian of the deformation at an evaluation point.
class SingularJacobianError : public Error {
 public:
  using Error::Error;
};

/// Scene lacks data required by the operation (e.g. no exact solution).
class UnsupportedSceneError : public Error {
 public:
  using Error::Error;
};

/// Linear solve failed; carries the slab index.
class SolveError : public Error {
 public:
  SolveError(int slab, const std::string& what)
      : Error("slab " + std::to_string(slab) + ": " + what), slab_(slab) {}
  int slab() const { return slab_; }

 private:
  int slab_;
};

/// The surface left the computational domain (no active elements).
class EmptyActiveSetError : public Error {
 public:
  explicit EmptyActiveSetError(int slab)
      : Error("slab " + std::to_string(slab) + ": no active elements"), slab_(slab) {}
  int slab() const { return slab_; }

 private:
  int slab_;
};

}  // namespace sttrace
