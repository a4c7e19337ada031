#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace pimex {

using Index = Eigen::Index;
using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using RowVector = Eigen::RowVectorXd;

/// Per-subsystem state vectors u^1..u^m of a coupled system.
using PartitionedState = std::vector<Vector>;
using StateSpan = std::span<const Vector>;

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

class UnknownSchemeError : public Error {
 public:
  using Error::Error;
};

/// Implicit stage solve did not reach the residual tolerance.
class NewtonError : public Error {
 public:
  NewtonError(const std::string& what, Index stage, Index subsystem, double residual_norm)
      : Error(what), stage_(stage), subsystem_(subsystem), residual_norm_(residual_norm) {}

  Index stage() const { return stage_; }
  Index subsystem() const { return subsystem_; }
  double residual_norm() const { return residual_norm_; }

 private:
  Index stage_;
  Index subsystem_;
  double residual_norm_;
};

class NonFiniteError : public Error {
 public:
  using Error::Error;
};

class SingularMatrixError : public Error {
 public:
  using Error::Error;
};

class FormatError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class PhysicsError : public Error {
 public:
  using Error::Error;
};

class OptimizationError : public Error {
 public:
  using Error::Error;
};

/// Total length of a partitioned state.
inline Index total_size(const PartitionedState& u) {
  Index n = 0;
  for (const auto& part : u) n += part.size();
  return n;
}

}  // namespace pimex
