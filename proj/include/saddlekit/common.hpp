#pragma once

#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace saddlekit {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

// Raised for malformed inputs and violated preconditions.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Raised when a file cannot be read or written.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Raised when a problem does not satisfy the regularity an operation needs
// (no unique minimizer, inconsistent stationarity system, ...).
class AssumptionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Portable uniform draws on top of std::mt19937_64. The standard
// distributions are implementation-defined, which would make generated
// scenarios differ between standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  // Uniform on [0, 1).
  double uniform();
  // Uniform on [lo, hi).
  double uniform(double lo, double hi);
  // Uniform on the open interval (lo, hi).
  double uniform_open(double lo, double hi);
  // Uniform integer in [lo, hi].
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi);
  // Standard normal via Box-Muller.
  double normal();
  Vector normal_vector(Eigen::Index n);

 private:
  std::mt19937_64 engine_;
};

}  // namespace saddlekit
