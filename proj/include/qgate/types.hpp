#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace qgate {

using Complex = std::complex<double>;
using SpMat = Eigen::SparseMatrix<Complex, Eigen::RowMajor>;
using Vec = Eigen::VectorXcd;
using Gate = Eigen::Matrix4cd;
using Vec4 = Eigen::Vector4cd;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr Complex kI{0.0, 1.0};

// All config/file frequencies are linear (GHz or MHz). The conversion to
// angular units (rad/ns) happens exactly once, in operator construction.
inline constexpr double kGHzToRadPerNs = 2.0 * kPi;
inline constexpr double kMHzToRadPerNs = 2.0 * kPi * 1e-3;

// Invalid or inconsistent run configuration (CLI exit code 2).
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

// Failure inside a pipeline stage (CLI exit code 3).
class StageError : public std::runtime_error {
 public:
  explicit StageError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace qgate
