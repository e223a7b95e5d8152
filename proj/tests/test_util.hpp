#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <random>
#include <string>

#include <unistd.h>

#include <Eigen/Dense>

#include "gfsub/graph.hpp"
#include "gfsub/types.hpp"

namespace gfsub::testing {

/// Uniform [0, 1) and standard normal draws from a fixed-seed engine.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double uniform() { return std::uniform_real_distribution<double>(0.0, 1.0)(engine_); }
  double normal() { return std::normal_distribution<double>(0.0, 1.0)(engine_); }
  std::size_t index(std::size_t lo, std::size_t hi) {
    return std::uniform_int_distribution<std::size_t>(lo, hi)(engine_);
  }

  Matrix normal_matrix(Eigen::Index rows, Eigen::Index cols) {
    Matrix m(rows, cols);
    for (Eigen::Index j = 0; j < cols; ++j)
      for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = normal();
    return m;
  }

  /// Dense symmetric weights in (0.05, 1], zero diagonal.
  Matrix random_adjacency(Eigen::Index n) {
    Matrix a = Matrix::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = i + 1; j < n; ++j) a(i, j) = a(j, i) = 0.05 + 0.95 * uniform();
    return a;
  }

  /// Symmetric positive definite, trace one.
  Matrix random_spd_trace_one(Eigen::Index n) {
    const Matrix g = normal_matrix(n, 2 * n);
    Matrix s = g * g.transpose() + 1e-3 * Matrix::Identity(n, n);
    return s / s.trace();
  }

 private:
  std::mt19937_64 engine_;
};

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static int counter = 0;
    path_ = std::filesystem::temp_directory_path() /
            ("gfsub_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

inline double max_abs(const Matrix& m) { return m.cwiseAbs().maxCoeff(); }

inline double off_diagonal_max(const Matrix& m) {
  Matrix o = m;
  o.diagonal().setZero();
  return o.cwiseAbs().maxCoeff();
}

}  // namespace gfsub::testing
