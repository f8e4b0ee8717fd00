#pragma once

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <random>
#include <span>
#include <vector>

#include "gencs/errors.hpp"

namespace gencs {

/// Dense real vector. Entries are finite when built through the checked
/// constructors; arithmetic results are not re-validated.
class Vector {
 public:
  Vector() = default;
  explicit Vector(std::size_t dim, double fill = 0.0);
  Vector(std::initializer_list<double> values);
  explicit Vector(std::vector<double> values);

  std::size_t size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }

  double& operator[](std::size_t i) noexcept { return data_[i]; }
  double operator[](std::size_t i) const noexcept { return data_[i]; }

  std::span<double> span() noexcept { return data_; }
  std::span<const double> span() const noexcept { return data_; }
  const std::vector<double>& values() const noexcept { return data_; }

  double norm() const noexcept;
  double squared_norm() const noexcept;
  bool is_zero() const noexcept;
  bool all_finite() const noexcept;

  Vector& operator+=(const Vector& other);
  Vector& operator-=(const Vector& other);
  Vector& operator*=(double s) noexcept;

  friend bool operator==(const Vector&, const Vector&) = default;

 private:
  std::vector<double> data_;
};

Vector operator+(Vector a, const Vector& b);
Vector operator-(Vector a, const Vector& b);
Vector operator-(Vector a);
Vector operator*(double s, Vector a);
Vector operator*(Vector a, double s);

double dot(std::span<const double> a, std::span<const double> b) noexcept;
double dot(const Vector& a, const Vector& b);

/// Dense row-major real matrix.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0);
  /// Throws std::invalid_argument if the entry count does not match or any
  /// entry is non-finite.
  Matrix(std::size_t rows, std::size_t cols, std::vector<double> row_major);
  Matrix(std::initializer_list<std::initializer_list<double>> rows);

  static Matrix identity(std::size_t n);
  static Matrix diagonal(const Vector& diag);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }

  double& operator()(std::size_t r, std::size_t c) noexcept { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const noexcept { return data_[r * cols_ + c]; }

  std::span<double> row(std::size_t r) noexcept { return {data_.data() + r * cols_, cols_}; }
  std::span<const double> row(std::size_t r) const noexcept {
    return {data_.data() + r * cols_, cols_};
  }
  std::span<const double> data() const noexcept { return data_; }

  Matrix transposed() const;
  bool is_zero() const noexcept;
  double frobenius_norm() const noexcept;

  Matrix& operator+=(const Matrix& other);
  Matrix& operator-=(const Matrix& other);
  Matrix& operator*=(double s) noexcept;

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

Matrix operator+(Matrix a, const Matrix& b);
Matrix operator-(Matrix a, const Matrix& b);
Matrix operator*(double s, Matrix a);

// y = M x
Vector multiply(const Matrix& m, const Vector& x);
// y = M^T x
Vector multiply_transposed(const Matrix& m, const Vector& x);
Matrix multiply(const Matrix& a, const Matrix& b);
Matrix outer(const Vector& a, const Vector& b);

// Raw kernels used on hot paths. Output spans must not alias inputs.
void gemv(const Matrix& m, std::span<const double> x, std::span<double> y) noexcept;
void gemv_transposed(const Matrix& m, std::span<const double> x, std::span<double> y) noexcept;

/// Seeded pseudo-random stream. Identical seed and call sequence give an
/// identical stream. Substreams are derived by hashing (base, keys...) so
/// Monte Carlo trials can be regenerated independently of each other.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  static Rng substream(std::uint64_t base_seed, std::initializer_list<std::uint64_t> keys);

  std::uint64_t seed() const noexcept { return seed_; }

  double normal() { return normal_(engine_); }
  double uniform() { return uniform_(engine_); }
  std::uint64_t next_u64() { return engine_(); }

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::uniform_real_distribution<double> uniform_{0.0, 1.0};
};

std::uint64_t mix_seed(std::uint64_t base_seed, std::initializer_list<std::uint64_t> keys) noexcept;

/// i.i.d. N(0, variance) entries in row-major fill order.
Matrix gaussian_matrix(std::size_t rows, std::size_t cols, double variance, Rng& rng);
Vector gaussian_vector(std::size_t dim, double variance, Rng& rng);
/// Uniform sample on the unit sphere in R^dim.
Vector sphere_sample(std::size_t dim, Rng& rng);

struct SpectralNormOptions {
  double tol = 1e-10;
  int max_iter = 5000;
};

/// Largest singular value by power iteration on M^T M. Returns 0 for the
/// zero matrix. Throws ConvergenceError if the relative change of the
/// estimate does not drop below tol within max_iter iterations.
double spectral_norm(const Matrix& m, SpectralNormOptions options = {});

}  // namespace gencs
