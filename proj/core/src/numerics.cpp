#include "gencs/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace gencs {

namespace {

void require_finite(std::span<const double> values, const char* what) {
  for (double v : values) {
    if (!std::isfinite(v)) throw std::invalid_argument(std::string(what) + ": non-finite entry");
  }
}

void require_same_size(std::size_t a, std::size_t b, const char* what) {
  if (a != b) {
    throw std::invalid_argument(std::string(what) + ": dimension mismatch (" + std::to_string(a) +
                                " vs " + std::to_string(b) + ")");
  }
}

std::uint64_t splitmix64(std::uint64_t& state) noexcept {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace

// ---------------------------------------------------------------- Vector

Vector::Vector(std::size_t dim, double fill) : data_(dim, fill) {}

Vector::Vector(std::initializer_list<double> values) : data_(values) {
  require_finite(data_, "Vector");
}

Vector::Vector(std::vector<double> values) : data_(std::move(values)) {
  require_finite(data_, "Vector");
}

double Vector::squared_norm() const noexcept { return dot(data_, data_); }

double Vector::norm() const noexcept {
  // Scaled two-pass norm; avoids overflow for the large-magnitude inputs the
  // landscape functions accept.
  double scale = 0.0;
  for (double v : data_) scale = std::max(scale, std::abs(v));
  if (scale == 0.0 || !std::isfinite(scale)) return scale;
  double sum = 0.0;
  for (double v : data_) {
    const double t = v / scale;
    sum += t * t;
  }
  return scale * std::sqrt(sum);
}

bool Vector::is_zero() const noexcept {
  return std::all_of(data_.begin(), data_.end(), [](double v) { return v == 0.0; });
}

bool Vector::all_finite() const noexcept {
  return std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); });
}

Vector& Vector::operator+=(const Vector& other) {
  require_same_size(size(), other.size(), "Vector +=");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += other.data_[i];
  return *this;
}

Vector& Vector::operator-=(const Vector& other) {
  require_same_size(size(), other.size(), "Vector -=");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= other.data_[i];
  return *this;
}

Vector& Vector::operator*=(double s) noexcept {
  for (double& v : data_) v *= s;
  return *this;
}

Vector operator+(Vector a, const Vector& b) { return a += b; }
Vector operator-(Vector a, const Vector& b) { return a -= b; }
Vector operator-(Vector a) { return a *= -1.0; }
Vector operator*(double s, Vector a) { return a *= s; }
Vector operator*(Vector a, double s) { return a *= s; }

double dot(std::span<const double> a, std::span<const double> b) noexcept {
  // Four independent accumulators so the compiler can vectorize without
  // reassociation flags. The summation order is fixed, so results are
  // reproducible run to run.
  const std::size_t n = a.size();
  const double* pa = a.data();
  const double* pb = b.data();
  double s0 = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0;
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    s0 += pa[i] * pb[i];
    s1 += pa[i + 1] * pb[i + 1];
    s2 += pa[i + 2] * pb[i + 2];
    s3 += pa[i + 3] * pb[i + 3];
  }
  for (; i < n; ++i) s0 += pa[i] * pb[i];
  return (s0 + s1) + (s2 + s3);
}

double dot(const Vector& a, const Vector& b) {
  require_same_size(a.size(), b.size(), "dot");
  return dot(a.span(), b.span());
}

// ---------------------------------------------------------------- Matrix

Matrix::Matrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> row_major)
    : rows_(rows), cols_(cols), data_(std::move(row_major)) {
  if (data_.size() != rows * cols) {
    throw std::invalid_argument("Matrix: expected " + std::to_string(rows * cols) +
                                " entries, got " + std::to_string(data_.size()));
  }
  require_finite(data_, "Matrix");
}

Matrix::Matrix(std::initializer_list<std::initializer_list<double>> rows) {
  rows_ = rows.size();
  cols_ = rows_ == 0 ? 0 : rows.begin()->size();
  data_.reserve(rows_ * cols_);
  for (const auto& r : rows) {
    if (r.size() != cols_) throw std::invalid_argument("Matrix: ragged initializer");
    data_.insert(data_.end(), r.begin(), r.end());
  }
  require_finite(data_, "Matrix");
}

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Matrix Matrix::diagonal(const Vector& diag) {
  Matrix m(diag.size(), diag.size());
  for (std::size_t i = 0; i < diag.size(); ++i) m(i, i) = diag[i];
  return m;
}

Matrix Matrix::transposed() const {
  Matrix t(cols_, rows_);
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t c = 0; c < cols_; ++c) t(c, r) = (*this)(r, c);
  return t;
}

bool Matrix::is_zero() const noexcept {
  return std::all_of(data_.begin(), data_.end(), [](double v) { return v == 0.0; });
}

double Matrix::frobenius_norm() const noexcept { return std::sqrt(dot(data_, data_)); }

Matrix& Matrix::operator+=(const Matrix& other) {
  if (rows_ != other.rows_ || cols_ != other.cols_)
    throw std::invalid_argument("Matrix +=: shape mismatch");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += other.data_[i];
  return *this;
}

Matrix& Matrix::operator-=(const Matrix& other) {
  if (rows_ != other.rows_ || cols_ != other.cols_)
    throw std::invalid_argument("Matrix -=: shape mismatch");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= other.data_[i];
  return *this;
}

Matrix& Matrix::operator*=(double s) noexcept {
  for (double& v : data_) v *= s;
  return *this;
}

Matrix operator+(Matrix a, const Matrix& b) { return a += b; }
Matrix operator-(Matrix a, const Matrix& b) { return a -= b; }
Matrix operator*(double s, Matrix a) { return a *= s; }

void gemv(const Matrix& m, std::span<const double> x, std::span<double> y) noexcept {
  for (std::size_t r = 0; r < m.rows(); ++r) y[r] = dot(m.row(r), x);
}

void gemv_transposed(const Matrix& m, std::span<const double> x, std::span<double> y) noexcept {
  std::fill(y.begin(), y.end(), 0.0);
  const std::size_t cols = m.cols();
  for (std::size_t r = 0; r < m.rows(); ++r) {
    const double a = x[r];
    if (a == 0.0) continue;
    const double* row = m.row(r).data();
    for (std::size_t c = 0; c < cols; ++c) y[c] += a * row[c];
  }
}

Vector multiply(const Matrix& m, const Vector& x) {
  require_same_size(m.cols(), x.size(), "multiply");
  Vector y(m.rows());
  gemv(m, x.span(), y.span());
  return y;
}

Vector multiply_transposed(const Matrix& m, const Vector& x) {
  require_same_size(m.rows(), x.size(), "multiply_transposed");
  Vector y(m.cols());
  gemv_transposed(m, x.span(), y.span());
  return y;
}

Matrix multiply(const Matrix& a, const Matrix& b) {
  require_same_size(a.cols(), b.rows(), "matrix multiply");
  Matrix c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    auto out = c.row(i);
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double aik = a(i, k);
      if (aik == 0.0) continue;
      const auto brow = b.row(k);
      for (std::size_t j = 0; j < b.cols(); ++j) out[j] += aik * brow[j];
    }
  }
  return c;
}

Matrix outer(const Vector& a, const Vector& b) {
  Matrix m(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) m(i, j) = a[i] * b[j];
  return m;
}

// ---------------------------------------------------------------- Rng

std::uint64_t mix_seed(std::uint64_t base_seed, std::initializer_list<std::uint64_t> keys) noexcept {
  std::uint64_t state = base_seed;
  std::uint64_t h = splitmix64(state);
  for (std::uint64_t key : keys) {
    state ^= key + 0x632BE59BD9B4E019ULL + (h << 6) + (h >> 2);
    h = splitmix64(state);
  }
  return h;
}

Rng::Rng(std::uint64_t seed) : seed_(seed) {
  // Expand the 64-bit seed so nearby seeds do not start from correlated
  // Mersenne Twister states.
  std::uint64_t state = seed;
  std::seed_seq seq{static_cast<std::uint32_t>(splitmix64(state)),
                    static_cast<std::uint32_t>(splitmix64(state)),
                    static_cast<std::uint32_t>(splitmix64(state)),
                    static_cast<std::uint32_t>(splitmix64(state))};
  engine_.seed(seq);
}

Rng Rng::substream(std::uint64_t base_seed, std::initializer_list<std::uint64_t> keys) {
  return Rng(mix_seed(base_seed, keys));
}

Matrix gaussian_matrix(std::size_t rows, std::size_t cols, double variance, Rng& rng) {
  if (rows == 0 || cols == 0) throw std::invalid_argument("gaussian_matrix: dimensions must be >= 1");
  if (!(variance > 0.0) || !std::isfinite(variance))
    throw std::invalid_argument("gaussian_matrix: variance must be positive");
  const double sd = std::sqrt(variance);
  std::vector<double> data(rows * cols);
  for (double& v : data) v = sd * rng.normal();
  return Matrix(rows, cols, std::move(data));
}

Vector gaussian_vector(std::size_t dim, double variance, Rng& rng) {
  if (dim == 0) throw std::invalid_argument("gaussian_vector: dimension must be >= 1");
  if (!(variance > 0.0)) throw std::invalid_argument("gaussian_vector: variance must be positive");
  const double sd = std::sqrt(variance);
  std::vector<double> data(dim);
  for (double& v : data) v = sd * rng.normal();
  return Vector(std::move(data));
}

Vector sphere_sample(std::size_t dim, Rng& rng) {
  for (;;) {
    Vector v = gaussian_vector(dim, 1.0, rng);
    const double n = v.norm();
    if (n > 0.0) return v *= 1.0 / n;
  }
}

// ---------------------------------------------------------------- spectral norm

double spectral_norm(const Matrix& m, SpectralNormOptions options) {
  if (!(options.tol > 0.0)) throw std::invalid_argument("spectral_norm: tol must be positive");
  if (options.max_iter < 1) throw std::invalid_argument("spectral_norm: max_iter must be >= 1");
  if (m.rows() == 0 || m.cols() == 0) throw std::invalid_argument("spectral_norm: empty matrix");
  if (m.is_zero()) return 0.0;

  Rng rng(mix_seed(0x5EC7ULL, {m.rows(), m.cols()}));
  Vector v = sphere_sample(m.cols(), rng);
  Vector mv(m.rows());
  Vector w(m.cols());

  double estimate = 0.0;
  for (int it = 0; it < options.max_iter; ++it) {
    gemv(m, v.span(), mv.span());
    const double next = mv.norm();
    gemv_transposed(m, mv.span(), w.span());
    const double wn = w.norm();
    if (wn == 0.0) {
      // Start vector landed in the null space; restart from a fresh direction.
      v = sphere_sample(m.cols(), rng);
      continue;
    }
    v = w;
    v *= 1.0 / wn;
    if (it > 0 && std::abs(next - estimate) <= options.tol * next) return next;
    estimate = next;
  }
  throw ConvergenceError("spectral_norm: no convergence within " +
                             std::to_string(options.max_iter) + " iterations",
                         estimate);
}

}  // namespace gencs
