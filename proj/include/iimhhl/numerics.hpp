#pragma once

// Dense complex linear algebra for small systems: the matrix/vector carriers,
// a cyclic Jacobi eigensolver for Hermitian matrices, Gaussian elimination and
// the Hermitian matrix exponential.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <initializer_list>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "iimhhl/error.hpp"

namespace iimhhl {

using Complex = std::complex<double>;
using ComplexVector = std::vector<Complex>;
using RealVector = std::vector<double>;

inline constexpr double kPi = 3.14159265358979323846;

class ComplexMatrix {
 public:
  ComplexMatrix() = default;
  ComplexMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}
  ComplexMatrix(std::size_t rows, std::size_t cols, std::vector<Complex> data)
      : rows_(rows), cols_(cols), data_(std::move(data)) {
    if (data_.size() != rows_ * cols_) {
      throw Error(ErrorCode::DimensionMismatch, "entry count does not equal rows*cols");
    }
  }
  ComplexMatrix(std::initializer_list<std::initializer_list<Complex>> rows) {
    rows_ = rows.size();
    cols_ = rows_ == 0 ? 0 : rows.begin()->size();
    data_.reserve(rows_ * cols_);
    for (const auto& row : rows) {
      if (row.size() != cols_) throw Error(ErrorCode::DimensionMismatch, "ragged initializer");
      data_.insert(data_.end(), row.begin(), row.end());
    }
  }

  static ComplexMatrix identity(std::size_t n) {
    ComplexMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  static ComplexMatrix diagonal(std::span<const double> d) {
    ComplexMatrix m(d.size(), d.size());
    for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
    return m;
  }

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool square() const noexcept { return rows_ == cols_; }

  Complex& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  const Complex& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  std::span<const Complex> data() const noexcept { return data_; }
  std::span<Complex> data() noexcept { return data_; }

  friend bool operator==(const ComplexMatrix&, const ComplexMatrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<Complex> data_;
};

// ---------------------------------------------------------------------------
// Elementary operations

inline void require_same_size(std::size_t a, std::size_t b, const char* what) {
  if (a != b) {
    throw Error(ErrorCode::DimensionMismatch,
                std::string(what) + ": " + std::to_string(a) + " vs " + std::to_string(b));
  }
}

inline ComplexMatrix adjoint(const ComplexMatrix& a) {
  ComplexMatrix out(a.cols(), a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) out(j, i) = std::conj(a(i, j));
  return out;
}

inline ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b) {
  require_same_size(a.cols(), b.rows(), "matrix product");
  ComplexMatrix out(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const Complex aik = a(i, k);
      if (aik == Complex{}) continue;
      for (std::size_t j = 0; j < b.cols(); ++j) out(i, j) += aik * b(k, j);
    }
  return out;
}

inline ComplexMatrix operator+(const ComplexMatrix& a, const ComplexMatrix& b) {
  require_same_size(a.rows(), b.rows(), "matrix sum");
  require_same_size(a.cols(), b.cols(), "matrix sum");
  ComplexMatrix out = a;
  for (std::size_t i = 0; i < out.data().size(); ++i) out.data()[i] += b.data()[i];
  return out;
}

inline ComplexMatrix operator-(const ComplexMatrix& a, const ComplexMatrix& b) {
  require_same_size(a.rows(), b.rows(), "matrix difference");
  require_same_size(a.cols(), b.cols(), "matrix difference");
  ComplexMatrix out = a;
  for (std::size_t i = 0; i < out.data().size(); ++i) out.data()[i] -= b.data()[i];
  return out;
}

inline ComplexMatrix operator*(Complex s, const ComplexMatrix& a) {
  ComplexMatrix out = a;
  for (auto& v : out.data()) v *= s;
  return out;
}

inline ComplexVector operator*(const ComplexMatrix& a, std::span<const Complex> x) {
  require_same_size(a.cols(), x.size(), "matrix-vector product");
  ComplexVector out(a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    Complex acc{};
    for (std::size_t j = 0; j < a.cols(); ++j) acc += a(i, j) * x[j];
    out[i] = acc;
  }
  return out;
}

inline ComplexVector operator*(const ComplexMatrix& a, const ComplexVector& x) {
  return a * std::span<const Complex>(x);
}

inline ComplexVector operator+(const ComplexVector& a, const ComplexVector& b) {
  require_same_size(a.size(), b.size(), "vector sum");
  ComplexVector out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] + b[i];
  return out;
}

inline ComplexVector operator-(const ComplexVector& a, const ComplexVector& b) {
  require_same_size(a.size(), b.size(), "vector difference");
  ComplexVector out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] - b[i];
  return out;
}

inline ComplexVector operator*(Complex s, const ComplexVector& a) {
  ComplexVector out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = s * a[i];
  return out;
}

inline ComplexVector to_complex(std::span<const double> v) { return ComplexVector(v.begin(), v.end()); }

inline double norm2(std::span<const Complex> v) {
  // Scaled accumulation keeps tiny residuals (~1e-300) from underflowing.
  double scale = 0.0;
  for (const auto& z : v) scale = std::max(scale, std::abs(z));
  if (scale == 0.0 || !std::isfinite(scale)) return scale;
  double sum = 0.0;
  for (const auto& z : v) sum += std::norm(z / scale);
  return scale * std::sqrt(sum);
}

/// Conjugate-linear in the first argument.
inline Complex inner(std::span<const Complex> u, std::span<const Complex> v) {
  require_same_size(u.size(), v.size(), "inner product");
  Complex acc{};
  for (std::size_t i = 0; i < u.size(); ++i) acc += std::conj(u[i]) * v[i];
  return acc;
}

inline double frobenius_norm(const ComplexMatrix& a) { return norm2(a.data()); }

inline double max_abs_entry(const ComplexMatrix& a) {
  double m = 0.0;
  for (const auto& z : a.data()) m = std::max(m, std::abs(z));
  return m;
}

/// max |A[i][j] - conj(A[j][i])|
inline double hermitian_defect(const ComplexMatrix& a) {
  if (!a.square()) return INFINITY;
  double worst = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = i; j < a.cols(); ++j)
      worst = std::max(worst, std::abs(a(i, j) - std::conj(a(j, i))));
  return worst;
}

inline constexpr double kHermitianTolerance = 1e-12;

inline bool is_hermitian(const ComplexMatrix& a, double tol = kHermitianTolerance) {
  return hermitian_defect(a) <= tol * std::max(1.0, frobenius_norm(a));
}

inline void require_hermitian(const ComplexMatrix& a) {
  if (!is_hermitian(a)) {
    throw Error(ErrorCode::NotHermitian, "Hermitian defect " + std::to_string(hermitian_defect(a)));
  }
}

/// max entry of |U^dagger U - I|
inline double unitarity_defect(const ComplexMatrix& u) {
  if (!u.square()) return INFINITY;
  return max_abs_entry(adjoint(u) * u - ComplexMatrix::identity(u.rows()));
}

inline bool is_unitary(const ComplexMatrix& u, double tol = 1e-10) { return unitarity_defect(u) <= tol; }

// ---------------------------------------------------------------------------
// Residuals and errors

inline ComplexVector residual(const ComplexMatrix& a, std::span<const Complex> x, std::span<const Complex> b) {
  require_same_size(a.rows(), b.size(), "residual");
  ComplexVector ax = a * x;
  for (std::size_t i = 0; i < ax.size(); ++i) ax[i] = b[i] - ax[i];
  return ax;
}

inline double relative_error(std::span<const Complex> x, std::span<const Complex> x_true) {
  require_same_size(x.size(), x_true.size(), "relative error");
  ComplexVector diff(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) diff[i] = x[i] - x_true[i];
  return norm2(diff) / norm2(x_true);
}

// ---------------------------------------------------------------------------
// Hermitian eigendecomposition

struct EigenDecomposition {
  RealVector eigenvalues;     // ascending
  ComplexMatrix eigenvectors;  // column j pairs with eigenvalues[j]
};

namespace detail {

inline double off_diagonal_norm(const ComplexMatrix& a) {
  double sum = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j)
      if (i != j) sum += std::norm(a(i, j));
  return std::sqrt(sum);
}

// Modified Gram-Schmidt over columns [first, last) of v.
inline void orthonormalize_columns(ComplexMatrix& v, std::size_t first, std::size_t last) {
  const std::size_t n = v.rows();
  for (std::size_t c = first; c < last; ++c) {
    for (std::size_t prev = first; prev < c; ++prev) {
      Complex proj{};
      for (std::size_t i = 0; i < n; ++i) proj += std::conj(v(i, prev)) * v(i, c);
      for (std::size_t i = 0; i < n; ++i) v(i, c) -= proj * v(i, prev);
    }
    double nrm = 0.0;
    for (std::size_t i = 0; i < n; ++i) nrm += std::norm(v(i, c));
    nrm = std::sqrt(nrm);
    for (std::size_t i = 0; i < n; ++i) v(i, c) /= nrm;
  }
}

}  // namespace detail

inline constexpr std::size_t kJacobiMaxDimension = 64;
inline constexpr int kJacobiMaxSweeps = 100;

/// Cyclic Jacobi. Each rotation first turns the pivot a_pq real with a phase on
/// column q, then applies the real symmetric 2x2 rotation that annihilates it.
inline EigenDecomposition jacobi_eigh(const ComplexMatrix& input) {
  require_hermitian(input);
  const std::size_t n = input.rows();
  if (n > kJacobiMaxDimension) {
    throw Error(ErrorCode::DimensionMismatch, "jacobi_eigh supports N <= 64");
  }

  ComplexMatrix a = input;
  for (std::size_t i = 0; i < n; ++i) a(i, i) = a(i, i).real();
  ComplexMatrix v = ComplexMatrix::identity(n);
  const double scale = frobenius_norm(input);
  const double target = 1e-14 * scale;

  int sweep = 0;
  while (detail::off_diagonal_norm(a) > target) {
    if (++sweep > kJacobiMaxSweeps) {
      throw Error(ErrorCode::NoConvergence, "off-diagonal norm " + std::to_string(detail::off_diagonal_norm(a)));
    }
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const Complex apq = a(p, q);
        const double g = std::abs(apq);
        if (g <= 1e-300) continue;
        const Complex phase = std::conj(apq) / g;  // e^{-i arg a_pq}
        const double app = a(p, p).real();
        const double aqq = a(q, q).real();
        const double theta = 0.5 * std::atan2(2.0 * g, aqq - app);
        const double c = std::cos(theta);
        const double s = std::sin(theta);
        // G = diag(1, phase) * [[c, s], [-s, c]]
        const Complex g00 = c, g01 = s, g10 = -s * phase, g11 = c * phase;

        for (std::size_t k = 0; k < n; ++k) {  // A <- A G
          const Complex akp = a(k, p), akq = a(k, q);
          a(k, p) = akp * g00 + akq * g10;
          a(k, q) = akp * g01 + akq * g11;
        }
        for (std::size_t k = 0; k < n; ++k) {  // A <- G^dagger A
          const Complex apk = a(p, k), aqk = a(q, k);
          a(p, k) = std::conj(g00) * apk + std::conj(g10) * aqk;
          a(q, k) = std::conj(g01) * apk + std::conj(g11) * aqk;
        }
        a(p, q) = 0.0;
        a(q, p) = 0.0;
        a(p, p) = a(p, p).real();
        a(q, q) = a(q, q).real();
        for (std::size_t k = 0; k < n; ++k) {  // V <- V G
          const Complex vkp = v(k, p), vkq = v(k, q);
          v(k, p) = vkp * g00 + vkq * g10;
          v(k, q) = vkp * g01 + vkq * g11;
        }
      }
    }
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t i, std::size_t j) { return a(i, i).real() < a(j, j).real(); });

  EigenDecomposition out{RealVector(n), ComplexMatrix(n, n)};
  for (std::size_t c = 0; c < n; ++c) {
    out.eigenvalues[c] = a(order[c], order[c]).real();
    for (std::size_t r = 0; r < n; ++r) out.eigenvectors(r, c) = v(r, order[c]);
  }

  // Degenerate clusters get an explicit re-orthonormalization pass.
  const double cluster_tol = 1e-10 * std::max(scale, 1e-300);
  std::size_t start = 0;
  for (std::size_t c = 1; c <= n; ++c) {
    if (c == n || out.eigenvalues[c] - out.eigenvalues[c - 1] > cluster_tol) {
      if (c - start > 1) detail::orthonormalize_columns(out.eigenvectors, start, c);
      start = c;
    }
  }
  return out;
}

inline double condition_number(const ComplexMatrix& a) {
  const auto eig = jacobi_eigh(a);
  double lo = INFINITY, hi = 0.0;
  for (double l : eig.eigenvalues) {
    lo = std::min(lo, std::abs(l));
    hi = std::max(hi, std::abs(l));
  }
  if (hi == 0.0 || lo <= 1e-14 * hi) throw Error(ErrorCode::Singular, "smallest |eigenvalue| underflows");
  return hi / lo;
}

/// U diag(f(lambda_j)) U^dagger
template <typename F>
ComplexMatrix apply_spectral_function(const EigenDecomposition& eig, F&& f) {
  const std::size_t n = eig.eigenvalues.size();
  ComplexMatrix out(n, n);
  for (std::size_t k = 0; k < n; ++k) {
    const Complex fk = f(eig.eigenvalues[k]);
    for (std::size_t i = 0; i < n; ++i) {
      const Complex left = eig.eigenvectors(i, k) * fk;
      for (std::size_t j = 0; j < n; ++j) out(i, j) += left * std::conj(eig.eigenvectors(j, k));
    }
  }
  return out;
}

/// e^{iAt}
inline ComplexMatrix matrix_exp_hermitian(const ComplexMatrix& a, double t) {
  const auto eig = jacobi_eigh(a);
  return apply_spectral_function(eig, [t](double lambda) { return std::polar(1.0, lambda * t); });
}

// ---------------------------------------------------------------------------
// Direct solve

/// Gaussian elimination with partial pivoting.
inline ComplexVector solve_exact(const ComplexMatrix& a, std::span<const Complex> b) {
  if (!a.square()) throw Error(ErrorCode::DimensionMismatch, "solve_exact needs a square matrix");
  require_same_size(a.rows(), b.size(), "solve_exact");
  const std::size_t n = a.rows();
  const double pivot_floor = 1e-14 * frobenius_norm(a);
  ComplexMatrix m = a;
  ComplexVector x(b.begin(), b.end());

  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    for (std::size_t r = col + 1; r < n; ++r)
      if (std::abs(m(r, col)) > std::abs(m(pivot, col))) pivot = r;
    if (std::abs(m(pivot, col)) <= pivot_floor || std::abs(m(pivot, col)) == 0.0) {
      throw Error(ErrorCode::Singular, "pivot underflow at column " + std::to_string(col));
    }
    if (pivot != col) {
      for (std::size_t j = 0; j < n; ++j) std::swap(m(col, j), m(pivot, j));
      std::swap(x[col], x[pivot]);
    }
    for (std::size_t r = col + 1; r < n; ++r) {
      const Complex factor = m(r, col) / m(col, col);
      if (factor == Complex{}) continue;
      for (std::size_t j = col; j < n; ++j) m(r, j) -= factor * m(col, j);
      x[r] -= factor * x[col];
    }
  }
  for (std::size_t i = n; i-- > 0;) {
    Complex acc = x[i];
    for (std::size_t j = i + 1; j < n; ++j) acc -= m(i, j) * x[j];
    x[i] = acc / m(i, i);
  }
  return x;
}

inline ComplexVector solve_exact(const ComplexMatrix& a, const ComplexVector& b) {
  return solve_exact(a, std::span<const Complex>(b));
}

}  // namespace iimhhl
