#include <gtest/gtest.h>

#include <random>

#include "iimhhl/numerics.hpp"
#include "iimhhl/problems.hpp"

using namespace iimhhl;

namespace {

ComplexMatrix random_hermitian(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  ComplexMatrix a(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    a(i, i) = g(rng);
    for (std::size_t j = i + 1; j < n; ++j) {
      a(i, j) = Complex(g(rng), g(rng));
      a(j, i) = std::conj(a(i, j));
    }
  }
  return a;
}

double max_diff(const ComplexMatrix& a, const ComplexMatrix& b) { return max_abs_entry(a - b); }

// Truncated Taylor series of e^{iAt}, independent of the eigensolver.
ComplexMatrix taylor_exp(const ComplexMatrix& a, double t, int terms = 80) {
  const std::size_t n = a.rows();
  ComplexMatrix term = ComplexMatrix::identity(n);
  ComplexMatrix sum = term;
  const ComplexMatrix ia = Complex(0.0, t) * a;
  for (int k = 1; k < terms; ++k) {
    term = Complex(1.0 / k) * (term * ia);
    sum = sum + term;
  }
  return sum;
}

}  // namespace

TEST(Matrix, IdentityAndDiagonal) {
  const auto id = ComplexMatrix::identity(3);
  EXPECT_EQ(id(1, 1), Complex(1.0));
  EXPECT_EQ(id(0, 2), Complex(0.0));
  const std::vector<double> d{1.0, 0.5, 0.1};
  const auto m = ComplexMatrix::diagonal(d);
  EXPECT_EQ(m(2, 2), Complex(0.1));
  EXPECT_EQ(m(0, 1), Complex(0.0));
}

TEST(Matrix, SizeChecks) {
  EXPECT_THROW(ComplexMatrix(2, 2, std::vector<Complex>(3)), Error);
  const ComplexMatrix a(2, 3);
  const ComplexVector x(2);
  try {
    (void)(a * x);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::DimensionMismatch);
  }
}

TEST(Matrix, AdjointAndInnerConvention) {
  const ComplexMatrix a{{Complex(1, 2), 3.0}, {0.0, Complex(0, -1)}};
  const auto ad = adjoint(a);
  EXPECT_EQ(ad(0, 0), Complex(1, -2));
  EXPECT_EQ(ad(1, 0), Complex(3.0));
  const ComplexVector u{Complex(0, 1)}, v{1.0};
  EXPECT_EQ(inner(u, v), Complex(0, -1));  // conjugate-linear in the first slot
}

TEST(Hermitian, DetectsDefect) {
  EXPECT_TRUE(is_hermitian(random_hermitian(4, 1)));
  ComplexMatrix a = random_hermitian(4, 2);
  a(0, 1) += 1e-6;
  EXPECT_FALSE(is_hermitian(a));
  EXPECT_THROW(jacobi_eigh(a), Error);
}

TEST(Jacobi, BenchmarkSpectrum) {
  const auto inst = make_instance(100.0, 1, 0);
  const auto eig = jacobi_eigh(inst.A);
  const std::vector<double> expected{0.01, 0.1, 0.5, 1.0};
  for (std::size_t i = 0; i < 4; ++i) EXPECT_NEAR(eig.eigenvalues[i], expected[i], 1e-12);
  EXPECT_NEAR(condition_number(inst.A), 100.0, 1e-9);
  EXPECT_NEAR(condition_number(make_instance(10.0, 2, 3).A), 10.0, 1e-10);
}

TEST(Jacobi, ReconstructsRandomHermitian) {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const std::size_t n = 2 + seed % 7;
    const auto a = random_hermitian(n, seed);
    const auto eig = jacobi_eigh(a);
    EXPECT_LE(unitarity_defect(eig.eigenvectors), 1e-12);
    const auto rebuilt = apply_spectral_function(eig, [](double l) { return Complex(l); });
    EXPECT_LE(max_diff(rebuilt, a), 1e-11 * std::max(1.0, frobenius_norm(a)));
    for (std::size_t i = 1; i < n; ++i) EXPECT_LE(eig.eigenvalues[i - 1], eig.eigenvalues[i]);
  }
}

TEST(Jacobi, DegenerateSpectrumKeepsOrthonormalBasis) {
  const auto u = random_orthogonal(4, 9);
  const std::vector<double> spec{2.0, 2.0, 2.0, -1.0};
  const auto a = similarity_transform(u, spec);
  const auto eig = jacobi_eigh(a);
  EXPECT_LE(unitarity_defect(eig.eigenvectors), 1e-12);
  EXPECT_NEAR(eig.eigenvalues[0], -1.0, 1e-12);
  EXPECT_NEAR(eig.eigenvalues[3], 2.0, 1e-12);
}

TEST(Jacobi, ScaleInvariance) {
  const auto a = random_hermitian(5, 11);
  const auto base = jacobi_eigh(a);
  for (double s : {1e-6, 1e3, 1e8}) {
    const auto scaled = jacobi_eigh(Complex(s) * a);
    for (std::size_t i = 0; i < 5; ++i) EXPECT_NEAR(scaled.eigenvalues[i] / s, base.eigenvalues[i], 1e-11);
  }
}

TEST(Jacobi, ZeroAndDiagonalInputs) {
  const auto z = jacobi_eigh(ComplexMatrix(3, 3));
  for (double l : z.eigenvalues) EXPECT_EQ(l, 0.0);
  const std::vector<double> d{3.0, -2.0, 0.5};
  const auto e = jacobi_eigh(ComplexMatrix::diagonal(d));
  EXPECT_EQ(e.eigenvalues, (RealVector{-2.0, 0.5, 3.0}));
}

TEST(ConditionNumber, SingularThrows) {
  const std::vector<double> d{1.0, 0.0};
  try {
    condition_number(ComplexMatrix::diagonal(d));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::Singular);
  }
}

TEST(MatrixExp, MatchesTaylorSeries) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto a = random_hermitian(4, 100 + seed);
    const double t = 0.3 + 0.1 * static_cast<double>(seed);
    EXPECT_LE(max_diff(matrix_exp_hermitian(a, t), taylor_exp(a, t)), 1e-10);
  }
}

TEST(MatrixExp, InverseAndUnitarity) {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const auto a = random_hermitian(4, 500 + seed);
    const double t = 0.1 + 0.05 * static_cast<double>(seed);
    const auto u = matrix_exp_hermitian(a, t);
    EXPECT_LE(unitarity_defect(u), 1e-10);
    EXPECT_LE(max_diff(u * matrix_exp_hermitian(a, -t), ComplexMatrix::identity(4)), 1e-10);
  }
}

TEST(MatrixExp, PauliZClosedForm) {
  const ComplexMatrix z{{1.0, 0.0}, {0.0, -1.0}};
  const auto u = matrix_exp_hermitian(z, kPi / 4);
  EXPECT_NEAR(std::abs(u(0, 0) - std::polar(1.0, kPi / 4)), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(u(1, 1) - std::polar(1.0, -kPi / 4)), 0.0, 1e-15);
}

TEST(SolveExact, SmallSystems) {
  const ComplexMatrix a{{2.0, 1.0}, {1.0, 3.0}};
  const auto x = solve_exact(a, ComplexVector{3.0, 5.0});
  EXPECT_NEAR(std::abs(x[0] - 0.8), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(x[1] - 1.4), 0.0, 1e-15);
  // Needs pivoting: leading zero.
  const ComplexMatrix p{{0.0, 1.0}, {1.0, 0.0}};
  const auto y = solve_exact(p, ComplexVector{Complex(0, 2), 7.0});
  EXPECT_EQ(y[0], Complex(7.0));
  EXPECT_EQ(y[1], Complex(0, 2));
}

TEST(SolveExact, BenchmarkRecoversReference) {
  for (int k : {1, 2})
    for (double kappa : {10.0, 100.0}) {
      const auto inst = make_instance(kappa, k, 4);
      EXPECT_LE(relative_error(solve_exact(inst.A, inst.b), *inst.x_true), 1e-13);
    }
}

TEST(SolveExact, SingularThrows) {
  const ComplexMatrix a{{1.0, 2.0}, {2.0, 4.0}};
  try {
    solve_exact(a, ComplexVector{1.0, 1.0});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::Singular);
  }
}

TEST(Norms, RelativeErrorAndResidual) {
  const ComplexVector x{1.0, 0.0}, t{1.0, 1.0};
  EXPECT_NEAR(relative_error(x, t), 1.0 / std::sqrt(2.0), 1e-15);
  const auto r = residual(ComplexMatrix::identity(2), x, t);
  EXPECT_EQ(r, (ComplexVector{0.0, 1.0}));
  EXPECT_NEAR(norm2(ComplexVector{3e200, 4e200}), 5e200, 1e186);
}
