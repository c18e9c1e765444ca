#include <gtest/gtest.h>

#include <random>

#include "iimhhl/problems.hpp"

using namespace iimhhl;

TEST(Orthogonal, IsOrthogonalAndSeeded) {
  const auto u = random_orthogonal(4, 12);
  EXPECT_LE(unitarity_defect(u), 1e-13);
  for (auto z : u.data()) EXPECT_EQ(z.imag(), 0.0);
  EXPECT_EQ(random_orthogonal(4, 12), u);
  EXPECT_NE(random_orthogonal(4, 13), u);
}

TEST(Benchmark, RealSymmetricWithPrescribedSpectrum) {
  for (double kappa : {10.0, 100.0}) {
    const auto inst = make_instance(kappa, 1, 3);
    EXPECT_TRUE(is_hermitian(inst.A));
    EXPECT_EQ(hermitian_defect(inst.A), 0.0);
    const auto eig = jacobi_eigh(inst.A);
    EXPECT_NEAR(eig.eigenvalues[0], 1.0 / kappa, 1e-13);
    EXPECT_NEAR(eig.eigenvalues[3], 1.0, 1e-13);
  }
}

TEST(Benchmark, KappaVariantsShareTheBasis) {
  const auto a10 = make_instance(10.0, 2, 7).A;
  const auto a100 = make_instance(100.0, 2, 7).A;
  const auto diff = jacobi_eigh(a10 - a100);
  EXPECT_NEAR(diff.eigenvalues[3], 0.1 - 0.01, 1e-13);
  for (std::size_t i = 0; i < 3; ++i) EXPECT_NEAR(diff.eigenvalues[i], 0.0, 1e-13);
  // Different solution indices use different bases.
  EXPECT_GT(max_abs_entry(make_instance(10.0, 1, 7).A - a10), 1e-3);
}

TEST(Benchmark, RightHandSideMatchesReference) {
  const auto inst = make_instance(10.0, 2, 0);
  EXPECT_EQ(*inst.x_true, (ComplexVector{-1.0, 0.1, 0.01, 10.0}));
  EXPECT_LE(norm2(residual(inst.A, *inst.x_true, inst.b)), 1e-14);
  EXPECT_EQ(inst.label, "kappa10_x2");
  EXPECT_THROW(make_instance(10.0, 3, 0), Error);
}

TEST(Embedding, TriangularExample) {
  const ComplexMatrix a{{1.0, 1.0}, {0.0, 1.0}};
  const auto e = hermitian_embed(a, ComplexVector{2.0, 1.0});
  EXPECT_TRUE(is_hermitian(e.A));
  const auto x = embedded_solution_block(solve_exact(e.A, e.b));
  EXPECT_NEAR(std::abs(x[0] - 1.0), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(x[1] - 1.0), 0.0, 1e-15);
  const auto upper = solve_exact(e.A, e.b);
  EXPECT_NEAR(std::abs(upper[0]) + std::abs(upper[1]), 0.0, 1e-15);
}

TEST(Embedding, SpectrumIsPlusMinusSingularValues) {
  const ComplexMatrix a{{3.0, 0.0}, {4.0, 5.0}};  // singular values sqrt(45), sqrt(5)
  const auto eig = jacobi_eigh(hermitian_embed(a, ComplexVector{1.0, 0.0}).A);
  const RealVector expected{-std::sqrt(45.0), -std::sqrt(5.0), std::sqrt(5.0), std::sqrt(45.0)};
  for (std::size_t i = 0; i < 4; ++i) EXPECT_NEAR(eig.eigenvalues[i], expected[i], 1e-12);
}

TEST(Embedding, SolveEquivalenceOnRandomSystems) {
  std::mt19937_64 rng(77);
  std::normal_distribution<double> g;
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t n = 2 + trial % 3;
    ComplexMatrix a(n, n);
    for (auto& z : a.data()) z = Complex(g(rng), g(rng));
    ComplexVector b(n);
    for (auto& z : b) z = Complex(g(rng), g(rng));
    const auto direct = solve_exact(a, b);
    const auto e = hermitian_embed(a, b);
    EXPECT_LE(relative_error(embedded_solution_block(solve_exact(e.A, e.b)), direct), 1e-10) << trial;
  }
}

TEST(Json, RoundTripIsExact) {
  auto inst = make_instance(100.0, 1, 42);
  inst.A(0, 1) += Complex(0.0, 1e-3);  // exercise imaginary parts
  inst.A(1, 0) = std::conj(inst.A(0, 1));
  const auto back = problem_from_json(nlohmann::json::parse(problem_to_json(inst).dump()));
  EXPECT_EQ(back.A, inst.A);
  EXPECT_EQ(back.b, inst.b);
  EXPECT_EQ(back.x_true, inst.x_true);
  EXPECT_EQ(back.kappa, inst.kappa);
  EXPECT_EQ(back.seed, inst.seed);
  EXPECT_EQ(back.label, inst.label);
}

TEST(Json, FieldDiagnostics) {
  auto message_of = [](const char* text) {
    try {
      problem_from_json(nlohmann::json::parse(text));
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::SpecParseError);
      return std::string(e.what());
    }
    return std::string("no error");
  };
  EXPECT_NE(message_of(R"({"b": [[1,0]]})").find("'A'"), std::string::npos);
  EXPECT_NE(message_of(R"({"A": [[[1,0]]], "b": [[1]]})").find("b[0]"), std::string::npos);
  EXPECT_NE(message_of(R"({"A": [[[1,0],[0,0]]], "b": [[1,0]]})").find("A"), std::string::npos);
  EXPECT_NE(message_of(R"({"A": [[[1,0]]], "b": [[1,0],[2,0]]})").find("inconsistent"), std::string::npos);
}
