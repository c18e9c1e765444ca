#pragma once

// Benchmark problems A = U^T diag(1, 0.5, 0.1, 1/kappa) U with seeded random
// real orthogonal U, the two reference solutions, and the Hermitian embedding
// of a general square system.

#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "iimhhl/error.hpp"
#include "iimhhl/numerics.hpp"
#include "iimhhl/random.hpp"

namespace iimhhl {

struct ProblemInstance {
  ComplexMatrix A;
  ComplexVector b;
  std::optional<ComplexVector> x_true;
  std::optional<double> kappa;
  std::optional<std::uint64_t> seed;
  std::string label;
};

struct ConditionedMatrix {
  ComplexMatrix A;
  ComplexMatrix U;  // real orthogonal
};

/// Q factor of a seeded n x n Gaussian matrix (Gram-Schmidt, R diagonal made positive).
inline ComplexMatrix random_orthogonal(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<std::vector<double>> cols(n, std::vector<double>(n));
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < n; ++c) cols[c][r] = gauss(rng);

  for (std::size_t c = 0; c < n; ++c) {
    // Two passes of modified Gram-Schmidt keep Q orthogonal to rounding.
    for (int pass = 0; pass < 2; ++pass)
      for (std::size_t prev = 0; prev < c; ++prev) {
        double proj = 0.0;
        for (std::size_t r = 0; r < n; ++r) proj += cols[prev][r] * cols[c][r];
        for (std::size_t r = 0; r < n; ++r) cols[c][r] -= proj * cols[prev][r];
      }
    double nrm = 0.0;
    for (double v : cols[c]) nrm += v * v;
    nrm = std::sqrt(nrm);
    for (double& v : cols[c]) v /= nrm;
  }
  ComplexMatrix q(n, n);
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < n; ++c) q(r, c) = cols[c][r];
  return q;
}

inline ComplexMatrix similarity_transform(const ComplexMatrix& u, std::span<const double> spectrum) {
  const ComplexMatrix a = adjoint(u) * ComplexMatrix::diagonal(spectrum) * u;
  // Symmetrize away rounding so the Hermitian check is exact.
  ComplexMatrix h = a;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) h(i, j) = 0.5 * (a(i, j) + std::conj(a(j, i)));
  return h;
}

inline std::array<double, 4> benchmark_spectrum(double kappa) { return {1.0, 0.5, 0.1, 1.0 / kappa}; }

/// A = U^T diag(1, 0.5, 0.1, 1/kappa) U.
inline ConditionedMatrix build_conditioned_matrix(double kappa, std::uint64_t seed) {
  if (!(kappa >= 1.0)) throw Error(ErrorCode::Singular, "kappa must be >= 1");
  ComplexMatrix u = random_orthogonal(4, seed);
  const auto spectrum = benchmark_spectrum(kappa);
  return {similarity_transform(u, spectrum), std::move(u)};
}

struct ReferenceSolutions {
  ComplexVector x1;
  ComplexVector x2;
};

inline ReferenceSolutions reference_solutions() {
  return {{1.0, 0.1, 0.01, 10.0}, {-1.0, 0.1, 0.01, 10.0}};
}

/// Seed of U_k for solution index k; shared by every kappa so A_{10,k} and
/// A_{100,k} differ only in the smallest eigenvalue.
inline std::uint64_t orthogonal_seed(std::uint64_t seed, int k) { return derive_seed(seed, 1000 + static_cast<std::uint64_t>(k)); }

inline ProblemInstance make_instance(double kappa, int k, std::uint64_t seed) {
  if (k != 1 && k != 2) throw Error(ErrorCode::DimensionMismatch, "solution index must be 1 or 2");
  auto [a, u] = build_conditioned_matrix(kappa, orthogonal_seed(seed, k));
  const auto sols = reference_solutions();
  ComplexVector x = k == 1 ? sols.x1 : sols.x2;
  ComplexVector b = a * x;
  ProblemInstance inst;
  inst.A = std::move(a);
  inst.b = std::move(b);
  inst.x_true = std::move(x);
  inst.kappa = kappa;
  inst.seed = seed;
  inst.label = "kappa" + std::to_string(static_cast<long long>(std::llround(kappa))) + "_x" + std::to_string(k);
  return inst;
}

/// [[0, A], [A^dagger, 0]] with right-hand side [b; 0]; the solution is [0; x].
inline ProblemInstance hermitian_embed(const ComplexMatrix& a, std::span<const Complex> b) {
  if (!a.square()) throw Error(ErrorCode::DimensionMismatch, "hermitian_embed needs a square matrix");
  require_same_size(a.rows(), b.size(), "hermitian_embed");
  const std::size_t n = a.rows();
  ProblemInstance out;
  out.A = ComplexMatrix(2 * n, 2 * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      out.A(i, n + j) = a(i, j);
      out.A(n + j, i) = std::conj(a(i, j));
    }
  out.b.assign(2 * n, Complex{});
  std::copy(b.begin(), b.end(), out.b.begin());
  out.label = "hermitian_embedding";
  return out;
}

/// Lower block of an embedded solution vector.
inline ComplexVector embedded_solution_block(std::span<const Complex> x_embedded) {
  const std::size_t n = x_embedded.size() / 2;
  return ComplexVector(x_embedded.begin() + static_cast<std::ptrdiff_t>(n), x_embedded.end());
}

// ---------------------------------------------------------------------------
// JSON: matrices as nested arrays of [re, im] pairs, vectors likewise.

inline nlohmann::json to_json_value(const ComplexVector& v) {
  auto arr = nlohmann::json::array();
  for (const auto& z : v) arr.push_back({z.real(), z.imag()});
  return arr;
}

inline nlohmann::json to_json_value(const ComplexMatrix& m) {
  auto rows = nlohmann::json::array();
  for (std::size_t i = 0; i < m.rows(); ++i) {
    auto row = nlohmann::json::array();
    for (std::size_t j = 0; j < m.cols(); ++j) row.push_back({m(i, j).real(), m(i, j).imag()});
    rows.push_back(std::move(row));
  }
  return rows;
}

namespace detail {

inline Complex complex_from_json(const nlohmann::json& j, const std::string& field) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) {
    throw Error(ErrorCode::SpecParseError, "field '" + field + "': expected [re, im] pair");
  }
  return {j[0].get<double>(), j[1].get<double>()};
}

}  // namespace detail

inline ComplexVector vector_from_json(const nlohmann::json& j, const std::string& field) {
  if (!j.is_array()) throw Error(ErrorCode::SpecParseError, "field '" + field + "': expected array");
  ComplexVector v;
  for (std::size_t i = 0; i < j.size(); ++i)
    v.push_back(detail::complex_from_json(j[i], field + "[" + std::to_string(i) + "]"));
  return v;
}

inline ComplexMatrix matrix_from_json(const nlohmann::json& j, const std::string& field) {
  if (!j.is_array() || j.empty()) throw Error(ErrorCode::SpecParseError, "field '" + field + "': expected nested array");
  const std::size_t rows = j.size();
  const std::size_t cols = j[0].is_array() ? j[0].size() : 0;
  ComplexMatrix m(rows, cols);
  for (std::size_t i = 0; i < rows; ++i) {
    if (!j[i].is_array() || j[i].size() != cols) {
      throw Error(ErrorCode::SpecParseError, "field '" + field + "': row " + std::to_string(i) + " has wrong length");
    }
    for (std::size_t c = 0; c < cols; ++c)
      m(i, c) = detail::complex_from_json(j[i][c], field + "[" + std::to_string(i) + "][" + std::to_string(c) + "]");
  }
  return m;
}

inline nlohmann::json problem_to_json(const ProblemInstance& p) {
  nlohmann::json j;
  j["label"] = p.label;
  j["A"] = to_json_value(p.A);
  j["b"] = to_json_value(p.b);
  j["x_true"] = p.x_true ? to_json_value(*p.x_true) : nlohmann::json(nullptr);
  j["kappa"] = p.kappa ? nlohmann::json(*p.kappa) : nlohmann::json(nullptr);
  j["seed"] = p.seed ? nlohmann::json(*p.seed) : nlohmann::json(nullptr);
  return j;
}

inline ProblemInstance problem_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw Error(ErrorCode::SpecParseError, "problem document must be an object");
  if (!j.contains("A")) throw Error(ErrorCode::SpecParseError, "field 'A' missing");
  if (!j.contains("b")) throw Error(ErrorCode::SpecParseError, "field 'b' missing");
  ProblemInstance p;
  p.A = matrix_from_json(j["A"], "A");
  p.b = vector_from_json(j["b"], "b");
  if (p.A.rows() != p.b.size() || !p.A.square()) {
    throw Error(ErrorCode::SpecParseError, "fields 'A' and 'b' have inconsistent dimensions");
  }
  if (j.contains("x_true") && !j["x_true"].is_null()) p.x_true = vector_from_json(j["x_true"], "x_true");
  if (j.contains("kappa") && !j["kappa"].is_null()) p.kappa = j["kappa"].get<double>();
  if (j.contains("seed") && !j["seed"].is_null()) p.seed = j["seed"].get<std::uint64_t>();
  p.label = j.value("label", std::string("problem"));
  return p;
}

}  // namespace iimhhl
