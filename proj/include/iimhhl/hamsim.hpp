#pragma once

// Hamiltonian simulation: e^{iAt} either from the eigendecomposition or as a
// first-order Lie-Trotter product over the Pauli decomposition of A.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "iimhhl/error.hpp"
#include "iimhhl/numerics.hpp"

namespace iimhhl {

/// `label[0]` acts on the most significant qubit, so the operator is the
/// Kronecker product of the label's letters read left to right.
struct PauliTerm {
  std::string label;
  double coefficient = 0.0;
};

enum class EvolutionMode { Exact, Trotter };

struct EvolutionSpec {
  double t = 1.0;
  unsigned slices = 6;
  EvolutionMode mode = EvolutionMode::Exact;
};

inline ComplexMatrix pauli_matrix(char letter) {
  const Complex i{0.0, 1.0};
  switch (letter) {
    case 'I': return {{1.0, 0.0}, {0.0, 1.0}};
    case 'X': return {{0.0, 1.0}, {1.0, 0.0}};
    case 'Y': return {{0.0, -i}, {i, 0.0}};
    case 'Z': return {{1.0, 0.0}, {0.0, -1.0}};
    default: throw Error(ErrorCode::DimensionMismatch, std::string("unknown Pauli letter ") + letter);
  }
}

inline ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j)
      for (std::size_t k = 0; k < b.rows(); ++k)
        for (std::size_t l = 0; l < b.cols(); ++l) out(i * b.rows() + k, j * b.cols() + l) = a(i, j) * b(k, l);
  return out;
}

inline ComplexMatrix pauli_matrix(std::string_view label) {
  ComplexMatrix out = ComplexMatrix::identity(1);
  for (char c : label) out = kron(out, pauli_matrix(c));
  return out;
}

inline unsigned log2_exact(std::size_t n) {
  if (n == 0 || (n & (n - 1)) != 0) throw Error(ErrorCode::NotPowerOfTwo, "dimension " + std::to_string(n));
  unsigned q = 0;
  while ((std::size_t{1} << q) < n) ++q;
  return q;
}

namespace detail {

inline std::vector<std::string> all_pauli_labels(unsigned n) {
  std::vector<std::string> labels{""};
  for (unsigned q = 0; q < n; ++q) {
    std::vector<std::string> next;
    next.reserve(labels.size() * 4);
    for (const auto& l : labels)
      for (char c : {'I', 'X', 'Y', 'Z'}) next.push_back(l + c);
    labels = std::move(next);
  }
  return labels;  // lexicographic by construction
}

}  // namespace detail

inline constexpr double kPauliDropTolerance = 1e-14;

/// A = sum_k c_k P_k with c_k = tr(P_k A) / 2^n, labels in lexicographic order.
inline std::vector<PauliTerm> pauli_decompose(const ComplexMatrix& a) {
  if (!a.square()) throw Error(ErrorCode::DimensionMismatch, "pauli_decompose needs a square matrix");
  const unsigned n = log2_exact(a.rows());
  require_hermitian(a);
  const double dim = static_cast<double>(a.rows());
  std::vector<PauliTerm> terms;
  for (auto& label : detail::all_pauli_labels(n)) {
    const ComplexMatrix p = pauli_matrix(label);
    Complex tr{};
    for (std::size_t i = 0; i < a.rows(); ++i)
      for (std::size_t k = 0; k < a.cols(); ++k) tr += p(i, k) * a(k, i);
    const double c = tr.real() / dim;
    if (std::abs(c) > kPauliDropTolerance) terms.push_back({std::move(label), c});
  }
  return terms;
}

inline ComplexMatrix pauli_sum(const std::vector<PauliTerm>& terms, std::size_t dim) {
  ComplexMatrix out(dim, dim);
  for (const auto& term : terms) out = out + Complex(term.coefficient) * pauli_matrix(term.label);
  return out;
}

/// One Lie-Trotter slice: prod_k (cos(c_k dt) I + i sin(c_k dt) P_k).
inline ComplexMatrix trotter_step(const std::vector<PauliTerm>& terms, std::size_t dim, double dt) {
  ComplexMatrix step = ComplexMatrix::identity(dim);
  const ComplexMatrix id = ComplexMatrix::identity(dim);
  for (const auto& term : terms) {
    const double angle = term.coefficient * dt;
    const ComplexMatrix factor =
        Complex(std::cos(angle)) * id + Complex(0.0, std::sin(angle)) * pauli_matrix(term.label);
    step = step * factor;
  }
  return step;
}

inline ComplexMatrix matrix_power(ComplexMatrix base, std::uint64_t exponent) {
  ComplexMatrix result = ComplexMatrix::identity(base.rows());
  while (exponent > 0) {
    if (exponent & 1u) result = result * base;
    exponent >>= 1;
    if (exponent > 0) base = base * base;
  }
  return result;
}

inline void validate(const EvolutionSpec& spec) {
  if (spec.slices < 1) throw Error(ErrorCode::DimensionMismatch, "slices must be >= 1");
  if (!std::isfinite(spec.t)) throw Error(ErrorCode::DimensionMismatch, "evolution time must be finite");
}

inline ComplexMatrix evolution_unitary(const ComplexMatrix& a, const EvolutionSpec& spec) {
  validate(spec);
  if (spec.mode == EvolutionMode::Exact) return matrix_exp_hermitian(a, spec.t);
  const auto terms = pauli_decompose(a);
  return matrix_power(trotter_step(terms, a.rows(), spec.t / spec.slices), spec.slices);
}

/// U^{2^j}. Trotter mode repeats the time-t Trotter block 2^j times rather than
/// re-slicing time t*2^j.
inline ComplexMatrix controlled_power_unitary(const ComplexMatrix& a, const EvolutionSpec& spec, unsigned j) {
  if (spec.mode == EvolutionMode::Exact) {
    validate(spec);
    return matrix_exp_hermitian(a, spec.t * std::ldexp(1.0, static_cast<int>(j)));
  }
  return matrix_power(evolution_unitary(a, spec), std::uint64_t{1} << j);
}

/// The p blocks U^{2^0}, ..., U^{2^{p-1}} used by phase estimation, computed
/// with a single decomposition of A.
inline std::vector<ComplexMatrix> controlled_powers(const ComplexMatrix& a, const EvolutionSpec& spec, unsigned p) {
  validate(spec);
  std::vector<ComplexMatrix> powers;
  powers.reserve(p);
  if (spec.mode == EvolutionMode::Exact) {
    const auto eig = jacobi_eigh(a);
    for (unsigned j = 0; j < p; ++j) {
      const double tj = spec.t * std::ldexp(1.0, static_cast<int>(j));
      powers.push_back(apply_spectral_function(eig, [tj](double l) { return std::polar(1.0, l * tj); }));
    }
    return powers;
  }
  ComplexMatrix u = evolution_unitary(a, spec);
  for (unsigned j = 0; j < p; ++j) {
    powers.push_back(u);
    u = u * u;
  }
  return powers;
}

}  // namespace iimhhl
