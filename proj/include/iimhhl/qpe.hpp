#pragma once

// Quantum phase estimation over the clock register and its exact adjoint.
//
// Clock qubit j controls U^{2^j}; the clock integer is read with clock qubit 0
// as the least significant bit (qubit p-1 most significant). With
// U = e^{iAt}, clock index k corresponds to the eigenvalue (2 pi / t) k / 2^p.

#include <cmath>
#include <vector>

#include "iimhhl/error.hpp"
#include "iimhhl/hamsim.hpp"
#include "iimhhl/numerics.hpp"
#include "iimhhl/statevector.hpp"

namespace iimhhl {

struct ClockReading {
  unsigned p = 0;
  std::size_t index = 0;
  double lambda_tilde = 0.0;

  static ClockReading from_index(unsigned p, std::size_t index, double t) {
    return {p, index, (2.0 * kPi / t) * static_cast<double>(index) / std::ldexp(1.0, static_cast<int>(p))};
  }
};

inline ComplexMatrix hadamard() {
  const double h = 1.0 / std::sqrt(2.0);
  return {{h, h}, {h, -h}};
}

/// Entries e^{-2 pi i jk / 2^p} / sqrt(2^p).
inline ComplexMatrix inverse_qft_matrix(unsigned p) {
  const std::size_t m = std::size_t{1} << p;
  const double norm = 1.0 / std::sqrt(static_cast<double>(m));
  ComplexMatrix f(m, m);
  for (std::size_t j = 0; j < m; ++j)
    for (std::size_t k = 0; k < m; ++k) {
      // Reduce jk mod m before scaling so large p keeps full phase accuracy.
      const double frac = static_cast<double>((j * k) % m) / static_cast<double>(m);
      f(j, k) = std::polar(norm, -2.0 * kPi * frac);
    }
  return f;
}

inline StateVector inverse_qft(StateVector state, std::span<const unsigned> clock_qubits) {
  detail::check_targets(state, clock_qubits);
  detail::apply_masked(state, inverse_qft_matrix(static_cast<unsigned>(clock_qubits.size())), clock_qubits, 0, 0);
  return state;
}

inline StateVector qft(StateVector state, std::span<const unsigned> clock_qubits) {
  detail::check_targets(state, clock_qubits);
  detail::apply_masked(state, adjoint(inverse_qft_matrix(static_cast<unsigned>(clock_qubits.size()))), clock_qubits,
                       0, 0);
  return state;
}

inline constexpr double kClockZeroTolerance = 1e-12;

/// `powers[j]` is U^{2^j}; there must be one per clock qubit.
inline StateVector apply_qpe(StateVector state, const std::vector<ComplexMatrix>& powers) {
  const auto& layout = state.layout;
  if (powers.size() != layout.n_clock) {
    throw Error(ErrorCode::DimensionMismatch, "need one controlled power per clock qubit");
  }
  double stray = 0.0;
  for (std::size_t idx = 0; idx < state.amplitudes.size(); ++idx)
    if (layout.clock_of(idx) != 0) stray += std::norm(state.amplitudes[idx]);
  if (stray > kClockZeroTolerance) throw Error(ErrorCode::ClockNotZero, "clock mass " + std::to_string(stray));

  const auto clock = layout.clock_qubits();
  const auto input = layout.input_qubits();
  const ComplexMatrix h = hadamard();
  for (unsigned q : clock) detail::apply_masked(state, h, std::span<const unsigned>(&q, 1), 0, 0);
  for (unsigned j = 0; j < layout.n_clock; ++j) {
    state = apply_controlled_unitary(std::move(state), powers[j], layout.clock_qubit(j), input);
  }
  return inverse_qft(std::move(state), clock);
}

inline StateVector apply_inverse_qpe(StateVector state, const std::vector<ComplexMatrix>& powers) {
  const auto& layout = state.layout;
  if (powers.size() != layout.n_clock) {
    throw Error(ErrorCode::DimensionMismatch, "need one controlled power per clock qubit");
  }
  const auto clock = layout.clock_qubits();
  const auto input = layout.input_qubits();
  state = qft(std::move(state), clock);
  for (unsigned j = layout.n_clock; j-- > 0;) {
    state = apply_controlled_unitary(std::move(state), adjoint(powers[j]), layout.clock_qubit(j), input);
  }
  const ComplexMatrix h = hadamard();
  for (unsigned q : clock) detail::apply_masked(state, h, std::span<const unsigned>(&q, 1), 0, 0);
  return state;
}

inline StateVector apply_qpe(StateVector state, const ComplexMatrix& a, const EvolutionSpec& spec) {
  const unsigned p = state.layout.n_clock;
  return apply_qpe(std::move(state), controlled_powers(a, spec, p));
}

inline StateVector apply_inverse_qpe(StateVector state, const ComplexMatrix& a, const EvolutionSpec& spec) {
  const unsigned p = state.layout.n_clock;
  return apply_inverse_qpe(std::move(state), controlled_powers(a, spec, p));
}

/// Marginal distribution of the clock register.
inline RealVector clock_distribution(const StateVector& state) {
  RealVector dist(state.layout.clock_dimension(), 0.0);
  for (std::size_t idx = 0; idx < state.amplitudes.size(); ++idx)
    dist[state.layout.clock_of(idx)] += std::norm(state.amplitudes[idx]);
  return dist;
}

}  // namespace iimhhl
