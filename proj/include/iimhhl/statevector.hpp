#pragma once

// Dense statevector over the input (x) clock (x) ancilla registers.
//
// Qubit 0 is the least significant bit of the global amplitude index. The
// input register occupies qubits [0, n_input), the clock register
// [n_input, n_input + n_clock) and the single ancilla is the top qubit.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <random>
#include <span>
#include <vector>

#include "iimhhl/error.hpp"
#include "iimhhl/numerics.hpp"

namespace iimhhl {

struct RegisterLayout {
  unsigned n_input = 0;
  unsigned n_clock = 0;
  static constexpr unsigned n_ancilla = 1;

  unsigned total_qubits() const noexcept { return n_input + n_clock + n_ancilla; }
  std::size_t dimension() const noexcept { return std::size_t{1} << total_qubits(); }
  std::size_t input_dimension() const noexcept { return std::size_t{1} << n_input; }
  std::size_t clock_dimension() const noexcept { return std::size_t{1} << n_clock; }

  unsigned clock_qubit(unsigned j) const noexcept { return n_input + j; }
  unsigned ancilla_qubit() const noexcept { return n_input + n_clock; }

  std::vector<unsigned> input_qubits() const {
    std::vector<unsigned> q(n_input);
    for (unsigned i = 0; i < n_input; ++i) q[i] = i;
    return q;
  }
  std::vector<unsigned> clock_qubits() const {
    std::vector<unsigned> q(n_clock);
    for (unsigned j = 0; j < n_clock; ++j) q[j] = clock_qubit(j);
    return q;
  }

  std::size_t input_of(std::size_t index) const noexcept { return index & (input_dimension() - 1); }
  std::size_t clock_of(std::size_t index) const noexcept { return (index >> n_input) & (clock_dimension() - 1); }
  unsigned ancilla_of(std::size_t index) const noexcept { return (index >> ancilla_qubit()) & 1u; }
  std::size_t compose(std::size_t input, std::size_t clock, unsigned ancilla) const noexcept {
    return input | (clock << n_input) | (std::size_t{ancilla} << ancilla_qubit());
  }

  /// ceil(log2 n) input qubits, at least one.
  static unsigned qubits_for(std::size_t n) {
    unsigned q = 0;
    while ((std::size_t{1} << q) < n) ++q;
    return std::max(q, 1u);
  }
};

struct StateVector {
  RegisterLayout layout;
  ComplexVector amplitudes;

  double norm() const { return norm2(amplitudes); }
};

struct MeasurementHistogram {
  std::map<std::size_t, std::uint64_t> counts;  // input-register basis index -> count
  std::uint64_t accepted = 0;
  std::uint64_t total_executions = 0;
  std::size_t input_dimension = 0;
};

/// Which draws count as accepted when sampling.
enum class PostSelection {
  AncillaOne,           // ancilla = 1
  AncillaOneClockZero,  // ancilla = 1 and the clock register reads 0
};

inline StateVector prepare_b_state(std::span<const Complex> b, const RegisterLayout& layout) {
  require_same_size(b.size(), layout.input_dimension(), "prepare_b_state");
  const double nb = norm2(b);
  if (!(nb > 1e-300)) throw Error(ErrorCode::ZeroVector, "right-hand side has zero norm");
  StateVector s{layout, ComplexVector(layout.dimension())};
  for (std::size_t i = 0; i < b.size(); ++i) s.amplitudes[layout.compose(i, 0, 0)] = b[i] / nb;
  return s;
}

namespace detail {

inline void check_targets(const StateVector& state, std::span<const unsigned> targets) {
  const unsigned total = state.layout.total_qubits();
  for (std::size_t i = 0; i < targets.size(); ++i) {
    if (targets[i] >= total) throw Error(ErrorCode::QubitIndexOutOfRange, "qubit " + std::to_string(targets[i]));
    for (std::size_t j = 0; j < i; ++j)
      if (targets[i] == targets[j]) throw Error(ErrorCode::QubitIndexOutOfRange, "repeated target qubit");
  }
}

// Applies U to the target qubits on every basis block whose `mask` bits equal
// `match`. Target k of the list is bit k of U's row/column index.
inline void apply_masked(StateVector& state, const ComplexMatrix& u, std::span<const unsigned> targets,
                         std::size_t mask, std::size_t match) {
  const std::size_t dim_u = std::size_t{1} << targets.size();
  std::size_t target_mask = 0;
  for (unsigned q : targets) target_mask |= std::size_t{1} << q;

  std::vector<std::size_t> offsets(dim_u, 0);
  for (std::size_t k = 0; k < dim_u; ++k)
    for (std::size_t bit = 0; bit < targets.size(); ++bit)
      if ((k >> bit) & 1u) offsets[k] |= std::size_t{1} << targets[bit];

  ComplexVector in(dim_u), out(dim_u);
  auto& amp = state.amplitudes;
  for (std::size_t base = 0; base < amp.size(); ++base) {
    if (base & target_mask) continue;
    if ((base & mask) != match) continue;
    for (std::size_t k = 0; k < dim_u; ++k) in[k] = amp[base | offsets[k]];
    for (std::size_t r = 0; r < dim_u; ++r) {
      Complex acc{};
      for (std::size_t c = 0; c < dim_u; ++c) acc += u(r, c) * in[c];
      out[r] = acc;
    }
    for (std::size_t k = 0; k < dim_u; ++k) amp[base | offsets[k]] = out[k];
  }
}

inline void check_gate(const StateVector& state, const ComplexMatrix& u, std::span<const unsigned> targets) {
  check_targets(state, targets);
  if (!u.square() || u.rows() != (std::size_t{1} << targets.size())) {
    throw Error(ErrorCode::DimensionMismatch, "gate dimension does not match target count");
  }
  if (!is_unitary(u)) throw Error(ErrorCode::NotUnitary, "defect " + std::to_string(unitarity_defect(u)));
}

}  // namespace detail

inline StateVector apply_unitary(StateVector state, const ComplexMatrix& u, std::span<const unsigned> targets) {
  detail::check_gate(state, u, targets);
  detail::apply_masked(state, u, targets, 0, 0);
  return state;
}

inline StateVector apply_unitary(StateVector state, const ComplexMatrix& u, std::initializer_list<unsigned> targets) {
  return apply_unitary(std::move(state), u, std::span<const unsigned>(targets.begin(), targets.size()));
}

inline StateVector apply_controlled_unitary(StateVector state, const ComplexMatrix& u, unsigned control,
                                            std::span<const unsigned> targets) {
  detail::check_gate(state, u, targets);
  if (control >= state.layout.total_qubits()) {
    throw Error(ErrorCode::QubitIndexOutOfRange, "control qubit " + std::to_string(control));
  }
  if (std::find(targets.begin(), targets.end(), control) != targets.end()) {
    throw Error(ErrorCode::QubitIndexOutOfRange, "control qubit is also a target");
  }
  const std::size_t bit = std::size_t{1} << control;
  detail::apply_masked(state, u, targets, bit, bit);
  return state;
}

inline StateVector apply_controlled_unitary(StateVector state, const ComplexMatrix& u, unsigned control,
                                            std::initializer_list<unsigned> targets) {
  return apply_controlled_unitary(std::move(state), u, control,
                                  std::span<const unsigned>(targets.begin(), targets.size()));
}

/// Probability that a full-register measurement is accepted under `rule`.
inline double acceptance_probability(const StateVector& state, PostSelection rule) {
  double p = 0.0;
  const auto& layout = state.layout;
  for (std::size_t idx = 0; idx < state.amplitudes.size(); ++idx) {
    if (layout.ancilla_of(idx) != 1u) continue;
    if (rule == PostSelection::AncillaOneClockZero && layout.clock_of(idx) != 0) continue;
    p += std::norm(state.amplitudes[idx]);
  }
  return p;
}

inline constexpr double kMinAcceptance = 1e-9;

/// Repeated full-register measurement until `shots_accepted` draws satisfy the
/// post-selection rule. Accepted draws are iid from the conditional outcome
/// distribution and the number of rejected draws before the last acceptance is
/// negative-binomial, so both are drawn directly; the result has the same
/// distribution as the explicit retry loop without its cost at low acceptance.
inline MeasurementHistogram sample(const StateVector& state, std::uint64_t shots_accepted, std::uint64_t seed,
                                   PostSelection rule = PostSelection::AncillaOne) {
  if (shots_accepted < 1) throw Error(ErrorCode::EmptyHistogram, "shots_accepted must be >= 1");
  const auto& layout = state.layout;
  const double total_p = norm2(state.amplitudes) * norm2(state.amplitudes);

  std::vector<double> cdf(layout.input_dimension(), 0.0);
  for (std::size_t idx = 0; idx < state.amplitudes.size(); ++idx) {
    if (layout.ancilla_of(idx) != 1u) continue;
    if (rule == PostSelection::AncillaOneClockZero && layout.clock_of(idx) != 0) continue;
    cdf[layout.input_of(idx)] += std::norm(state.amplitudes[idx]);
  }
  const double accepted_p = std::accumulate(cdf.begin(), cdf.end(), 0.0);
  const double p_accept = accepted_p / total_p;
  if (!(p_accept >= kMinAcceptance)) {
    throw Error(ErrorCode::AcceptanceTooLow, "acceptance probability " + std::to_string(p_accept));
  }
  std::partial_sum(cdf.begin(), cdf.end(), cdf.begin());

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uniform(0.0, accepted_p);
  MeasurementHistogram h;
  h.input_dimension = layout.input_dimension();
  for (std::uint64_t s = 0; s < shots_accepted; ++s) {
    const double u = uniform(rng);
    auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
    std::size_t outcome = static_cast<std::size_t>(std::distance(cdf.begin(), it));
    if (outcome >= cdf.size()) outcome = cdf.size() - 1;
    // Zero-probability outcomes share a cdf value with their predecessor; never report them.
    while (outcome > 0 && cdf[outcome] == cdf[outcome - 1]) --outcome;
    ++h.counts[outcome];
  }
  h.accepted = shots_accepted;
  std::uint64_t rejected = 0;
  if (p_accept < 1.0) {
    std::negative_binomial_distribution<std::uint64_t> failures(shots_accepted, p_accept);
    rejected = failures(rng);
  }
  h.total_executions = shots_accepted + rejected;
  return h;
}

/// Mass of the ancilla=1 subspace that sits on clock=0.
inline double clock_zero_fraction(const StateVector& state) {
  const double anc1 = acceptance_probability(state, PostSelection::AncillaOne);
  if (anc1 <= 0.0) return 0.0;
  return acceptance_probability(state, PostSelection::AncillaOneClockZero) / anc1;
}

/// Amplitudes on (ancilla=1, clock=0), renormalized. `min_clock_zero_fraction`
/// is the share of the ancilla=1 mass that must already sit on clock=0.
inline ComplexVector read_solution_amplitudes(const StateVector& state, double min_clock_zero_fraction = 1.0 - 1e-6) {
  const auto& layout = state.layout;
  const double fraction = clock_zero_fraction(state);
  if (!(fraction >= min_clock_zero_fraction)) {
    throw Error(ErrorCode::ClockNotUncomputed, "clock=0 fraction " + std::to_string(fraction));
  }
  ComplexVector x(layout.input_dimension());
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = state.amplitudes[layout.compose(i, 0, 1)];
  const double n = norm2(x);
  for (auto& v : x) v /= n;
  return x;
}

}  // namespace iimhhl
