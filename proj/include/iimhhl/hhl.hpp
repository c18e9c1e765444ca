#pragma once

// The HHL pipeline on the statevector simulator: phase estimation, the
// eigenvalue-conditioned ancilla rotation, uncompute, readout (exact
// amplitudes or sampled measurements) and the scale/phase post-processing.

#include <cmath>
#include <cstdint>
#include <optional>
#include <vector>

#include "iimhhl/error.hpp"
#include "iimhhl/hamsim.hpp"
#include "iimhhl/numerics.hpp"
#include "iimhhl/qpe.hpp"
#include "iimhhl/statevector.hpp"

namespace iimhhl {

enum class ReadoutMode { Statevector, Sampled };

struct HHLConfig {
  unsigned p = 4;
  std::optional<double> t;  // default: default_evolution_time(p)
  unsigned slices = 6;
  EvolutionMode evolution_mode = EvolutionMode::Exact;
  ReadoutMode readout_mode = ReadoutMode::Statevector;
  std::uint64_t shots = 1000;  // accepted measurements per solve (sampled mode)
  std::optional<double> C;     // default: smallest nonzero clock eigenvalue
  std::uint64_t seed = 0;
  /// Sampled mode: accept only draws with ancilla=1 and clock=0 (the subspace
  /// the statevector readout projects on). false keeps every ancilla=1 draw.
  bool postselect_clock_zero = true;
  /// Statevector readout refuses states whose ancilla=1 mass is mostly off clock=0.
  double min_clock_zero_fraction = 0.5;
};

/// 2 pi (1 - 2^-p): puts lambda = 1 exactly on the top clock index and keeps
/// spectra in (0, 1] away from the 2 pi wraparound.
inline double default_evolution_time(unsigned p) { return 2.0 * kPi * (1.0 - std::ldexp(1.0, -static_cast<int>(p))); }

inline double evolution_time(const HHLConfig& c) { return c.t.value_or(default_evolution_time(c.p)); }

/// Smallest nonzero clock eigenvalue (2 pi / t) 2^-p.
inline double clock_resolution(const HHLConfig& c) {
  return (2.0 * kPi / evolution_time(c)) * std::ldexp(1.0, -static_cast<int>(c.p));
}

inline double rotation_constant(const HHLConfig& c) { return c.C.value_or(clock_resolution(c)); }

inline EvolutionSpec evolution_spec(const HHLConfig& c) { return {evolution_time(c), c.slices, c.evolution_mode}; }

struct HHLSolution {
  ComplexVector x;
  ComplexVector x_sta;
  double f1 = 0.0;
  double f2 = 0.0;
  double acceptance_rate = 0.0;
  std::optional<MeasurementHistogram> histogram;
  std::uint64_t accepted = 0;
  std::uint64_t total_executions = 0;
};

inline constexpr double kRotationSlack = 1e-12;
inline constexpr double kPopulatedMass = 1e-24;

/// Clock index k != 0 rotates the ancilla to sqrt(1 - (C/l)^2)|0> + (C/l)|1>
/// with l = (2 pi / t) k / 2^p; clock index 0 is left alone.
inline StateVector apply_controlled_rotation(StateVector state, const HHLConfig& config) {
  const auto& layout = state.layout;
  if (layout.n_clock != config.p) throw Error(ErrorCode::DimensionMismatch, "layout clock width differs from p");
  const double t = evolution_time(config);
  const double c_const = rotation_constant(config);
  if (!(c_const > 0.0)) throw Error(ErrorCode::RotationOverflow, "rotation constant must be positive");

  std::vector<double> populated(layout.clock_dimension(), 0.0);
  for (std::size_t idx = 0; idx < state.amplitudes.size(); ++idx)
    populated[layout.clock_of(idx)] += std::norm(state.amplitudes[idx]);

  const std::size_t anc_bit = std::size_t{1} << layout.ancilla_qubit();
  for (std::size_t k = 1; k < layout.clock_dimension(); ++k) {
    const double lambda = ClockReading::from_index(config.p, k, t).lambda_tilde;
    double ratio = c_const / lambda;
    if (ratio > 1.0 + kRotationSlack) {
      if (populated[k] > kPopulatedMass) {
        throw Error(ErrorCode::RotationOverflow, "C/lambda = " + std::to_string(ratio) + " at clock " + std::to_string(k));
      }
      continue;
    }
    ratio = std::min(ratio, 1.0);
    const double keep = std::sqrt(1.0 - ratio * ratio);
    for (std::size_t in = 0; in < layout.input_dimension(); ++in) {
      const std::size_t i0 = layout.compose(in, k, 0);
      const Complex a0 = state.amplitudes[i0];
      const Complex a1 = state.amplitudes[i0 | anc_bit];
      state.amplitudes[i0] = keep * a0 - ratio * a1;
      state.amplitudes[i0 | anc_bit] = ratio * a0 + keep * a1;
    }
  }
  return state;
}

/// Entry i is sqrt(counts[i] / accepted).
inline RealVector estimate_from_histogram(const MeasurementHistogram& h) {
  if (h.accepted == 0) throw Error(ErrorCode::EmptyHistogram, "no accepted shots");
  RealVector x(h.input_dimension, 0.0);
  for (const auto& [outcome, count] : h.counts) {
    if (outcome >= x.size()) throw Error(ErrorCode::DimensionMismatch, "outcome outside input register");
    x[outcome] = std::sqrt(static_cast<double>(count) / static_cast<double>(h.accepted));
  }
  return x;
}

struct PostProcessed {
  double f1 = 0.0;
  double f2 = 0.0;
  ComplexVector x;
};

/// f1 = |b| / |A x_sta|, f2 = arg(<A x_sta, b>), x = f1 e^{i f2} x_sta.
/// The angle is taken so that A x lines up with b; for real data it equals
/// arg(<b, A x_sta>) exactly (both are 0 or pi).
inline PostProcessed postprocess(std::span<const Complex> x_sta, const ComplexMatrix& a, std::span<const Complex> b) {
  const ComplexVector ax = a * x_sta;
  const double nax = norm2(ax);
  if (!(nax > 1e-300)) throw Error(ErrorCode::DegenerateScale, "|A x_sta| vanishes");
  PostProcessed out;
  out.f1 = norm2(b) / nax;
  out.f2 = std::arg(inner(ax, b));
  const Complex factor = std::polar(out.f1, out.f2);
  out.x.resize(x_sta.size());
  for (std::size_t i = 0; i < x_sta.size(); ++i) out.x[i] = factor * x_sta[i];
  return out;
}

/// Holds everything about one (A, config) pair that does not depend on b, so
/// repeated solves against new right-hand sides reuse the QPE blocks.
class HHLSolver {
 public:
  HHLSolver(ComplexMatrix a, HHLConfig config) : a_(std::move(a)), config_(std::move(config)) {
    if (!a_.square()) throw Error(ErrorCode::DimensionMismatch, "HHL needs a square matrix");
    layout_ = RegisterLayout{log2_exact(a_.rows()), config_.p};
    if (config_.p < 1) throw Error(ErrorCode::DimensionMismatch, "p must be >= 1");
    const auto eig = jacobi_eigh(a_);
    const double t = evolution_time(config_);
    for (double lambda : eig.eigenvalues) {
      const double phase = lambda * t;
      if (!(phase > 0.0 && phase < 2.0 * kPi)) {
        throw Error(ErrorCode::SpectrumOutOfRange, "lambda*t = " + std::to_string(phase) + " outside (0, 2pi)");
      }
    }
    powers_ = controlled_powers(a_, evolution_spec(config_), config_.p);
  }

  const ComplexMatrix& matrix() const noexcept { return a_; }
  const HHLConfig& config() const noexcept { return config_; }
  const RegisterLayout& layout() const noexcept { return layout_; }

  /// State after steps 1-4 (prepare, QPE, rotation, uncompute).
  StateVector prepare_state(std::span<const Complex> b) const {
    StateVector s = prepare_b_state(b, layout_);
    s = apply_qpe(std::move(s), powers_);
    s = apply_controlled_rotation(std::move(s), config_);
    return apply_inverse_qpe(std::move(s), powers_);
  }

  HHLSolution solve(std::span<const Complex> b) const { return solve(b, config_.seed); }

  HHLSolution solve(std::span<const Complex> b, std::uint64_t seed) const {
    const StateVector s = prepare_state(b);
    const PostSelection rule =
        config_.postselect_clock_zero ? PostSelection::AncillaOneClockZero : PostSelection::AncillaOne;
    HHLSolution out;
    if (config_.readout_mode == ReadoutMode::Statevector) {
      out.x_sta = read_solution_amplitudes(s, config_.min_clock_zero_fraction);
      out.acceptance_rate = acceptance_probability(s, PostSelection::AncillaOneClockZero);
    } else {
      MeasurementHistogram h = sample(s, config_.shots, seed, rule);
      out.x_sta = to_complex(estimate_from_histogram(h));
      out.accepted = h.accepted;
      out.total_executions = h.total_executions;
      out.acceptance_rate = static_cast<double>(h.accepted) / static_cast<double>(h.total_executions);
      out.histogram = std::move(h);
    }
    auto post = postprocess(out.x_sta, a_, b);
    out.f1 = post.f1;
    out.f2 = post.f2;
    out.x = std::move(post.x);
    return out;
  }

 private:
  ComplexMatrix a_;
  HHLConfig config_;
  RegisterLayout layout_;
  std::vector<ComplexMatrix> powers_;
};

inline HHLSolution run_hhl(const ComplexMatrix& a, std::span<const Complex> b, const HHLConfig& config) {
  return HHLSolver(a, config).solve(b);
}

inline HHLSolution run_hhl(const ComplexMatrix& a, const ComplexVector& b, const HHLConfig& config) {
  return run_hhl(a, std::span<const Complex>(b), config);
}

}  // namespace iimhhl
