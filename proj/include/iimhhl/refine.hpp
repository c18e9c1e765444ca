#pragma once

// Classical iterative improvement and the shifted iterative improvement loop
// that uses HHL as its inner solver.
//
// Each HHL solve only recovers magnitudes plus one global phase, so the loop
// can offset the next correction by a shift vector x~ chosen to make the
// inner solve's true answer (correction + x~) componentwise positive:
//
//   y_m     = HHL(A, r_m)
//   x_m     = y_m - x~_m
//   x      += x_m
//   x~_{m+1} = shift(x_m, x_{m-1})
//   r_{m+1} = b - A (x - x~_{m+1})

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "iimhhl/error.hpp"
#include "iimhhl/hhl.hpp"
#include "iimhhl/numerics.hpp"
#include "iimhhl/random.hpp"

namespace iimhhl {

enum class ShiftStrategy { None, UniformRatio, AbsTenth, AbsRatio, AbsSqrtRatio };

inline constexpr std::array<ShiftStrategy, 5> kAllShiftStrategies = {
    ShiftStrategy::None, ShiftStrategy::UniformRatio, ShiftStrategy::AbsTenth, ShiftStrategy::AbsRatio,
    ShiftStrategy::AbsSqrtRatio};

constexpr std::string_view to_string(ShiftStrategy s) {
  switch (s) {
    case ShiftStrategy::None: return "none";
    case ShiftStrategy::UniformRatio: return "uniform-ratio";
    case ShiftStrategy::AbsTenth: return "abs-tenth";
    case ShiftStrategy::AbsRatio: return "abs-ratio";
    case ShiftStrategy::AbsSqrtRatio: return "abs-sqrt-ratio";
  }
  return "none";
}

inline std::optional<ShiftStrategy> parse_shift_strategy(std::string_view name) {
  for (auto s : kAllShiftStrategies)
    if (to_string(s) == name) return s;
  return std::nullopt;
}

constexpr bool needs_previous(ShiftStrategy s) {
  return s == ShiftStrategy::UniformRatio || s == ShiftStrategy::AbsRatio || s == ShiftStrategy::AbsSqrtRatio;
}

/// Shift for the next iteration from the current correction x_m and the
/// previous correction x_{m-1}.
inline ComplexVector compute_shift(ShiftStrategy strategy, std::span<const Complex> x_m,
                                   std::optional<std::span<const Complex>> x_prev, std::size_t m) {
  const std::size_t n = x_m.size();
  double ratio = 0.0;
  if (needs_previous(strategy)) {
    if (m == 0 || !x_prev || !(norm2(*x_prev) > 0.0)) {
      throw Error(ErrorCode::MissingPrevious, std::string(to_string(strategy)) + " needs a nonzero previous correction");
    }
    ratio = norm2(x_m) / norm2(*x_prev);
  }
  ComplexVector shift(n, Complex{});
  switch (strategy) {
    case ShiftStrategy::None:
      break;
    case ShiftStrategy::UniformRatio:
      std::fill(shift.begin(), shift.end(), Complex(ratio));
      break;
    case ShiftStrategy::AbsTenth:
      for (std::size_t i = 0; i < n; ++i) shift[i] = 0.1 * std::abs(x_m[i]);
      break;
    case ShiftStrategy::AbsRatio:
      for (std::size_t i = 0; i < n; ++i) shift[i] = ratio * std::abs(x_m[i]);
      break;
    case ShiftStrategy::AbsSqrtRatio:
      for (std::size_t i = 0; i < n; ++i) shift[i] = std::sqrt(ratio) * std::abs(x_m[i]);
      break;
  }
  return shift;
}

struct RefinementConfig {
  std::size_t max_iterations = 20;
  HHLConfig hhl;
  ShiftStrategy shift = ShiftStrategy::None;
  std::optional<double> stop_residual;
  std::optional<ComplexVector> pre_shift;
};

struct IterationRecord {
  std::size_t m = 0;
  ComplexVector y;           // inner solution y_m
  ComplexVector shift;       // x~_m the inner solve was offset by
  ComplexVector correction;  // x_m = y_m - x~_m
  ComplexVector x;           // cumulative solution after this iteration
  double residual_norm = 0.0;  // |b - A x|
  double rel_error = 0.0;      // against x_true (or the direct solve)
  std::uint64_t accepted = 0;
  std::uint64_t total_executions = 0;
  std::uint64_t cumulative_measurements = 0;
  double f1 = 0.0;
  double f2 = 0.0;
};

struct IterationTrace {
  std::vector<IterationRecord> records;
};

struct RefinementResult {
  ComplexVector x;
  IterationTrace trace;
};

/// What the loop needs from one inner solve.
struct InnerSolve {
  ComplexVector y;
  std::uint64_t accepted = 0;
  std::uint64_t total_executions = 0;
  double f1 = 0.0;
  double f2 = 0.0;
};

/// (right-hand side, iteration index) -> approximate solution.
using InnerSolver = std::function<InnerSolve(std::span<const Complex>, std::size_t)>;

inline constexpr double kDivergenceGrowth = 1e12;

namespace detail {

// `floor` keeps a residual that hit exactly zero from flagging rounding noise.
inline void check_divergence(double residual, double& min_residual, double floor, std::size_t m) {
  min_residual = std::min(min_residual, residual);
  if (!std::isfinite(residual) || residual > kDivergenceGrowth * std::max(min_residual, floor)) {
    throw Error(ErrorCode::Diverged, "residual grew past 1e12 x its minimum at iteration " + std::to_string(m));
  }
}

}  // namespace detail

/// The shifted loop with any inner solver. With `pre_shift` s the loop solves
/// A x' = b + A s and reports x = x' - s.
inline RefinementResult shifted_iterative_improvement(const ComplexMatrix& a, std::span<const Complex> b,
                                                      const InnerSolver& inner, std::size_t max_iterations,
                                                      ShiftStrategy strategy,
                                                      std::optional<std::span<const Complex>> x_true = std::nullopt,
                                                      std::optional<double> stop_residual = std::nullopt,
                                                      std::optional<std::span<const Complex>> pre_shift = std::nullopt) {
  if (max_iterations < 1) throw Error(ErrorCode::DimensionMismatch, "max_iterations must be >= 1");
  const std::size_t n = b.size();
  require_same_size(a.rows(), n, "refinement");

  const ComplexVector b_orig(b.begin(), b.end());
  ComplexVector offset(n, Complex{});
  if (pre_shift) {
    require_same_size(pre_shift->size(), n, "pre-shift");
    offset.assign(pre_shift->begin(), pre_shift->end());
  }
  const ComplexVector b_work = b_orig + a * offset;
  const ComplexVector reference = x_true ? ComplexVector(x_true->begin(), x_true->end()) : solve_exact(a, b_orig);

  RefinementResult out;
  ComplexVector x_work(n, Complex{});
  ComplexVector shift(n, Complex{});
  ComplexVector r = b_work;
  std::optional<ComplexVector> prev_correction;
  std::uint64_t cumulative = 0;
  double min_residual = norm2(b_orig);
  const double residual_floor = std::numeric_limits<double>::epsilon() * norm2(b_orig);

  for (std::size_t m = 0; m < max_iterations; ++m) {
    IterationRecord rec;
    rec.m = m;
    rec.shift = shift;
    if (norm2(r) > 0.0) {
      InnerSolve s = inner(r, m);
      rec.y = std::move(s.y);
      rec.accepted = s.accepted;
      rec.total_executions = s.total_executions;
      rec.f1 = s.f1;
      rec.f2 = s.f2;
    } else {
      rec.y.assign(n, Complex{});
    }
    rec.correction = rec.y - shift;
    x_work = x_work + rec.correction;
    cumulative += rec.accepted;
    rec.cumulative_measurements = cumulative;

    // Ratio strategies need a previous correction, so iteration 0 never shifts with them.
    const bool have_prev = prev_correction && norm2(*prev_correction) > 0.0;
    const ShiftStrategy effective = (needs_previous(strategy) && !have_prev) ? ShiftStrategy::None : strategy;
    shift = compute_shift(effective, rec.correction,
                          have_prev ? std::optional<std::span<const Complex>>(*prev_correction) : std::nullopt, m);
    r = b_work - a * (x_work - shift);
    prev_correction = rec.correction;

    rec.x = x_work - offset;
    rec.residual_norm = norm2(residual(a, rec.x, b_orig));
    rec.rel_error = relative_error(rec.x, reference);
    detail::check_divergence(rec.residual_norm, min_residual, residual_floor, m);
    out.trace.records.push_back(std::move(rec));
    if (stop_residual && out.trace.records.back().residual_norm <= *stop_residual) break;
  }
  out.x = x_work - offset;
  return out;
}

/// Plain iterative improvement: solve A y = r, x += y, r = b - A x.
inline RefinementResult classical_iterative_improvement(
    const ComplexMatrix& a, std::span<const Complex> b,
    const std::function<ComplexVector(const ComplexMatrix&, std::span<const Complex>)>& inner_solver,
    std::size_t max_iterations, std::optional<std::span<const Complex>> x_true = std::nullopt) {
  InnerSolver wrapped = [&](std::span<const Complex> r, std::size_t) { return InnerSolve{inner_solver(a, r)}; };
  return shifted_iterative_improvement(a, b, wrapped, max_iterations, ShiftStrategy::None, x_true);
}

/// Iterative improvement with HHL as the inner solver. Iteration m samples
/// with seed derive_seed(config.hhl.seed, m).
inline RefinementResult run_iimhhl(const ComplexMatrix& a, std::span<const Complex> b, const RefinementConfig& config,
                               std::optional<std::span<const Complex>> x_true = std::nullopt) {
  const HHLSolver solver(a, config.hhl);
  InnerSolver inner = [&](std::span<const Complex> r, std::size_t m) {
    HHLSolution s = solver.solve(r, derive_seed(config.hhl.seed, m));
    return InnerSolve{std::move(s.x), s.accepted, s.total_executions, s.f1, s.f2};
  };
  std::optional<std::span<const Complex>> pre;
  if (config.pre_shift) pre = std::span<const Complex>(*config.pre_shift);
  return shifted_iterative_improvement(a, b, inner, config.max_iterations, config.shift, x_true, config.stop_residual,
                                       pre);
}

/// b + A s; the caller subtracts s from the solution of the shifted system.
inline ComplexVector apply_pre_shift(std::span<const Complex> b, const ComplexMatrix& a, std::span<const Complex> s) {
  require_same_size(b.size(), s.size(), "pre-shift");
  require_same_size(a.cols(), s.size(), "pre-shift");
  return ComplexVector(b.begin(), b.end()) + a * s;
}

}  // namespace iimhhl
