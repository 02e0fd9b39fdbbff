#pragma once

#include <span>
#include <vector>

#include "fairreg/losses.hpp"

namespace fairreg {

/// Non-decreasing, right-continuous step function on [0,1].
///
/// The value at u is values[j] for the largest knots[j] <= u; below the first
/// knot the function is clamped to values[0].
class StepFunction {
 public:
  StepFunction(std::vector<double> knots, std::vector<double> values);

  const std::vector<double>& knots() const noexcept { return knots_; }
  const std::vector<double>& values() const noexcept { return values_; }

  double operator()(double u) const;

  friend bool operator==(const StepFunction&, const StepFunction&) = default;

 private:
  std::vector<double> knots_;
  std::vector<double> values_;
};

/// Throws DomainError when u is outside [0,1].
double eval_step(const StepFunction& f, double u);

/// Generalized pool-adjacent-violators fit of
///   min sum_i L(q_i, y_(i))  s.t.  q_1 <= ... <= q_n
/// after a stable sort on u. Observations sharing a u value start in one block
/// (equality constraint). Blocks take their loss-specific block_minimizer
/// value and are pooled while the left value strictly exceeds the right.
/// Poisson -inf block values are replaced by the smallest finite block value.
StepFunction fit_isotonic(std::span<const double> us, std::span<const double> ys,
                          const LossSpec& spec);

}  // namespace fairreg
