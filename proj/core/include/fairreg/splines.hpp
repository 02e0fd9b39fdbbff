#pragma once

#include <span>
#include <vector>

#include "fairreg/losses.hpp"

namespace fairreg {

/// Monotone spline basis on [0,1]. degree is the M-spline order k (k = 1 is a
/// piecewise-constant density); interior knots are evenly spaced in (0,1).
struct SplineBasisConfig {
  int degree = 1;
  int n_interior_knots = 0;

  int dimension() const noexcept { return n_interior_knots + degree; }

  /// `degree` copies of 0, the interior knots, `degree` copies of 1.
  std::vector<double> knot_vector() const;

  void validate() const;

  friend bool operator==(const SplineBasisConfig&, const SplineBasisConfig&) = default;
};

/// M-spline densities M_j(u), j < dimension(); each integrates to 1 on [0,1].
std::vector<double> mspline_basis(const SplineBasisConfig& config, double u);

/// I-spline values psi_j(u) = int_0^u M_j(t) dt, computed exactly as tail sums
/// of the order-(k+1) B-spline basis. psi_j(0) = 0, psi_j(1) = 1.
std::vector<double> ispline_basis(const SplineBasisConfig& config, double u);

/// Q(u) = alpha0 + sum_j alphas[j] * psi_j(u) with alphas >= 0.
struct SplineFit {
  SplineBasisConfig config;
  double alpha0 = 0.0;
  std::vector<double> alphas;

  double operator()(double u) const;

  friend bool operator==(const SplineFit&, const SplineFit&) = default;
};

/// Throws DomainError when u is outside [0,1].
double eval_spline(const SplineFit& fit, double u);

struct HookeJeevesOptions {
  double step_tolerance = 1e-6;
  long max_evaluations = 100000;
};

struct IsplineFitResult {
  SplineFit fit;
  double initial_objective = 0.0;
  double final_objective = 0.0;
  long evaluations = 0;
};

/// Minimizes sum_i L(alpha0 + sum_j alpha_j psi_j(u_i), y_i) over alpha0 in R,
/// alpha_j >= 0 by Hooke-Jeeves pattern search, starting from
/// alpha0 = block_minimizer(spec, ys), alpha_j = 0. Coordinates alpha_j are
/// projected onto [0, inf) after every move.
IsplineFitResult fit_ispline_detailed(std::span<const double> us, std::span<const double> ys,
                                      const LossSpec& spec, const SplineBasisConfig& config,
                                      const HookeJeevesOptions& options = {});

SplineFit fit_ispline(std::span<const double> us, std::span<const double> ys,
                      const LossSpec& spec, const SplineBasisConfig& config);

}  // namespace fairreg
