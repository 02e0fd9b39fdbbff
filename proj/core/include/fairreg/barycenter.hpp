#pragma once

#include <cstdint>
#include <functional>
#include <span>

#include "fairreg/losses.hpp"

namespace fairreg {

/// Population description of one protected group for the oracle: its
/// probability r_s, its latent quantile function Q_s* on [0,1] and the
/// Gaussian noise scale of Y = Q_s*(u) + sigma Z.
struct GroupSpec {
  double weight = 0.5;
  std::function<double(double)> latent_quantile;
  double sigma = 1.0;
};

enum class ClosedFormKind { SquaredMean, CrossEntropyMean, PoissonCanonical };

/// Closed-form optimal common quantile at u.
///   SquaredMean, CrossEntropyMean: sum_s r_s Q_s*(u)
///   PoissonCanonical (identity g, A' = exp): log sum_s r_s exp(Q_s*(u))
double qtilde_closed_form(ClosedFormKind kind, double u, std::span<const GroupSpec> groups);

/// argmin_q sum_s r_s C(Q_s*(u), q) for the Gaussian noise model.
///
/// Absolute / Pinball: tau-quantile of the Gaussian mixture by bisection.
/// Huber: root of sum_s r_s E[psi_M(Q_s*(u) + sigma_s Z - q)] by bisection.
/// Squared, CrossEntropy, PoissonNLL: closed form.
/// Throws NumericError when no sign change is found after bracket expansion.
double qtilde_pointwise(const LossSpec& spec, double u, std::span<const GroupSpec> groups);

/// E[psi_M(mu + sigma Z - q)] for standard normal Z.
double expected_huber_psi(double mu, double sigma, double q, double m);

/// Test oracle: golden-section minimization of a Monte-Carlo estimate of the
/// pointwise risk with common random numbers. Responses are Gaussian
/// (Q_s* + sigma Z), Poisson(exp Q_s*) for PoissonNLL and Bernoulli(Q_s*) for
/// CrossEntropy.
double qtilde_monte_carlo(const LossSpec& spec, double u, std::span<const GroupSpec> groups,
                          std::size_t draws = 1'000'000, std::uint64_t seed = 0);

}  // namespace fairreg
