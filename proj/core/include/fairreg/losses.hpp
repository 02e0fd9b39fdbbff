#pragma once

#include <limits>
#include <span>
#include <string>
#include <string_view>

namespace fairreg {

enum class LossKind { Squared, Absolute, Pinball, Huber, PoissonNLL, CrossEntropy };

std::string_view to_string(LossKind kind);
LossKind loss_kind_from_string(std::string_view name);

/// Loss family tag plus its parameters. tau is meaningful only for Pinball
/// and m only for Huber; the factories enforce that.
class LossSpec {
 public:
  static LossSpec squared() { return LossSpec(LossKind::Squared, 0.0, 0.0); }
  static LossSpec absolute() { return LossSpec(LossKind::Absolute, 0.0, 0.0); }
  static LossSpec pinball(double tau);
  static LossSpec huber(double m);
  static LossSpec poisson() { return LossSpec(LossKind::PoissonNLL, 0.0, 0.0); }
  static LossSpec cross_entropy() { return LossSpec(LossKind::CrossEntropy, 0.0, 0.0); }

  LossKind kind() const noexcept { return kind_; }
  double tau() const noexcept { return tau_; }
  double m() const noexcept { return m_; }

  bool is_smooth() const noexcept {
    return kind_ != LossKind::Absolute && kind_ != LossKind::Pinball;
  }

  friend bool operator==(const LossSpec&, const LossSpec&) = default;

 private:
  LossSpec(LossKind kind, double tau, double m) : kind_(kind), tau_(tau), m_(m) {}

  LossKind kind_;
  double tau_;
  double m_;
};

/// Clipping bound applied to cross-entropy probabilities.
inline constexpr double kProbabilityClip = 1e-6;

/// Sentinel returned by block_minimizer for an all-zero Poisson block.
inline constexpr double kNegInfSentinel = -std::numeric_limits<double>::infinity();

/// Huber influence function psi_M(r): r clipped to [-M, M].
double huber_psi(double r, double m) noexcept;

/// L(q, y) for prediction q and response y.
double loss_value(const LossSpec& spec, double q, double y);

/// An element of the subdifferential of L(., y) at q. At the kink of the
/// absolute and pinball losses the midpoint of the subdifferential is used.
double loss_subgrad(const LossSpec& spec, double q, double y);

/// argmin_q sum_i w_i L(q, y_i).
///
/// Squared: weighted mean. Absolute / Pinball: lower weighted quantile
/// (smallest y whose cumulative weight reaches tau * sum w). Huber: root of
/// sum w psi_M(y - q); when the root set is an interval its midpoint is
/// returned. PoissonNLL: log of the weighted mean, kNegInfSentinel when the
/// mean is zero. CrossEntropy: weighted mean clipped to
/// [kProbabilityClip, 1 - kProbabilityClip].
double block_minimizer(const LossSpec& spec, std::span<const double> ys,
                       std::span<const double> ws);

/// Unit-weight convenience overload.
double block_minimizer(const LossSpec& spec, std::span<const double> ys);

/// sum_i w_i L(q, y_i); unit weights when ws is empty.
double weighted_objective(const LossSpec& spec, double q, std::span<const double> ys,
                          std::span<const double> ws = {});

}  // namespace fairreg
