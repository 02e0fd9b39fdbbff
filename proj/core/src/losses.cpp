#include "fairreg/losses.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "fairreg/error.hpp"

namespace fairreg {

namespace {

constexpr int kHuberNewtonCap = 200;
constexpr double kHuberTolerance = 1e-10;

void check_cross_entropy(double q, double y) {
  if (!(q > 0.0 && q < 1.0)) {
    throw DomainError("cross-entropy prediction must lie in (0,1), got " + std::to_string(q));
  }
  if (!(y >= 0.0 && y <= 1.0)) {
    throw DomainError("cross-entropy response must lie in [0,1], got " + std::to_string(y));
  }
}

void check_poisson_response(double y) {
  if (!(y >= 0.0)) {
    throw DomainError("Poisson response must be non-negative, got " + std::to_string(y));
  }
}

double pinball_value(double tau, double r) {
  return r >= 0.0 ? tau * r : (tau - 1.0) * r;
}

double lower_weighted_quantile(std::span<const double> ys, std::span<const double> ws, double tau) {
  std::vector<std::size_t> order(ys.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return ys[a] < ys[b]; });
  const double total = std::accumulate(ws.begin(), ws.end(), 0.0);
  const double target = tau * total;
  double cumulative = 0.0;
  for (std::size_t idx : order) {
    cumulative += ws[idx];
    if (cumulative >= target) return ys[idx];
  }
  return ys[order.back()];
}

double huber_score(std::span<const double> ys, std::span<const double> ws, double q, double m) {
  double g = 0.0;
  for (std::size_t i = 0; i < ys.size(); ++i) g += ws[i] * huber_psi(ys[i] - q, m);
  return g;
}

double huber_slope(std::span<const double> ys, std::span<const double> ws, double q, double m) {
  double s = 0.0;
  for (std::size_t i = 0; i < ys.size(); ++i) {
    if (std::abs(ys[i] - q) < m) s += ws[i];
  }
  return s;
}

// Root of the non-increasing, piecewise-linear score g(q) = sum w psi_M(y - q).
double huber_location(std::span<const double> ys, std::span<const double> ws, double m) {
  const double total = std::accumulate(ws.begin(), ws.end(), 0.0);
  const double tol = kHuberTolerance * total;
  double lo = *std::min_element(ys.begin(), ys.end());
  double hi = *std::max_element(ys.begin(), ys.end());
  if (lo == hi) return lo;

  double mean = 0.0;
  for (std::size_t i = 0; i < ys.size(); ++i) mean += ws[i] * ys[i];
  double q = std::clamp(mean / total, lo, hi);

  bool converged = false;
  for (int it = 0; it < kHuberNewtonCap; ++it) {
    const double g = huber_score(ys, ws, q, m);
    if (std::abs(g) <= tol) {
      converged = true;
      break;
    }
    (g > 0.0 ? lo : hi) = q;
    const double slope = huber_slope(ys, ws, q, m);
    double next = slope > 0.0 ? q + g / slope : 0.5 * (lo + hi);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    q = next;
  }
  if (!converged) {
    // Bisection fallback; the bracket is valid by construction.
    for (int it = 0; it < 2000; ++it) {
      const double g = huber_score(ys, ws, q, m);
      if (std::abs(g) <= tol || hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() *
                                                   std::max(1.0, std::abs(q))) {
        break;
      }
      (g > 0.0 ? lo : hi) = q;
      q = 0.5 * (lo + hi);
    }
  }

  // No residual inside (-M, M): g is flat around q, so every point between the
  // neighbouring breakpoints y_i +- M is a root. Return the midpoint.
  if (huber_slope(ys, ws, q, m) == 0.0) {
    double left = -std::numeric_limits<double>::infinity();
    double right = std::numeric_limits<double>::infinity();
    for (double y : ys) {
      for (double b : {y - m, y + m}) {
        if (b <= q) left = std::max(left, b);
        if (b >= q) right = std::min(right, b);
      }
    }
    q = 0.5 * (left + right);
  }
  return q;
}

}  // namespace

std::string_view to_string(LossKind kind) {
  switch (kind) {
    case LossKind::Squared: return "squared";
    case LossKind::Absolute: return "absolute";
    case LossKind::Pinball: return "pinball";
    case LossKind::Huber: return "huber";
    case LossKind::PoissonNLL: return "poisson";
    case LossKind::CrossEntropy: return "cross_entropy";
  }
  return "unknown";
}

LossKind loss_kind_from_string(std::string_view name) {
  for (LossKind k : {LossKind::Squared, LossKind::Absolute, LossKind::Pinball, LossKind::Huber,
                     LossKind::PoissonNLL, LossKind::CrossEntropy}) {
    if (to_string(k) == name) return k;
  }
  throw ArgumentError("unknown loss kind '" + std::string(name) + "'");
}

LossSpec LossSpec::pinball(double tau) {
  if (!(tau > 0.0 && tau < 1.0)) {
    throw ArgumentError("pinball tau must lie in (0,1), got " + std::to_string(tau));
  }
  return LossSpec(LossKind::Pinball, tau, 0.0);
}

LossSpec LossSpec::huber(double m) {
  if (!(m > 0.0) || !std::isfinite(m)) {
    throw ArgumentError("huber threshold must be positive, got " + std::to_string(m));
  }
  return LossSpec(LossKind::Huber, 0.0, m);
}

double huber_psi(double r, double m) noexcept { return std::clamp(r, -m, m); }

double loss_value(const LossSpec& spec, double q, double y) {
  const double r = y - q;
  switch (spec.kind()) {
    case LossKind::Squared: return r * r;
    case LossKind::Absolute: return std::abs(r);
    case LossKind::Pinball: return pinball_value(spec.tau(), r);
    case LossKind::Huber: {
      const double a = std::abs(r);
      const double m = spec.m();
      return a <= m ? 0.5 * r * r : m * a - 0.5 * m * m;
    }
    case LossKind::PoissonNLL:
      check_poisson_response(y);
      if (q == kNegInfSentinel) {
        return y == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
      }
      return std::exp(q) - y * q;
    case LossKind::CrossEntropy:
      check_cross_entropy(q, y);
      return -y * std::log(q) - (1.0 - y) * std::log1p(-q);
  }
  throw ArgumentError("unsupported loss kind");
}

double loss_subgrad(const LossSpec& spec, double q, double y) {
  const double r = y - q;
  switch (spec.kind()) {
    case LossKind::Squared: return 2.0 * (q - y);
    case LossKind::Absolute: return r > 0.0 ? -1.0 : (r < 0.0 ? 1.0 : 0.0);
    case LossKind::Pinball:
      // d/dq rho_tau(y - q); at r = 0 the midpoint of [-tau, 1 - tau].
      if (r > 0.0) return -spec.tau();
      if (r < 0.0) return 1.0 - spec.tau();
      return 0.5 - spec.tau();
    case LossKind::Huber: return -huber_psi(r, spec.m());
    case LossKind::PoissonNLL:
      check_poisson_response(y);
      return std::exp(q) - y;
    case LossKind::CrossEntropy:
      check_cross_entropy(q, y);
      return -y / q + (1.0 - y) / (1.0 - q);
  }
  throw ArgumentError("unsupported loss kind");
}

double block_minimizer(const LossSpec& spec, std::span<const double> ys,
                       std::span<const double> ws) {
  if (ys.empty()) throw ArgumentError("block_minimizer: empty block");
  if (ws.size() != ys.size()) throw ArgumentError("block_minimizer: weight length mismatch");
  for (double w : ws) {
    if (!(w > 0.0)) throw ArgumentError("block_minimizer: weights must be positive");
  }

  auto weighted_mean = [&] {
    double sw = 0.0, swy = 0.0;
    for (std::size_t i = 0; i < ys.size(); ++i) {
      sw += ws[i];
      swy += ws[i] * ys[i];
    }
    return swy / sw;
  };

  switch (spec.kind()) {
    case LossKind::Squared: return weighted_mean();
    case LossKind::Absolute: return lower_weighted_quantile(ys, ws, 0.5);
    case LossKind::Pinball: return lower_weighted_quantile(ys, ws, spec.tau());
    case LossKind::Huber: return huber_location(ys, ws, spec.m());
    case LossKind::PoissonNLL: {
      for (double y : ys) check_poisson_response(y);
      const double mean = weighted_mean();
      return mean > 0.0 ? std::log(mean) : kNegInfSentinel;
    }
    case LossKind::CrossEntropy:
      for (double y : ys) {
        if (!(y >= 0.0 && y <= 1.0)) throw DomainError("cross-entropy response outside [0,1]");
      }
      return std::clamp(weighted_mean(), kProbabilityClip, 1.0 - kProbabilityClip);
  }
  throw ArgumentError("unsupported loss kind");
}

double block_minimizer(const LossSpec& spec, std::span<const double> ys) {
  const std::vector<double> ones(ys.size(), 1.0);
  return block_minimizer(spec, ys, ones);
}

double weighted_objective(const LossSpec& spec, double q, std::span<const double> ys,
                          std::span<const double> ws) {
  double total = 0.0;
  for (std::size_t i = 0; i < ys.size(); ++i) {
    total += (ws.empty() ? 1.0 : ws[i]) * loss_value(spec, q, ys[i]);
  }
  return total;
}

}  // namespace fairreg
