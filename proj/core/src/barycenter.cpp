#include "fairreg/barycenter.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>
#include <vector>

#include "fairreg/error.hpp"
#include "fairreg/normal.hpp"
#include "fairreg/random.hpp"

namespace fairreg {

namespace {

constexpr double kWeightTolerance = 1e-12;
constexpr double kRootTolerance = 1e-10;

struct Latent {
  double weight;
  double value;
  double sigma;
};

std::vector<Latent> evaluate_groups(double u, std::span<const GroupSpec> groups) {
  if (!(u >= 0.0 && u <= 1.0)) throw DomainError("barycenter oracle: u must lie in [0,1]");
  if (groups.size() < 2) throw ArgumentError("barycenter oracle: need at least two groups");
  double total = 0.0;
  std::vector<Latent> out;
  out.reserve(groups.size());
  for (const GroupSpec& g : groups) {
    if (!(g.weight > 0.0 && g.weight < 1.0)) {
      throw ArgumentError("barycenter oracle: group weights must lie in (0,1)");
    }
    if (!g.latent_quantile) throw ArgumentError("barycenter oracle: missing latent quantile");
    total += g.weight;
    out.push_back({g.weight, g.latent_quantile(u), g.sigma});
  }
  if (std::abs(total - 1.0) > kWeightTolerance) {
    throw ArgumentError("barycenter oracle: group weights must sum to 1");
  }
  return out;
}

// Bisection on a non-increasing function over [min Q - 10 s, max Q + 10 s],
// doubling the half-width up to five times until the ends bracket a root.
template <class F>
double bisect_decreasing(F&& fn, const std::vector<Latent>& latent) {
  double lo_q = latent.front().value, hi_q = lo_q, s_max = 0.0;
  for (const Latent& l : latent) {
    lo_q = std::min(lo_q, l.value);
    hi_q = std::max(hi_q, l.value);
    s_max = std::max(s_max, l.sigma);
  }
  const double center = 0.5 * (lo_q + hi_q);
  double half = 0.5 * (hi_q - lo_q) + 10.0 * std::max(s_max, 1e-12);
  double lo = center - half, hi = center + half;
  for (int expand = 0; expand <= 5 && !(fn(lo) >= 0.0 && fn(hi) <= 0.0); ++expand) {
    if (expand == 5) {
      std::ostringstream msg;
      msg << "barycenter oracle: no sign change on bracket [" << lo << ", " << hi << "]";
      throw NumericError(msg.str());
    }
    half *= 2.0;
    lo = center - half;
    hi = center + half;
  }
  double mid = 0.5 * (lo + hi);
  for (int it = 0; it < 400; ++it) {
    mid = 0.5 * (lo + hi);
    const double v = fn(mid);
    if (v == 0.0) return mid;
    (v > 0.0 ? lo : hi) = mid;
    if (hi - lo <= 1e-15 * std::max(1.0, std::abs(mid))) break;
  }
  if (std::abs(fn(mid)) > kRootTolerance) {
    std::ostringstream msg;
    msg << "barycenter oracle: residual above tolerance at q = " << mid;
    throw NumericError(msg.str());
  }
  return mid;
}

double draw_poisson(Rng& rng, double mean) {
  std::poisson_distribution<long> dist(mean);
  return static_cast<double>(dist(rng));
}

}  // namespace

double expected_huber_psi(double mu, double sigma, double q, double m) {
  const double c = mu - q;
  if (sigma <= 0.0) return huber_psi(c, m);
  const double alpha = (-m - c) / sigma;
  const double beta = (m - c) / sigma;
  const double phi_a = normal_cdf(alpha), phi_b = normal_cdf(beta);
  return c * (phi_b - phi_a) + sigma * (normal_pdf(alpha) - normal_pdf(beta)) +
         m * (1.0 - phi_b) - m * phi_a;
}

double qtilde_closed_form(ClosedFormKind kind, double u, std::span<const GroupSpec> groups) {
  const std::vector<Latent> latent = evaluate_groups(u, groups);
  switch (kind) {
    case ClosedFormKind::SquaredMean:
    case ClosedFormKind::CrossEntropyMean: {
      double v = 0.0;
      for (const Latent& l : latent) v += l.weight * l.value;
      return v;
    }
    case ClosedFormKind::PoissonCanonical: {
      // log-sum-exp around the largest latent value.
      double top = latent.front().value;
      for (const Latent& l : latent) top = std::max(top, l.value);
      double acc = 0.0;
      for (const Latent& l : latent) acc += l.weight * std::exp(l.value - top);
      return top + std::log(acc);
    }
  }
  throw ArgumentError("qtilde_closed_form: unsupported kind");
}

double qtilde_pointwise(const LossSpec& spec, double u, std::span<const GroupSpec> groups) {
  const std::vector<Latent> latent = evaluate_groups(u, groups);
  switch (spec.kind()) {
    case LossKind::Squared: return qtilde_closed_form(ClosedFormKind::SquaredMean, u, groups);
    case LossKind::CrossEntropy:
      return qtilde_closed_form(ClosedFormKind::CrossEntropyMean, u, groups);
    case LossKind::PoissonNLL:
      return qtilde_closed_form(ClosedFormKind::PoissonCanonical, u, groups);
    case LossKind::Absolute:
    case LossKind::Pinball: {
      const double tau = spec.kind() == LossKind::Absolute ? 0.5 : spec.tau();
      for (const Latent& l : latent) {
        if (!(l.sigma > 0.0)) throw ArgumentError("mixture quantile needs positive sigma");
      }
      // tau - mixture CDF: non-increasing in q.
      auto g = [&](double q) {
        double cdf = 0.0;
        for (const Latent& l : latent) cdf += l.weight * normal_cdf((q - l.value) / l.sigma);
        return tau - cdf;
      };
      return bisect_decreasing(g, latent);
    }
    case LossKind::Huber: {
      auto g = [&](double q) {
        double s = 0.0;
        for (const Latent& l : latent) {
          s += l.weight * expected_huber_psi(l.value, l.sigma, q, spec.m());
        }
        return s;
      };
      return bisect_decreasing(g, latent);
    }
  }
  throw ArgumentError("qtilde_pointwise: unsupported loss");
}

double qtilde_monte_carlo(const LossSpec& spec, double u, std::span<const GroupSpec> groups,
                          std::size_t draws, std::uint64_t seed) {
  const std::vector<Latent> latent = evaluate_groups(u, groups);
  if (draws == 0) throw ArgumentError("qtilde_monte_carlo: zero draws");
  Rng rng(seed, 0xbc);
  std::vector<double> ys(draws);
  for (double& y : ys) {
    double pick = rng.uniform();
    std::size_t s = 0;
    while (s + 1 < latent.size() && pick >= latent[s].weight) {
      pick -= latent[s].weight;
      ++s;
    }
    const Latent& l = latent[s];
    switch (spec.kind()) {
      case LossKind::PoissonNLL: y = draw_poisson(rng, std::exp(l.value)); break;
      case LossKind::CrossEntropy: y = rng.bernoulli(l.value) ? 1.0 : 0.0; break;
      default: y = l.value + l.sigma * rng.normal(); break;
    }
  }
  auto risk = [&](double q) { return weighted_objective(spec, q, ys); };

  double lo, hi;
  if (spec.kind() == LossKind::CrossEntropy) {
    lo = kProbabilityClip;
    hi = 1.0 - kProbabilityClip;
  } else {
    const auto [mn, mx] = std::minmax_element(ys.begin(), ys.end());
    lo = *mn;
    hi = *mx;
    if (spec.kind() == LossKind::PoissonNLL) {
      lo = std::log(std::max(*mn, 0.5));
      hi = std::log(std::max(*mx, 1.0));
    }
  }
  const double ratio = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = hi - ratio * (hi - lo), b = lo + ratio * (hi - lo);
  double fa = risk(a), fb = risk(b);
  for (int it = 0; it < 200 && hi - lo > 1e-10 * std::max(1.0, std::abs(lo)); ++it) {
    if (fa < fb) {
      hi = b;
      b = a;
      fb = fa;
      a = hi - ratio * (hi - lo);
      fa = risk(a);
    } else {
      lo = a;
      a = b;
      fa = fb;
      b = lo + ratio * (hi - lo);
      fb = risk(b);
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace fairreg
