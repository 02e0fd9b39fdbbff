#include "fairreg/splines.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "fairreg/error.hpp"

namespace fairreg {

namespace {

void check_unit(double u, const char* where) {
  if (!(u >= 0.0 && u <= 1.0)) {
    throw DomainError(std::string(where) + ": u must lie in [0,1], got " + std::to_string(u));
  }
}

// Knot vector with `pad` copies of each boundary.
std::vector<double> padded_knots(int pad, int n_interior) {
  std::vector<double> t;
  t.reserve(static_cast<std::size_t>(2 * pad + n_interior));
  t.insert(t.end(), static_cast<std::size_t>(pad), 0.0);
  for (int i = 1; i <= n_interior; ++i) t.push_back(static_cast<double>(i) / (n_interior + 1));
  t.insert(t.end(), static_cast<std::size_t>(pad), 1.0);
  return t;
}

// Normalized B-splines of the given order on knot vector t (Cox-de Boor).
// Intervals are half-open [t_i, t_{i+1}) except the last non-degenerate one,
// which also contains its right end so that u = 1 is covered.
std::vector<double> bspline_values(const std::vector<double>& t, int order, double u) {
  const std::size_t n_intervals = t.size() - 1;
  std::vector<double> b(n_intervals, 0.0);
  std::size_t last_nondegenerate = 0;
  for (std::size_t i = 0; i < n_intervals; ++i) {
    if (t[i] < t[i + 1]) last_nondegenerate = i;
  }
  for (std::size_t i = 0; i < n_intervals; ++i) {
    if (t[i] < t[i + 1] && ((t[i] <= u && u < t[i + 1]) || (i == last_nondegenerate && u == t[i + 1]))) {
      b[i] = 1.0;
      break;
    }
  }
  for (int p = 2; p <= order; ++p) {
    const std::size_t count = t.size() - static_cast<std::size_t>(p);
    std::vector<double> next(count, 0.0);
    for (std::size_t i = 0; i < count; ++i) {
      const double left_den = t[i + p - 1] - t[i];
      const double right_den = t[i + p] - t[i + 1];
      double v = 0.0;
      if (left_den > 0.0 && b[i] != 0.0) v += (u - t[i]) / left_den * b[i];
      if (right_den > 0.0 && b[i + 1] != 0.0) v += (t[i + p] - u) / right_den * b[i + 1];
      next[i] = v;
    }
    b = std::move(next);
  }
  return b;
}

class SplineObjective {
 public:
  SplineObjective(std::span<const double> ys, const LossSpec& spec) : ys_(ys), spec_(spec) {}

  double operator()(const std::vector<double>& preds) {
    ++evaluations_;
    double total = 0.0;
    for (std::size_t i = 0; i < ys_.size(); ++i) {
      const double v = value(preds[i], ys_[i]);
      if (!std::isfinite(v)) return std::numeric_limits<double>::infinity();
      total += v;
    }
    return total;
  }

  // Objective after shifting every prediction by delta * column[i].
  double shifted(const std::vector<double>& preds, const std::vector<double>& column,
                 double delta) {
    ++evaluations_;
    double total = 0.0;
    for (std::size_t i = 0; i < ys_.size(); ++i) {
      const double v = value(preds[i] + delta * column[i], ys_[i]);
      if (!std::isfinite(v)) return std::numeric_limits<double>::infinity();
      total += v;
    }
    return total;
  }

  long evaluations() const noexcept { return evaluations_; }

 private:
  double value(double q, double y) const {
    if (spec_.kind() == LossKind::CrossEntropy && !(q > 0.0 && q < 1.0)) {
      return std::numeric_limits<double>::infinity();
    }
    return loss_value(spec_, q, y);
  }

  std::span<const double> ys_;
  const LossSpec& spec_;
  long evaluations_ = 0;
};

}  // namespace

std::vector<double> SplineBasisConfig::knot_vector() const {
  validate();
  return padded_knots(degree, n_interior_knots);
}

void SplineBasisConfig::validate() const {
  if (degree < 1) throw ConfigError("spline degree must be >= 1");
  if (n_interior_knots < 0) throw ConfigError("spline interior knot count must be >= 0");
}

std::vector<double> mspline_basis(const SplineBasisConfig& config, double u) {
  check_unit(u, "mspline_basis");
  const std::vector<double> t = config.knot_vector();
  const int k = config.degree;
  std::vector<double> b = bspline_values(t, k, u);
  std::vector<double> m(static_cast<std::size_t>(config.dimension()));
  for (std::size_t j = 0; j < m.size(); ++j) {
    const double width = t[j + static_cast<std::size_t>(k)] - t[j];
    m[j] = width > 0.0 ? k * b[j] / width : 0.0;
  }
  return m;
}

std::vector<double> ispline_basis(const SplineBasisConfig& config, double u) {
  check_unit(u, "ispline_basis");
  config.validate();
  // Order k+1 basis on the knot vector padded once more at each end: its
  // index i + 1 lines up with the order-k function j = i, and
  // d/du sum_{i > j} B_{i,k+1} = M_{j,k}.
  const std::vector<double> t = padded_knots(config.degree + 1, config.n_interior_knots);
  const std::vector<double> b = bspline_values(t, config.degree + 1, u);
  const std::size_t dim = static_cast<std::size_t>(config.dimension());
  // The B_{i,k+1} sum to one, so psi_j is both a tail sum and one minus a head
  // sum. Using whichever is below one half makes the flat parts exactly 0 and 1.
  std::vector<double> psi(dim);
  double tail = 0.0;
  for (std::size_t j = dim; j-- > 0;) {
    tail += b[j + 1];
    psi[j] = tail;
  }
  double head = 0.0;
  for (std::size_t j = 0; j < dim; ++j) {
    head += b[j];
    if (psi[j] > 0.5) psi[j] = std::max(1.0 - head, 0.0);
    psi[j] = std::min(psi[j], 1.0);
  }
  return psi;
}

double SplineFit::operator()(double u) const {
  const std::vector<double> psi = ispline_basis(config, u);
  double v = alpha0;
  for (std::size_t j = 0; j < psi.size(); ++j) v += alphas[j] * psi[j];
  return v;
}

double eval_spline(const SplineFit& fit, double u) {
  check_unit(u, "eval_spline");
  if (fit.alphas.size() != static_cast<std::size_t>(fit.config.dimension())) {
    throw ArgumentError("eval_spline: coefficient count does not match the basis dimension");
  }
  return fit(u);
}

IsplineFitResult fit_ispline_detailed(std::span<const double> us, std::span<const double> ys,
                                      const LossSpec& spec, const SplineBasisConfig& config,
                                      const HookeJeevesOptions& options) {
  if (us.size() != ys.size()) throw ArgumentError("fit_ispline: us and ys differ in length");
  if (us.empty()) throw ArgumentError("fit_ispline: empty input");
  config.validate();
  const std::size_t n = us.size();
  const std::size_t dim = static_cast<std::size_t>(config.dimension());
  if (dim > n) {
    throw ConfigError("fit_ispline: basis dimension " + std::to_string(dim) +
                      " exceeds the number of observations " + std::to_string(n));
  }

  // columns[0] is the intercept column, columns[j + 1] holds psi_j(u_i).
  std::vector<std::vector<double>> columns(dim + 1, std::vector<double>(n));
  std::fill(columns[0].begin(), columns[0].end(), 1.0);
  for (std::size_t i = 0; i < n; ++i) {
    const std::vector<double> psi = ispline_basis(config, us[i]);
    for (std::size_t j = 0; j < dim; ++j) columns[j + 1][i] = psi[j];
  }

  const double start = block_minimizer(spec, ys);
  if (!std::isfinite(start)) {
    throw NumericError("fit_ispline: no finite starting intercept (all-zero Poisson responses)");
  }

  const auto [y_min, y_max] = std::minmax_element(ys.begin(), ys.end());
  const double range = *y_max - *y_min;
  std::vector<double> step(dim + 1, range > 0.0 ? range / 4.0 : 1.0);

  auto project = [](std::vector<double>& x) {
    for (std::size_t c = 1; c < x.size(); ++c) x[c] = std::max(x[c], 0.0);
  };
  auto predictions = [&](const std::vector<double>& x) {
    std::vector<double> p(n, x[0]);
    for (std::size_t c = 1; c <= dim; ++c) {
      if (x[c] == 0.0) continue;
      for (std::size_t i = 0; i < n; ++i) p[i] += x[c] * columns[c][i];
    }
    return p;
  };

  SplineObjective objective(ys, spec);

  struct Point {
    std::vector<double> x;
    std::vector<double> preds;
    double f;
  };

  auto explore = [&](Point p) {
    for (std::size_t c = 0; c <= dim; ++c) {
      for (double sign : {1.0, -1.0}) {
        double target = p.x[c] + sign * step[c];
        if (c > 0) target = std::max(target, 0.0);
        const double delta = target - p.x[c];
        if (delta == 0.0) continue;
        const double f = objective.shifted(p.preds, columns[c], delta);
        if (f < p.f) {
          p.x[c] = target;
          for (std::size_t i = 0; i < n; ++i) p.preds[i] += delta * columns[c][i];
          p.f = f;
          break;
        }
      }
    }
    return p;
  };

  Point base;
  base.x.assign(dim + 1, 0.0);
  base.x[0] = start;
  base.preds = predictions(base.x);
  base.f = objective(base.preds);
  const double initial_objective = base.f;

  auto max_step = [&] { return *std::max_element(step.begin(), step.end()); };
  auto budget_left = [&] { return objective.evaluations() < options.max_evaluations; };

  while (budget_left() && max_step() >= options.step_tolerance) {
    Point trial = explore(base);
    if (!(trial.f < base.f)) {
      for (double& h : step) h *= 0.5;
      continue;
    }
    // Pattern moves along the direction of improvement.
    while (true) {
      if (!budget_left()) {
        base = std::move(trial);
        break;
      }
      Point pattern;
      pattern.x.resize(dim + 1);
      for (std::size_t c = 0; c <= dim; ++c) pattern.x[c] = 2.0 * trial.x[c] - base.x[c];
      project(pattern.x);
      pattern.preds = predictions(pattern.x);
      pattern.f = objective(pattern.preds);
      Point next = explore(std::move(pattern));
      base = std::move(trial);
      if (next.f < base.f) {
        trial = std::move(next);
      } else {
        break;
      }
    }
  }

  IsplineFitResult result;
  result.fit.config = config;
  result.fit.alpha0 = base.x[0];
  result.fit.alphas.assign(base.x.begin() + 1, base.x.end());
  result.initial_objective = initial_objective;
  result.final_objective = base.f;
  result.evaluations = objective.evaluations();
  return result;
}

SplineFit fit_ispline(std::span<const double> us, std::span<const double> ys,
                      const LossSpec& spec, const SplineBasisConfig& config) {
  return fit_ispline_detailed(us, ys, spec, config).fit;
}

}  // namespace fairreg
