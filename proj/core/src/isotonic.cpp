#include "fairreg/isotonic.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "fairreg/error.hpp"

namespace fairreg {

namespace {

struct Block {
  std::size_t begin;
  std::size_t end;
  double sum_w;
  double sum_wy;
  double value;
};

bool is_mean_based(LossKind kind) {
  return kind == LossKind::Squared || kind == LossKind::PoissonNLL ||
         kind == LossKind::CrossEntropy;
}

double mean_based_value(const LossSpec& spec, double sum_w, double sum_wy) {
  const double mean = sum_wy / sum_w;
  switch (spec.kind()) {
    case LossKind::PoissonNLL: return mean > 0.0 ? std::log(mean) : kNegInfSentinel;
    case LossKind::CrossEntropy:
      return std::clamp(mean, kProbabilityClip, 1.0 - kProbabilityClip);
    default: return mean;
  }
}

class BlockSolver {
 public:
  BlockSolver(const LossSpec& spec, std::span<const double> sorted_ys)
      : spec_(spec), ys_(sorted_ys), ones_(sorted_ys.size(), 1.0) {}

  void evaluate(Block& b) const {
    if (is_mean_based(spec_.kind())) {
      b.value = mean_based_value(spec_, b.sum_w, b.sum_wy);
    } else {
      const std::size_t len = b.end - b.begin;
      b.value = block_minimizer(spec_, ys_.subspan(b.begin, len),
                                std::span<const double>(ones_).subspan(b.begin, len));
    }
  }

 private:
  const LossSpec& spec_;
  std::span<const double> ys_;
  std::vector<double> ones_;
};

}  // namespace

StepFunction::StepFunction(std::vector<double> knots, std::vector<double> values)
    : knots_(std::move(knots)), values_(std::move(values)) {
  if (knots_.empty()) throw ArgumentError("StepFunction: no knots");
  if (knots_.size() != values_.size()) {
    throw ArgumentError("StepFunction: knots and values differ in length");
  }
  for (std::size_t j = 0; j < knots_.size(); ++j) {
    if (!(knots_[j] >= 0.0 && knots_[j] <= 1.0)) {
      throw DomainError("StepFunction: knot outside [0,1]");
    }
    if (!std::isfinite(values_[j])) throw ArgumentError("StepFunction: non-finite value");
    if (j > 0 && !(knots_[j] > knots_[j - 1])) {
      throw ArgumentError("StepFunction: knots must be strictly increasing");
    }
    if (j > 0 && values_[j] < values_[j - 1]) {
      throw ArgumentError("StepFunction: values must be non-decreasing");
    }
  }
}

double StepFunction::operator()(double u) const {
  const auto it = std::upper_bound(knots_.begin(), knots_.end(), u);
  if (it == knots_.begin()) return values_.front();
  return values_[static_cast<std::size_t>(it - knots_.begin()) - 1];
}

double eval_step(const StepFunction& f, double u) {
  if (!(u >= 0.0 && u <= 1.0)) {
    throw DomainError("eval_step: u must lie in [0,1], got " + std::to_string(u));
  }
  return f(u);
}

StepFunction fit_isotonic(std::span<const double> us, std::span<const double> ys,
                          const LossSpec& spec) {
  if (us.size() != ys.size()) throw ArgumentError("fit_isotonic: us and ys differ in length");
  if (us.empty()) throw ArgumentError("fit_isotonic: empty input");
  for (double u : us) {
    if (!(u >= 0.0 && u <= 1.0)) {
      throw DomainError("fit_isotonic: u must lie in [0,1], got " + std::to_string(u));
    }
  }

  const std::size_t n = us.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return us[a] < us[b]; });

  std::vector<double> sorted_u(n), sorted_y(n);
  for (std::size_t i = 0; i < n; ++i) {
    sorted_u[i] = us[order[i]];
    sorted_y[i] = ys[order[i]];
  }

  // One initial block per distinct u.
  std::vector<std::size_t> tie_starts;
  for (std::size_t i = 0; i < n; ++i) {
    if (i == 0 || sorted_u[i] != sorted_u[i - 1]) tie_starts.push_back(i);
  }

  const BlockSolver solver(spec, sorted_y);
  std::vector<Block> stack;
  stack.reserve(tie_starts.size());
  for (std::size_t t = 0; t < tie_starts.size(); ++t) {
    const std::size_t begin = tie_starts[t];
    const std::size_t end = t + 1 < tie_starts.size() ? tie_starts[t + 1] : n;
    Block b{begin, end, 0.0, 0.0, 0.0};
    for (std::size_t i = begin; i < end; ++i) {
      b.sum_w += 1.0;
      b.sum_wy += sorted_y[i];
    }
    solver.evaluate(b);
    stack.push_back(b);
    while (stack.size() >= 2 && stack[stack.size() - 2].value > stack.back().value) {
      Block top = stack.back();
      stack.pop_back();
      Block& left = stack.back();
      left.end = top.end;
      left.sum_w += top.sum_w;
      left.sum_wy += top.sum_wy;
      solver.evaluate(left);
    }
  }

  double smallest_finite = std::numeric_limits<double>::infinity();
  for (const Block& b : stack) {
    if (std::isfinite(b.value)) smallest_finite = std::min(smallest_finite, b.value);
  }
  if (!std::isfinite(smallest_finite)) {
    throw NumericError("fit_isotonic: every block estimate is -inf (all-zero Poisson responses)");
  }

  std::vector<double> fitted(n);
  for (const Block& b : stack) {
    const double v = std::isfinite(b.value) ? b.value : smallest_finite;
    std::fill(fitted.begin() + static_cast<std::ptrdiff_t>(b.begin),
              fitted.begin() + static_cast<std::ptrdiff_t>(b.end), v);
  }

  std::vector<double> knots, values;
  knots.reserve(tie_starts.size());
  values.reserve(tie_starts.size());
  for (std::size_t start : tie_starts) {
    knots.push_back(sorted_u[start]);
    const double v = fitted[start];
    values.push_back(values.empty() ? v : std::max(v, values.back()));
  }
  return StepFunction(std::move(knots), std::move(values));
}

}  // namespace fairreg
