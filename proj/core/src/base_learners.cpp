#include "fairreg/base_learners.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "fairreg/error.hpp"

namespace fairreg {

namespace {

constexpr double kRidgeJitter = 1e-8;
constexpr int kNewtonCap = 200;
constexpr double kGradientTolerance = 1e-8;
constexpr int kIrlsCap = 500;
constexpr double kIrlsTolerance = 1e-8;
constexpr double kCheckSmoothing = 1e-6;

using Eigen::MatrixXd;
using Eigen::VectorXd;

MatrixXd with_intercept(const MatrixXd& x) {
  MatrixXd a(x.rows(), x.cols() + 1);
  a.col(0).setOnes();
  a.rightCols(x.cols()) = x;
  return a;
}

// Solves (G + jitter) b = rhs, adding the ridge only when G is not positive
// definite.
VectorXd solve_spd(MatrixXd g, const VectorXd& rhs) {
  Eigen::LLT<MatrixXd> llt(g);
  if (llt.info() == Eigen::Success) {
    VectorXd b = llt.solve(rhs);
    if (b.allFinite()) return b;
  }
  g.diagonal().array() += kRidgeJitter * std::max(1.0, g.diagonal().cwiseAbs().maxCoeff());
  return g.ldlt().solve(rhs);
}

std::vector<double> to_vector(const VectorXd& beta) {
  return {beta.data(), beta.data() + beta.size()};
}

LinearModel to_model(const VectorXd& beta, Link link) {
  LinearModel m;
  m.intercept = beta(0);
  m.weights = beta.tail(beta.size() - 1);
  m.link = link;
  return m;
}

double sigmoid(double eta) {
  return eta >= 0.0 ? 1.0 / (1.0 + std::exp(-eta)) : std::exp(eta) / (1.0 + std::exp(eta));
}

// log(1 + e^eta) without overflow.
double softplus(double eta) {
  return eta > 0.0 ? eta + std::log1p(std::exp(-eta)) : std::log1p(std::exp(eta));
}

// Mean objective, gradient and Hessian of a smooth GLM-type loss in the
// linear predictor eta = A beta.
struct SmoothTerms {
  double value;
  VectorXd gradient;
  MatrixXd hessian;
};

double smooth_value(const LossSpec& spec, const VectorXd& eta, const VectorXd& y) {
  const auto n = static_cast<double>(y.size());
  double total = 0.0;
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    switch (spec.kind()) {
      case LossKind::Huber: total += loss_value(spec, eta(i), y(i)); break;
      case LossKind::PoissonNLL: total += std::exp(eta(i)) - y(i) * eta(i); break;
      case LossKind::CrossEntropy: total += softplus(eta(i)) - y(i) * eta(i); break;
      default: throw ArgumentError("smooth_value: loss is not smooth");
    }
  }
  return total / n;
}

SmoothTerms smooth_terms(const LossSpec& spec, const MatrixXd& a, const VectorXd& beta,
                         const VectorXd& y) {
  const VectorXd eta = a * beta;
  VectorXd score(y.size());   // d loss / d eta
  VectorXd curv(y.size());    // d^2 loss / d eta^2
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    switch (spec.kind()) {
      case LossKind::Huber: {
        const double r = y(i) - eta(i);
        score(i) = -huber_psi(r, spec.m());
        curv(i) = std::abs(r) <= spec.m() ? 1.0 : 0.0;
        break;
      }
      case LossKind::PoissonNLL: {
        const double mu = std::exp(eta(i));
        score(i) = mu - y(i);
        curv(i) = mu;
        break;
      }
      case LossKind::CrossEntropy: {
        const double p = sigmoid(eta(i));
        score(i) = p - y(i);
        curv(i) = p * (1.0 - p);
        break;
      }
      default: throw ArgumentError("smooth_terms: loss is not smooth");
    }
  }
  const auto n = static_cast<double>(y.size());
  SmoothTerms t;
  t.value = smooth_value(spec, eta, y);
  t.gradient = a.transpose() * score / n;
  t.hessian = a.transpose() * curv.asDiagonal() * a / n;
  return t;
}

VectorXd least_squares(const MatrixXd& a, const VectorXd& y) {
  return solve_spd(a.transpose() * a, a.transpose() * y);
}

LinearFitReport fit_newton(const MatrixXd& a, const VectorXd& y, const LossSpec& spec) {
  const Link link = link_for(spec);
  VectorXd beta = VectorXd::Zero(a.cols());
  switch (spec.kind()) {
    case LossKind::Huber: beta = least_squares(a, y); break;
    case LossKind::PoissonNLL: beta(0) = std::log(std::max(y.mean(), 1e-8)); break;
    case LossKind::CrossEntropy: {
      const double p = std::clamp(y.mean(), 1e-6, 1.0 - 1e-6);
      beta(0) = std::log(p / (1.0 - p));
      break;
    }
    default: break;
  }

  LinearFitReport report;
  SmoothTerms t = smooth_terms(spec, a, beta, y);
  for (int it = 0; it < kNewtonCap; ++it) {
    if (t.gradient.lpNorm<Eigen::Infinity>() <= kGradientTolerance) {
      report.model = to_model(beta, link);
      report.iterations = it;
      return report;
    }
    const VectorXd direction = solve_spd(t.hessian, -t.gradient);
    const double slope = t.gradient.dot(direction);
    double step = 1.0;
    bool improved = false;
    VectorXd candidate;
    double candidate_value = std::numeric_limits<double>::infinity();
    for (int halving = 0; halving < 60; ++halving) {
      candidate = beta + step * direction;
      candidate_value = smooth_value(spec, a * candidate, y);
      if (std::isfinite(candidate_value) && candidate_value <= t.value + 1e-4 * step * slope) {
        improved = true;
        break;
      }
      step *= 0.5;
    }
    if (!improved) {
      // No representable decrease left: the iterate is optimal to working
      // precision.
      report.model = to_model(beta, link);
      report.iterations = it;
      return report;
    }
    beta = candidate;
    t = smooth_terms(spec, a, beta, y);
    report.objective_history.push_back(t.value);
  }
  if (t.gradient.lpNorm<Eigen::Infinity>() <= kGradientTolerance) {
    report.model = to_model(beta, link);
    report.iterations = kNewtonCap;
    return report;
  }
  throw ConvergenceError("fit_linear: Newton did not converge in " + std::to_string(kNewtonCap) +
                             " iterations",
                         to_vector(beta));
}

double smoothed_check_objective(const VectorXd& r, double tau) {
  double total = 0.0;
  for (Eigen::Index i = 0; i < r.size(); ++i) {
    const double a = std::abs(r(i));
    const double smooth_abs =
        a < kCheckSmoothing ? r(i) * r(i) / (2.0 * kCheckSmoothing) + 0.5 * kCheckSmoothing : a;
    total += 0.5 * smooth_abs + (tau - 0.5) * r(i);
  }
  return total / static_cast<double>(r.size());
}

// Majorize-minimize on rho_tau(r) = |r|/2 + (tau - 1/2) r with |r| smoothed
// at eps: each step is a weighted least-squares solve.
LinearFitReport fit_irls(const MatrixXd& a, const VectorXd& y, double tau) {
  VectorXd beta = least_squares(a, y);
  const VectorXd column_sums = a.colwise().sum().transpose();
  LinearFitReport report;
  for (int it = 0; it < kIrlsCap; ++it) {
    const VectorXd r = y - a * beta;
    VectorXd w(r.size());
    for (Eigen::Index i = 0; i < r.size(); ++i) {
      w(i) = 1.0 / (4.0 * std::max(std::abs(r(i)), kCheckSmoothing));
    }
    const MatrixXd gram = a.transpose() * w.asDiagonal() * a;
    const VectorXd rhs = a.transpose() * w.cwiseProduct(y) + 0.5 * (tau - 0.5) * column_sums;
    const VectorXd next = solve_spd(gram, rhs);
    const double change = (next - beta).lpNorm<Eigen::Infinity>();
    beta = next;
    report.objective_history.push_back(smoothed_check_objective(y - a * beta, tau));
    if (change <= kIrlsTolerance * (1.0 + beta.lpNorm<Eigen::Infinity>())) {
      report.model = to_model(beta, Link::Identity);
      report.iterations = it + 1;
      return report;
    }
  }
  throw ConvergenceError(
      "fit_linear: IRLS did not converge in " + std::to_string(kIrlsCap) + " iterations",
      to_vector(beta));
}

}  // namespace

Link link_for(const LossSpec& spec) noexcept {
  return spec.kind() == LossKind::CrossEntropy ? Link::Logistic : Link::Identity;
}

double LinearModel::predict(const Eigen::Ref<const Eigen::VectorXd>& x) const {
  const double eta = linear_predictor(x);
  return link == Link::Logistic ? sigmoid(eta) : eta;
}

LinearFitReport fit_linear_report(const MatrixXd& x, const VectorXd& y, const LossSpec& spec) {
  if (x.rows() != y.size()) throw ArgumentError("fit_linear: X and y differ in row count");
  if (x.rows() < x.cols() + 1) {
    throw ArgumentError("fit_linear: need at least d + 1 = " + std::to_string(x.cols() + 1) +
                        " rows, got " + std::to_string(x.rows()));
  }
  if (!x.allFinite() || !y.allFinite()) throw ArgumentError("fit_linear: non-finite data");

  const MatrixXd a = with_intercept(x);
  switch (spec.kind()) {
    case LossKind::Squared: {
      LinearFitReport report;
      const VectorXd beta = least_squares(a, y);
      report.model = to_model(beta, Link::Identity);
      report.iterations = 1;
      const VectorXd r = y - a * beta;
      report.objective_history.push_back(r.squaredNorm() / static_cast<double>(y.size()));
      return report;
    }
    case LossKind::Absolute: return fit_irls(a, y, 0.5);
    case LossKind::Pinball: return fit_irls(a, y, spec.tau());
    case LossKind::PoissonNLL:
      if ((y.array() < 0.0).any()) throw DomainError("fit_linear: negative Poisson response");
      return fit_newton(a, y, spec);
    case LossKind::CrossEntropy:
      if ((y.array() < 0.0).any() || (y.array() > 1.0).any()) {
        throw DomainError("fit_linear: cross-entropy response outside [0,1]");
      }
      return fit_newton(a, y, spec);
    case LossKind::Huber: return fit_newton(a, y, spec);
  }
  throw ArgumentError("fit_linear: unsupported loss");
}

LinearModel fit_linear(const MatrixXd& x, const VectorXd& y, const LossSpec& spec) {
  return fit_linear_report(x, y, spec).model;
}

const LinearModel& GroupModels::at(const GroupLabel& group) const {
  const auto it = models.find(group);
  if (it == models.end()) throw ArgumentError("unknown group label '" + group + "'");
  return it->second;
}

double GroupModels::predict(const Eigen::Ref<const Eigen::VectorXd>& x,
                            const GroupLabel& group) const {
  return at(group).predict(x);
}

Eigen::VectorXd GroupModels::predict(const Dataset& data) const {
  Eigen::VectorXd out(static_cast<Eigen::Index>(data.size()));
  for (std::size_t i = 0; i < data.size(); ++i) {
    const auto r = static_cast<Eigen::Index>(i);
    out(r) = at(data.groups[i]).predict(data.features.row(r).transpose());
  }
  return out;
}

GroupModels fit_groupwise(const Dataset& data, const LossSpec& spec) {
  data.validate();
  GroupModels out;
  out.loss = spec;
  const std::size_t needed = data.dim() + 1;
  for (const auto& [group, rows] : data.rows_by_group()) {
    if (rows.size() < needed) {
      throw GroupSizeError("group '" + group + "' has " + std::to_string(rows.size()) +
                               " rows; at least " + std::to_string(needed) + " are required",
                           group);
    }
    const Dataset part = data.subset(rows);
    out.models.emplace(group, fit_linear(part.features, part.responses, spec));
  }
  return out;
}

}  // namespace fairreg
