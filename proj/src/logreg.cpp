#include <algorithm>
#include <cmath>

#include "rankbench/models.hpp"

namespace rankbench {

namespace {

constexpr double kMinWeight = 1e-5;
constexpr int kMaxInnerCycles = 1000;
constexpr int kMaxLineSearchHalvings = 40;

double soft_threshold(double z, double gamma) {
  if (z > gamma) return z - gamma;
  if (z < -gamma) return z + gamma;
  return 0.0;
}

struct Standardized {
  Matrix x;
  Vector mean;
  Vector scale;
  std::vector<bool> constant;
};

Standardized standardize(const Matrix& raw) {
  Standardized s;
  const Index n = raw.rows();
  s.mean = raw.colwise().mean().transpose();
  s.scale.resize(raw.cols());
  s.constant.assign(static_cast<std::size_t>(raw.cols()), false);
  s.x = raw.rowwise() - s.mean.transpose();
  for (Index j = 0; j < raw.cols(); ++j) {
    const double sd = std::sqrt(s.x.col(j).squaredNorm() / static_cast<double>(n));
    if (sd > 0.0) {
      s.scale(j) = sd;
      s.x.col(j) /= sd;
    } else {
      s.scale(j) = 1.0;
      s.constant[static_cast<std::size_t>(j)] = true;
    }
  }
  return s;
}

// (1/n) sum log-loss + lambda * [alpha |b|_1 + (1 - alpha)/2 |b|^2]
double objective(const Matrix& xs, const Vector& y, double intercept, const Vector& beta, double lambda,
                 double alpha) {
  const Vector eta = (xs * beta).array() + intercept;
  double loss = 0.0;
  for (Index i = 0; i < eta.size(); ++i) {
    const double e = eta(i);
    // log(1 + exp(e)) - y e, computed without overflow
    loss += (e > 0 ? e + std::log1p(std::exp(-e)) : std::log1p(std::exp(e))) - y(i) * e;
  }
  loss /= static_cast<double>(eta.size());
  return loss + lambda * (alpha * beta.lpNorm<1>() + 0.5 * (1.0 - alpha) * beta.squaredNorm());
}

}  // namespace

void LogRegConfig::validate() const {
  if (!(C > 0.0)) throw InvalidArgument("logreg: C must be positive");
  if (!(l1_ratio >= 0.0 && l1_ratio <= 1.0)) throw InvalidArgument("logreg: l1_ratio must lie in [0, 1]");
  if (max_iter < 1) throw InvalidArgument("logreg: max_iter must be positive");
  if (!(tol > 0.0)) throw InvalidArgument("logreg: tol must be positive");
}

double elastic_net_objective(const LogisticModel& model, const Dataset& data, const LogRegConfig& cfg) {
  const Matrix xs = (data.features().rowwise() - model.mean.transpose()).array().rowwise() /
                    model.scale.transpose().array();
  const double lambda = 1.0 / (cfg.C * static_cast<double>(data.rows()));
  return objective(xs, data.target(), model.intercept, model.coefficients, lambda, cfg.l1_ratio);
}

// Proximal Newton: each outer step forms the IRLS quadratic approximation of
// the log-loss and minimizes it plus the penalty by cyclic coordinate descent
// with soft-thresholding. A backtracking step on the exact objective keeps
// the sequence monotone.
Predictor fit_logreg(const Dataset& train, const LogRegConfig& cfg) {
  cfg.validate();
  if (train.cols() < 1) throw InvalidArgument("logreg: need at least one feature");
  const Index n = train.rows();
  const Index p = train.cols();
  const auto dn = static_cast<double>(n);
  const Standardized s = standardize(train.features());
  const Vector& y = train.target();
  const double lambda = 1.0 / (cfg.C * dn);
  const double alpha = cfg.l1_ratio;

  Vector beta = Vector::Zero(p);
  double b0 = std::log(train.base_rate() / (1.0 - train.base_rate()));
  double current = objective(s.x, y, b0, beta, lambda, alpha);
  bool converged = false;
  int iter = 0;

  Vector w(n), z(n), r(n), xw2(p);
  for (; iter < cfg.max_iter && !converged; ++iter) {
    const Vector eta = (s.x * beta).array() + b0;
    for (Index i = 0; i < n; ++i) {
      const double prob = sigmoid(eta(i));
      w(i) = std::max(prob * (1.0 - prob), kMinWeight);
      z(i) = eta(i) + (y(i) - prob) / w(i);
    }
    const double wsum = w.sum();
    for (Index j = 0; j < p; ++j) xw2(j) = (s.x.col(j).array().square() * w.array()).sum() / dn;

    Vector nb = beta;
    double nb0 = b0;
    r = z - eta;
    for (int cycle = 0; cycle < kMaxInnerCycles; ++cycle) {
      double max_delta = 0.0;
      const double d0 = (w.array() * r.array()).sum() / wsum;
      nb0 += d0;
      r.array() -= d0;
      max_delta = std::abs(d0);
      for (Index j = 0; j < p; ++j) {
        if (s.constant[static_cast<std::size_t>(j)]) continue;
        const double grad = (s.x.col(j).array() * w.array() * r.array()).sum() / dn + xw2(j) * nb(j);
        const double updated = soft_threshold(grad, lambda * alpha) / (xw2(j) + lambda * (1.0 - alpha));
        const double delta = updated - nb(j);
        if (delta != 0.0) {
          r -= delta * s.x.col(j);
          nb(j) = updated;
          max_delta = std::max(max_delta, std::abs(delta));
        }
      }
      if (max_delta < 0.1 * cfg.tol) break;
    }

    // Backtrack toward the previous iterate if the full step does not decrease
    // the objective.
    double step = 1.0;
    Vector trial = nb;
    double trial0 = nb0;
    double trial_obj = objective(s.x, y, trial0, trial, lambda, alpha);
    for (int h = 0; h < kMaxLineSearchHalvings && trial_obj > current; ++h) {
      step *= 0.5;
      trial = beta + step * (nb - beta);
      trial0 = b0 + step * (nb0 - b0);
      trial_obj = objective(s.x, y, trial0, trial, lambda, alpha);
    }
    if (trial_obj > current) {
      converged = true;  // no descent direction left at machine precision
      break;
    }
    const double change = std::max((trial - beta).cwiseAbs().maxCoeff(), std::abs(trial0 - b0));
    beta = trial;
    b0 = trial0;
    current = trial_obj;
    converged = change < cfg.tol;
  }

  LogisticModel model;
  model.mean = s.mean;
  model.scale = s.scale;
  model.coefficients = beta;
  model.intercept = b0;
  model.converged = converged;
  model.iterations = iter;
  return Predictor(std::move(model), train.feature_names());
}

}  // namespace rankbench
