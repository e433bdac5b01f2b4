#include <algorithm>

#include "rankbench/models.hpp"

namespace rankbench {

Predictor::Predictor(LogisticModel model, std::vector<std::string> feature_names)
    : model_(std::make_shared<const std::variant<LogisticModel, ForestModel>>(std::move(model))),
      names_(std::move(feature_names)) {}

Predictor::Predictor(ForestModel model, std::vector<std::string> feature_names)
    : model_(std::make_shared<const std::variant<LogisticModel, ForestModel>>(std::move(model))),
      names_(std::move(feature_names)) {}

ModelKind Predictor::kind() const {
  return std::holds_alternative<LogisticModel>(*model_) ? ModelKind::kLogReg : ModelKind::kForest;
}

const LogisticModel& Predictor::logreg() const {
  if (kind() != ModelKind::kLogReg) throw InvalidArgument("operation requires a logistic regression model");
  return std::get<LogisticModel>(*model_);
}

const ForestModel& Predictor::forest() const {
  if (kind() != ModelKind::kForest) throw InvalidArgument("operation requires a random forest model");
  return std::get<ForestModel>(*model_);
}

Vector Predictor::predict(const Matrix& x) const {
  if (x.cols() != n_features()) {
    throw InvalidArgument("predict: expected " + std::to_string(n_features()) + " columns, got " +
                          std::to_string(x.cols()));
  }
  Vector out(x.rows());
  if (const auto* lr = std::get_if<LogisticModel>(model_.get())) {
    const Vector w = lr->coefficients.cwiseQuotient(lr->scale);
    const double b = lr->intercept - w.dot(lr->mean);
    const Vector eta = (x * w).array() + b;
    for (Index i = 0; i < x.rows(); ++i) out(i) = sigmoid(eta(i));
    return out;
  }
  const auto& trees = std::get<ForestModel>(*model_).trees;
  for (Index i = 0; i < x.rows(); ++i) {
    const auto row = x.row(i);
    double sum = 0.0;
    for (const auto& tree : trees) sum += tree.value[tree.leaf_for(row)];
    out(i) = sum / static_cast<double>(trees.size());
  }
  return out;
}

PredictFn Predictor::as_function() const {
  return [self = *this](const Matrix& x) { return self.predict(x); };
}

Vector predict(const Predictor& p, const Matrix& x) { return p.predict(x); }

Predictor fit(const Dataset& train, const ModelConfig& cfg) {
  return std::visit([&](const auto& c) -> Predictor {
    if constexpr (std::is_same_v<std::decay_t<decltype(c)>, LogRegConfig>) {
      return fit_logreg(train, c);
    } else {
      return fit_forest(train, c);
    }
  }, cfg);
}

Predictor fit_subset_model(const Dataset& train, const ModelConfig& cfg) {
  if (const auto* fc = std::get_if<ForestConfig>(&cfg)) {
    ForestConfig capped = *fc;
    capped.max_features = static_cast<int>(std::min<Index>(capped.max_features, train.cols()));
    return fit_forest(train, capped);
  }
  return fit(train, cfg);
}

Vector coefficients(const Predictor& p) { return p.logreg().coefficients; }

}  // namespace rankbench
