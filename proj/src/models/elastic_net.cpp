#include "hemascreen/models/elastic_net.hpp"

#include <algorithm>
#include <cmath>

#include "hemascreen/error.hpp"
#include "hemascreen/json_eigen.hpp"
#include "hemascreen/metrics.hpp"
#include "hemascreen/resample.hpp"
#include "hemascreen/rng.hpp"

namespace hemascreen {

namespace {

constexpr double kMinWeight = 1e-5;

double soft_threshold(double z, double gamma) {
  if (z > gamma) return z - gamma;
  if (z < -gamma) return z + gamma;
  return 0.0;
}

double sigmoid(double eta) {
  return eta >= 0 ? 1.0 / (1.0 + std::exp(-eta)) : std::exp(eta) / (1.0 + std::exp(eta));
}

// log(1 + exp(eta)) without overflow.
double softplus(double eta) { return eta > 0 ? eta + std::log1p(std::exp(-eta)) : std::log1p(std::exp(eta)); }

void require_two_classes(const Eigen::Ref<const Eigen::VectorXi>& y) {
  const Eigen::Index pos = y.count();
  if (pos == 0 || pos == y.size()) throw Error(ErrorKind::SingleClass, "elastic net needs both classes");
}

}  // namespace

Eigen::VectorXd ElasticNetModel::linear_predictor(const Eigen::Ref<const Eigen::MatrixXd>& X) const {
  return (X * coefficients).array() + intercept;
}

Eigen::VectorXd ElasticNetModel::predict_proba(const Eigen::Ref<const Eigen::MatrixXd>& X) const {
  return linear_predictor(X).unaryExpr([](double eta) { return sigmoid(eta); });
}

double penalized_objective(const Eigen::Ref<const Eigen::MatrixXd>& X, const Eigen::Ref<const Eigen::VectorXi>& y,
                           double intercept, const Eigen::Ref<const Eigen::VectorXd>& coefficients, double lambda,
                           double alpha) {
  const Eigen::VectorXd eta = (X * coefficients).array() + intercept;
  double loss = 0.0;
  for (Eigen::Index i = 0; i < eta.size(); ++i) loss += softplus(eta(i)) - (y(i) ? eta(i) : 0.0);
  loss /= static_cast<double>(eta.size());
  const double penalty = alpha * coefficients.lpNorm<1>() + 0.5 * (1.0 - alpha) * coefficients.squaredNorm();
  return loss + lambda * penalty;
}

double lambda_max(const Eigen::Ref<const Eigen::MatrixXd>& X, const Eigen::Ref<const Eigen::VectorXi>& y, double alpha) {
  const double n = static_cast<double>(X.rows());
  const double ybar = static_cast<double>(y.count()) / n;
  const Eigen::VectorXd resid = y.cast<double>().array() - ybar;
  const double g = (X.transpose() * resid).cwiseAbs().maxCoeff() / n;
  // Ridge has no finite zeroing penalty; scale as if alpha were 1e-3.
  // The 1e-9 margin keeps the soft-threshold exactly at zero despite rounding.
  return g / std::max(alpha, 1e-3) * (1.0 + 1e-9);
}

std::vector<double> lambda_path(double lmax, std::size_t length, double min_ratio) {
  std::vector<double> path(length);
  if (length == 1) {
    path[0] = lmax;
    return path;
  }
  const double step = std::log(min_ratio) / static_cast<double>(length - 1);
  for (std::size_t i = 0; i < length; ++i) path[i] = lmax * std::exp(step * static_cast<double>(i));
  path.back() = lmax * min_ratio;
  return path;
}

ElasticNetFit fit_elastic_net(const Eigen::Ref<const Eigen::MatrixXd>& X, const Eigen::Ref<const Eigen::VectorXi>& y,
                              double lambda, double alpha, const ElasticNetFit* warm_start,
                              const ElasticNetConfig& config, std::vector<double>* objective_trace) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw Error(ErrorKind::InvalidArgument, "alpha must lie in [0, 1]");
  if (!(lambda >= 0.0)) throw Error(ErrorKind::InvalidArgument, "lambda must be non-negative");
  require_two_classes(y);

  const Eigen::Index n = X.rows(), p = X.cols();
  const double inv_n = 1.0 / static_cast<double>(n);
  const Eigen::VectorXd yd = y.cast<double>();

  ElasticNetFit fit;
  if (warm_start) {
    fit = *warm_start;
  } else {
    const double ybar = yd.mean();
    fit.coefficients = Eigen::VectorXd::Zero(p);
    fit.intercept = std::log(ybar / (1.0 - ybar));
  }
  fit.sweeps = 0;

  const double l1 = lambda * alpha;
  const double l2 = lambda * (1.0 - alpha);
  double objective = penalized_objective(X, y, fit.intercept, fit.coefficients, lambda, alpha);
  if (objective_trace) objective_trace->push_back(objective);

  Eigen::VectorXd w(n), residual(n), beta(p);
  for (std::size_t sweep = 0; sweep < config.max_newton_steps; ++sweep) {
    const Eigen::VectorXd eta = (X * fit.coefficients).array() + fit.intercept;
    for (Eigen::Index i = 0; i < n; ++i) {
      const double prob = sigmoid(eta(i));
      w(i) = std::max(prob * (1.0 - prob), kMinWeight);
      residual(i) = (yd(i) - prob) / w(i);  // working response minus current eta
    }

    // Coordinate descent on the weighted least-squares model.
    double b0 = fit.intercept;
    beta = fit.coefficients;
    const double wsum = w.sum();
    const Eigen::VectorXd xw2 = (X.array().square().colwise() * w.array()).colwise().sum().transpose() * inv_n;
    for (int pass = 0; pass < 10000; ++pass) {
      double max_change = 0.0;
      const double d0 = w.dot(residual) / wsum;
      b0 += d0;
      residual.array() -= d0;
      max_change = std::max(max_change, wsum * inv_n * d0 * d0);
      for (Eigen::Index j = 0; j < p; ++j) {
        if (xw2(j) == 0.0) continue;
        const double g = inv_n * (X.col(j).array() * w.array() * residual.array()).sum() + xw2(j) * beta(j);
        const double updated = soft_threshold(g, l1) / (xw2(j) + l2);
        const double d = updated - beta(j);
        if (d == 0.0) continue;
        residual -= d * X.col(j);
        beta(j) = updated;
        max_change = std::max(max_change, xw2(j) * d * d);
      }
      if (max_change < 1e-20) break;
    }

    // Backtrack until the true objective does not increase.
    const double d0 = b0 - fit.intercept;
    const Eigen::VectorXd dbeta = beta - fit.coefficients;
    double step = 1.0;
    bool accepted = false;
    double cand_obj = objective;
    for (int halvings = 0; halvings < 50; ++halvings, step *= 0.5) {
      cand_obj = penalized_objective(X, y, fit.intercept + step * d0, fit.coefficients + step * dbeta, lambda, alpha);
      if (!std::isfinite(cand_obj)) continue;
      if (cand_obj <= objective) {
        accepted = true;
        break;
      }
    }
    if (!accepted) break;

    const double change = std::max(std::abs(step * d0), (step * dbeta).cwiseAbs().maxCoeff());
    fit.intercept += step * d0;
    fit.coefficients += step * dbeta;
    objective = cand_obj;
    ++fit.sweeps;
    if (objective_trace) objective_trace->push_back(objective);
    if (!std::isfinite(fit.intercept) || !fit.coefficients.allFinite())
      throw Error(ErrorKind::NonFinite, "elastic net diverged at sweep " + std::to_string(sweep));
    if (change < config.tolerance) break;
  }
  return fit;
}

ElasticNetModel train_elastic_net(const Eigen::Ref<const Eigen::MatrixXd>& X, const Eigen::Ref<const Eigen::VectorXi>& y,
                                  const ElasticNetConfig& config, std::uint64_t seed) {
  require_two_classes(y);
  if (config.path_length < 1) throw Error(ErrorKind::InvalidArgument, "path_length must be positive");

  ElasticNetModel model;
  model.alpha = config.alpha;
  model.lambda_path = lambda_path(lambda_max(X, y, config.alpha), config.path_length, config.lambda_min_ratio);
  const auto L = static_cast<Eigen::Index>(model.lambda_path.size());

  auto fit_path = [&](const Eigen::Ref<const Eigen::MatrixXd>& Xs, const Eigen::Ref<const Eigen::VectorXi>& ys,
                      Eigen::MatrixXd& coefs, Eigen::VectorXd& intercepts) {
    coefs.resize(Xs.cols(), L);
    intercepts.resize(L);
    ElasticNetFit previous;
    for (Eigen::Index l = 0; l < L; ++l) {
      previous = fit_elastic_net(Xs, ys, model.lambda_path[static_cast<std::size_t>(l)], config.alpha,
                                 l ? &previous : nullptr, config);
      coefs.col(l) = previous.coefficients;
      intercepts(l) = previous.intercept;
    }
    return previous;
  };

  const ElasticNetFit last = fit_path(X, y, model.path_coefficients, model.path_intercepts);

  if (config.fixed_lambda) {
    const double target = *config.fixed_lambda;
    // Warm start from the nearest path solution with a larger penalty.
    std::optional<ElasticNetFit> warm;
    for (Eigen::Index l = L - 1; l >= 0; --l) {
      if (model.lambda_path[static_cast<std::size_t>(l)] >= target) {
        warm = ElasticNetFit{model.path_coefficients.col(l), model.path_intercepts(l), 0};
        break;
      }
    }
    if (!warm && target < model.lambda_path.back()) warm = last;
    const ElasticNetFit f = fit_elastic_net(X, y, target, config.alpha, warm ? &*warm : nullptr, config);
    model.coefficients = f.coefficients;
    model.intercept = f.intercept;
    model.lambda = target;
    return model;
  }

  // Inner stratified CV, AUC per path penalty.
  const auto positives = static_cast<std::size_t>(y.count());
  const std::size_t smaller = std::min(positives, static_cast<std::size_t>(y.size()) - positives);
  const std::size_t inner_k = std::min(config.inner_folds, smaller);
  Eigen::Index chosen = L - 1;
  if (inner_k >= 2) {
    const FoldPlan plan = stratified_kfold(y, inner_k, 1, derive_seed(seed, {0x1a4b}));
    Eigen::MatrixXd auc_table(static_cast<Eigen::Index>(inner_k), L);
    for (std::size_t f = 0; f < inner_k; ++f) {
      const TrainingSet train = subset(X, y, plan.train_indices(0, f));
      const TrainingSet test = subset(X, y, plan.test_indices(0, f));
      Eigen::MatrixXd coefs;
      Eigen::VectorXd intercepts;
      fit_path(train.X, train.y, coefs, intercepts);
      const Eigen::MatrixXd eta = (test.X * coefs).rowwise() + intercepts.transpose();
      for (Eigen::Index l = 0; l < L; ++l) auc_table(static_cast<Eigen::Index>(f), l) = auc(eta.col(l), test.y);
    }
    const Eigen::VectorXd mean_auc = auc_table.colwise().mean().transpose();
    model.cv_mean_auc.assign(mean_auc.data(), mean_auc.data() + L);
    chosen = 0;
    for (Eigen::Index l = 1; l < L; ++l)
      if (mean_auc(l) > mean_auc(chosen)) chosen = l;
  }
  model.lambda = model.lambda_path[static_cast<std::size_t>(chosen)];
  model.coefficients = model.path_coefficients.col(chosen);
  model.intercept = model.path_intercepts(chosen);
  return model;
}

nlohmann::json to_json(const ElasticNetConfig& c) {
  nlohmann::json j{{"alpha", c.alpha},
                   {"path_length", c.path_length},
                   {"lambda_min_ratio", c.lambda_min_ratio},
                   {"inner_folds", c.inner_folds},
                   {"max_newton_steps", c.max_newton_steps},
                   {"tolerance", c.tolerance}};
  j["fixed_lambda"] = c.fixed_lambda ? nlohmann::json(*c.fixed_lambda) : nlohmann::json(nullptr);
  return j;
}

ElasticNetConfig elastic_net_config_from_json(const nlohmann::json& j, ElasticNetConfig c) {
  for (const auto& [key, value] : j.items()) {
    if (key == "alpha") c.alpha = value.get<double>();
    else if (key == "path_length") c.path_length = value.get<std::size_t>();
    else if (key == "lambda_min_ratio") c.lambda_min_ratio = value.get<double>();
    else if (key == "inner_folds") c.inner_folds = value.get<std::size_t>();
    else if (key == "max_newton_steps") c.max_newton_steps = value.get<std::size_t>();
    else if (key == "tolerance") c.tolerance = value.get<double>();
    else if (key == "fixed_lambda") c.fixed_lambda = value.is_null() ? std::nullopt : std::optional(value.get<double>());
    else throw Error(ErrorKind::InvalidArgument, "unknown glmnet hyperparameter '" + key + "'");
  }
  if (!(c.alpha >= 0.0 && c.alpha <= 1.0)) throw Error(ErrorKind::InvalidArgument, "glmnet alpha must lie in [0, 1]");
  return c;
}

nlohmann::json to_json(const ElasticNetModel& m) {
  return {{"coefficients", vector_to_json(m.coefficients)},
          {"intercept", m.intercept},
          {"lambda", m.lambda},
          {"alpha", m.alpha},
          {"lambda_path", m.lambda_path},
          {"path_coefficients", matrix_to_json(m.path_coefficients)},
          {"path_intercepts", vector_to_json(m.path_intercepts)},
          {"cv_mean_auc", m.cv_mean_auc}};
}

ElasticNetModel elastic_net_from_json(const nlohmann::json& j) {
  ElasticNetModel m;
  m.coefficients = vector_from_json(j.at("coefficients"));
  m.intercept = j.at("intercept").get<double>();
  m.lambda = j.at("lambda").get<double>();
  m.alpha = j.at("alpha").get<double>();
  m.lambda_path = j.at("lambda_path").get<std::vector<double>>();
  m.path_coefficients = matrix_from_json(j.at("path_coefficients"));
  m.path_intercepts = vector_from_json(j.at("path_intercepts"));
  m.cv_mean_auc = j.at("cv_mean_auc").get<std::vector<double>>();
  return m;
}

}  // namespace hemascreen
