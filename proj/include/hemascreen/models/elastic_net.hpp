#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <optional>
#include <vector>

#include <json.hpp>

namespace hemascreen {

struct ElasticNetConfig {
  double alpha = 1.0;  // 1 = lasso, 0 = ridge
  std::size_t path_length = 100;
  double lambda_min_ratio = 1e-3;
  std::size_t inner_folds = 5;
  /// When set, the model is fitted at this penalty instead of the CV choice.
  std::optional<double> fixed_lambda;
  std::size_t max_newton_steps = 100;
  double tolerance = 1e-10;
};

/// Penalized logistic regression along a lambda path.
struct ElasticNetModel {
  Eigen::VectorXd coefficients;
  double intercept = 0.0;
  double lambda = 0.0;
  double alpha = 1.0;
  std::vector<double> lambda_path;  // descending
  Eigen::MatrixXd path_coefficients;  // features x path_length
  Eigen::VectorXd path_intercepts;
  std::vector<double> cv_mean_auc;  // per path lambda; empty when not selected by CV

  Eigen::VectorXd linear_predictor(const Eigen::Ref<const Eigen::MatrixXd>& X) const;
  Eigen::VectorXd predict_proba(const Eigen::Ref<const Eigen::MatrixXd>& X) const;
};

/// One penalized fit. `objective_trace`, when given, receives the penalized
/// objective before the first and after every Newton sweep.
struct ElasticNetFit {
  Eigen::VectorXd coefficients;
  double intercept = 0.0;
  std::size_t sweeps = 0;
};

/// (1/n) sum of logistic deviance halves plus lambda (alpha |b|_1 + (1-alpha)/2 |b|^2).
double penalized_objective(const Eigen::Ref<const Eigen::MatrixXd>& X, const Eigen::Ref<const Eigen::VectorXi>& y,
                           double intercept, const Eigen::Ref<const Eigen::VectorXd>& coefficients, double lambda,
                           double alpha);

/// Smallest penalty at which every coefficient is zero.
double lambda_max(const Eigen::Ref<const Eigen::MatrixXd>& X, const Eigen::Ref<const Eigen::VectorXi>& y, double alpha);

/// Log-spaced descending path from lambda_max to ratio * lambda_max.
std::vector<double> lambda_path(double lambda_max, std::size_t length, double min_ratio);

/// Proximal Newton: each sweep solves the quadratic model of the log-likelihood
/// plus the exact penalty by cyclic coordinate descent with soft-thresholding,
/// then backtracks along the step until the true objective does not increase.
ElasticNetFit fit_elastic_net(const Eigen::Ref<const Eigen::MatrixXd>& X, const Eigen::Ref<const Eigen::VectorXi>& y,
                              double lambda, double alpha, const ElasticNetFit* warm_start = nullptr,
                              const ElasticNetConfig& config = {}, std::vector<double>* objective_trace = nullptr);

/// Fits the full path; the final penalty is the inner-CV AUC maximizer (ties go
/// to the larger penalty) unless config.fixed_lambda is set.
ElasticNetModel train_elastic_net(const Eigen::Ref<const Eigen::MatrixXd>& X, const Eigen::Ref<const Eigen::VectorXi>& y,
                                  const ElasticNetConfig& config, std::uint64_t seed);

nlohmann::json to_json(const ElasticNetConfig& c);
ElasticNetConfig elastic_net_config_from_json(const nlohmann::json& j, ElasticNetConfig base = {});
nlohmann::json to_json(const ElasticNetModel& m);
ElasticNetModel elastic_net_from_json(const nlohmann::json& j);

}  // namespace hemascreen
