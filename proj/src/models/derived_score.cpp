#include "hemascreen/models/derived_score.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>

#include "hemascreen/error.hpp"

namespace hemascreen {

namespace {

double sigmoid(double eta) {
  return eta >= 0 ? 1.0 / (1.0 + std::exp(-eta)) : std::exp(eta) / (1.0 + std::exp(eta));
}

double log_likelihood(const Eigen::VectorXd& x, const Eigen::VectorXi& y, double a, double b) {
  double ll = 0.0;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double eta = a + b * x(i);
    const double sp = eta > 0 ? eta + std::log1p(std::exp(-eta)) : std::log1p(std::exp(eta));
    ll += (y(i) ? eta : 0.0) - sp;
  }
  return ll;
}

}  // namespace

std::string_view name_of(ScoreVariant v) noexcept {
  switch (v) {
    case ScoreVariant::Ml: return "ml";
    case ScoreVariant::Mle: return "mle";
    case ScoreVariant::Mlep: return "mlep";
  }
  return "mlep";
}

ScoreVariant score_variant_from_name(std::string_view name) {
  if (name == "ml") return ScoreVariant::Ml;
  if (name == "mle") return ScoreVariant::Mle;
  if (name == "mlep") return ScoreVariant::Mlep;
  throw Error(ErrorKind::InvalidArgument, "unknown score variant '" + std::string(name) + "'");
}

std::vector<std::pair<Feature, double>> score_terms(ScoreVariant v) {
  std::vector<std::pair<Feature, double>> terms{{Feature::Monocytes, 1.0}, {Feature::Leukocytes, -1.0}};
  if (v != ScoreVariant::Ml) terms.emplace_back(Feature::Eosinophils, -1.0);
  if (v == ScoreVariant::Mlep) terms.emplace_back(Feature::Platelets, -1.0);
  return terms;
}

double derived_score(const BloodCountRecord& record, ScoreVariant variant) {
  double y = 0.0;
  for (auto [feature, weight] : score_terms(variant)) y += weight * record[feature];
  return y;
}

Eigen::VectorXd derived_scores(const Eigen::Ref<const Eigen::MatrixXd>& X, ScoreVariant variant) {
  Eigen::VectorXd y = Eigen::VectorXd::Zero(X.rows());
  for (auto [feature, weight] : score_terms(variant)) y += weight * X.col(static_cast<Eigen::Index>(index_of(feature)));
  return y;
}

double ScalarLogisticFit::predict_proba(double score) const { return sigmoid(intercept + slope * score); }

ScalarLogisticFit train_logistic_scalar(const Eigen::Ref<const Eigen::VectorXd>& values,
                                        const Eigen::Ref<const Eigen::VectorXi>& labels) {
  if (values.size() != labels.size()) throw Error(ErrorKind::InvalidArgument, "values and labels differ in length");
  const Eigen::Index pos = labels.count();
  if (pos == 0 || pos == labels.size()) throw Error(ErrorKind::SingleClass, "logistic fit needs both classes");
  if (!values.allFinite()) throw Error(ErrorKind::NonFinite, "non-finite score");

  const Eigen::VectorXd x = values;
  const Eigen::VectorXi y = labels;
  double max_neg = -INFINITY, min_neg = INFINITY, max_pos = -INFINITY, min_pos = INFINITY;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    if (y(i)) {
      max_pos = std::max(max_pos, x(i));
      min_pos = std::min(min_pos, x(i));
    } else {
      max_neg = std::max(max_neg, x(i));
      min_neg = std::min(min_neg, x(i));
    }
  }

  ScalarLogisticFit fit;
  // Complete or quasi-complete separation: the likelihood has no maximizer.
  const bool constant = min_pos == max_pos && min_neg == max_neg && min_pos == min_neg;
  if (!constant && (max_neg <= min_pos || max_pos <= min_neg)) {
    const bool increasing = max_neg <= min_pos;
    const double boundary = increasing ? 0.5 * (max_neg + min_pos) : 0.5 * (max_pos + min_neg);
    fit.slope = increasing ? kMaxScalarSlope : -kMaxScalarSlope;
    fit.intercept = -fit.slope * boundary;
    fit.perfect_separation = true;
    return fit;
  }

  const double ybar = static_cast<double>(pos) / static_cast<double>(y.size());
  double a = std::log(ybar / (1.0 - ybar)), b = 0.0;
  double ll = log_likelihood(x, y, a, b);
  for (fit.iterations = 0; fit.iterations < 100;) {
    Eigen::Vector2d g = Eigen::Vector2d::Zero();
    Eigen::Matrix2d H = Eigen::Matrix2d::Zero();
    for (Eigen::Index i = 0; i < x.size(); ++i) {
      const double p = sigmoid(a + b * x(i));
      const double w = p * (1.0 - p);
      const double r = static_cast<double>(y(i)) - p;
      g += r * Eigen::Vector2d(1.0, x(i));
      H += w * Eigen::Matrix2d{{1.0, x(i)}, {x(i), x(i) * x(i)}};
    }
    Eigen::Vector2d step;
    if (std::abs(H.determinant()) <= 1e-12 * std::max(1.0, H.squaredNorm())) {
      step = Eigen::Vector2d(H(0, 0) > 0 ? g(0) / H(0, 0) : 0.0, 0.0);  // score carries no information
    } else {
      step = H.ldlt().solve(g);
    }
    // Halve until the likelihood does not decrease beyond rounding. Tiny steps
    // are taken whole so rounding noise cannot stall convergence.
    double t = 1.0, next_ll = ll;
    const double slack = 1e-12 * std::max(1.0, std::abs(ll));
    for (int k = 0; k < 40; ++k, t *= 0.5) {
      next_ll = log_likelihood(x, y, a + t * step(0), std::clamp(b + t * step(1), -kMaxScalarSlope, kMaxScalarSlope));
      if (next_ll >= ll - slack || step.norm() < 1e-6) break;
    }
    a += t * step(0);
    b = std::clamp(b + t * step(1), -kMaxScalarSlope, kMaxScalarSlope);
    ll = next_ll;
    ++fit.iterations;
    if (!std::isfinite(a) || !std::isfinite(b)) throw Error(ErrorKind::NonFinite, "scalar logistic fit diverged");
    if ((t * step).norm() < 1e-10) break;
  }
  fit.intercept = a;
  fit.slope = b;
  return fit;
}

Eigen::VectorXd DerivedScoreModel::predict_proba(const Eigen::Ref<const Eigen::MatrixXd>& X) const {
  const auto terms = score_terms(variant);
  if (X.cols() != static_cast<Eigen::Index>(terms.size()))
    throw Error(ErrorKind::ManifestMismatch, "derived score expects " + std::to_string(terms.size()) + " columns");
  Eigen::VectorXd out(X.rows());
  for (Eigen::Index i = 0; i < X.rows(); ++i) {
    double y = 0.0;
    for (std::size_t t = 0; t < terms.size(); ++t) y += terms[t].second * X(i, static_cast<Eigen::Index>(t));
    out(i) = fit.predict_proba(y);
  }
  return out;
}

nlohmann::json to_json(const DerivedScoreModel& m) {
  nlohmann::json terms = nlohmann::json::array();
  for (auto [f, w] : score_terms(m.variant)) terms.push_back({{"feature", name_of(f)}, {"weight", w}});
  return {{"variant", name_of(m.variant)},
          {"terms", terms},
          {"slope", m.fit.slope},
          {"intercept", m.fit.intercept},
          {"iterations", m.fit.iterations},
          {"perfect_separation", m.fit.perfect_separation}};
}

DerivedScoreModel derived_score_from_json(const nlohmann::json& j) {
  DerivedScoreModel m;
  m.variant = score_variant_from_name(j.at("variant").get<std::string>());
  m.fit.slope = j.at("slope").get<double>();
  m.fit.intercept = j.at("intercept").get<double>();
  m.fit.iterations = j.at("iterations").get<std::size_t>();
  m.fit.perfect_separation = j.at("perfect_separation").get<bool>();
  return m;
}

}  // namespace hemascreen
