#include "hemascreen/models/trained_model.hpp"

#include <algorithm>

#include "hemascreen/error.hpp"

namespace hemascreen {

namespace {

constexpr std::string_view kModelSchema = "hemascreen.model/1";

std::optional<ScoreVariant> score_variant_of(ModelKind k) {
  switch (k) {
    case ModelKind::LrMl: return ScoreVariant::Ml;
    case ModelKind::LrMle: return ScoreVariant::Mle;
    case ModelKind::LrMlep: return ScoreVariant::Mlep;
    default: return std::nullopt;
  }
}

}  // namespace

std::string_view name_of(ModelKind k) noexcept {
  switch (k) {
    case ModelKind::Ann: return "ann";
    case ModelKind::RandomForest: return "rf";
    case ModelKind::ElasticNet: return "glmnet";
    case ModelKind::LrMl: return "lr-ml";
    case ModelKind::LrMle: return "lr-mle";
    case ModelKind::LrMlep: return "lr-mlep";
  }
  return "rf";
}

const std::vector<ModelKind>& all_model_kinds() {
  static const std::vector<ModelKind> kinds{ModelKind::Ann,  ModelKind::RandomForest, ModelKind::ElasticNet,
                                            ModelKind::LrMl, ModelKind::LrMle,        ModelKind::LrMlep};
  return kinds;
}

ModelKind model_kind_from_name(std::string_view name) {
  for (auto k : all_model_kinds())
    if (name_of(k) == name) return k;
  throw Error(ErrorKind::InvalidArgument,
              "unknown model '" + std::string(name) + "' (expected ann, rf, glmnet, lr-ml, lr-mle or lr-mlep)");
}

ModelSpec ModelSpec::from_name(std::string_view name, const nlohmann::json& overrides) {
  ModelSpec spec;
  spec.kind = model_kind_from_name(name);
  const nlohmann::json& o = overrides.is_null() ? nlohmann::json::object() : overrides;
  if (!o.is_object()) throw Error(ErrorKind::InvalidArgument, "hyperparameters for '" + std::string(name) + "' must be an object");
  switch (spec.kind) {
    case ModelKind::Ann: spec.ann = ann_config_from_json(o); break;
    case ModelKind::RandomForest: spec.rf = random_forest_config_from_json(o); break;
    case ModelKind::ElasticNet: spec.glmnet = elastic_net_config_from_json(o); break;
    default:
      if (!o.empty()) throw Error(ErrorKind::InvalidArgument, "model '" + std::string(name) + "' takes no hyperparameters");
  }
  return spec;
}

bool ModelSpec::is_derived_score() const noexcept { return score_variant_of(kind).has_value(); }

std::vector<std::string> ModelSpec::manifest() const {
  std::vector<std::string> out;
  if (auto v = score_variant_of(kind)) {
    for (auto [f, w] : score_terms(*v)) out.emplace_back(name_of(f));
  } else {
    for (auto name : feature_names()) out.emplace_back(name);
  }
  return out;
}

nlohmann::json ModelSpec::hyperparameters() const {
  switch (kind) {
    case ModelKind::Ann: return to_json(ann);
    case ModelKind::RandomForest: return to_json(rf);
    case ModelKind::ElasticNet: return to_json(glmnet);
    default: return nlohmann::json::object();
  }
}

Eigen::MatrixXd design_matrix(std::span<const BloodCountRecord> records, const std::vector<std::string>& manifest) {
  std::vector<std::size_t> columns;
  for (const auto& name : manifest) {
    auto f = feature_from_name(name);
    if (!f) throw Error(ErrorKind::ManifestMismatch, "manifest feature '" + name + "' is not a blood-count feature");
    columns.push_back(index_of(*f));
  }
  Eigen::MatrixXd X(static_cast<Eigen::Index>(records.size()), static_cast<Eigen::Index>(columns.size()));
  for (std::size_t i = 0; i < records.size(); ++i)
    for (std::size_t c = 0; c < columns.size(); ++c)
      X(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) = records[i].features[columns[c]];
  return X;
}

Eigen::VectorXd TrainedModel::predict_proba(const Eigen::Ref<const Eigen::MatrixXd>& X) const {
  if (X.cols() != static_cast<Eigen::Index>(manifest.size()))
    throw Error(ErrorKind::ManifestMismatch, "model expects " + std::to_string(manifest.size()) + " columns, got " +
                                                 std::to_string(X.cols()));
  Eigen::VectorXd p = std::visit([&](const auto& m) -> Eigen::VectorXd { return m.predict_proba(X); }, model);
  return p.cwiseMax(kProbabilityFloor).cwiseMin(1.0 - kProbabilityFloor);
}

TrainedModel train_model(const ModelSpec& spec, const Eigen::Ref<const Eigen::MatrixXd>& X,
                         const Eigen::Ref<const Eigen::VectorXi>& y, std::uint64_t seed) {
  TrainedModel out;
  out.kind = spec.kind;
  out.manifest = spec.manifest();
  out.seed = seed;
  out.hyperparameters = spec.hyperparameters();
  if (X.cols() != static_cast<Eigen::Index>(out.manifest.size()))
    throw Error(ErrorKind::ManifestMismatch, "training matrix has " + std::to_string(X.cols()) + " columns, " +
                                                 std::string(name_of(spec.kind)) + " expects " +
                                                 std::to_string(out.manifest.size()));
  switch (spec.kind) {
    case ModelKind::Ann: out.model = train_ann(X, y, spec.ann, seed); break;
    case ModelKind::RandomForest: out.model = train_random_forest(X, y, spec.rf, seed); break;
    case ModelKind::ElasticNet: out.model = train_elastic_net(X, y, spec.glmnet, seed); break;
    default: {
      DerivedScoreModel m;
      m.variant = *score_variant_of(spec.kind);
      Eigen::VectorXd scores = Eigen::VectorXd::Zero(X.rows());
      const auto terms = score_terms(m.variant);
      for (std::size_t t = 0; t < terms.size(); ++t) scores += terms[t].second * X.col(static_cast<Eigen::Index>(t));
      m.fit = train_logistic_scalar(scores, y);
      out.model = m;
    }
  }
  return out;
}

double predict_proba(const TrainedModel& model, const BloodCountRecord& record) {
  return model.predict_proba(design_matrix(std::span(&record, 1), model.manifest))(0);
}

double predict_proba(const TrainedModel& model, const NamedValues& features) {
  Eigen::MatrixXd X(1, static_cast<Eigen::Index>(model.manifest.size()));
  for (std::size_t c = 0; c < model.manifest.size(); ++c) {
    auto it = std::find_if(features.begin(), features.end(), [&](const auto& kv) { return kv.first == model.manifest[c]; });
    if (it == features.end()) throw Error(ErrorKind::ManifestMismatch, "missing feature '" + model.manifest[c] + "'");
    X(0, static_cast<Eigen::Index>(c)) = it->second;
  }
  return model.predict_proba(X)(0);
}

nlohmann::json to_json(const TrainedModel& m) {
  nlohmann::json params = std::visit([](const auto& v) { return to_json(v); }, m.model);
  return {{"schema", kModelSchema},
          {"family", name_of(m.kind)},
          {"manifest", m.manifest},
          {"provenance", {{"seed", m.seed}, {"hyperparameters", m.hyperparameters}}},
          {"parameters", params}};
}

TrainedModel trained_model_from_json(const nlohmann::json& j) {
  if (j.value("schema", "") != kModelSchema)
    throw Error(ErrorKind::InvalidArgument, "unsupported model schema '" + j.value("schema", "") + "'");
  TrainedModel m;
  m.kind = model_kind_from_name(j.at("family").get<std::string>());
  m.manifest = j.at("manifest").get<std::vector<std::string>>();
  m.seed = j.at("provenance").at("seed").get<std::uint64_t>();
  m.hyperparameters = j.at("provenance").at("hyperparameters");
  const auto& p = j.at("parameters");
  switch (m.kind) {
    case ModelKind::Ann: m.model = ann_from_json(p); break;
    case ModelKind::RandomForest: m.model = random_forest_from_json(p); break;
    case ModelKind::ElasticNet: m.model = elastic_net_from_json(p); break;
    default: m.model = derived_score_from_json(p);
  }
  return m;
}

}  // namespace hemascreen
