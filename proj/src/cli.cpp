#include "hemascreen/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "hemascreen/csv.hpp"
#include "hemascreen/evaluation.hpp"
#include "hemascreen/io.hpp"
#include "hemascreen/models/derived_score.hpp"
#include "hemascreen/stats.hpp"
#include "hemascreen/svg.hpp"

namespace hemascreen::cli {

namespace {

constexpr std::string_view kIngestSchema = "hemascreen.ingest_report/1";
constexpr std::string_view kStatsSchema = "hemascreen.stats/1";
constexpr std::string_view kComparisonSchema = "hemascreen.comparison/1";
constexpr std::string_view kImportanceSchema = "hemascreen.importance/1";

std::string dump(const nlohmann::json& j) { return j.dump(2) + "\n"; }

void prepare_output(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec || !std::filesystem::is_directory(dir))
    throw Error(ErrorKind::Io, "cannot create output directory " + dir.string());
}

void emit(const std::filesystem::path& path, std::string_view contents, std::ostream& log) {
  write_file_atomic(path, contents);
  log << "wrote " << path.string() << "\n";
}

Cohort load_cohort(const ParseResult& parsed, const std::string& name) {
  Cohort c = select_cohort(parsed.records, cohort_sites(name), parsed.source_digest);
  c.provenance.filter = name;
  return c;
}

ModelSpec spec_for(const RunConfig& config, const std::string& model) {
  const auto it = config.hyperparameters.find(model);
  return ModelSpec::from_name(model, it == config.hyperparameters.end() ? nlohmann::json::object() : *it);
}

nlohmann::json run_header(const RunConfig& config, const ParseResult& parsed) {
  return {{"data", config.data.filename().string()}, {"source_digest", parsed.source_digest}, {"seed", config.seed}};
}

}  // namespace

ExitCode exit_code_for(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::MalformedHeader:
    case ErrorKind::MalformedRow:
    case ErrorKind::ConflictingAdmission:
    case ErrorKind::DuplicatePatient:
    case ErrorKind::BadMapping:
    case ErrorKind::Io:
    case ErrorKind::InvalidArgument: return kInputError;
    case ErrorKind::EmptyCohort:
    case ErrorKind::SingleClassCohort:
    case ErrorKind::EmptySample:
    case ErrorKind::DegenerateFeature: return kStatisticsError;
    default: return kModelingError;
  }
}

const std::vector<std::string>& cohort_names() {
  static const std::vector<std::string> names{"community", "regular-ward", "all-modeled"};
  return names;
}

LocationSet cohort_sites(const std::string& name) {
  if (name == "community") return {Location::Community};
  if (name == "regular-ward") return {Location::RegularWard};
  if (name == "all-modeled") return {Location::Community, Location::RegularWard};
  throw Error(ErrorKind::InvalidArgument, "unknown cohort '" + name + "' (expected community, regular-ward or all-modeled)");
}

RunConfig RunConfig::from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw Error(ErrorKind::InvalidArgument, "config must be a JSON object");
  RunConfig c;
  try {
    for (const auto& [key, v] : j.items()) {
      if (key == "data") c.data = v.get<std::string>();
      else if (key == "mapping") c.mapping = v.get<std::string>();
      else if (key == "cohort") c.cohort = v.get<std::string>();
      else if (key == "models") c.models = v.get<std::vector<std::string>>();
      else if (key == "hyperparameters") c.hyperparameters = v;
      else if (key == "folds") c.folds = v.get<std::size_t>();
      else if (key == "repeats") c.repeats = v.get<std::size_t>();
      else if (key == "seed") c.seed = v.get<std::uint64_t>();
      else if (key == "smote") c.smote = v.get<bool>();
      else if (key == "out") c.out = v.get<std::string>();
      else if (key == "plots") c.plots = v.get<bool>();
      else if (key == "threads") c.threads = v.get<std::size_t>();
      else throw Error(ErrorKind::InvalidArgument, "unknown config key '" + key + "'");
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::InvalidArgument, std::string("bad config value: ") + e.what());
  }
  return c;
}

nlohmann::json RunConfig::to_json() const {
  nlohmann::json j{{"data", data.string()},   {"cohort", cohort ? nlohmann::json(*cohort) : nlohmann::json(nullptr)},
                   {"models", models},        {"hyperparameters", hyperparameters},
                   {"folds", folds},          {"repeats", repeats},
                   {"seed", seed},            {"smote", smote},
                   {"out", out.string()},     {"plots", plots},
                   {"threads", threads}};
  j["mapping"] = mapping ? nlohmann::json(mapping->string()) : nlohmann::json(nullptr);
  return j;
}

void RunConfig::validate() const {
  if (folds < 2) throw Error(ErrorKind::InvalidArgument, "--folds must be at least 2");
  if (repeats < 1) throw Error(ErrorKind::InvalidArgument, "--repeats must be at least 1");
  if (models.empty()) throw Error(ErrorKind::InvalidArgument, "no models requested");
  for (const auto& m : models) model_kind_from_name(m);
  if (cohort) cohort_sites(*cohort);
  if (!hyperparameters.is_object()) throw Error(ErrorKind::InvalidArgument, "hyperparameters must be an object");
  for (const auto& [name, v] : hyperparameters.items()) spec_for(*this, name);
}

ParseResult load_records(const RunConfig& config) {
  if (config.data.empty())
    throw Error(ErrorKind::InvalidArgument, "no data file given (use --data or set HEMASCREEN_DATA)");
  const std::string bytes = read_file(config.data);

  std::istringstream head(bytes);
  csv::Reader reader(head);
  std::vector<std::string> header;
  reader.next(header);
  const bool canonical = !header.empty() && header.front() == "patient_id" &&
                         std::find(header.begin(), header.end(), "admitted_regular_ward") != header.end();

  ColumnMapping mapping;
  if (canonical) {
    mapping = ColumnMapping::canonical();
  } else if (config.mapping) {
    std::string text;
    try {
      text = read_file(*config.mapping);
    } catch (const Error&) {
      throw Error(ErrorKind::Io, "cannot read mapping file " + config.mapping->string());
    }
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorKind::BadMapping, "mapping file " + config.mapping->string() + " is not valid JSON: " + e.what());
    }
    mapping = ColumnMapping::from_json(j);
  } else {
    mapping = ColumnMapping::public_release();
  }
  std::istringstream in(bytes);
  return parse_dataset(in, mapping);
}

int cmd_ingest(const RunConfig& config, std::ostream& log) {
  const ParseResult parsed = load_records(config);
  prepare_output(config.out);
  const std::string name = config.cohort.value_or("all-modeled");
  const Cohort cohort = load_cohort(parsed, name);

  std::ostringstream csv_text;
  write_cohort_csv(csv_text, cohort.records);
  const auto csv_path = config.out / ("cohort_" + name + ".csv");

  const auto summary = cohort_summary(parsed.records);
  nlohmann::json by_location = nlohmann::json::object();
  for (auto loc : kAllLocations) {
    const auto& c = summary.by_location[static_cast<std::size_t>(loc)];
    by_location[std::string(name_of(loc))] = {{"records", c.total()}, {"positive", c.positive}, {"negative", c.negative}};
  }
  nlohmann::json report = run_header(config, parsed);
  report["schema"] = kIngestSchema;
  report["rows_read"] = parsed.rows_read;
  report["kept"] = parsed.records.size();
  report["excluded"] = {{"incomplete_blood_count", parsed.excluded_incomplete}};
  report["by_location"] = by_location;
  report["cohort"] = {{"name", name},
                      {"records", cohort.size()},
                      {"positive", cohort.positives()},
                      {"negative", cohort.negatives()},
                      {"file", csv_path.filename().string()}};

  emit(csv_path, csv_text.str(), log);
  emit(config.out / "ingest_report.json", dump(report), log);
  log << parsed.records.size() << " kept, " << parsed.excluded_incomplete << " excluded (incomplete blood count); "
      << name << ": " << cohort.size() << " records\n";
  return kOk;
}

int cmd_summary(const RunConfig& config, std::ostream& log) {
  const ParseResult parsed = load_records(config);
  prepare_output(config.out);
  nlohmann::json j = to_json(cohort_summary(parsed.records));
  j["source_digest"] = parsed.source_digest;
  emit(config.out / "summary.json", dump(j), log);
  return kOk;
}

int cmd_stats(const RunConfig& config, std::ostream& log) {
  const ParseResult parsed = load_records(config);
  prepare_output(config.out);
  const std::vector<std::string> names =
      config.cohort ? std::vector<std::string>{*config.cohort} : std::vector<std::string>{"community", "regular-ward"};

  std::vector<Cohort> cohorts;
  for (const auto& n : names) cohorts.push_back(load_cohort(parsed, n));

  nlohmann::json tables = nlohmann::json::object();
  nlohmann::json scores = nlohmann::json::object();
  for (const auto& c : cohorts) {
    const auto table = significance_table(c);
    tables[c.provenance.filter] = to_json(table);
    const Eigen::MatrixXd X = feature_matrix(c.records);
    const Eigen::VectorXi y = label_vector(c.records);
    nlohmann::json per_variant = nlohmann::json::object();
    for (auto v : {ScoreVariant::Ml, ScoreVariant::Mle, ScoreVariant::Mlep})
      per_variant[std::string(name_of(v))] = to_json(screen_values(std::string(name_of(v)), derived_scores(X, v), y));
    scores[c.provenance.filter] = per_variant;
    log << c.provenance.filter << ": " << table.count_significant() << " features with p < 0.05\n";
  }
  nlohmann::json report = run_header(config, parsed);
  report["schema"] = kStatsSchema;
  report["significance"] = tables;
  report["derived_scores"] = scores;
  emit(config.out / "stats.json", dump(report), log);

  if (config.plots) {
    auto split = [](const Cohort& c, const Eigen::VectorXd& values) {
      svg::BoxGroup g;
      g.label = c.provenance.filter;
      std::vector<double> pos, neg;
      for (std::size_t i = 0; i < c.records.size(); ++i)
        (c.records[i].label == Label::Positive ? pos : neg).push_back(values(static_cast<Eigen::Index>(i)));
      g.positive = Eigen::Map<Eigen::VectorXd>(pos.data(), static_cast<Eigen::Index>(pos.size()));
      g.negative = Eigen::Map<Eigen::VectorXd>(neg.data(), static_cast<Eigen::Index>(neg.size()));
      return g;
    };
    nlohmann::json feature_panels = nlohmann::json::array();
    for (auto f : feature_names()) {
      std::vector<svg::BoxGroup> groups;
      for (const auto& c : cohorts) groups.push_back(split(c, feature_matrix(c.records).col(static_cast<Eigen::Index>(index_of(*feature_from_name(f))))));
      feature_panels.push_back(svg::box_panel(std::string(f), groups));
    }
    nlohmann::json score_panels = nlohmann::json::array();
    for (auto v : {ScoreVariant::Ml, ScoreVariant::Mle, ScoreVariant::Mlep}) {
      std::vector<svg::BoxGroup> groups;
      for (const auto& c : cohorts) groups.push_back(split(c, derived_scores(feature_matrix(c.records), v)));
      score_panels.push_back(svg::box_panel(std::string(name_of(v)), groups));
    }
    emit(config.out / "boxplots.svg", svg::box_grid(feature_panels, "Blood counts by SARS-CoV-2 result"), log);
    emit(config.out / "derived_scores.svg", svg::box_grid(score_panels, "Derived scores by SARS-CoV-2 result"), log);
  }
  return kOk;
}

int cmd_evaluate(const RunConfig& config, std::ostream& log) {
  const ParseResult parsed = load_records(config);
  prepare_output(config.out);
  const std::string name = config.cohort.value_or("community");
  const Cohort cohort = load_cohort(parsed, name);
  const FoldPlan plan = stratified_kfold(label_vector(cohort.records), config.folds, config.repeats, config.seed);

  // Train everything first so a failing model leaves no partial output set.
  std::vector<std::pair<std::string, nlohmann::json>> reports;
  for (const auto& model : config.models) {
    const EvalReport report = cross_validate(cohort, spec_for(config, model), plan, {config.smote, config.threads, false});
    const auto auc = report.aggregate("auc");
    log << name << " " << model << ": AUC " << format_fixed(auc.mean, 3) << " ± " << format_fixed(auc.sd, 3) << "\n";
    reports.emplace_back(model, to_json(report));
  }

  nlohmann::json rows = nlohmann::json::array();
  std::string table = "model,sensitivity,specificity,accuracy,auc\r\n";
  for (const auto& [model, j] : reports) {
    const auto stem = name + "_" + model;
    emit(config.out / (stem + "_report.json"), dump(j), log);
    if (config.plots) {
      emit(config.out / (stem + "_roc.svg"), svg::roc_overlay(j), log);
      emit(config.out / (stem + "_confusion.svg"), svg::confusion_heatmap(j), log);
    }
    const auto& agg = j.at("aggregate");
    nlohmann::json row{{"model", model}};
    for (const char* m : {"sensitivity", "specificity", "accuracy", "auc"})
      row[m] = {{"mean", agg.at(m).at("mean")}, {"sd", agg.at(m).at("sd")}};
    rows.push_back(row);
    table += model;
    for (const char* m : {"sensitivity", "specificity", "accuracy", "auc"})
      table += "," + format_fixed(agg.at(m).at("mean").get<double>(), 2) + " ± " +
               format_fixed(agg.at(m).at("sd").get<double>(), 2);
    table += "\r\n";
  }
  nlohmann::json comparison = run_header(config, parsed);
  comparison["schema"] = kComparisonSchema;
  comparison["cohort"] = name;
  comparison["k"] = config.folds;
  comparison["repeats"] = config.repeats;
  comparison["smote"] = config.smote;
  comparison["models"] = rows;
  emit(config.out / (name + "_comparison.json"), dump(comparison), log);
  emit(config.out / (name + "_comparison.csv"), table, log);
  return kOk;
}

int cmd_importance(const RunConfig& config, std::ostream& log) {
  for (const auto& model : config.models) {
    const auto kind = model_kind_from_name(model);
    if (kind != ModelKind::RandomForest && kind != ModelKind::ElasticNet)
      throw Error(ErrorKind::UnsupportedModel, "variable importance is defined for rf and glmnet, not " + model);
  }
  const ParseResult parsed = load_records(config);
  prepare_output(config.out);
  const std::string name = config.cohort.value_or("community");
  const Cohort cohort = load_cohort(parsed, name);
  const FoldPlan plan = stratified_kfold(label_vector(cohort.records), config.folds, config.repeats, config.seed);

  std::vector<std::pair<std::string, nlohmann::json>> tables;
  for (const auto& model : config.models) {
    const EvalReport report = cross_validate(cohort, spec_for(config, model), plan, {config.smote, config.threads, true});
    nlohmann::json j = run_header(config, parsed);
    j["schema"] = kImportanceSchema;
    j["cohort"] = name;
    j["model"] = model;
    j["hyperparameters"] = report.hyperparameters;
    j["k"] = config.folds;
    j["repeats"] = config.repeats;
    j["smote"] = config.smote;
    j["evaluated_on"] = "held-out folds";
    j["importance"] = to_json(report.importance());
    tables.emplace_back(model, std::move(j));
  }
  for (const auto& [model, j] : tables) {
    const auto stem = name + "_" + model;
    emit(config.out / (stem + "_importance.json"), dump(j), log);
    if (config.plots)
      emit(config.out / (stem + "_importance.svg"), svg::importance_bars(j.at("importance"), "Variable importance, " + model + " (" + name + ")"), log);
  }
  return kOk;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Screening SARS-CoV-2 from full blood counts: cohorts, rank-sum screens, cross-validated models."};
  app.name("hemascreen");
  app.fallthrough();
  app.require_subcommand(1);

  std::optional<std::string> config_path, data, mapping, cohort, models, out_dir;
  std::optional<std::size_t> folds, repeats, threads;
  std::optional<std::uint64_t> seed;
  bool smote = false, no_plots = false;
  app.add_option("--config", config_path, "JSON run configuration; flags override it");
  app.add_option("--data", data, "Blood count CSV (default: $HEMASCREEN_DATA)");
  app.add_option("--mapping", mapping, "Column mapping JSON for non-standard headers");
  app.add_option("--cohort", cohort, "community, regular-ward or all-modeled");
  app.add_option("--models", models, "Comma-separated: ann, rf, glmnet, lr-ml, lr-mle, lr-mlep");
  app.add_option("--folds", folds, "Cross-validation folds (default 10)");
  app.add_option("--repeats", repeats, "Repeated cross-validation rounds (default 1)");
  app.add_option("--seed", seed, "Master seed (default 42)");
  app.add_flag("--smote", smote, "SMOTE-balance every training portion");
  app.add_option("--out", out_dir, "Output directory");
  app.add_flag("--no-plots", no_plots, "Skip SVG output");
  app.add_option("--threads", threads, "Parallel fold workers (results do not depend on it)");

  auto* ingest = app.add_subcommand("ingest", "Parse the data, write the cohort CSV and an ingestion report");
  auto* summary = app.add_subcommand("summary", "Tabulate records and pathogen results by location");
  auto* stats = app.add_subcommand("stats", "Rank-sum screen of every feature, with box plots");
  auto* evaluate = app.add_subcommand("evaluate", "Cross-validate models and write reports");
  auto* importance = app.add_subcommand("importance", "Held-out variable importance for rf and glmnet");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "hemascreen: " << e.what() << "\n";
    return kInputError;
  }

  try {
    RunConfig config;
    if (config_path) {
      nlohmann::json j;
      try {
        j = nlohmann::json::parse(read_file(*config_path));
      } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::InvalidArgument, "config " + *config_path + " is not valid JSON: " + e.what());
      }
      config = RunConfig::from_json(j);
    }
    if (config.data.empty())
      if (const char* env = std::getenv("HEMASCREEN_DATA"); env && *env) config.data = env;
    if (data) config.data = *data;
    if (mapping) config.mapping = *mapping;
    if (cohort) config.cohort = *cohort;
    if (models) {
      config.models.clear();
      std::stringstream ss(*models);
      for (std::string m; std::getline(ss, m, ',');)
        if (auto t = trim(m); !t.empty()) config.models.push_back(t);
    }
    if (folds) config.folds = *folds;
    if (repeats) config.repeats = *repeats;
    if (seed) config.seed = *seed;
    if (smote) config.smote = true;
    if (out_dir) config.out = *out_dir;
    if (no_plots) config.plots = false;
    if (threads) config.threads = *threads;
    config.validate();

    if (ingest->parsed()) return cmd_ingest(config, out);
    if (summary->parsed()) return cmd_summary(config, out);
    if (stats->parsed()) return cmd_stats(config, out);
    if (evaluate->parsed()) return cmd_evaluate(config, out);
    if (importance->parsed()) return cmd_importance(config, out);
    return kInputError;
  } catch (const RowError& e) {
    err << "hemascreen: " << to_string(e.kind()) << " at data row " << e.row_index() << ": " << e.what() << "\n";
    return exit_code_for(e.kind());
  } catch (const Error& e) {
    err << "hemascreen: " << to_string(e.kind()) << ": " << e.what() << "\n";
    return exit_code_for(e.kind());
  } catch (const std::exception& e) {
    err << "hemascreen: " << e.what() << "\n";
    return kInputError;
  }
}

}  // namespace hemascreen::cli
