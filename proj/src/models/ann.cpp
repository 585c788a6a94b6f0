#include "hemascreen/models/ann.hpp"

#include <numeric>

#include "hemascreen/json_eigen.hpp"

namespace hemascreen {

std::string_view name_of(Activation a) noexcept { return a == Activation::Relu ? "relu" : "tanh"; }

Activation activation_from_name(std::string_view name) {
  if (name == "relu") return Activation::Relu;
  if (name == "tanh") return Activation::Tanh;
  throw Error(ErrorKind::InvalidArgument, "unknown activation '" + std::string(name) + "'");
}

AnnNetwork initial_network(const AnnConfig& config, std::uint64_t seed) {
  return AnnNetwork(config.input_size, config.hidden, config.hidden_activation, derive_seed(seed, {0x1417}));
}

AnnModel train_ann(const Eigen::Ref<const Eigen::MatrixXd>& X, const Eigen::Ref<const Eigen::VectorXi>& y,
                   const AnnConfig& config, std::uint64_t seed) {
  if (static_cast<std::size_t>(X.cols()) != config.input_size)
    throw Error(ErrorKind::InvalidArgument, "ANN expects " + std::to_string(config.input_size) + " inputs, got " +
                                                std::to_string(X.cols()));
  const Eigen::Index pos = y.count();
  if (pos == 0 || pos == y.size()) throw Error(ErrorKind::SingleClass, "ANN training needs both classes");
  if (config.batch_size < 1) throw Error(ErrorKind::InvalidArgument, "batch_size must be positive");

  AnnModel model;
  model.config = config;
  model.seed = seed;
  model.network = initial_network(config, seed);

  Eigen::VectorXd params = model.network.flatten();
  Eigen::VectorXd m = Eigen::VectorXd::Zero(params.size());
  Eigen::VectorXd v = Eigen::VectorXd::Zero(params.size());
  const auto n = static_cast<std::size_t>(X.rows());
  std::vector<Eigen::Index> order(n);
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  Rng shuffler(derive_seed(seed, {0x5b0f}));
  double beta1_t = 1.0, beta2_t = 1.0;

  Eigen::MatrixXd batch_x;
  Eigen::VectorXi batch_y;
  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    shuffler.shuffle(std::span<Eigen::Index>(order));
    for (std::size_t start = 0; start < n; start += config.batch_size) {
      const std::size_t len = std::min(config.batch_size, n - start);
      batch_x.resize(static_cast<Eigen::Index>(len), X.cols());
      batch_y.resize(static_cast<Eigen::Index>(len));
      for (std::size_t i = 0; i < len; ++i) {
        batch_x.row(static_cast<Eigen::Index>(i)) = X.row(order[start + i]);
        batch_y(static_cast<Eigen::Index>(i)) = y(order[start + i]);
      }
      const Eigen::VectorXd g = AnnNetwork::flatten(model.network.gradient(batch_x, batch_y));
      beta1_t *= config.beta1;
      beta2_t *= config.beta2;
      m = config.beta1 * m + (1.0 - config.beta1) * g;
      v = config.beta2 * v + (1.0 - config.beta2) * g.cwiseProduct(g);
      const Eigen::ArrayXd m_hat = m.array() / (1.0 - beta1_t);
      const Eigen::ArrayXd v_hat = v.array() / (1.0 - beta2_t);
      params.array() -= config.learning_rate * m_hat / (v_hat.sqrt() + config.epsilon);
      model.network.unflatten(params);
    }
    const double loss = model.network.loss(X, y);
    if (!std::isfinite(loss) || !params.allFinite())
      throw Error(ErrorKind::NonFinite, "ANN loss became non-finite at epoch " + std::to_string(epoch));
    model.loss_trace.push_back(loss);
  }
  return model;
}

nlohmann::json to_json(const AnnConfig& c) {
  return {{"input_size", c.input_size}, {"hidden", c.hidden},           {"hidden_activation", name_of(c.hidden_activation)},
          {"epochs", c.epochs},         {"learning_rate", c.learning_rate}, {"batch_size", c.batch_size},
          {"beta1", c.beta1},           {"beta2", c.beta2},             {"epsilon", c.epsilon}};
}

AnnConfig ann_config_from_json(const nlohmann::json& j, AnnConfig c) {
  for (const auto& [key, value] : j.items()) {
    if (key == "input_size") c.input_size = value.get<std::size_t>();
    else if (key == "hidden") c.hidden = value.get<std::vector<std::size_t>>();
    else if (key == "hidden_activation") c.hidden_activation = activation_from_name(value.get<std::string>());
    else if (key == "epochs") c.epochs = value.get<std::size_t>();
    else if (key == "learning_rate") c.learning_rate = value.get<double>();
    else if (key == "batch_size") c.batch_size = value.get<std::size_t>();
    else if (key == "beta1") c.beta1 = value.get<double>();
    else if (key == "beta2") c.beta2 = value.get<double>();
    else if (key == "epsilon") c.epsilon = value.get<double>();
    else throw Error(ErrorKind::InvalidArgument, "unknown ann hyperparameter '" + key + "'");
  }
  return c;
}

nlohmann::json to_json(const AnnModel& m) {
  nlohmann::json layers = nlohmann::json::array();
  for (std::size_t l = 0; l < m.network.weights().size(); ++l)
    layers.push_back({{"weights", matrix_to_json(m.network.weights()[l])}, {"biases", vector_to_json(m.network.biases()[l])}});
  return {{"config", to_json(m.config)}, {"seed", m.seed}, {"layers", layers}, {"loss_trace", m.loss_trace}};
}

AnnModel ann_from_json(const nlohmann::json& j) {
  AnnModel m;
  m.config = ann_config_from_json(j.at("config"));
  m.seed = j.at("seed").get<std::uint64_t>();
  std::vector<Eigen::MatrixXd> weights;
  std::vector<Eigen::VectorXd> biases;
  for (const auto& layer : j.at("layers")) {
    weights.push_back(matrix_from_json(layer.at("weights")));
    biases.push_back(vector_from_json(layer.at("biases")));
  }
  m.network = AnnNetwork(std::move(weights), std::move(biases), m.config.hidden_activation);
  m.loss_trace = j.at("loss_trace").get<std::vector<double>>();
  return m;
}

}  // namespace hemascreen
