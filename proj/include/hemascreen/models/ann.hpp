#pragma once

#include <Eigen/Core>

#include <cmath>
#include <cstdint>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "hemascreen/error.hpp"
#include "hemascreen/rng.hpp"

namespace hemascreen {

enum class Activation { Relu, Tanh };
std::string_view name_of(Activation a) noexcept;
Activation activation_from_name(std::string_view name);

struct AnnConfig {
  std::size_t input_size = 14;
  std::vector<std::size_t> hidden{32, 16, 8};
  Activation hidden_activation = Activation::Relu;
  std::size_t epochs = 100;
  double learning_rate = 1e-3;
  std::size_t batch_size = 16;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

/// Fully connected network with one logistic output unit. Rows of the input
/// matrix are samples; layer l maps (batch x in) to (batch x out) through
/// weights[l] (out x in) and biases[l].
template <typename Scalar>
class MultilayerPerceptron {
 public:
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  struct Gradient {
    std::vector<Matrix> weights;
    std::vector<Vector> biases;
  };

  MultilayerPerceptron() = default;

  /// Layer sizes input -> hidden... -> 1. Weights drawn uniformly with the
  /// He (ReLU) or Glorot (tanh) limit; biases start at zero.
  MultilayerPerceptron(std::size_t input, const std::vector<std::size_t>& hidden, Activation activation,
                       std::uint64_t seed)
      : activation_(activation) {
    std::vector<std::size_t> sizes{input};
    sizes.insert(sizes.end(), hidden.begin(), hidden.end());
    sizes.push_back(1);
    Rng rng(seed);
    for (std::size_t l = 0; l + 1 < sizes.size(); ++l) {
      const auto in = static_cast<Eigen::Index>(sizes[l]);
      const auto out = static_cast<Eigen::Index>(sizes[l + 1]);
      const double limit = activation == Activation::Relu ? std::sqrt(6.0 / static_cast<double>(in))
                                                          : std::sqrt(6.0 / static_cast<double>(in + out));
      Matrix w(out, in);
      for (Eigen::Index c = 0; c < in; ++c)
        for (Eigen::Index r = 0; r < out; ++r) w(r, c) = static_cast<Scalar>(rng.uniform(-limit, limit));
      weights_.push_back(std::move(w));
      biases_.push_back(Vector::Zero(out));
    }
  }

  MultilayerPerceptron(std::vector<Matrix> weights, std::vector<Vector> biases, Activation activation)
      : weights_(std::move(weights)), biases_(std::move(biases)), activation_(activation) {
    if (weights_.size() != biases_.size() || weights_.empty())
      throw Error(ErrorKind::InvalidArgument, "layer count mismatch");
    for (std::size_t l = 0; l < weights_.size(); ++l) {
      if (weights_[l].rows() != biases_[l].size() || (l && weights_[l].cols() != weights_[l - 1].rows()))
        throw Error(ErrorKind::InvalidArgument, "layer dimensions do not chain");
    }
    if (weights_.back().rows() != 1) throw Error(ErrorKind::InvalidArgument, "output layer must have one unit");
  }

  const std::vector<Matrix>& weights() const noexcept { return weights_; }
  const std::vector<Vector>& biases() const noexcept { return biases_; }
  Activation activation() const noexcept { return activation_; }
  Eigen::Index input_size() const noexcept { return weights_.front().cols(); }

  std::size_t parameter_count() const noexcept {
    std::size_t n = 0;
    for (std::size_t l = 0; l < weights_.size(); ++l) n += static_cast<std::size_t>(weights_[l].size() + biases_[l].size());
    return n;
  }

  /// Output-layer pre-activations, one per row of X.
  Vector logits(const Eigen::Ref<const Matrix>& X) const {
    Matrix a = X;
    for (std::size_t l = 0; l < weights_.size(); ++l) {
      Matrix z = (a * weights_[l].transpose()).rowwise() + biases_[l].transpose();
      a = l + 1 < weights_.size() ? activate(z) : std::move(z);
    }
    return a.col(0);
  }

  Vector predict_proba(const Eigen::Ref<const Matrix>& X) const {
    return logits(X).unaryExpr([](Scalar z) { return sigmoid(z); });
  }

  /// Mean binary cross-entropy, computed from logits without overflow.
  Scalar loss(const Eigen::Ref<const Matrix>& X, const Eigen::Ref<const Eigen::VectorXi>& y) const {
    const Vector z = logits(X);
    Scalar total = 0;
    for (Eigen::Index i = 0; i < z.size(); ++i) total += softplus(z(i)) - (y(i) ? z(i) : Scalar(0));
    return total / static_cast<Scalar>(z.size());
  }

  /// Backpropagated gradient of loss(X, y).
  Gradient gradient(const Eigen::Ref<const Matrix>& X, const Eigen::Ref<const Eigen::VectorXi>& y) const {
    const std::size_t L = weights_.size();
    std::vector<Matrix> pre(L), post(L + 1);
    post[0] = X;
    for (std::size_t l = 0; l < L; ++l) {
      pre[l] = (post[l] * weights_[l].transpose()).rowwise() + biases_[l].transpose();
      post[l + 1] = l + 1 < L ? activate(pre[l]) : pre[l];
    }
    Gradient g;
    g.weights.resize(L);
    g.biases.resize(L);
    const Scalar inv_n = Scalar(1) / static_cast<Scalar>(X.rows());
    Matrix delta(X.rows(), 1);
    for (Eigen::Index i = 0; i < X.rows(); ++i) delta(i, 0) = (sigmoid(pre[L - 1](i, 0)) - Scalar(y(i))) * inv_n;
    for (std::size_t l = L; l-- > 0;) {
      g.weights[l] = delta.transpose() * post[l];
      g.biases[l] = delta.colwise().sum().transpose();
      if (l > 0) delta = (delta * weights_[l]).cwiseProduct(derivative(pre[l - 1]));
    }
    return g;
  }

  /// All parameters in layer order, weights (column-major) before biases.
  Vector flatten() const {
    Vector out(static_cast<Eigen::Index>(parameter_count()));
    Eigen::Index k = 0;
    for (std::size_t l = 0; l < weights_.size(); ++l) {
      out.segment(k, weights_[l].size()) = weights_[l].reshaped();
      k += weights_[l].size();
      out.segment(k, biases_[l].size()) = biases_[l];
      k += biases_[l].size();
    }
    return out;
  }

  void unflatten(const Eigen::Ref<const Vector>& params) {
    if (params.size() != static_cast<Eigen::Index>(parameter_count()))
      throw Error(ErrorKind::InvalidArgument, "parameter vector has the wrong length");
    Eigen::Index k = 0;
    for (std::size_t l = 0; l < weights_.size(); ++l) {
      weights_[l].reshaped() = params.segment(k, weights_[l].size());
      k += weights_[l].size();
      biases_[l] = params.segment(k, biases_[l].size());
      k += biases_[l].size();
    }
  }

  static Vector flatten(const Gradient& g) {
    Eigen::Index n = 0;
    for (std::size_t l = 0; l < g.weights.size(); ++l) n += g.weights[l].size() + g.biases[l].size();
    Vector out(n);
    Eigen::Index k = 0;
    for (std::size_t l = 0; l < g.weights.size(); ++l) {
      out.segment(k, g.weights[l].size()) = g.weights[l].reshaped();
      k += g.weights[l].size();
      out.segment(k, g.biases[l].size()) = g.biases[l];
      k += g.biases[l].size();
    }
    return out;
  }

  static Scalar sigmoid(Scalar z) {
    using std::exp;
    return z >= Scalar(0) ? Scalar(1) / (Scalar(1) + exp(-z)) : exp(z) / (Scalar(1) + exp(z));
  }

 private:
  static Scalar softplus(Scalar z) {
    using std::exp;
    using std::log1p;
    return z > Scalar(0) ? z + log1p(exp(-z)) : log1p(exp(z));
  }

  Matrix activate(const Matrix& z) const {
    if (activation_ == Activation::Relu) return z.cwiseMax(Scalar(0));
    return z.array().tanh().matrix();
  }

  Matrix derivative(const Matrix& z) const {
    if (activation_ == Activation::Relu) return (z.array() > Scalar(0)).template cast<Scalar>().matrix();
    return (Scalar(1) - z.array().tanh().square()).matrix();
  }

  std::vector<Matrix> weights_;
  std::vector<Vector> biases_;
  Activation activation_ = Activation::Relu;
};

using AnnNetwork = MultilayerPerceptron<double>;

struct AnnModel {
  AnnNetwork network;
  AnnConfig config;
  std::uint64_t seed = 0;
  std::vector<double> loss_trace;  // full training loss after each epoch

  Eigen::VectorXd predict_proba(const Eigen::Ref<const Eigen::MatrixXd>& X) const { return network.predict_proba(X); }
};

/// The network train_ann starts from for this (config, seed).
AnnNetwork initial_network(const AnnConfig& config, std::uint64_t seed);

/// Mini-batch Adam on mean binary cross-entropy for exactly config.epochs
/// epochs; rows are reshuffled every epoch from a seeded stream.
AnnModel train_ann(const Eigen::Ref<const Eigen::MatrixXd>& X, const Eigen::Ref<const Eigen::VectorXi>& y,
                   const AnnConfig& config, std::uint64_t seed);

nlohmann::json to_json(const AnnConfig& c);
AnnConfig ann_config_from_json(const nlohmann::json& j, AnnConfig base = {});
nlohmann::json to_json(const AnnModel& m);
AnnModel ann_from_json(const nlohmann::json& j);

}  // namespace hemascreen
