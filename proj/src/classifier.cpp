#include "skelattack/classifier.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "skelattack/error.hpp"
#include "skelattack/kernels.hpp"

namespace skelattack {

std::string_view activation_name(Activation a) { return a == Activation::tanh ? "tanh" : "none"; }

Activation parse_activation(std::string_view name) {
  if (name == "tanh") return Activation::tanh;
  if (name == "none") return Activation::none;
  fail_validation("unknown activation '" + std::string(name) + "'");
}

void DenseLayer::validate() const {
  if (inputs <= 0 || outputs <= 0) fail_validation("dense layer dimensions must be positive");
  if (weights.size() != static_cast<std::size_t>(inputs) * static_cast<std::size_t>(outputs))
    fail_validation("dense layer weight count does not match " + std::to_string(outputs) + "x" + std::to_string(inputs));
  if (bias.size() != static_cast<std::size_t>(outputs)) fail_validation("dense layer bias length mismatch");
  for (double w : weights)
    if (!std::isfinite(w)) fail_validation("dense layer has a non-finite weight");
  for (double b : bias)
    if (!std::isfinite(b)) fail_validation("dense layer has a non-finite bias");
}

// --- ClassifierModel --------------------------------------------------------

std::span<const double> ClassifierModel::checked(const JointField& input) const {
  const auto shape = input_shape();
  if (input.frames() != shape.frames || input.joints() != shape.joints)
    fail_validation("input shape " + std::to_string(input.frames()) + "x" + std::to_string(input.joints()) +
                    " does not match model input " + std::to_string(shape.frames) + "x" + std::to_string(shape.joints));
  return input.values();
}

std::vector<double> ClassifierModel::forward(std::span<const double> input) const {
  if (input.size() != input_shape().flat_size()) fail_validation("input length does not match model input shape");
  return forward_impl(input);
}

std::vector<double> ClassifierModel::input_gradient(std::span<const double> input,
                                                    std::span<const double> cotangent) const {
  if (input.size() != input_shape().flat_size()) fail_validation("input length does not match model input shape");
  if (cotangent.size() != static_cast<std::size_t>(class_count()))
    fail_validation("cotangent length does not match class count");
  return input_gradient_impl(input, cotangent);
}

JointField ClassifierModel::input_gradient(const JointField& input, std::span<const double> cotangent) const {
  auto g = input_gradient(checked(input), cotangent);
  return JointField(input.frames(), input.joints(), std::move(g));
}

// --- DenseNetwork -----------------------------------------------------------

DenseNetwork::DenseNetwork(InputShape shape, std::vector<DenseLayer> layers, std::uint64_t seed)
    : ClassifierModel(seed), shape_(shape), layers_(std::move(layers)) {
  if (shape_.frames <= 0 || shape_.joints <= 0) fail_validation("model input shape must be positive");
  if (layers_.empty()) fail_validation("network needs at least one layer");
  int width = static_cast<int>(shape_.flat_size());
  for (const auto& l : layers_) {
    l.validate();
    if (l.inputs != width) fail_validation("layer input width does not match previous layer");
    width = l.outputs;
  }
}

void DenseNetwork::forward_trace(std::span<const double> input, Trace& trace) const {
  const auto& k = kernels::active();
  trace.resize(layers_.size() + 1);
  trace[0].assign(input.begin(), input.end());
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    const auto& l = layers_[i];
    auto& out = trace[i + 1];
    out.resize(static_cast<std::size_t>(l.outputs));
    k.gemv(l.weights.data(), static_cast<std::size_t>(l.outputs), static_cast<std::size_t>(l.inputs), trace[i].data(),
           l.bias.data(), out.data());
    if (l.activation == Activation::tanh)
      for (double& v : out) v = std::tanh(v);
  }
}

std::vector<double> DenseNetwork::forward_impl(std::span<const double> input) const {
  const auto& k = kernels::active();
  std::vector<double> cur(input.begin(), input.end());
  std::vector<double> next;
  for (const auto& l : layers_) {
    next.resize(static_cast<std::size_t>(l.outputs));
    k.gemv(l.weights.data(), static_cast<std::size_t>(l.outputs), static_cast<std::size_t>(l.inputs), cur.data(),
           l.bias.data(), next.data());
    if (l.activation == Activation::tanh)
      for (double& v : next) v = std::tanh(v);
    cur.swap(next);
  }
  return cur;
}

namespace {

// Cotangent at the pre-activation of layer i, given the cotangent at its output.
void through_activation(const DenseLayer& l, const std::vector<double>& output, std::vector<double>& cot) {
  if (l.activation == Activation::tanh)
    for (std::size_t r = 0; r < cot.size(); ++r) cot[r] *= 1.0 - output[r] * output[r];
}

}  // namespace

std::vector<double> DenseNetwork::input_gradient_impl(std::span<const double> input,
                                                      std::span<const double> cotangent) const {
  const auto& k = kernels::active();
  Trace trace;
  forward_trace(input, trace);
  std::vector<double> cot(cotangent.begin(), cotangent.end());
  std::vector<double> prev;
  for (std::size_t i = layers_.size(); i-- > 0;) {
    const auto& l = layers_[i];
    through_activation(l, trace[i + 1], cot);
    prev.assign(static_cast<std::size_t>(l.inputs), 0.0);
    k.gemv_t_acc(l.weights.data(), static_cast<std::size_t>(l.outputs), static_cast<std::size_t>(l.inputs), cot.data(),
                 prev.data());
    cot.swap(prev);
  }
  return cot;
}

void DenseNetwork::accumulate_parameter_gradient(const Trace& trace, std::span<const double> cotangent,
                                                 std::vector<DenseLayer>& grads) const {
  const auto& k = kernels::active();
  std::vector<double> cot(cotangent.begin(), cotangent.end());
  std::vector<double> prev;
  for (std::size_t i = layers_.size(); i-- > 0;) {
    const auto& l = layers_[i];
    auto& g = grads[i];
    through_activation(l, trace[i + 1], cot);
    k.ger(1.0, cot.data(), static_cast<std::size_t>(l.outputs), trace[i].data(), static_cast<std::size_t>(l.inputs),
          g.weights.data());
    k.axpy(1.0, cot.data(), g.bias.data(), cot.size());
    if (i == 0) break;
    prev.assign(static_cast<std::size_t>(l.inputs), 0.0);
    k.gemv_t_acc(l.weights.data(), static_cast<std::size_t>(l.outputs), static_cast<std::size_t>(l.inputs), cot.data(),
                 prev.data());
    cot.swap(prev);
  }
}

namespace {

DenseLayer glorot_layer(int inputs, int outputs, Activation act, std::mt19937_64& rng) {
  DenseLayer l{inputs, outputs, {}, std::vector<double>(static_cast<std::size_t>(outputs), 0.0), act};
  const double limit = std::sqrt(6.0 / (inputs + outputs));
  std::uniform_real_distribution<double> dist(-limit, limit);
  l.weights.resize(static_cast<std::size_t>(inputs) * static_cast<std::size_t>(outputs));
  for (double& w : l.weights) w = dist(rng);
  return l;
}

}  // namespace

MlpClassifier::MlpClassifier(InputShape shape, std::vector<DenseLayer> layers, std::uint64_t seed)
    : DenseNetwork(shape, std::move(layers), seed) {
  const auto& ls = this->layers();
  if (ls.size() != 3 || ls[0].activation != Activation::tanh || ls[1].activation != Activation::tanh ||
      ls[2].activation != Activation::none)
    fail_validation("mlp classifier expects layers tanh, tanh, none");
}

MlpClassifier MlpClassifier::initialize(InputShape shape, int class_count, int hidden1, int hidden2,
                                        std::uint64_t seed) {
  if (class_count < 2) fail_validation("classifier needs at least 2 classes");
  std::mt19937_64 rng(seed);
  const int in = static_cast<int>(shape.flat_size());
  std::vector<DenseLayer> layers;
  layers.push_back(glorot_layer(in, hidden1, Activation::tanh, rng));
  layers.push_back(glorot_layer(hidden1, hidden2, Activation::tanh, rng));
  layers.push_back(glorot_layer(hidden2, class_count, Activation::none, rng));
  return MlpClassifier(shape, std::move(layers), seed);
}

LinearClassifier::LinearClassifier(InputShape shape, std::vector<double> weights, std::vector<double> bias,
                                   std::uint64_t seed)
    : DenseNetwork(shape,
                   {DenseLayer{static_cast<int>(shape.flat_size()), static_cast<int>(bias.size()), std::move(weights),
                               bias, Activation::none}},
                   seed) {}

LinearClassifier LinearClassifier::initialize(InputShape shape, int class_count, std::uint64_t seed) {
  if (class_count < 2) fail_validation("classifier needs at least 2 classes");
  std::mt19937_64 rng(seed);
  auto l = glorot_layer(static_cast<int>(shape.flat_size()), class_count, Activation::none, rng);
  return LinearClassifier(shape, std::move(l.weights), std::move(l.bias), seed);
}

// --- softmax ----------------------------------------------------------------

std::vector<double> softmax(std::span<const double> logits) {
  std::vector<double> p(logits.begin(), logits.end());
  if (p.empty()) return p;
  const double shift = *std::max_element(p.begin(), p.end());
  double total = 0.0;
  for (double& v : p) total += (v = std::exp(v - shift));
  for (double& v : p) v /= total;
  return p;
}

int argmax(std::span<const double> values) {
  if (values.empty()) fail_validation("argmax of an empty vector");
  return static_cast<int>(std::max_element(values.begin(), values.end()) - values.begin());
}

double cross_entropy(std::span<const double> logits, int label) {
  const double shift = *std::max_element(logits.begin(), logits.end());
  double total = 0.0;
  for (double v : logits) total += std::exp(v - shift);
  return std::log(total) + shift - logits[static_cast<std::size_t>(label)];
}

}  // namespace skelattack
