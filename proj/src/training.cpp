#include <cmath>

#include "skelattack/classifier.hpp"
#include "skelattack/error.hpp"

namespace skelattack {

namespace {

std::vector<DenseLayer> zeros_like(const std::vector<DenseLayer>& layers) {
  std::vector<DenseLayer> out = layers;
  for (auto& l : out) {
    std::fill(l.weights.begin(), l.weights.end(), 0.0);
    std::fill(l.bias.begin(), l.bias.end(), 0.0);
  }
  return out;
}

struct Moments {
  std::vector<DenseLayer> first;
  std::vector<DenseLayer> second;
};

void adam_update(std::vector<double>& param, const std::vector<double>& grad, std::vector<double>& m,
                 std::vector<double>& v, const TrainConfig& cfg, double c1, double c2) {
  for (std::size_t i = 0; i < param.size(); ++i) {
    m[i] = cfg.beta1 * m[i] + (1.0 - cfg.beta1) * grad[i];
    v[i] = cfg.beta2 * v[i] + (1.0 - cfg.beta2) * grad[i] * grad[i];
    param[i] -= cfg.lr * (m[i] / c1) / (std::sqrt(v[i] / c2) + cfg.epsilon);
  }
}

}  // namespace

double accuracy(const ClassifierModel& model, const MotionDataset& dataset, Split split) {
  std::size_t total = 0;
  std::size_t correct = 0;
  for (std::size_t i : dataset.indices(split)) {
    const auto& m = dataset.motions[i];
    if (!m.label()) continue;
    ++total;
    correct += argmax(model.forward(m)) == *m.label();
  }
  return total == 0 ? 0.0 : static_cast<double>(correct) / static_cast<double>(total);
}

TrainedClassifier train_classifier(const MotionDataset& dataset, const TrainConfig& config) {
  if (dataset.motions.empty()) fail_validation("cannot train on an empty dataset");
  if (config.epochs < 0) fail_validation("epochs must be nonnegative");
  if (!(config.lr > 0.0)) fail_validation("learning rate must be positive");
  std::vector<std::size_t> train;
  for (std::size_t i : dataset.indices(Split::train))
    if (dataset.motions[i].label()) train.push_back(i);
  if (train.empty()) fail_validation("train split has no labelled motions");

  const auto& first = dataset.motions.front();
  const InputShape shape{first.frame_count(), first.joint_count()};
  for (const auto& m : dataset.motions)
    if (m.frame_count() != shape.frames) fail_validation("all motions must have the same frame count to train");

  TrainedClassifier out;
  if (config.architecture == Architecture::mlp)
    out.model = std::make_unique<MlpClassifier>(
        MlpClassifier::initialize(shape, dataset.class_count, config.hidden1, config.hidden2, config.seed));
  else
    out.model = std::make_unique<LinearClassifier>(LinearClassifier::initialize(shape, dataset.class_count, config.seed));

  DenseNetwork& net = *out.model;
  Moments moments{zeros_like(net.layers()), zeros_like(net.layers())};
  DenseNetwork::Trace trace;
  const double inv_n = 1.0 / static_cast<double>(train.size());

  auto epoch_pass = [&](std::vector<DenseLayer>* grads) {
    double loss = 0.0;
    for (std::size_t i : train) {
      const auto& m = dataset.motions[i];
      net.forward_trace(m.positions().values(), trace);
      const auto& logits = trace.back();
      const int label = *m.label();
      loss += cross_entropy(logits, label);
      if (!grads) continue;
      auto cot = softmax(logits);
      cot[static_cast<std::size_t>(label)] -= 1.0;
      for (double& c : cot) c *= inv_n;
      net.accumulate_parameter_gradient(trace, cot, *grads);
    }
    return loss * inv_n;
  };

  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    auto grads = zeros_like(net.layers());
    out.report.loss_history.push_back(epoch_pass(&grads));
    const double step = static_cast<double>(epoch + 1);
    const double c1 = 1.0 - std::pow(config.beta1, step);
    const double c2 = 1.0 - std::pow(config.beta2, step);
    auto& layers = net.mutable_layers();
    for (std::size_t l = 0; l < layers.size(); ++l) {
      adam_update(layers[l].weights, grads[l].weights, moments.first[l].weights, moments.second[l].weights, config, c1,
                  c2);
      adam_update(layers[l].bias, grads[l].bias, moments.first[l].bias, moments.second[l].bias, config, c1, c2);
    }
  }
  out.report.loss_history.push_back(epoch_pass(nullptr));
  out.report.train_accuracy = accuracy(net, dataset, Split::train);
  out.report.test_accuracy = accuracy(net, dataset, Split::test);
  return out;
}

}  // namespace skelattack
