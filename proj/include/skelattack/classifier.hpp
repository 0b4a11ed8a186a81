#pragma once

// Differentiable victim models. Every model maps a flattened T x J x 3 motion
// to pre-softmax logits and exposes the exact vector-Jacobian product with
// respect to its input, which is all the attack needs.

#include <cstdint>
#include <memory>
#include <span>
#include <string_view>
#include <vector>

#include "skelattack/dataset.hpp"
#include "skelattack/motion.hpp"

namespace skelattack {

enum class Activation { none, tanh };

std::string_view activation_name(Activation a);
Activation parse_activation(std::string_view name);

struct InputShape {
  int frames = 0;
  int joints = 0;
  std::size_t flat_size() const { return static_cast<std::size_t>(frames) * static_cast<std::size_t>(joints) * 3; }
  friend bool operator==(const InputShape&, const InputShape&) = default;
};

/// y = act(W x + b), W row-major outputs x inputs.
struct DenseLayer {
  int inputs = 0;
  int outputs = 0;
  std::vector<double> weights;
  std::vector<double> bias;
  Activation activation = Activation::none;

  void validate() const;
  friend bool operator==(const DenseLayer&, const DenseLayer&) = default;
};

class ClassifierModel {
 public:
  virtual ~ClassifierModel() = default;

  virtual std::string_view kind() const = 0;
  virtual int class_count() const = 0;
  virtual InputShape input_shape() const = 0;
  std::uint64_t seed() const { return seed_; }

  std::vector<double> forward(std::span<const double> input) const;
  std::vector<double> forward(const JointField& input) const { return forward(checked(input)); }
  std::vector<double> forward(const SkeletonMotion& m) const { return forward(m.positions()); }

  /// Gradient of <forward(input), cotangent> with respect to the input.
  std::vector<double> input_gradient(std::span<const double> input, std::span<const double> cotangent) const;
  JointField input_gradient(const JointField& input, std::span<const double> cotangent) const;
  JointField input_gradient(const SkeletonMotion& m, std::span<const double> cotangent) const {
    return input_gradient(m.positions(), cotangent);
  }

 protected:
  explicit ClassifierModel(std::uint64_t seed) : seed_(seed) {}

 private:
  virtual std::vector<double> forward_impl(std::span<const double> input) const = 0;
  virtual std::vector<double> input_gradient_impl(std::span<const double> input,
                                                  std::span<const double> cotangent) const = 0;
  std::span<const double> checked(const JointField& input) const;

  std::uint64_t seed_;
};

/// Stack of dense layers over the flattened motion.
class DenseNetwork : public ClassifierModel {
 public:
  DenseNetwork(InputShape shape, std::vector<DenseLayer> layers, std::uint64_t seed);

  int class_count() const override { return layers_.back().outputs; }
  InputShape input_shape() const override { return shape_; }
  const std::vector<DenseLayer>& layers() const { return layers_; }
  std::vector<DenseLayer>& mutable_layers() { return layers_; }

  /// Per-layer outputs (post-activation); entry 0 is the input itself.
  using Trace = std::vector<std::vector<double>>;
  void forward_trace(std::span<const double> input, Trace& trace) const;
  /// Adds d<logits, cotangent>/d(params) into `grads` (same layout as layers()).
  void accumulate_parameter_gradient(const Trace& trace, std::span<const double> cotangent,
                                     std::vector<DenseLayer>& grads) const;

 private:
  std::vector<double> forward_impl(std::span<const double> input) const override;
  std::vector<double> input_gradient_impl(std::span<const double> input,
                                          std::span<const double> cotangent) const override;

  InputShape shape_;
  std::vector<DenseLayer> layers_;
};

/// Two tanh hidden layers followed by a linear read-out.
class MlpClassifier final : public DenseNetwork {
 public:
  MlpClassifier(InputShape shape, std::vector<DenseLayer> layers, std::uint64_t seed);
  /// Glorot-uniform weights, zero biases.
  static MlpClassifier initialize(InputShape shape, int class_count, int hidden1, int hidden2, std::uint64_t seed);
  std::string_view kind() const override { return "mlp"; }
};

/// Affine logits W v + b of the flattened coordinates v.
class LinearClassifier final : public DenseNetwork {
 public:
  LinearClassifier(InputShape shape, std::vector<double> weights, std::vector<double> bias, std::uint64_t seed = 0);
  static LinearClassifier initialize(InputShape shape, int class_count, std::uint64_t seed);
  std::string_view kind() const override { return "linear"; }
};

/// Numerically stable (max-shifted) softmax.
std::vector<double> softmax(std::span<const double> logits);
/// Index of the largest entry; ties go to the lowest index.
int argmax(std::span<const double> values);
/// -log softmax(logits)[label], computed in log space.
double cross_entropy(std::span<const double> logits, int label);

// --- emotion features -------------------------------------------------------

class EmotionExtractor {
 public:
  virtual ~EmotionExtractor() = default;
  virtual int feature_dim() const = 0;
  virtual InputShape input_shape() const = 0;
  std::uint64_t seed() const { return seed_; }

  std::vector<double> features(std::span<const double> input) const;
  std::vector<double> features(const JointField& input) const;
  std::vector<double> input_gradient(std::span<const double> input, std::span<const double> cotangent) const;
  JointField input_gradient(const JointField& input, std::span<const double> cotangent) const;

 protected:
  explicit EmotionExtractor(std::uint64_t seed) : seed_(seed) {}

 private:
  virtual std::vector<double> features_impl(std::span<const double> input) const = 0;
  virtual std::vector<double> input_gradient_impl(std::span<const double> input,
                                                  std::span<const double> cotangent) const = 0;
  std::uint64_t seed_;
};

/// Joints are partitioned into groups; each group's coordinates are averaged
/// over time and projected linearly by that group's own weights. Features are
/// the concatenation over groups.
class GroupedEmotionExtractor final : public EmotionExtractor {
 public:
  GroupedEmotionExtractor(InputShape shape, std::vector<std::vector<int>> groups, std::vector<DenseLayer> projections,
                          std::uint64_t seed);
  /// Contiguous, near-equal joint groups with seeded uniform weights.
  static GroupedEmotionExtractor make_default(InputShape shape, std::uint64_t seed, int group_count = 4,
                                              int features_per_group = 4);

  int feature_dim() const override { return feature_dim_; }
  InputShape input_shape() const override { return shape_; }
  const std::vector<std::vector<int>>& groups() const { return groups_; }
  const std::vector<DenseLayer>& projections() const { return projections_; }

 private:
  std::vector<double> features_impl(std::span<const double> input) const override;
  std::vector<double> input_gradient_impl(std::span<const double> input,
                                          std::span<const double> cotangent) const override;
  std::vector<double> pooled(std::span<const double> input, const std::vector<int>& group) const;

  InputShape shape_;
  std::vector<std::vector<int>> groups_;
  std::vector<DenseLayer> projections_;
  int feature_dim_ = 0;
};

// --- training ---------------------------------------------------------------

enum class Architecture { mlp, linear };

struct TrainConfig {
  Architecture architecture = Architecture::mlp;
  int hidden1 = 64;
  int hidden2 = 64;
  std::uint64_t seed = 0;
  int epochs = 200;
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

struct TrainingReport {
  /// Mean train cross-entropy before each epoch's update, plus the final value.
  std::vector<double> loss_history;
  double train_accuracy = 0.0;
  double test_accuracy = 0.0;
};

struct TrainedClassifier {
  std::unique_ptr<DenseNetwork> model;
  TrainingReport report;
};

/// Full-batch Adam on mean cross-entropy over the train split.
TrainedClassifier train_classifier(const MotionDataset& dataset, const TrainConfig& config);

/// Fraction of `split` motions whose argmax logit equals the label. Returns 0
/// for an empty split.
double accuracy(const ClassifierModel& model, const MotionDataset& dataset, Split split);

}  // namespace skelattack
