#include <algorithm>
#include <random>
#include <string>

#include "skelattack/classifier.hpp"
#include "skelattack/error.hpp"
#include "skelattack/kernels.hpp"

namespace skelattack {

std::vector<double> EmotionExtractor::features(std::span<const double> input) const {
  if (input.size() != input_shape().flat_size()) fail_validation("input length does not match extractor input shape");
  return features_impl(input);
}

std::vector<double> EmotionExtractor::features(const JointField& input) const {
  const auto shape = input_shape();
  if (input.frames() != shape.frames || input.joints() != shape.joints)
    fail_validation("input shape does not match extractor input shape");
  return features_impl(input.values());
}

std::vector<double> EmotionExtractor::input_gradient(std::span<const double> input,
                                                     std::span<const double> cotangent) const {
  if (input.size() != input_shape().flat_size()) fail_validation("input length does not match extractor input shape");
  if (cotangent.size() != static_cast<std::size_t>(feature_dim()))
    fail_validation("cotangent length does not match feature dimension");
  return input_gradient_impl(input, cotangent);
}

JointField EmotionExtractor::input_gradient(const JointField& input, std::span<const double> cotangent) const {
  const auto shape = input_shape();
  if (input.frames() != shape.frames || input.joints() != shape.joints)
    fail_validation("input shape does not match extractor input shape");
  return JointField(input.frames(), input.joints(), input_gradient(input.values(), cotangent));
}

GroupedEmotionExtractor::GroupedEmotionExtractor(InputShape shape, std::vector<std::vector<int>> groups,
                                                 std::vector<DenseLayer> projections, std::uint64_t seed)
    : EmotionExtractor(seed), shape_(shape), groups_(std::move(groups)), projections_(std::move(projections)) {
  if (shape_.frames <= 0 || shape_.joints <= 0) fail_validation("extractor input shape must be positive");
  if (groups_.empty()) fail_validation("extractor needs at least one joint group");
  if (groups_.size() != projections_.size()) fail_validation("one projection per joint group required");
  std::vector<int> owner(static_cast<std::size_t>(shape_.joints), -1);
  for (std::size_t g = 0; g < groups_.size(); ++g) {
    if (groups_[g].empty()) fail_validation("empty joint group");
    for (int j : groups_[g]) {
      if (j < 0 || j >= shape_.joints) fail_validation("group joint index out of range");
      if (owner[static_cast<std::size_t>(j)] != -1) fail_validation("joint groups overlap");
      owner[static_cast<std::size_t>(j)] = static_cast<int>(g);
    }
    const auto& p = projections_[g];
    p.validate();
    if (p.inputs != static_cast<int>(groups_[g].size()) * 3)
      fail_validation("group projection input width must be 3 x group size");
    if (p.activation != Activation::none) fail_validation("group projections are linear");
    feature_dim_ += p.outputs;
  }
  for (int o : owner)
    if (o == -1) fail_validation("joint groups must partition all joints");
}

GroupedEmotionExtractor GroupedEmotionExtractor::make_default(InputShape shape, std::uint64_t seed, int group_count,
                                                              int features_per_group) {
  if (group_count <= 0 || features_per_group <= 0) fail_validation("group and feature counts must be positive");
  group_count = std::min(group_count, shape.joints);
  std::vector<std::vector<int>> groups(static_cast<std::size_t>(group_count));
  for (int j = 0; j < shape.joints; ++j)
    groups[static_cast<std::size_t>(j * group_count / shape.joints)].push_back(j);
  std::mt19937_64 rng(seed);
  std::vector<DenseLayer> projections;
  for (const auto& g : groups) {
    const int in = static_cast<int>(g.size()) * 3;
    DenseLayer l{in, features_per_group, {}, std::vector<double>(static_cast<std::size_t>(features_per_group), 0.0),
                 Activation::none};
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    l.weights.resize(static_cast<std::size_t>(in) * static_cast<std::size_t>(features_per_group));
    for (double& w : l.weights) w = dist(rng);
    projections.push_back(std::move(l));
  }
  return GroupedEmotionExtractor(shape, std::move(groups), std::move(projections), seed);
}

std::vector<double> GroupedEmotionExtractor::pooled(std::span<const double> input, const std::vector<int>& group) const {
  std::vector<double> out(group.size() * 3, 0.0);
  const auto joints = static_cast<std::size_t>(shape_.joints);
  for (int t = 0; t < shape_.frames; ++t)
    for (std::size_t k = 0; k < group.size(); ++k)
      for (std::size_t a = 0; a < 3; ++a)
        out[k * 3 + a] += input[(static_cast<std::size_t>(t) * joints + static_cast<std::size_t>(group[k])) * 3 + a];
  for (double& v : out) v /= shape_.frames;
  return out;
}

std::vector<double> GroupedEmotionExtractor::features_impl(std::span<const double> input) const {
  const auto& k = kernels::active();
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(feature_dim_));
  for (std::size_t g = 0; g < groups_.size(); ++g) {
    const auto& p = projections_[g];
    auto pool = pooled(input, groups_[g]);
    std::vector<double> y(static_cast<std::size_t>(p.outputs));
    k.gemv(p.weights.data(), static_cast<std::size_t>(p.outputs), static_cast<std::size_t>(p.inputs), pool.data(),
           p.bias.data(), y.data());
    out.insert(out.end(), y.begin(), y.end());
  }
  return out;
}

std::vector<double> GroupedEmotionExtractor::input_gradient_impl(std::span<const double> input,
                                                                 std::span<const double> cotangent) const {
  (void)input;  // the map is affine
  const auto& k = kernels::active();
  std::vector<double> grad(shape_.flat_size(), 0.0);
  const auto joints = static_cast<std::size_t>(shape_.joints);
  std::size_t offset = 0;
  for (std::size_t g = 0; g < groups_.size(); ++g) {
    const auto& p = projections_[g];
    std::vector<double> dpool(static_cast<std::size_t>(p.inputs), 0.0);
    k.gemv_t_acc(p.weights.data(), static_cast<std::size_t>(p.outputs), static_cast<std::size_t>(p.inputs),
                 cotangent.data() + offset, dpool.data());
    offset += static_cast<std::size_t>(p.outputs);
    const auto& group = groups_[g];
    for (int t = 0; t < shape_.frames; ++t)
      for (std::size_t m = 0; m < group.size(); ++m)
        for (std::size_t a = 0; a < 3; ++a)
          grad[(static_cast<std::size_t>(t) * joints + static_cast<std::size_t>(group[m])) * 3 + a] =
              dpool[m * 3 + a] / shape_.frames;
  }
  return grad;
}

}  // namespace skelattack
