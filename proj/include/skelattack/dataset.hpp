#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <string_view>
#include <utility>
#include <vector>

#include "skelattack/motion.hpp"

namespace skelattack {

/// Per-axis affine map raw -> (raw - offset) / scale.
struct NormalizationTransform {
  std::array<double, 3> offset{0.0, 0.0, 0.0};
  std::array<double, 3> scale{1.0, 1.0, 1.0};

  JointField normalize(const JointField& raw) const;
  JointField denormalize(const JointField& normalized) const;
  /// `this` applied after `inner`.
  NormalizationTransform compose(const NormalizationTransform& inner) const;

  friend bool operator==(const NormalizationTransform&, const NormalizationTransform&) = default;
};

enum class Split { train, test };

std::string_view split_name(Split s);
Split parse_split(std::string_view s);

struct MotionDataset {
  int class_count = 0;
  NormalizationTransform normalization;
  std::vector<SkeletonMotion> motions;
  std::vector<Split> splits;

  /// Shared topology, label range, one split tag per motion.
  void validate() const;
  std::vector<std::size_t> indices(Split split) const;
  const std::shared_ptr<const SkeletonTopology>& topology_ptr() const { return motions.front().topology_ptr(); }
};

/// Fits one min-max transform over every motion of the dataset and applies it.
/// The returned dataset records the composed raw -> normalized transform.
std::pair<MotionDataset, NormalizationTransform> normalize_dataset(const MotionDataset& dataset);

struct SyntheticSpec {
  std::uint64_t seed = 0;
  int class_count = 5;
  int samples_per_class = 100;
  int frames = 32;
  std::shared_ptr<const SkeletonTopology> topology;
  /// Standard deviation of the per-coordinate jitter in raw units (bone ~ 1).
  double noise = 0.02;
  double test_fraction = 0.3;
};

/// Class-conditional sinusoidal kinematic trajectories, normalized to [0,1].
MotionDataset generate_synthetic_dataset(const SyntheticSpec& spec);

}  // namespace skelattack
