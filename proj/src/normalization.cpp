#include <algorithm>
#include <limits>
#include <string>

#include "skelattack/dataset.hpp"
#include "skelattack/error.hpp"

namespace skelattack {

JointField NormalizationTransform::normalize(const JointField& raw) const {
  JointField out = raw;
  auto v = out.values();
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = (v[i] - offset[i % 3]) / scale[i % 3];
  return out;
}

JointField NormalizationTransform::denormalize(const JointField& normalized) const {
  JointField out = normalized;
  auto v = out.values();
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = v[i] * scale[i % 3] + offset[i % 3];
  return out;
}

NormalizationTransform NormalizationTransform::compose(const NormalizationTransform& inner) const {
  NormalizationTransform out;
  for (int a = 0; a < 3; ++a) {
    out.offset[a] = inner.offset[a] + inner.scale[a] * offset[a];
    out.scale[a] = inner.scale[a] * scale[a];
  }
  return out;
}

std::string_view split_name(Split s) { return s == Split::train ? "train" : "test"; }

Split parse_split(std::string_view s) {
  if (s == "train") return Split::train;
  if (s == "test") return Split::test;
  fail_validation("unknown split '" + std::string(s) + "'");
}

void MotionDataset::validate() const {
  if (class_count <= 0) fail_validation("dataset class_count must be positive");
  if (splits.size() != motions.size()) fail_validation("dataset split tags do not match motion count");
  for (int a = 0; a < 3; ++a)
    if (!(normalization.scale[a] > 0.0)) fail_validation("normalization scale must be positive");
  for (std::size_t i = 0; i < motions.size(); ++i) {
    const auto& m = motions[i];
    if (!(m.topology() == motions.front().topology()))
      fail_validation("motion " + std::to_string(i) + " has a different topology");
    if (m.label() && *m.label() >= class_count)
      fail_validation("motion " + std::to_string(i) + " label out of range");
  }
}

std::vector<std::size_t> MotionDataset::indices(Split split) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < splits.size(); ++i)
    if (splits[i] == split) out.push_back(i);
  return out;
}

std::pair<MotionDataset, NormalizationTransform> normalize_dataset(const MotionDataset& dataset) {
  if (dataset.motions.empty()) fail_validation("cannot normalize an empty dataset");
  std::array<double, 3> lo{}, hi{};
  lo.fill(std::numeric_limits<double>::infinity());
  hi.fill(-std::numeric_limits<double>::infinity());
  for (const auto& m : dataset.motions) {
    auto v = m.positions().values();
    for (std::size_t i = 0; i < v.size(); ++i) {
      lo[i % 3] = std::min(lo[i % 3], v[i]);
      hi[i % 3] = std::max(hi[i % 3], v[i]);
    }
  }
  NormalizationTransform t;
  for (int a = 0; a < 3; ++a) {
    t.offset[a] = lo[a];
    t.scale[a] = hi[a] > lo[a] ? hi[a] - lo[a] : 1.0;
  }
  MotionDataset out;
  out.class_count = dataset.class_count;
  out.splits = dataset.splits;
  out.normalization = t.compose(dataset.normalization);
  out.motions.reserve(dataset.motions.size());
  for (const auto& m : dataset.motions) out.motions.push_back(m.with_positions(t.normalize(m.positions())));
  return {std::move(out), t};
}

}  // namespace skelattack
