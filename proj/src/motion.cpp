#include "skelattack/motion.hpp"

#include <algorithm>
#include <charconv>
#include <set>
#include <utility>

#include "skelattack/error.hpp"

namespace skelattack {

namespace {

int common_joint(const Bone& a, const Bone& b) {
  if (a.source == b.source || a.source == b.target) return a.source;
  if (a.target == b.source || a.target == b.target) return a.target;
  return -1;
}

int shared_count(const Bone& a, const Bone& b) {
  int n = 0;
  for (int ja : {a.source, a.target})
    for (int jb : {b.source, b.target}) n += (ja == jb);
  return n;
}

int other_end(const Bone& b, int joint) { return b.source == joint ? b.target : b.source; }

}  // namespace

std::vector<AnglePair> derive_angle_pairs(std::span<const Bone> bones) {
  std::vector<AnglePair> pairs;
  const int n = static_cast<int>(bones.size());
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (shared_count(bones[static_cast<std::size_t>(i)], bones[static_cast<std::size_t>(j)]) == 1)
        pairs.push_back({i, j});
  return pairs;
}

SkeletonTopology::SkeletonTopology(int joint_count, std::vector<Bone> bones)
    : joint_count_(joint_count), bones_(std::move(bones)) {
  if (joint_count_ <= 0) fail_validation("joint count must be positive");
  std::set<std::pair<int, int>> seen;
  for (std::size_t i = 0; i < bones_.size(); ++i) {
    const auto& b = bones_[i];
    if (b.source < 0 || b.source >= joint_count_ || b.target < 0 || b.target >= joint_count_)
      fail_validation("bone " + std::to_string(i) + ": joint index out of range");
    if (b.source == b.target) fail_validation("bone " + std::to_string(i) + ": self-loop bone");
    auto key = std::minmax(b.source, b.target);
    if (!seen.insert(key).second) fail_validation("bone " + std::to_string(i) + ": duplicate bone");
  }
  angle_pairs_ = derive_angle_pairs(bones_);
  shared_joints_.reserve(angle_pairs_.size());
  for (const auto& p : angle_pairs_)
    shared_joints_.push_back(common_joint(bones_[static_cast<std::size_t>(p.first)],
                                          bones_[static_cast<std::size_t>(p.second)]));
}

SkeletonTopology SkeletonTopology::chain(int joint_count) {
  std::vector<Bone> bones;
  for (int j = 0; j + 1 < joint_count; ++j) bones.push_back({j, j + 1});
  return SkeletonTopology(joint_count, std::move(bones));
}

SkeletonTopology SkeletonTopology::star(int joint_count) {
  std::vector<Bone> bones;
  for (int j = 1; j < joint_count; ++j) bones.push_back({0, j});
  return SkeletonTopology(joint_count, std::move(bones));
}

SkeletonTopology SkeletonTopology::from_name(std::string_view name) {
  auto parse_count = [&](std::string_view prefix) -> std::optional<int> {
    if (!name.starts_with(prefix)) return std::nullopt;
    auto digits = name.substr(prefix.size());
    int n = 0;
    auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), n);
    if (ec != std::errc{} || ptr != digits.data() + digits.size() || n < 2) return std::nullopt;
    return n;
  };
  if (auto n = parse_count("chain")) return chain(*n);
  if (auto n = parse_count("star")) return star(*n);
  fail_validation("unknown topology '" + std::string(name) + "' (expected chain<N> or star<N>)");
}

JointField::JointField(int frames, int joints, double fill) : frames_(frames), joints_(joints) {
  if (frames < 0 || joints < 0) fail_validation("negative field shape");
  data_.assign(static_cast<std::size_t>(frames) * static_cast<std::size_t>(joints) * 3, fill);
}

JointField::JointField(int frames, int joints, std::vector<double> values)
    : frames_(frames), joints_(joints), data_(std::move(values)) {
  if (frames < 0 || joints < 0) fail_validation("negative field shape");
  if (data_.size() != static_cast<std::size_t>(frames) * static_cast<std::size_t>(joints) * 3)
    fail_validation("field size does not match " + std::to_string(frames) + "x" + std::to_string(joints) + "x3");
}

SkeletonMotion::SkeletonMotion(std::shared_ptr<const SkeletonTopology> topology, JointField positions,
                               std::optional<int> label, std::string name)
    : topology_(std::move(topology)), positions_(std::move(positions)), label_(label), name_(std::move(name)) {
  if (!topology_) fail_validation("motion without topology");
  if (positions_.frames() <= 0) fail_validation("motion must have at least one frame");
  if (positions_.joints() != topology_->joint_count())
    fail_validation("motion joint count " + std::to_string(positions_.joints()) + " does not match topology (" +
                    std::to_string(topology_->joint_count()) + ")");
  for (double v : positions_.values())
    if (!std::isfinite(v)) fail_validation("motion '" + name_ + "' has a non-finite coordinate");
  if (label_ && *label_ < 0) fail_validation("negative label");
}

AngleJacobian bone_angle_jacobian(const Vec3& first, const Vec3& second) {
  AngleJacobian out;
  const double nu = norm(first);
  const double nv = norm(second);
  if (nu < kMinBoneLength || nv < kMinBoneLength) {
    out.degenerate = true;
    return out;
  }
  const double raw = dot(first, second) / (nu * nv);
  const double lo = -1.0 + kCosineClamp;
  const double hi = 1.0 - kCosineClamp;
  const double c = std::clamp(raw, lo, hi);
  out.angle = std::acos(c);
  if (raw <= lo || raw >= hi) {
    out.saturated = true;
    return out;
  }
  const double dangle = -1.0 / std::sqrt(1.0 - c * c);
  const double inv = 1.0 / (nu * nv);
  out.d_first = dangle * ((inv)*second - (raw / (nu * nu)) * first);
  out.d_second = dangle * ((inv)*first - (raw / (nv * nv)) * second);
  return out;
}

std::pair<Vec3, Vec3> angle_vectors(const SkeletonTopology& topology, const JointField& positions,
                                    std::size_t k, int t) {
  const auto& pair = topology.angle_pairs()[k];
  const int hub = topology.shared_joint(k);
  const auto& b1 = topology.bones()[static_cast<std::size_t>(pair.first)];
  const auto& b2 = topology.bones()[static_cast<std::size_t>(pair.second)];
  const Vec3 origin = positions.point(t, hub);
  return {positions.point(t, other_end(b1, hub)) - origin, positions.point(t, other_end(b2, hub)) - origin};
}

DynamicsTable bone_lengths(const SkeletonTopology& topology, const JointField& positions) {
  const auto& bones = topology.bones();
  DynamicsTable out{positions.frames(), static_cast<int>(bones.size()), {}};
  out.values.reserve(static_cast<std::size_t>(out.rows) * bones.size());
  for (int t = 0; t < positions.frames(); ++t)
    for (const auto& b : bones) out.values.push_back(norm(positions.point(t, b.source) - positions.point(t, b.target)));
  return out;
}

AngleTable bone_angles(const SkeletonTopology& topology, const JointField& positions) {
  const std::size_t pairs = topology.angle_pairs().size();
  AngleTable out;
  out.angles = {positions.frames(), static_cast<int>(pairs), {}};
  out.angles.values.reserve(static_cast<std::size_t>(positions.frames()) * pairs);
  out.degenerate.reserve(out.angles.values.capacity());
  for (int t = 0; t < positions.frames(); ++t) {
    for (std::size_t k = 0; k < pairs; ++k) {
      auto [u, v] = angle_vectors(topology, positions, k, t);
      auto jac = bone_angle_jacobian(u, v);
      out.angles.values.push_back(jac.angle);
      out.degenerate.push_back(jac.degenerate ? 1 : 0);
    }
  }
  return out;
}

DynamicsTable joint_speeds(const JointField& positions) {
  if (positions.frames() < 2) fail_validation("motion too short for speed");
  DynamicsTable out{positions.frames() - 1, positions.joints(), {}};
  out.values.reserve(static_cast<std::size_t>(out.rows) * static_cast<std::size_t>(out.cols));
  for (int t = 0; t + 1 < positions.frames(); ++t)
    for (int j = 0; j < positions.joints(); ++j)
      out.values.push_back(norm(positions.point(t + 1, j) - positions.point(t, j)));
  return out;
}

}  // namespace skelattack
