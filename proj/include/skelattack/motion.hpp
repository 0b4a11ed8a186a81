#pragma once

// Skeleton data model and the per-frame dynamics quantities (bone lengths,
// bone angles, joint speeds) that both the attack objective and the
// evaluation metrics are built on.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace skelattack {

/// Dot-product clamp for bone angles: cosines live in [-1 + c, 1 - c].
inline constexpr double kCosineClamp = 1e-6;
/// Bones shorter than this produce a flagged, zero angle.
inline constexpr double kMinBoneLength = 1e-8;

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  friend Vec3 operator+(const Vec3& a, const Vec3& b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
  friend Vec3 operator-(const Vec3& a, const Vec3& b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
  friend Vec3 operator*(double s, const Vec3& a) { return {s * a.x, s * a.y, s * a.z}; }
  friend bool operator==(const Vec3&, const Vec3&) = default;
};

inline double dot(const Vec3& a, const Vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
inline double norm(const Vec3& a) { return std::sqrt(dot(a, a)); }

struct Bone {
  int source = 0;
  int target = 0;
  friend bool operator==(const Bone&, const Bone&) = default;
};

/// Two bones (by index into the bone list) sharing exactly one joint.
struct AnglePair {
  int first = 0;
  int second = 0;
  friend bool operator==(const AnglePair&, const AnglePair&) = default;
  friend auto operator<=>(const AnglePair&, const AnglePair&) = default;
};

/// Every unordered pair of distinct bones sharing exactly one joint, in
/// lexicographic order of bone indices.
std::vector<AnglePair> derive_angle_pairs(std::span<const Bone> bones);

class SkeletonTopology {
 public:
  /// Throws ValidationError on out-of-range joints, self-loops or duplicates.
  SkeletonTopology(int joint_count, std::vector<Bone> bones);

  /// Path 0-1-...-(n-1).
  static SkeletonTopology chain(int joint_count);
  /// Joint 0 is the hub; every other joint hangs off it.
  static SkeletonTopology star(int joint_count);
  /// Parses "chain16", "star5", ...
  static SkeletonTopology from_name(std::string_view name);

  int joint_count() const { return joint_count_; }
  const std::vector<Bone>& bones() const { return bones_; }
  const std::vector<AnglePair>& angle_pairs() const { return angle_pairs_; }
  /// Joint shared by the two bones of angle pair `k`.
  int shared_joint(std::size_t k) const { return shared_joints_[k]; }

  friend bool operator==(const SkeletonTopology& a, const SkeletonTopology& b) {
    return a.joint_count_ == b.joint_count_ && a.bones_ == b.bones_;
  }

 private:
  int joint_count_;
  std::vector<Bone> bones_;
  std::vector<AnglePair> angle_pairs_;
  std::vector<int> shared_joints_;
};

/// Dense T x J x 3 array of reals, row-major (frame, joint, axis). Used for
/// coordinates and for gradients with respect to coordinates.
class JointField {
 public:
  JointField() = default;
  JointField(int frames, int joints, double fill = 0.0);
  JointField(int frames, int joints, std::vector<double> values);

  int frames() const { return frames_; }
  int joints() const { return joints_; }
  std::size_t size() const { return data_.size(); }
  bool same_shape(const JointField& other) const {
    return frames_ == other.frames_ && joints_ == other.joints_;
  }

  double& operator()(int t, int j, int axis) { return data_[index(t, j, axis)]; }
  double operator()(int t, int j, int axis) const { return data_[index(t, j, axis)]; }

  Vec3 point(int t, int j) const {
    const double* p = &data_[index(t, j, 0)];
    return {p[0], p[1], p[2]};
  }
  void add_point(int t, int j, const Vec3& v) {
    double* p = &data_[index(t, j, 0)];
    p[0] += v.x;
    p[1] += v.y;
    p[2] += v.z;
  }
  void set_point(int t, int j, const Vec3& v) {
    double* p = &data_[index(t, j, 0)];
    p[0] = v.x;
    p[1] = v.y;
    p[2] = v.z;
  }

  std::span<double> values() { return data_; }
  std::span<const double> values() const { return data_; }
  std::span<const double> frame(int t) const {
    return std::span<const double>(data_).subspan(index(t, 0, 0), static_cast<std::size_t>(joints_) * 3);
  }

  friend bool operator==(const JointField&, const JointField&) = default;

 private:
  std::size_t index(int t, int j, int axis) const {
    return (static_cast<std::size_t>(t) * static_cast<std::size_t>(joints_) + static_cast<std::size_t>(j)) * 3 +
           static_cast<std::size_t>(axis);
  }

  int frames_ = 0;
  int joints_ = 0;
  std::vector<double> data_;
};

class SkeletonMotion {
 public:
  /// Validates shape against the topology and finiteness of every coordinate.
  SkeletonMotion(std::shared_ptr<const SkeletonTopology> topology, JointField positions,
                 std::optional<int> label = std::nullopt, std::string name = {});

  const SkeletonTopology& topology() const { return *topology_; }
  const std::shared_ptr<const SkeletonTopology>& topology_ptr() const { return topology_; }
  int frame_count() const { return positions_.frames(); }
  int joint_count() const { return positions_.joints(); }
  const JointField& positions() const { return positions_; }
  const std::optional<int>& label() const { return label_; }
  const std::string& name() const { return name_; }

  SkeletonMotion with_positions(JointField positions) const {
    return SkeletonMotion(topology_, std::move(positions), label_, name_);
  }

 private:
  std::shared_ptr<const SkeletonTopology> topology_;
  JointField positions_;
  std::optional<int> label_;
  std::string name_;
};

/// rows x cols table of per-(frame, element) dynamics values.
struct DynamicsTable {
  int rows = 0;
  int cols = 0;
  std::vector<double> values;

  double operator()(int r, int c) const {
    return values[static_cast<std::size_t>(r) * static_cast<std::size_t>(cols) + static_cast<std::size_t>(c)];
  }
};

struct AngleTable {
  DynamicsTable angles;
  /// Nonzero where a bone of the pair was shorter than kMinBoneLength.
  std::vector<std::uint8_t> degenerate;
};

/// Angle between two bone vectors pointing away from their shared joint,
/// together with its partial derivatives.
struct AngleJacobian {
  double angle = 0.0;
  Vec3 d_first;
  Vec3 d_second;
  bool degenerate = false;
  bool saturated = false;
};

AngleJacobian bone_angle_jacobian(const Vec3& first, const Vec3& second);
inline double bone_angle(const Vec3& first, const Vec3& second) {
  return bone_angle_jacobian(first, second).angle;
}

/// Outward vectors (first, second) of angle pair `k` at frame `t`.
std::pair<Vec3, Vec3> angle_vectors(const SkeletonTopology& topology, const JointField& positions,
                                    std::size_t k, int t);

DynamicsTable bone_lengths(const SkeletonTopology& topology, const JointField& positions);
AngleTable bone_angles(const SkeletonTopology& topology, const JointField& positions);
/// Throws ValidationError("motion too short for speed") when T < 2.
DynamicsTable joint_speeds(const JointField& positions);

inline DynamicsTable bone_lengths(const SkeletonMotion& m) { return bone_lengths(m.topology(), m.positions()); }
inline AngleTable bone_angles(const SkeletonMotion& m) { return bone_angles(m.topology(), m.positions()); }
inline DynamicsTable joint_speeds(const SkeletonMotion& m) { return joint_speeds(m.positions()); }

}  // namespace skelattack
