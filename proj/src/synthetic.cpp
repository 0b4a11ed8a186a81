#include <cmath>
#include <numbers>
#include <queue>
#include <random>

#include "skelattack/dataset.hpp"
#include "skelattack/error.hpp"

namespace skelattack {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

struct Oscillator {
  double amplitude = 0.0;
  double frequency = 1.0;
  double phase = 0.0;

  double at(double tau, double amp_scale, double phase_shift) const {
    return amp_scale * amplitude * std::sin(kTwoPi * frequency * tau + phase + phase_shift);
  }
};

struct JointFamily {
  Oscillator polar;
  Oscillator azimuth;
};

struct ClassFamily {
  std::array<Oscillator, 3> root;
  std::vector<JointFamily> joints;
};

// BFS order from joint 0 (and from every unreached joint, for forests);
// parent[j] = -1 marks a root.
void spanning_forest(const SkeletonTopology& topo, std::vector<int>& order, std::vector<int>& parent) {
  const int n = topo.joint_count();
  std::vector<std::vector<int>> adj(static_cast<std::size_t>(n));
  for (const auto& b : topo.bones()) {
    adj[static_cast<std::size_t>(b.source)].push_back(b.target);
    adj[static_cast<std::size_t>(b.target)].push_back(b.source);
  }
  parent.assign(static_cast<std::size_t>(n), -2);
  order.clear();
  for (int root = 0; root < n; ++root) {
    if (parent[static_cast<std::size_t>(root)] != -2) continue;
    parent[static_cast<std::size_t>(root)] = -1;
    std::queue<int> q;
    q.push(root);
    while (!q.empty()) {
      int j = q.front();
      q.pop();
      order.push_back(j);
      for (int k : adj[static_cast<std::size_t>(j)]) {
        if (parent[static_cast<std::size_t>(k)] != -2) continue;
        parent[static_cast<std::size_t>(k)] = j;
        q.push(k);
      }
    }
  }
}

}  // namespace

MotionDataset generate_synthetic_dataset(const SyntheticSpec& spec) {
  if (spec.class_count < 2) fail_validation("synthetic dataset needs at least 2 classes");
  if (spec.samples_per_class < 1) fail_validation("samples_per_class must be positive");
  if (spec.frames < 2) fail_validation("synthetic motions need at least 2 frames");
  if (!spec.topology) fail_validation("synthetic dataset needs a topology");
  if (!(spec.test_fraction >= 0.0 && spec.test_fraction < 1.0)) fail_validation("test_fraction must be in [0,1)");
  if (!(spec.noise >= 0.0)) fail_validation("noise must be nonnegative");

  const auto& topo = *spec.topology;
  const int joints = topo.joint_count();
  std::vector<int> order, parent;
  spanning_forest(topo, order, parent);

  std::mt19937_64 rng(spec.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto uniform = [&](double lo, double hi) { return lo + (hi - lo) * unit(rng); };

  // Skeleton identity shared by every class: bone lengths and rest pose.
  std::vector<double> length(static_cast<std::size_t>(joints), 1.0);
  std::vector<double> rest_polar(static_cast<std::size_t>(joints), 0.0);
  std::vector<double> rest_azimuth(static_cast<std::size_t>(joints), 0.0);
  for (int j = 0; j < joints; ++j) {
    length[static_cast<std::size_t>(j)] = uniform(0.7, 1.3);
    rest_polar[static_cast<std::size_t>(j)] = uniform(0.6, 2.5);
    rest_azimuth[static_cast<std::size_t>(j)] = uniform(0.0, kTwoPi);
  }

  std::uniform_int_distribution<int> freq(1, 3);
  std::vector<ClassFamily> families(static_cast<std::size_t>(spec.class_count));
  for (auto& fam : families) {
    for (auto& osc : fam.root) osc = {uniform(0.2, 0.6), static_cast<double>(freq(rng)), uniform(0.0, kTwoPi)};
    fam.joints.resize(static_cast<std::size_t>(joints));
    for (auto& jf : fam.joints) {
      jf.polar = {uniform(0.15, 0.5), static_cast<double>(freq(rng)), uniform(0.0, kTwoPi)};
      jf.azimuth = {uniform(0.15, 0.5), static_cast<double>(freq(rng)), uniform(0.0, kTwoPi)};
    }
  }

  std::normal_distribution<double> gauss(0.0, 1.0);
  const int test_per_class = static_cast<int>(std::lround(spec.test_fraction * spec.samples_per_class));
  const int train_per_class = spec.samples_per_class - test_per_class;

  MotionDataset raw;
  raw.class_count = spec.class_count;
  // Interleave classes so any prefix of a split is class-balanced.
  for (int i = 0; i < spec.samples_per_class; ++i) {
    for (int c = 0; c < spec.class_count; ++c) {
      const auto& fam = families[static_cast<std::size_t>(c)];
      const double phase_shift = 0.15 * gauss(rng);
      const double amp_scale = 1.0 + 0.05 * gauss(rng);
      const Vec3 offset{0.1 * gauss(rng), 0.1 * gauss(rng), 0.1 * gauss(rng)};
      JointField pos(spec.frames, joints);
      for (int t = 0; t < spec.frames; ++t) {
        const double tau = static_cast<double>(t) / spec.frames;
        for (int j : order) {
          const auto uj = static_cast<std::size_t>(j);
          const int p = parent[uj];
          Vec3 at;
          if (p < 0) {
            at = offset + Vec3{fam.root[0].at(tau, amp_scale, phase_shift), fam.root[1].at(tau, amp_scale, phase_shift),
                               fam.root[2].at(tau, amp_scale, phase_shift)};
            // Separate roots of a forest so components do not overlap.
            at = at + Vec3{2.0 * j, 0.0, 0.0};
          } else {
            const double polar = rest_polar[uj] + fam.joints[uj].polar.at(tau, amp_scale, phase_shift);
            const double azimuth = rest_azimuth[uj] + fam.joints[uj].azimuth.at(tau, amp_scale, phase_shift);
            const Vec3 dir{std::sin(polar) * std::cos(azimuth), std::sin(polar) * std::sin(azimuth), std::cos(polar)};
            at = pos.point(t, p) + length[uj] * dir;
          }
          pos.set_point(t, j, at);
        }
      }
      if (spec.noise > 0.0)
        for (double& v : pos.values()) v += spec.noise * gauss(rng);
      raw.motions.emplace_back(spec.topology, std::move(pos), c, "c" + std::to_string(c) + "_s" + std::to_string(i));
      raw.splits.push_back(i < train_per_class ? Split::train : Split::test);
    }
  }
  return normalize_dataset(raw).first;
}

}  // namespace skelattack
