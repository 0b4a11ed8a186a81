#include "skelattack/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "skelattack/error.hpp"

namespace skelattack {

namespace {

void check_pair(const SkeletonMotion& original, const SkeletonMotion& adversarial) {
  if (!(original.topology() == adversarial.topology())) fail_validation("pair has mismatched topologies");
  if (!original.positions().same_shape(adversarial.positions())) fail_validation("pair has mismatched shapes");
}

double mean_relative_deviation(const DynamicsTable& ref, const DynamicsTable& other) {
  if (ref.values.empty()) return 0.0;
  double total = 0.0;
  for (std::size_t i = 0; i < ref.values.size(); ++i)
    total += std::abs(ref.values[i] - other.values[i]) / std::max(ref.values[i], kDenominatorGuard);
  return total / static_cast<double>(ref.values.size());
}

template <typename PerSample>
double mean_over_pairs(std::span<const MotionPair> pairs, PerSample per_sample) {
  if (pairs.empty()) return 0.0;
  double total = 0.0;
  for (const auto& p : pairs) {
    check_pair(*p.original, *p.adversarial);
    total += per_sample(*p.original, *p.adversarial);
  }
  return total / static_cast<double>(pairs.size());
}

double sample_dbb(const SkeletonMotion& x, const SkeletonMotion& y) {
  return mean_relative_deviation(bone_lengths(x), bone_lengths(y));
}

double sample_daa(const SkeletonMotion& x, const SkeletonMotion& y) {
  return mean_relative_deviation(bone_angles(x).angles, bone_angles(y).angles);
}

double sample_dss(const SkeletonMotion& x, const SkeletonMotion& y) {
  const auto sx = joint_speeds(x);
  const auto sy = joint_speeds(y);
  double sq = 0.0;
  for (std::size_t i = 0; i < sx.values.size(); ++i) {
    const double d = sx.values[i] - sy.values[i];
    sq += d * d;
  }
  return std::sqrt(sq) / (static_cast<double>(sx.rows) * static_cast<double>(sx.cols));
}

double sample_l2(const SkeletonMotion& x, const SkeletonMotion& y) {
  double total = 0.0;
  for (int t = 0; t < x.frame_count(); ++t) {
    const auto fx = x.positions().frame(t);
    const auto fy = y.positions().frame(t);
    double sq = 0.0;
    for (std::size_t i = 0; i < fx.size(); ++i) {
      const double d = fx[i] - fy[i];
      sq += d * d;
    }
    total += std::sqrt(sq);
  }
  return total / x.frame_count();
}

}  // namespace

SampleMetrics sample_metrics(const SkeletonMotion& original, const SkeletonMotion& adversarial) {
  check_pair(original, adversarial);
  return {sample_dbb(original, adversarial), sample_daa(original, adversarial), sample_dss(original, adversarial),
          sample_l2(original, adversarial)};
}

double delta_b_over_b(std::span<const MotionPair> pairs) { return mean_over_pairs(pairs, sample_dbb); }
double delta_a_over_a(std::span<const MotionPair> pairs) { return mean_over_pairs(pairs, sample_daa); }
double delta_s_over_s(std::span<const MotionPair> pairs) { return mean_over_pairs(pairs, sample_dss); }
double l2_metric(std::span<const MotionPair> pairs) { return mean_over_pairs(pairs, sample_l2); }

double success_rate(std::span<const SampleRecord> records, AttackMode mode) {
  if (records.empty()) fail_validation("success rate of an empty result set");
  std::size_t hits = 0;
  for (const auto& r : records) {
    if (mode == AttackMode::targeted)
      hits += r.target_label && r.predicted == *r.target_label;
    else
      hits += r.predicted != r.true_label;
  }
  return static_cast<double>(hits) / static_cast<double>(records.size());
}

BatchReport build_report(std::span<const SampleRecord> records, const ReportTag& tag) {
  BatchReport out;
  out.tag = tag;
  out.n = records.size();
  if (records.empty()) return out;
  for (const auto& r : records) {
    out.dBB += r.metrics.dBB;
    out.dAA += r.metrics.dAA;
    out.dSS += r.metrics.dSS;
    out.l2 += r.metrics.l2;
  }
  const double n = static_cast<double>(records.size());
  out.dBB /= n;
  out.dAA /= n;
  out.dSS /= n;
  out.l2 /= n;
  out.sr = success_rate(records, tag.mode);
  return out;
}

}  // namespace skelattack
