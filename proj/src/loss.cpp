#include "skelattack/loss.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "skelattack/error.hpp"
#include "skelattack/kernels.hpp"

namespace skelattack {

namespace {

double sign(double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }

double guarded(double reference) { return std::max(reference, kDenominatorGuard); }

int other_end(const Bone& b, int joint) { return b.source == joint ? b.target : b.source; }

}  // namespace

void LossWeights::validate() const {
  for (double w : {bone, angle, speed, emotion, l2})
    if (!std::isfinite(w) || w < 0.0) fail_validation("loss weights must be finite and nonnegative");
}

std::string_view mode_name(AttackMode mode) { return mode == AttackMode::targeted ? "targeted" : "untargeted"; }

AttackMode parse_mode(std::string_view name) {
  if (name == "untargeted") return AttackMode::untargeted;
  if (name == "targeted") return AttackMode::targeted;
  fail_validation("unknown attack mode '" + std::string(name) + "'");
}

void ConstraintSpec::validate(int class_count) const {
  if (true_label < 0 || true_label >= class_count) fail_validation("true label out of range");
  if (!std::isfinite(conf) || conf < 0.0) fail_validation("conf must be finite and nonnegative");
  if (mode == AttackMode::targeted) {
    if (!target_label) fail_validation("targeted mode requires a target label");
    if (*target_label < 0 || *target_label >= class_count) fail_validation("target label out of range");
    if (*target_label == true_label) fail_validation("target label equals true label");
  }
}

ConstraintOnLogits constraint_from_logits(std::span<const double> logits, const ConstraintSpec& spec) {
  if (spec.mode == AttackMode::targeted && !spec.target_label)
    fail_validation("targeted mode requires a target label");
  const int anchor = spec.mode == AttackMode::targeted ? *spec.target_label : spec.true_label;
  if (anchor < 0 || anchor >= static_cast<int>(logits.size())) fail_validation("constraint label out of range");
  if (logits.size() < 2) fail_validation("constraint needs at least 2 classes");

  ConstraintOnLogits out;
  out.cotangent.assign(logits.size(), 0.0);
  int rival = -1;
  for (int j = 0; j < static_cast<int>(logits.size()); ++j) {
    if (j == anchor) continue;
    if (rival < 0 || logits[static_cast<std::size_t>(j)] > logits[static_cast<std::size_t>(rival)]) rival = j;
  }
  out.rival = rival;
  const double anchor_logit = logits[static_cast<std::size_t>(anchor)];
  const double rival_logit = logits[static_cast<std::size_t>(rival)];
  // untargeted: keep the true class below the best rival; targeted: lift the
  // target above the best rival.
  const double hinge = spec.mode == AttackMode::targeted ? rival_logit - anchor_logit + spec.conf
                                                         : anchor_logit - rival_logit + spec.conf;
  if (hinge > 0.0) {
    out.value = hinge;
    const double s = spec.mode == AttackMode::targeted ? -1.0 : 1.0;
    out.cotangent[static_cast<std::size_t>(anchor)] = s;
    out.cotangent[static_cast<std::size_t>(rival)] = -s;
  }
  return out;
}

bool attack_goal_met(std::span<const double> logits, const ConstraintSpec& spec) {
  const int predicted = argmax(logits);
  if (spec.mode == AttackMode::targeted) return spec.target_label && predicted == *spec.target_label;
  return predicted != spec.true_label;
}

TermValue classification_constraint(const JointField& candidate, const ClassifierModel& model,
                                    const ConstraintSpec& spec) {
  spec.validate(model.class_count());
  const auto logits = model.forward(candidate);
  auto c = constraint_from_logits(logits, spec);
  TermValue out{c.value, JointField(candidate.frames(), candidate.joints())};
  if (c.value > 0.0) out.gradient = model.input_gradient(candidate, c.cotangent);
  return out;
}

// --- DistanceObjective ------------------------------------------------------

DistanceObjective::DistanceObjective(const SkeletonMotion& original, LossWeights weights,
                                     const EmotionExtractor* extractor)
    : original_(original),
      weights_(weights),
      extractor_(extractor),
      lengths_(bone_lengths(original)),
      angles_(bone_angles(original)) {
  weights_.validate();
  if (original.frame_count() >= 2)
    speeds_ = joint_speeds(original);
  else if (weights_.speed > 0.0)
    fail_validation("motion too short for speed");
  if (extractor_) features_ = extractor_->features(original.positions());
}

void DistanceObjective::check(const JointField& candidate) const {
  if (!candidate.same_shape(original_.positions()))
    fail_validation("candidate shape does not match the original motion");
}

TermValue DistanceObjective::bone_term(const JointField& cand) const {
  check(cand);
  TermValue out{0.0, JointField(cand.frames(), cand.joints())};
  const auto& bones = original_.topology().bones();
  if (bones.empty()) return out;
  const double scale = 1.0 / (static_cast<double>(cand.frames()) * static_cast<double>(bones.size()));
  double total = 0.0;
  for (int t = 0; t < cand.frames(); ++t) {
    for (std::size_t i = 0; i < bones.size(); ++i) {
      const auto& b = bones[i];
      const Vec3 v = cand.point(t, b.source) - cand.point(t, b.target);
      const double len = norm(v);
      const double ref = lengths_(t, static_cast<int>(i));
      const double den = guarded(ref);
      total += std::abs(len - ref) / den;
      const double coef = sign(len - ref) / den * scale;
      if (coef == 0.0 || len == 0.0) continue;
      const Vec3 d = (coef / len) * v;
      out.gradient.add_point(t, b.source, d);
      out.gradient.add_point(t, b.target, -1.0 * d);
    }
  }
  out.value = total * scale;
  return out;
}

TermValue DistanceObjective::angle_term(const JointField& cand) const {
  check(cand);
  TermValue out{0.0, JointField(cand.frames(), cand.joints())};
  const auto& topo = original_.topology();
  const auto& pairs = topo.angle_pairs();
  if (pairs.empty()) return out;
  const double scale = 1.0 / (static_cast<double>(cand.frames()) * static_cast<double>(pairs.size()));
  double total = 0.0;
  for (int t = 0; t < cand.frames(); ++t) {
    for (std::size_t k = 0; k < pairs.size(); ++k) {
      auto [u, v] = angle_vectors(topo, cand, k, t);
      const auto jac = bone_angle_jacobian(u, v);
      const double ref = angles_.angles(t, static_cast<int>(k));
      const double den = guarded(ref);
      total += std::abs(jac.angle - ref) / den;
      const double coef = sign(jac.angle - ref) / den * scale;
      if (coef == 0.0 || jac.degenerate || jac.saturated) continue;
      const int hub = topo.shared_joint(k);
      const int j1 = other_end(topo.bones()[static_cast<std::size_t>(pairs[k].first)], hub);
      const int j2 = other_end(topo.bones()[static_cast<std::size_t>(pairs[k].second)], hub);
      out.gradient.add_point(t, j1, coef * jac.d_first);
      out.gradient.add_point(t, j2, coef * jac.d_second);
      out.gradient.add_point(t, hub, -coef * (jac.d_first + jac.d_second));
    }
  }
  out.value = total * scale;
  return out;
}

TermValue DistanceObjective::speed_term(const JointField& cand) const {
  check(cand);
  if (!speeds_) fail_validation("motion too short for speed");
  TermValue out{0.0, JointField(cand.frames(), cand.joints())};
  const int intervals = cand.frames() - 1;
  const double scale = 1.0 / (static_cast<double>(intervals) * static_cast<double>(cand.joints()));
  double total = 0.0;
  for (int t = 0; t < intervals; ++t) {
    for (int j = 0; j < cand.joints(); ++j) {
      const Vec3 d = cand.point(t + 1, j) - cand.point(t, j);
      const double speed = norm(d);
      const double ref = (*speeds_)(t, j);
      const double den = guarded(ref);
      total += std::abs(speed - ref) / den;
      const double coef = sign(speed - ref) / den * scale;
      if (coef == 0.0 || speed == 0.0) continue;
      const Vec3 g = (coef / speed) * d;
      out.gradient.add_point(t + 1, j, g);
      out.gradient.add_point(t, j, -1.0 * g);
    }
  }
  out.value = total * scale;
  return out;
}

TermValue DistanceObjective::emotion_term(const JointField& cand) const {
  check(cand);
  TermValue out{0.0, JointField(cand.frames(), cand.joints())};
  if (!extractor_) return out;
  const auto feats = extractor_->features(cand);
  std::vector<double> diff(feats.size());
  for (std::size_t i = 0; i < feats.size(); ++i) diff[i] = feats[i] - features_[i];
  const double dist = std::sqrt(kernels::dot(diff, diff));
  out.value = dist;
  if (dist == 0.0) return out;
  for (double& d : diff) d /= dist;
  out.gradient = extractor_->input_gradient(cand, diff);
  return out;
}

TermValue DistanceObjective::l2_term(const JointField& cand) const {
  check(cand);
  const auto x = original_.positions().values();
  const auto y = cand.values();
  TermValue out{kernels::squared_distance(y, x), JointField(cand.frames(), cand.joints())};
  auto g = out.gradient.values();
  for (std::size_t i = 0; i < g.size(); ++i) g[i] = 2.0 * (y[i] - x[i]);
  return out;
}

LossBreakdown DistanceObjective::evaluate(const JointField& cand) const {
  LossBreakdown out;
  out.gradient = JointField(cand.frames(), cand.joints());
  auto accumulate = [&](const TermValue& term, double weight) {
    if (weight != 0.0) kernels::axpy(weight, term.gradient.values(), out.gradient.values());
    return term.value;
  };
  out.b = accumulate(bone_term(cand), weights_.bone);
  out.a = accumulate(angle_term(cand), weights_.angle);
  if (speeds_) out.s = accumulate(speed_term(cand), weights_.speed);
  if (extractor_) out.e = accumulate(emotion_term(cand), weights_.emotion);
  out.l2_term = accumulate(l2_term(cand), weights_.l2);
  out.D = weights_.bone * out.b + weights_.angle * out.a + weights_.speed * out.s + weights_.emotion * out.e +
          weights_.l2 * out.l2_term;
  out.L = out.D;
  return out;
}

// --- free functions ---------------------------------------------------------

TermValue bone_length_loss(const SkeletonMotion& original, const JointField& candidate) {
  return DistanceObjective(original, {1.0, 0.0, 0.0, 0.0, 0.0}, nullptr).bone_term(candidate);
}

TermValue angle_loss(const SkeletonMotion& original, const JointField& candidate) {
  return DistanceObjective(original, {0.0, 1.0, 0.0, 0.0, 0.0}, nullptr).angle_term(candidate);
}

TermValue speed_loss(const SkeletonMotion& original, const JointField& candidate) {
  return DistanceObjective(original, {}, nullptr).speed_term(candidate);
}

TermValue emotion_loss(const SkeletonMotion& original, const JointField& candidate, const EmotionExtractor& extractor) {
  LossWeights w;
  w.speed = 0.0;
  return DistanceObjective(original, w, &extractor).emotion_term(candidate);
}

LossBreakdown total_distance(const SkeletonMotion& original, const JointField& candidate, const LossWeights& weights,
                             const EmotionExtractor* extractor) {
  return DistanceObjective(original, weights, extractor).evaluate(candidate);
}

LossBreakdown combine_lagrangian(LossBreakdown distance, const TermValue& constraint, double lambda, double gamma) {
  LossBreakdown out = std::move(distance);
  out.C = constraint.value;
  out.L = out.D + lambda * out.C + 0.5 * gamma * out.C * out.C;
  const double coef = lambda + gamma * out.C;
  if (out.C > 0.0 && coef != 0.0) kernels::axpy(coef, constraint.gradient.values(), out.gradient.values());
  return out;
}

LossBreakdown augmented_lagrangian(const SkeletonMotion& original, const JointField& candidate, double lambda,
                                   double gamma, const LossWeights& weights, const ConstraintSpec& spec,
                                   const ClassifierModel& model, const EmotionExtractor* extractor) {
  if (!(lambda >= 0.0)) fail_validation("lambda must be nonnegative");
  if (!(gamma > 0.0)) fail_validation("gamma must be positive");
  auto distance = DistanceObjective(original, weights, extractor).evaluate(candidate);
  return combine_lagrangian(std::move(distance), classification_constraint(candidate, model, spec), lambda, gamma);
}

JointField finite_difference_gradient(const std::function<double(const JointField&)>& f, const JointField& x,
                                      double h) {
  if (!(h > 0.0)) fail_validation("finite-difference step must be positive");
  JointField grad(x.frames(), x.joints());
  JointField probe = x;
  auto p = probe.values();
  auto g = grad.values();
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double saved = p[i];
    p[i] = saved + h;
    const double up = f(probe);
    p[i] = saved - h;
    const double down = f(probe);
    p[i] = saved;
    g[i] = (up - down) / (2.0 * h);
  }
  return grad;
}

}  // namespace skelattack
