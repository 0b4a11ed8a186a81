#pragma once

// Attack objective: dynamic distances between the original motion x and a
// candidate x' (bone length, bone angle, joint speed), the emotion-feature
// distance, the misclassification hinge, and the augmented Lagrangian that
// combines them. Every term returns its exact gradient with respect to x'.

#include <functional>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "skelattack/classifier.hpp"
#include "skelattack/motion.hpp"

namespace skelattack {

/// Lower bound on the reference magnitude in relative deviations |v' - v| / v.
inline constexpr double kDenominatorGuard = 1e-4;

struct LossWeights {
  double bone = 1.0;
  double angle = 1.0;
  double speed = 1.0;
  double emotion = 1.0;
  double l2 = 0.0;

  /// The C&W-style baseline: squared l2 only.
  static LossWeights l2_only() { return {0.0, 0.0, 0.0, 0.0, 1.0}; }
  void validate() const;
  friend bool operator==(const LossWeights&, const LossWeights&) = default;
};

struct TermValue {
  double value = 0.0;
  JointField gradient;
};

enum class AttackMode { untargeted, targeted };

std::string_view mode_name(AttackMode mode);
AttackMode parse_mode(std::string_view name);

struct ConstraintSpec {
  AttackMode mode = AttackMode::untargeted;
  int true_label = 0;
  std::optional<int> target_label;
  double conf = 0.0;

  void validate(int class_count) const;
};

/// Hinge value on raw logits and its derivative with respect to the logits.
struct ConstraintOnLogits {
  double value = 0.0;
  std::vector<double> cotangent;
  /// Class competing with the true (untargeted) or target (targeted) label.
  int rival = 0;
};

ConstraintOnLogits constraint_from_logits(std::span<const double> logits, const ConstraintSpec& spec);

/// Whether the logits realize the attack goal by predicted label alone.
bool attack_goal_met(std::span<const double> logits, const ConstraintSpec& spec);

TermValue classification_constraint(const JointField& candidate, const ClassifierModel& model,
                                    const ConstraintSpec& spec);

struct LossBreakdown {
  double b = 0.0;
  double a = 0.0;
  double s = 0.0;
  double e = 0.0;
  double l2_term = 0.0;
  double D = 0.0;
  double C = 0.0;
  double L = 0.0;
  /// dL/dx' (equal to dD/dx' for distance-only evaluations).
  JointField gradient;
};

/// Caches the dynamics and emotion features of the original motion so a
/// candidate can be scored repeatedly.
class DistanceObjective {
 public:
  /// `extractor` may be null, in which case e = 0.
  DistanceObjective(const SkeletonMotion& original, LossWeights weights, const EmotionExtractor* extractor);

  TermValue bone_term(const JointField& candidate) const;
  TermValue angle_term(const JointField& candidate) const;
  TermValue speed_term(const JointField& candidate) const;
  TermValue emotion_term(const JointField& candidate) const;
  TermValue l2_term(const JointField& candidate) const;

  /// C = L - D = 0 in the returned breakdown.
  LossBreakdown evaluate(const JointField& candidate) const;

  const SkeletonMotion& original() const { return original_; }
  const LossWeights& weights() const { return weights_; }

 private:
  void check(const JointField& candidate) const;

  SkeletonMotion original_;
  LossWeights weights_;
  const EmotionExtractor* extractor_;
  DynamicsTable lengths_;
  AngleTable angles_;
  std::optional<DynamicsTable> speeds_;
  std::vector<double> features_;
};

TermValue bone_length_loss(const SkeletonMotion& original, const JointField& candidate);
TermValue angle_loss(const SkeletonMotion& original, const JointField& candidate);
/// Throws ValidationError when the motion has fewer than 2 frames.
TermValue speed_loss(const SkeletonMotion& original, const JointField& candidate);
TermValue emotion_loss(const SkeletonMotion& original, const JointField& candidate, const EmotionExtractor& extractor);

LossBreakdown total_distance(const SkeletonMotion& original, const JointField& candidate, const LossWeights& weights,
                             const EmotionExtractor* extractor);

/// L = D + lambda C + (gamma / 2) C^2 with gradient dD + (lambda + gamma C) dC.
LossBreakdown combine_lagrangian(LossBreakdown distance, const TermValue& constraint, double lambda, double gamma);

LossBreakdown augmented_lagrangian(const SkeletonMotion& original, const JointField& candidate, double lambda,
                                   double gamma, const LossWeights& weights, const ConstraintSpec& spec,
                                   const ClassifierModel& model, const EmotionExtractor* extractor);

/// Central differences (f(x + h e_i) - f(x - h e_i)) / 2h for every coordinate.
JointField finite_difference_gradient(const std::function<double(const JointField&)>& f, const JointField& x,
                                      double h);

}  // namespace skelattack
