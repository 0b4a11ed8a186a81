#include "skelattack/attack.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "skelattack/error.hpp"

namespace skelattack {

std::vector<double> AdamState::step(std::span<const double> gradient, double lr, const AdamParams& p) {
  if (gradient.size() != first_.size()) fail_validation("gradient size does not match Adam state");
  ++steps_;
  const double c1 = 1.0 - std::pow(p.beta1, steps_);
  const double c2 = 1.0 - std::pow(p.beta2, steps_);
  std::vector<double> delta(gradient.size());
  for (std::size_t i = 0; i < gradient.size(); ++i) {
    const double g = gradient[i];
    first_[i] = p.beta1 * first_[i] + (1.0 - p.beta1) * g;
    second_[i] = p.beta2 * second_[i] + (1.0 - p.beta2) * g * g;
    delta[i] = -lr * (first_[i] / c1) / (std::sqrt(second_[i] / c2) + p.epsilon);
  }
  return delta;
}

void project_box(std::span<double> coords) {
  for (double& v : coords) v = std::clamp(v, 0.0, 1.0);
}

JointField project_box(JointField coords) {
  project_box(coords.values());
  return coords;
}

double dual_update(double lambda, double gamma, double constraint) {
  if (!(lambda >= 0.0)) fail_validation("lambda must be nonnegative");
  if (!(gamma > 0.0)) fail_validation("gamma must be positive");
  if (!(constraint >= 0.0)) fail_validation("constraint value must be nonnegative");
  return lambda + gamma * constraint;
}

JointField apply_speed_cap(const SkeletonMotion& original, JointField candidate, double cap) {
  if (!(cap >= 0.0)) fail_validation("speed cap must be nonnegative");
  if (std::isinf(cap) || original.frame_count() < 2) return candidate;
  const JointField& x = original.positions();
  if (!candidate.same_shape(x)) fail_validation("candidate shape does not match the original motion");
  const auto ref = joint_speeds(x);

  auto deviation = [&](int t, int j) {
    const double s = norm(candidate.point(t + 1, j) - candidate.point(t, j));
    return std::abs(s - ref(t, j)) / std::max(ref(t, j), kDenominatorGuard);
  };
  auto shrink = [&](int t, int j, double factor) {
    const Vec3 orig = x.point(t, j);
    candidate.set_point(t, j, orig + factor * (candidate.point(t, j) - orig));
  };
  auto sweep = [&](double factor) {
    bool violated = false;
    for (int t = 0; t + 1 < x.frames(); ++t)
      for (int j = 0; j < x.joints(); ++j)
        if (deviation(t, j) > cap) {
          violated = true;
          shrink(t, j, factor);
          shrink(t + 1, j, factor);
        }
    return violated;
  };

  for (int round = 0; round < 20; ++round)
    if (!sweep(0.5)) return candidate;
  // Resetting joints to the original is exact, so this terminates once every
  // offending joint trajectory has collapsed onto x.
  while (sweep(0.0)) {
  }
  return candidate;
}

void AttackConfig::validate() const {
  if (!(gamma > 0.0) || !std::isfinite(gamma)) fail_validation("gamma must be positive");
  if (iterations < 1) fail_validation("iterations must be at least 1");
  if (inner_steps < 1) fail_validation("inner steps must be at least 1");
  if (!(lr > 0.0) || !std::isfinite(lr)) fail_validation("learning rate must be positive");
  if (!(lambda0 >= 0.0) || !std::isfinite(lambda0)) fail_validation("lambda0 must be nonnegative");
  if (eps_s_cap && !(*eps_s_cap >= 0.0)) fail_validation("speed cap must be nonnegative");
  if (patience && *patience < 0) fail_validation("patience must be nonnegative");
  weights.validate();
}

namespace {

struct Iterate {
  LossBreakdown distance;
  TermValue constraint;
  std::vector<double> logits;
};

Iterate evaluate(const DistanceObjective& objective, const ClassifierModel& model, const ConstraintSpec& spec,
                 const JointField& candidate) {
  Iterate it{objective.evaluate(candidate), {}, model.forward(candidate)};
  auto c = constraint_from_logits(it.logits, spec);
  it.constraint.value = c.value;
  it.constraint.gradient =
      c.value > 0.0 ? model.input_gradient(candidate, c.cotangent) : JointField(candidate.frames(), candidate.joints());
  return it;
}

}  // namespace

AttackResult run_attack(const SkeletonMotion& x, const ClassifierModel& model, const EmotionExtractor* extractor,
                        const AttackConfig& config) {
  config.validate();
  const auto& spec = config.constraint;
  spec.validate(model.class_count());
  const auto shape = model.input_shape();
  if (x.frame_count() != shape.frames || x.joint_count() != shape.joints)
    fail_validation("motion shape does not match the model input shape");
  for (double v : x.positions().values())
    if (v < 0.0 || v > 1.0) fail_validation("motion is not normalized to [0,1]");

  const DistanceObjective objective(x, config.weights, extractor);
  JointField current = x.positions();
  Iterate it = evaluate(objective, model, spec, current);

  if (spec.mode == AttackMode::untargeted && !config.force && attack_goal_met(it.logits, spec))
    fail_validation("already misclassified");

  AttackResult result{x, false, 0, {}, 0, std::nullopt, 0, config.lambda0, std::numeric_limits<double>::infinity(),
                      {}, {}};
  std::optional<JointField> best;
  if (attack_goal_met(it.logits, spec)) {
    best = current;
    result.best_distance = it.distance.D;
    result.first_success_iteration = 0;
  }

  AdamState adam(current.size());
  double lambda = config.lambda0;
  int iteration = 0;
  while (iteration < config.iterations) {
    ++iteration;
    for (int k = 0; k < config.inner_steps; ++k) {
      auto grad = combine_lagrangian(it.distance, it.constraint, lambda, config.gamma).gradient;
      const auto delta = adam.step(grad.values(), config.lr, config.adam);
      auto coords = current.values();
      for (std::size_t i = 0; i < coords.size(); ++i) coords[i] += delta[i];
      project_box(coords);
      if (config.eps_s_cap) current = apply_speed_cap(x, std::move(current), *config.eps_s_cap);
      it = evaluate(objective, model, spec, current);
    }
    const double C = it.constraint.value;
    const double D = it.distance.D;
    const double L = D + lambda * C + 0.5 * config.gamma * C * C;
    lambda = dual_update(lambda, config.gamma, C);

    if (attack_goal_met(it.logits, spec)) {
      if (!result.first_success_iteration) result.first_success_iteration = iteration;
      if (D < result.best_distance) {
        best = current;
        result.best_distance = D;
        result.best_iteration = iteration;
      }
    }
    if (config.record_trace) result.trace.push_back({iteration, lambda, C, D, L});
    if (config.patience && result.first_success_iteration &&
        iteration - *result.first_success_iteration >= *config.patience)
      break;
  }

  result.iterations_run = iteration;
  result.final_lambda = lambda;
  result.success = best.has_value();
  if (best) {
    result.adversarial = x.with_positions(std::move(*best));
  } else {
    result.adversarial = x.with_positions(current);
    result.best_distance = it.distance.D;
    result.best_iteration = iteration;
  }
  result.logits = model.forward(result.adversarial);
  result.predicted_label = argmax(result.logits);
  result.metrics = sample_metrics(x, result.adversarial);
  return result;
}

}  // namespace skelattack
