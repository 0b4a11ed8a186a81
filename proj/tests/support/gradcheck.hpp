#pragma once

// Finite-difference probes for every objective term. A probe draws a random
// (x, x') pair and rejects it when a kink of the term (|.| at zero, cosine
// clamp, hinge activation, rival switch) lies within 10h of x' along any
// coordinate axis, judged from the term's local Lipschitz bound.

#include <algorithm>
#include <cmath>
#include <optional>
#include <random>
#include <string>

#include "oracle.hpp"
#include "skelattack/classifier.hpp"
#include "skelattack/loss.hpp"

namespace gradcheck {

using namespace skelattack;

inline constexpr double kStep = 1e-5;
inline constexpr double kMargin = 10 * kStep;

enum class Term { b, a, s, e, C, L };

inline const char* term_name(Term t) {
  switch (t) {
    case Term::b: return "b";
    case Term::a: return "a";
    case Term::s: return "s";
    case Term::e: return "e";
    case Term::C: return "C";
    case Term::L: return "L";
  }
  return "?";
}

struct Probe {
  SkeletonMotion original;
  JointField candidate;
  ConstraintSpec spec;
  double lambda = 0.0;
  double gamma = 1.0;
  LossWeights weights;
};

inline bool dynamics_near_kink(const SkeletonMotion& x, const JointField& y) {
  const auto& topo = x.topology();
  const auto l0 = oracle::lengths(topo, x.positions()), l1 = oracle::lengths(topo, y);
  double min_len = 1e9;
  for (std::size_t t = 0; t < l0.size(); ++t)
    for (std::size_t k = 0; k < l0[t].size(); ++k) {
      if (std::fabs(l1[t][k] - l0[t][k]) <= 2 * kMargin) return true;
      min_len = std::min(min_len, l1[t][k]);
    }
  if (min_len < 1e-2) return true;
  const auto s0 = oracle::speeds(x.positions()), s1 = oracle::speeds(y);
  for (std::size_t t = 0; t < s0.size(); ++t)
    for (std::size_t k = 0; k < s0[t].size(); ++k)
      if (std::fabs(s1[t][k] - s0[t][k]) <= 2 * kMargin || s1[t][k] < 1e-2) return true;
  // Angle derivatives scale with 1 / bone length.
  const double angle_lip = 2.0 / min_len;
  const auto a0 = oracle::angles(topo, x.positions()), a1 = oracle::angles(topo, y);
  for (std::size_t t = 0; t < a0.size(); ++t)
    for (std::size_t k = 0; k < a0[t].size(); ++k) {
      if (std::fabs(a1[t][k] - a0[t][k]) <= kMargin * angle_lip) return true;
      if (std::cos(a1[t][k]) >= 1.0 - 1e-6 - kMargin * angle_lip) return true;
      if (std::cos(a1[t][k]) <= -1.0 + 1e-6 + kMargin * angle_lip) return true;
    }
  return false;
}

inline double inf_norm(const JointField& g) {
  double m = 0.0;
  for (double v : g.values()) m = std::max(m, std::fabs(v));
  return m;
}

inline bool hinge_near_kink(const ClassifierModel& model, const JointField& y, const ConstraintSpec& spec) {
  const auto logits = model.forward(y);
  const auto c = constraint_from_logits(logits, spec);
  std::vector<double> hinge_cot(logits.size(), 0.0);
  const int anchor = spec.mode == AttackMode::targeted ? *spec.target_label : spec.true_label;
  hinge_cot[anchor] = 1.0;
  hinge_cot[c.rival] = -1.0;
  const double lip = inf_norm(model.input_gradient(y, hinge_cot));
  const double hinge = spec.mode == AttackMode::targeted
                           ? logits[c.rival] - logits[anchor] + spec.conf
                           : logits[anchor] - logits[c.rival] + spec.conf;
  if (std::fabs(hinge) <= kMargin * lip) return true;
  // Runner-up among the non-anchor classes must not overtake the rival.
  for (int j = 0; j < static_cast<int>(logits.size()); ++j) {
    if (j == anchor || j == c.rival) continue;
    std::vector<double> cot(logits.size(), 0.0);
    cot[c.rival] = 1.0;
    cot[j] = -1.0;
    if (logits[c.rival] - logits[j] <= kMargin * inf_norm(model.input_gradient(y, cot))) return true;
  }
  return false;
}

/// Analytic gradient and value of `term` at the probe.
inline TermValue evaluate(Term term, const Probe& p, const ClassifierModel* model, const EmotionExtractor* extractor) {
  switch (term) {
    case Term::b: return bone_length_loss(p.original, p.candidate);
    case Term::a: return angle_loss(p.original, p.candidate);
    case Term::s: return speed_loss(p.original, p.candidate);
    case Term::e: return emotion_loss(p.original, p.candidate, *extractor);
    case Term::C: return classification_constraint(p.candidate, *model, p.spec);
    case Term::L: {
      auto l = augmented_lagrangian(p.original, p.candidate, p.lambda, p.gamma, p.weights, p.spec, *model, extractor);
      return {l.L, std::move(l.gradient)};
    }
  }
  return {};
}

/// Draws a probe valid for `term`; nullopt when the draw hit a kink.
inline std::optional<Probe> draw(Term term, std::mt19937_64& rng, const std::shared_ptr<const SkeletonTopology>& topo,
                                 int frames, const ClassifierModel* model) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const auto x = oracle::random_field(rng, frames, topo->joint_count(), 0.1, 0.9);
  Probe p{SkeletonMotion(topo, x), oracle::perturb(rng, x, 0.05), {}, 2.0 * u(rng), 0.0, {}};
  const double gammas[] = {0.1, 1.0, 10.0};
  p.gamma = gammas[rng() % 3];
  p.weights = {0.5 + u(rng), 0.5 + u(rng), 0.5 + u(rng), 0.5 + u(rng), u(rng)};

  if (term == Term::C || term == Term::L) {
    const auto logits = model->forward(p.candidate);
    const int classes = model->class_count();
    // Alternate modes; pick labels so that the hinge is usually active.
    if (rng() % 2 == 0) {
      p.spec.mode = AttackMode::untargeted;
      p.spec.true_label = argmax(logits);
    } else {
      p.spec.mode = AttackMode::targeted;
      const int top = argmax(logits);
      p.spec.true_label = top;
      int target = static_cast<int>(rng() % static_cast<std::uint64_t>(classes - 1));
      if (target >= top) ++target;
      p.spec.target_label = target;
    }
    p.spec.conf = 0.5 * u(rng);
    if (hinge_near_kink(*model, p.candidate, p.spec)) return std::nullopt;
  }
  if (term != Term::e && term != Term::C && dynamics_near_kink(p.original, p.candidate)) return std::nullopt;
  return p;
}

/// Worst relative error of the analytic gradient for one probe.
inline double probe_error(Term term, const Probe& p, const ClassifierModel* model, const EmotionExtractor* extractor) {
  const auto analytic = evaluate(term, p, model, extractor);
  const auto numeric = finite_difference_gradient(
      [&](const JointField& y) {
        Probe q{p.original, y, p.spec, p.lambda, p.gamma, p.weights};
        return evaluate(term, q, model, extractor).value;
      },
      p.candidate, kStep);
  return oracle::gradient_error(analytic.gradient, numeric);
}

struct Summary {
  int probes = 0;
  int rejected = 0;
  double worst = 0.0;
};

/// Runs `count` accepted probes for `term`.
inline Summary run(Term term, int count, std::uint64_t seed, const std::shared_ptr<const SkeletonTopology>& topo,
                   int frames, const ClassifierModel* model, const EmotionExtractor* extractor) {
  std::mt19937_64 rng(seed);
  Summary s;
  while (s.probes < count) {
    auto p = draw(term, rng, topo, frames, model);
    if (!p) {
      ++s.rejected;
      if (s.rejected > 50 * count) break;
      continue;
    }
    s.worst = std::max(s.worst, probe_error(term, *p, model, extractor));
    ++s.probes;
  }
  return s;
}

}  // namespace gradcheck
