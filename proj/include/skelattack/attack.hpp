#pragma once

// Augmented-Lagrangian attack: alternate Adam steps on
//   L(x', lambda) = D(x, x') + lambda C(x') + (gamma / 2) C(x')^2
// (projected onto the [0,1] box) with the dual ascent lambda += gamma C(x').

#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "skelattack/classifier.hpp"
#include "skelattack/dataset.hpp"
#include "skelattack/loss.hpp"
#include "skelattack/metrics.hpp"

namespace skelattack {

struct AdamParams {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

class AdamState {
 public:
  explicit AdamState(std::size_t size) : first_(size, 0.0), second_(size, 0.0) {}

  std::span<const double> first_moment() const { return first_; }
  std::span<const double> second_moment() const { return second_; }
  int steps() const { return steps_; }

  /// Bias-corrected Adam: updates the moments and returns the position delta.
  std::vector<double> step(std::span<const double> gradient, double lr, const AdamParams& params);

  friend bool operator==(const AdamState&, const AdamState&) = default;

 private:
  std::vector<double> first_;
  std::vector<double> second_;
  int steps_ = 0;
};

inline std::vector<double> adam_step(AdamState& state, std::span<const double> gradient, double lr,
                                     const AdamParams& params) {
  return state.step(gradient, lr, params);
}

/// Clamps every coordinate to [0, 1].
void project_box(std::span<double> coords);
JointField project_box(JointField coords);

/// lambda + gamma C. Throws ValidationError unless lambda >= 0, gamma > 0, C >= 0.
double dual_update(double lambda, double gamma, double constraint);

/// Shrinks the candidate's deviation from `original` wherever a joint's
/// relative speed change exceeds `cap` (halving, up to 20 rounds, then resetting
/// the offending joints) so that every interval satisfies the cap.
JointField apply_speed_cap(const SkeletonMotion& original, JointField candidate, double cap);

struct AttackConfig {
  ConstraintSpec constraint;
  double gamma = 1.0;
  int iterations = 1000;
  int inner_steps = 1;
  double lr = 5e-3;
  double lambda0 = 0.0;
  LossWeights weights;
  AdamParams adam;
  std::optional<double> eps_s_cap;
  /// Stop this many iterations after the first success (off when unset).
  std::optional<int> patience;
  std::uint64_t seed = 0;
  bool record_trace = false;
  /// Attack even when the clean prediction is already wrong (untargeted).
  bool force = false;

  void validate() const;
};

struct TraceEntry {
  int iteration = 0;
  /// Multiplier after this iteration's dual update.
  double lambda = 0.0;
  double C = 0.0;
  double D = 0.0;
  double L = 0.0;
};

struct AttackResult {
  SkeletonMotion adversarial;
  bool success = false;
  int predicted_label = 0;
  std::vector<double> logits;
  int iterations_run = 0;
  std::optional<int> first_success_iteration;
  /// Iteration whose iterate was returned (0 = the clean input).
  int best_iteration = 0;
  double final_lambda = 0.0;
  double best_distance = std::numeric_limits<double>::infinity();
  std::vector<TraceEntry> trace;
  SampleMetrics metrics;
};

/// `x` must lie in [0,1]. For untargeted attacks the true label is the motion's
/// label, which must equal the clean prediction unless `config.force`.
AttackResult run_attack(const SkeletonMotion& x, const ClassifierModel& model, const EmotionExtractor* extractor,
                        const AttackConfig& config);

struct BatchEntry {
  std::size_t index = 0;
  std::optional<AttackResult> result;
  std::string error;
};

struct BatchOutcome {
  std::vector<BatchEntry> entries;
  BatchReport report;
  std::vector<SampleRecord> records;
};

/// Test-split motions an attack campaign should use, in dataset order: those
/// the model classifies correctly (all of them when `include_misclassified`),
/// minus motions already labeled with the target in targeted mode. At most
/// `limit` indices unless limit = 0.
std::vector<std::size_t> select_attack_samples(const MotionDataset& dataset, const ClassifierModel& model,
                                               const ConstraintSpec& spec, std::size_t limit,
                                               bool include_misclassified = false);

/// Single attack record for reporting.
SampleRecord make_record(std::size_t index, const SkeletonMotion& original, const AttackConfig& config,
                         const AttackResult& result);

/// Attacks dataset.motions[i] for each i in `indices` independently. The
/// per-sample seed is config.seed XOR i and the true label is the motion's
/// label. Results do not depend on `threads` (0 or 1 = serial).
BatchOutcome attack_batch(const MotionDataset& dataset, std::span<const std::size_t> indices,
                          const ClassifierModel& model, const EmotionExtractor* extractor, const AttackConfig& config,
                          unsigned threads, const std::string& model_id = "model");

}  // namespace skelattack
