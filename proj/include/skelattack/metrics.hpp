#pragma once

// Imperceptibility and misclassification metrics over (original, adversarial)
// pairs, and the batch report built from them.

#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "skelattack/loss.hpp"
#include "skelattack/motion.hpp"

namespace skelattack {

struct SampleMetrics {
  /// Mean |B - B'| / B over frames and bones.
  double dBB = 0.0;
  /// Mean |A - A'| / A over frames and angle pairs.
  double dAA = 0.0;
  /// ||S - S'||_2 / (intervals x joints).
  double dSS = 0.0;
  /// Mean over frames of the per-frame coordinate l2 distance.
  double l2 = 0.0;

  friend bool operator==(const SampleMetrics&, const SampleMetrics&) = default;
};

struct MotionPair {
  const SkeletonMotion* original = nullptr;
  const SkeletonMotion* adversarial = nullptr;
};

/// Throws ValidationError on topology or shape mismatch.
SampleMetrics sample_metrics(const SkeletonMotion& original, const SkeletonMotion& adversarial);

double delta_b_over_b(std::span<const MotionPair> pairs);
double delta_a_over_a(std::span<const MotionPair> pairs);
double delta_s_over_s(std::span<const MotionPair> pairs);
double l2_metric(std::span<const MotionPair> pairs);

struct SampleRecord {
  std::size_t index = 0;
  std::string name;
  int true_label = 0;
  std::optional<int> target_label;
  /// Logits of the returned adversarial motion.
  std::vector<double> logits;
  int predicted = 0;
  bool success = false;
  SampleMetrics metrics;
};

/// Recounts the goal from predicted labels. Throws on empty input.
double success_rate(std::span<const SampleRecord> records, AttackMode mode);

struct ReportTag {
  std::string model_id;
  AttackMode mode = AttackMode::untargeted;
  double gamma = 1.0;
};

struct BatchReport {
  ReportTag tag;
  std::size_t n = 0;
  double dBB = 0.0;
  double dAA = 0.0;
  double dSS = 0.0;
  double l2 = 0.0;
  double sr = 0.0;
};

BatchReport build_report(std::span<const SampleRecord> records, const ReportTag& tag);

std::string report_csv_header();
std::string report_csv_row(const BatchReport& report);
/// Parses one CSV row produced by report_csv_row.
BatchReport parse_report_csv_row(const std::string& row);

nlohmann::json sample_metrics_to_json(const SampleMetrics& m);
SampleMetrics sample_metrics_from_json(const nlohmann::json& j);
nlohmann::json report_to_json(const BatchReport& report);
BatchReport report_from_json(const nlohmann::json& j);

/// Fixed-width table in the layout "dB/B dA/A dS/S SR l2", percentages with
/// one decimal. One row per (label, report).
std::string format_report_table(std::span<const std::string> labels, std::span<const BatchReport> reports);

}  // namespace skelattack
