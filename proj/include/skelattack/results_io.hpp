#pragma once

// Attack campaign results on disk, and recomputation of the report from the
// stored (original, adversarial) pairs.

#include <filesystem>
#include <vector>

#include <json.hpp>

#include "skelattack/attack.hpp"

namespace skelattack {

/// {"report", "samples": [...], "errors": [...]}. Each sample carries its
/// record, optimizer bookkeeping and the adversarial motion; traces only when
/// `include_trace`.
nlohmann::json batch_to_json(const BatchOutcome& outcome, bool include_trace);

struct StoredSample {
  SampleRecord record;
  SkeletonMotion adversarial;
};

/// Parses the "samples" array of a results document. Adversarial motions must
/// share the dataset's topology and shape.
std::vector<StoredSample> samples_from_json(const nlohmann::json& results, const MotionDataset& dataset,
                                            const std::filesystem::path& source);

/// Recomputes every metric from the pairs. With a model, logits and predicted
/// labels are recomputed too; otherwise the stored ones are recounted. With
/// `self`, each original is compared against itself (requires a model).
BatchOutcome evaluate_pairs(const MotionDataset& dataset, const std::vector<StoredSample>& samples,
                            const ReportTag& tag, const ClassifierModel* model, bool self);

}  // namespace skelattack
