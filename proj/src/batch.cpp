#include <algorithm>
#include <atomic>
#include <thread>

#include "skelattack/attack.hpp"
#include "skelattack/error.hpp"

namespace skelattack {

SampleRecord make_record(std::size_t index, const SkeletonMotion& original, const AttackConfig& config,
                         const AttackResult& result) {
  SampleRecord r;
  r.index = index;
  r.name = original.name();
  r.true_label = config.constraint.true_label;
  if (config.constraint.mode == AttackMode::targeted) r.target_label = config.constraint.target_label;
  r.logits = result.logits;
  r.predicted = result.predicted_label;
  r.success = result.success;
  r.metrics = result.metrics;
  return r;
}

std::vector<std::size_t> select_attack_samples(const MotionDataset& dataset, const ClassifierModel& model,
                                               const ConstraintSpec& spec, std::size_t limit,
                                               bool include_misclassified) {
  std::vector<std::size_t> out;
  for (std::size_t i : dataset.indices(Split::test)) {
    if (limit != 0 && out.size() >= limit) break;
    const auto& m = dataset.motions[i];
    if (!m.label()) continue;
    if (spec.mode == AttackMode::targeted && spec.target_label == *m.label()) continue;
    if (!include_misclassified && argmax(model.forward(m)) != *m.label()) continue;
    out.push_back(i);
  }
  return out;
}

namespace {

AttackConfig sample_config(const AttackConfig& base, const SkeletonMotion& m, std::size_t index) {
  AttackConfig cfg = base;
  cfg.seed = base.seed ^ static_cast<std::uint64_t>(index);
  if (!m.label()) fail_validation("motion '" + m.name() + "' has no label");
  cfg.constraint.true_label = *m.label();
  return cfg;
}

}  // namespace

BatchOutcome attack_batch(const MotionDataset& dataset, std::span<const std::size_t> indices,
                          const ClassifierModel& model, const EmotionExtractor* extractor, const AttackConfig& config,
                          unsigned threads, const std::string& model_id) {
  config.validate();
  for (std::size_t i : indices)
    if (i >= dataset.motions.size()) fail_validation("sample index out of range");

  BatchOutcome out;
  out.entries.resize(indices.size());
  auto work = [&](std::size_t k) {
    auto& entry = out.entries[k];
    entry.index = indices[k];
    try {
      const auto& m = dataset.motions[indices[k]];
      entry.result = run_attack(m, model, extractor, sample_config(config, m, indices[k]));
    } catch (const Error& e) {
      entry.error = e.what();
    }
  };

  const unsigned workers = std::min<std::size_t>(threads, indices.size());
  if (workers <= 1) {
    for (std::size_t k = 0; k < indices.size(); ++k) work(k);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w)
      pool.emplace_back([&] {
        for (std::size_t k = next.fetch_add(1); k < indices.size(); k = next.fetch_add(1)) work(k);
      });
  }

  for (const auto& e : out.entries) {
    if (!e.result) continue;
    const auto& m = dataset.motions[e.index];
    out.records.push_back(make_record(e.index, m, sample_config(config, m, e.index), *e.result));
  }
  out.report = build_report(out.records, {model_id, config.constraint.mode, config.gamma});
  return out;
}

}  // namespace skelattack
