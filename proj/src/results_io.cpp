#include "skelattack/results_io.hpp"

#include <string>

#include "skelattack/error.hpp"
#include "skelattack/motion_io.hpp"

namespace skelattack {

namespace {

json optional_int(const std::optional<int>& v) { return v ? json(*v) : json(nullptr); }

json record_to_json(const SampleRecord& r) {
  return {{"index", r.index},         {"name", r.name},
          {"true_label", r.true_label}, {"target_label", optional_int(r.target_label)},
          {"predicted", r.predicted}, {"success", r.success},
          {"logits", r.logits},       {"metrics", sample_metrics_to_json(r.metrics)}};
}

json trace_to_json(const std::vector<TraceEntry>& trace) {
  json out = json::array();
  for (const auto& e : trace) out.push_back({e.iteration, e.lambda, e.C, e.D, e.L});
  return out;
}

}  // namespace

json batch_to_json(const BatchOutcome& outcome, bool include_trace) {
  json samples = json::array();
  json errors = json::array();
  std::size_t next_record = 0;
  for (const auto& e : outcome.entries) {
    if (!e.result) {
      errors.push_back({{"index", e.index}, {"error", e.error}});
      continue;
    }
    const auto& r = *e.result;
    json s = record_to_json(outcome.records.at(next_record++));
    s["iterations_run"] = r.iterations_run;
    s["first_success_iteration"] = optional_int(r.first_success_iteration);
    s["best_iteration"] = r.best_iteration;
    s["best_distance"] = r.best_distance;
    s["final_lambda"] = r.final_lambda;
    if (include_trace) s["trace"] = trace_to_json(r.trace);
    s["adversarial"] = motion_to_json(r.adversarial);
    samples.push_back(std::move(s));
  }
  return {{"report", report_to_json(outcome.report)}, {"samples", std::move(samples)}, {"errors", std::move(errors)}};
}

std::vector<StoredSample> samples_from_json(const json& results, const MotionDataset& dataset,
                                            const std::filesystem::path& source) {
  auto it = results.find("samples");
  if (it == results.end() || !it->is_array()) throw ParseError(source, "samples", "expected an array");
  std::vector<StoredSample> out;
  for (std::size_t k = 0; k < it->size(); ++k) {
    const auto& s = (*it)[k];
    const std::string field = "samples[" + std::to_string(k) + "]";
    try {
      SampleRecord r;
      r.index = s.at("index").get<std::size_t>();
      if (r.index >= dataset.motions.size()) throw ParseError(source, field + ".index", "index out of range");
      r.name = s.at("name").get<std::string>();
      r.true_label = s.at("true_label").get<int>();
      if (!s.at("target_label").is_null()) r.target_label = s.at("target_label").get<int>();
      r.predicted = s.at("predicted").get<int>();
      r.success = s.at("success").get<bool>();
      r.logits = s.at("logits").get<std::vector<double>>();
      r.metrics = sample_metrics_from_json(s.at("metrics"));
      auto adversarial =
          motion_from_json(s.at("adversarial"), source, field + ".adversarial", dataset.topology_ptr());
      const auto& original = dataset.motions[r.index];
      if (!(adversarial.topology() == original.topology()) ||
          !adversarial.positions().same_shape(original.positions()))
        fail_validation(field + ": adversarial motion does not match original sample " + std::to_string(r.index));
      out.push_back({std::move(r), std::move(adversarial)});
    } catch (const json::exception& e) {
      throw ParseError(source, field, e.what());
    }
  }
  return out;
}

BatchOutcome evaluate_pairs(const MotionDataset& dataset, const std::vector<StoredSample>& samples,
                            const ReportTag& tag, const ClassifierModel* model, bool self) {
  if (self && !model) fail_validation("self-comparison needs a model to classify the originals");
  BatchOutcome out;
  for (const auto& s : samples) {
    const auto& original = dataset.motions.at(s.record.index);
    const SkeletonMotion& other = self ? original : s.adversarial;
    SampleRecord r = s.record;
    r.metrics = sample_metrics(original, other);
    if (model) {
      r.logits = model->forward(other);
      r.predicted = argmax(r.logits);
    }
    r.success = r.target_label ? r.predicted == *r.target_label : r.predicted != r.true_label;
    out.records.push_back(std::move(r));
  }
  out.report = build_report(out.records, tag);
  return out;
}

}  // namespace skelattack
