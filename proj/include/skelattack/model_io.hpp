#pragma once

#include <filesystem>
#include <memory>

#include <json.hpp>

#include "skelattack/classifier.hpp"

namespace skelattack {

nlohmann::json classifier_to_json(const DenseNetwork& model);
/// Accepts kind "mlp" or "linear".
std::unique_ptr<DenseNetwork> classifier_from_json(const nlohmann::json& j, const std::filesystem::path& source);

nlohmann::json extractor_to_json(const GroupedEmotionExtractor& extractor);
/// Accepts kind "emotion".
GroupedEmotionExtractor extractor_from_json(const nlohmann::json& j, const std::filesystem::path& source);

void save_classifier(const DenseNetwork& model, const std::filesystem::path& path);
std::unique_ptr<DenseNetwork> load_classifier(const std::filesystem::path& path);
void save_extractor(const GroupedEmotionExtractor& extractor, const std::filesystem::path& path);
GroupedEmotionExtractor load_extractor(const std::filesystem::path& path);

/// Throws ValidationError when class count or input shape disagree.
void check_model_matches_dataset(const ClassifierModel& model, const MotionDataset& dataset);

}  // namespace skelattack
