#pragma once

#include <filesystem>

#include <json.hpp>

#include "skelattack/dataset.hpp"
#include "skelattack/motion.hpp"

namespace skelattack {

using json = nlohmann::json;

json motion_to_json(const SkeletonMotion& motion);

/// `source` and `field` only feed error messages. When `shared` is non-null and
/// equal to the parsed topology, the motion reuses it.
SkeletonMotion motion_from_json(const json& j, const std::filesystem::path& source, const std::string& field = "",
                                const std::shared_ptr<const SkeletonTopology>& shared = nullptr);

void save_motion(const SkeletonMotion& motion, const std::filesystem::path& path);
SkeletonMotion load_motion(const std::filesystem::path& path);

/// Extra top-level keys (e.g. the generating config) go into `extra`.
json dataset_to_json(const MotionDataset& dataset, const json& extra = json::object());
MotionDataset dataset_from_json(const json& j, const std::filesystem::path& source);

void save_dataset(const MotionDataset& dataset, const std::filesystem::path& path,
                  const json& extra = json::object());
MotionDataset load_dataset(const std::filesystem::path& path);

/// Reads and parses a JSON document, mapping syntax errors to ParseError.
json load_json(const std::filesystem::path& path);
/// Serializes with a trailing newline and writes atomically.
void save_json(const json& j, const std::filesystem::path& path);

}  // namespace skelattack
