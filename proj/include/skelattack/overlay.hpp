#pragma once

// Per-frame (original, adversarial) coordinate export for external plotting.

#include <string>
#include <vector>

#include <json.hpp>

#include "skelattack/motion.hpp"

namespace skelattack {

/// `count` frame indices spread evenly over [0, frames - 1], first and last
/// included. count = 0 selects every frame.
std::vector<int> evenly_spaced_frames(int frames, int count);

struct OverlayRow {
  int frame = 0;
  int joint = 0;
  Vec3 original;
  Vec3 adversarial;
  /// ||original - adversarial||_2
  double displacement = 0.0;
};

/// One row per (selected frame, joint). Throws ValidationError on a pair mismatch.
std::vector<OverlayRow> build_overlay(const SkeletonMotion& original, const SkeletonMotion& adversarial,
                                      const std::vector<int>& frames);

std::string overlay_csv(const std::vector<OverlayRow>& rows);
nlohmann::json overlay_json(const std::vector<OverlayRow>& rows);

}  // namespace skelattack
