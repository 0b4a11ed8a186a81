#include "skelattack/overlay.hpp"

#include <cmath>
#include <cstdio>

#include "skelattack/error.hpp"

namespace skelattack {

std::vector<int> evenly_spaced_frames(int frames, int count) {
  if (frames <= 0) fail_validation("motion has no frames");
  if (count < 0) fail_validation("frame count must be nonnegative");
  if (count > frames) fail_validation("cannot sample more frames than the motion has");
  if (count == 0) count = frames;
  if (count == 1) return {0};
  std::vector<int> out;
  for (int k = 0; k < count; ++k)
    out.push_back(static_cast<int>(std::lround(static_cast<double>(k) * (frames - 1) / (count - 1))));
  return out;
}

std::vector<OverlayRow> build_overlay(const SkeletonMotion& original, const SkeletonMotion& adversarial,
                                      const std::vector<int>& frames) {
  if (!(original.topology() == adversarial.topology()) ||
      !original.positions().same_shape(adversarial.positions()))
    fail_validation("overlay pair has mismatched topology or shape");
  std::vector<OverlayRow> rows;
  for (int t : frames) {
    if (t < 0 || t >= original.frame_count()) fail_validation("overlay frame out of range");
    for (int j = 0; j < original.joint_count(); ++j) {
      OverlayRow r{t, j, original.positions().point(t, j), adversarial.positions().point(t, j), 0.0};
      r.displacement = norm(r.original - r.adversarial);
      rows.push_back(r);
    }
  }
  return rows;
}

std::string overlay_csv(const std::vector<OverlayRow>& rows) {
  std::string out = "frame,joint,orig_x,orig_y,orig_z,adv_x,adv_y,adv_z,displacement\n";
  char buf[512];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof buf, "%d,%d,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", r.frame, r.joint, r.original.x,
                  r.original.y, r.original.z, r.adversarial.x, r.adversarial.y, r.adversarial.z, r.displacement);
    out += buf;
  }
  return out;
}

nlohmann::json overlay_json(const std::vector<OverlayRow>& rows) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& r : rows)
    out.push_back({{"frame", r.frame},
                   {"joint", r.joint},
                   {"original", {r.original.x, r.original.y, r.original.z}},
                   {"adversarial", {r.adversarial.x, r.adversarial.y, r.adversarial.z}},
                   {"displacement", r.displacement}});
  return out;
}

}  // namespace skelattack
