#include "skelattack/motion_io.hpp"

#include "skelattack/error.hpp"

namespace skelattack {

namespace {

std::string join_field(const std::string& prefix, const std::string& name) {
  return prefix.empty() ? name : prefix + "." + name;
}

const json& require(const json& j, const char* key, const std::filesystem::path& src, const std::string& prefix) {
  if (!j.is_object()) throw ParseError(src, prefix, "expected an object");
  auto it = j.find(key);
  if (it == j.end()) throw ParseError(src, join_field(prefix, key), "missing field");
  return *it;
}

int require_int(const json& j, const char* key, const std::filesystem::path& src, const std::string& prefix) {
  const auto& v = require(j, key, src, prefix);
  if (!v.is_number_integer()) throw ParseError(src, join_field(prefix, key), "expected an integer");
  return v.get<int>();
}

double require_number(const json& v, const std::filesystem::path& src, const std::string& field) {
  if (!v.is_number()) throw ParseError(src, field, "expected a number");
  return v.get<double>();
}

}  // namespace

json motion_to_json(const SkeletonMotion& motion) {
  json bones = json::array();
  for (const auto& b : motion.topology().bones()) bones.push_back({b.source, b.target});
  json frames = json::array();
  const auto& p = motion.positions();
  for (int t = 0; t < p.frames(); ++t) {
    json row = json::array();
    for (int j = 0; j < p.joints(); ++j) row.push_back({p(t, j, 0), p(t, j, 1), p(t, j, 2)});
    frames.push_back(std::move(row));
  }
  return json{{"name", motion.name()},
              {"label", motion.label() ? json(*motion.label()) : json(nullptr)},
              {"joints", motion.joint_count()},
              {"frames", motion.frame_count()},
              {"bones", std::move(bones)},
              {"positions", std::move(frames)}};
}

SkeletonMotion motion_from_json(const json& j, const std::filesystem::path& src, const std::string& prefix,
                                const std::shared_ptr<const SkeletonTopology>& shared) {
  const int joints = require_int(j, "joints", src, prefix);
  const int frames = require_int(j, "frames", src, prefix);
  if (joints <= 0) throw ParseError(src, join_field(prefix, "joints"), "must be positive");
  if (frames <= 0) throw ParseError(src, join_field(prefix, "frames"), "must be positive");

  const auto& jb = require(j, "bones", src, prefix);
  const std::string bones_field = join_field(prefix, "bones");
  if (!jb.is_array()) throw ParseError(src, bones_field, "expected an array");
  std::vector<Bone> bones;
  for (std::size_t i = 0; i < jb.size(); ++i) {
    const auto& e = jb[i];
    const std::string f = bones_field + "[" + std::to_string(i) + "]";
    if (!e.is_array() || e.size() != 2 || !e[0].is_number_integer() || !e[1].is_number_integer())
      throw ParseError(src, f, "expected [source, target]");
    Bone b{e[0].get<int>(), e[1].get<int>()};
    if (b.source < 0 || b.source >= joints || b.target < 0 || b.target >= joints)
      throw ParseError(src, f, "joint index out of range");
    if (b.source == b.target) throw ParseError(src, f, "self-loop bone");
    bones.push_back(b);
  }
  std::shared_ptr<const SkeletonTopology> topology;
  try {
    auto parsed = std::make_shared<const SkeletonTopology>(joints, std::move(bones));
    topology = (shared && *shared == *parsed) ? shared : parsed;
  } catch (const ValidationError& e) {
    throw ParseError(src, bones_field, e.what());
  }

  const auto& jp = require(j, "positions", src, prefix);
  const std::string pos_field = join_field(prefix, "positions");
  if (!jp.is_array()) throw ParseError(src, pos_field, "expected an array");
  if (static_cast<int>(jp.size()) != frames)
    throw ParseError(src, pos_field,
                     "frame count mismatch (frames = " + std::to_string(frames) + ", rows = " + std::to_string(jp.size()) + ")");
  JointField pos(frames, joints);
  for (int t = 0; t < frames; ++t) {
    const auto& row = jp[static_cast<std::size_t>(t)];
    const std::string rf = pos_field + "[" + std::to_string(t) + "]";
    if (!row.is_array() || static_cast<int>(row.size()) != joints)
      throw ParseError(src, rf, "joint count mismatch (joints = " + std::to_string(joints) + ")");
    for (int jj = 0; jj < joints; ++jj) {
      const auto& c = row[static_cast<std::size_t>(jj)];
      const std::string cf = rf + "[" + std::to_string(jj) + "]";
      if (!c.is_array() || c.size() != 3) throw ParseError(src, cf, "expected [x, y, z]");
      for (int a = 0; a < 3; ++a) pos(t, jj, a) = require_number(c[static_cast<std::size_t>(a)], src, cf);
    }
  }

  std::optional<int> label;
  if (auto it = j.find("label"); it != j.end() && !it->is_null()) {
    if (!it->is_number_integer() || it->get<int>() < 0)
      throw ParseError(src, join_field(prefix, "label"), "expected a nonnegative integer or null");
    label = it->get<int>();
  }
  std::string name;
  if (auto it = j.find("name"); it != j.end() && !it->is_null()) {
    if (!it->is_string()) throw ParseError(src, join_field(prefix, "name"), "expected a string");
    name = it->get<std::string>();
  }
  try {
    return SkeletonMotion(std::move(topology), std::move(pos), label, std::move(name));
  } catch (const ValidationError& e) {
    throw ParseError(src, prefix, e.what());
  }
}

json load_json(const std::filesystem::path& path) {
  const std::string text = read_file(path);
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(path, "", std::string("malformed JSON: ") + e.what());
  }
}

void save_json(const json& j, const std::filesystem::path& path) { write_file_atomic(path, j.dump() + "\n"); }

void save_motion(const SkeletonMotion& motion, const std::filesystem::path& path) {
  save_json(motion_to_json(motion), path);
}

SkeletonMotion load_motion(const std::filesystem::path& path) { return motion_from_json(load_json(path), path); }

json dataset_to_json(const MotionDataset& dataset, const json& extra) {
  json motions = json::array();
  for (std::size_t i = 0; i < dataset.motions.size(); ++i) {
    json m = motion_to_json(dataset.motions[i]);
    m["split"] = split_name(dataset.splits[i]);
    motions.push_back(std::move(m));
  }
  json out = extra.is_object() ? extra : json::object();
  out["class_count"] = dataset.class_count;
  out["normalization"] = {{"offset", dataset.normalization.offset}, {"scale", dataset.normalization.scale}};
  out["motions"] = std::move(motions);
  return out;
}

MotionDataset dataset_from_json(const json& j, const std::filesystem::path& src) {
  MotionDataset ds;
  ds.class_count = require_int(j, "class_count", src, "");
  if (ds.class_count <= 0) throw ParseError(src, "class_count", "must be positive");
  const auto& norm = require(j, "normalization", src, "");
  for (const char* key : {"offset", "scale"}) {
    const auto& arr = require(norm, key, src, "normalization");
    const std::string f = std::string("normalization.") + key;
    if (!arr.is_array() || arr.size() != 3) throw ParseError(src, f, "expected 3 numbers");
    auto& dst = std::string_view(key) == "offset" ? ds.normalization.offset : ds.normalization.scale;
    for (std::size_t a = 0; a < 3; ++a) dst[a] = require_number(arr[a], src, f);
  }
  for (double s : ds.normalization.scale)
    if (!(s > 0.0)) throw ParseError(src, "normalization.scale", "scale must be positive");

  const auto& jm = require(j, "motions", src, "");
  if (!jm.is_array()) throw ParseError(src, "motions", "expected an array");
  std::shared_ptr<const SkeletonTopology> shared;
  for (std::size_t i = 0; i < jm.size(); ++i) {
    const std::string f = "motions[" + std::to_string(i) + "]";
    auto m = motion_from_json(jm[i], src, f, shared);
    if (!shared) shared = m.topology_ptr();
    if (m.topology_ptr() != shared) throw ParseError(src, f + ".bones", "all motions must share one topology");
    if (m.label() && *m.label() >= ds.class_count) throw ParseError(src, f + ".label", "label out of range");
    Split split = Split::train;
    if (auto it = jm[i].find("split"); it != jm[i].end()) {
      if (!it->is_string()) throw ParseError(src, f + ".split", "expected \"train\" or \"test\"");
      try {
        split = parse_split(it->get<std::string>());
      } catch (const ValidationError& e) {
        throw ParseError(src, f + ".split", e.what());
      }
    }
    ds.motions.push_back(std::move(m));
    ds.splits.push_back(split);
  }
  return ds;
}

void save_dataset(const MotionDataset& dataset, const std::filesystem::path& path, const json& extra) {
  save_json(dataset_to_json(dataset, extra), path);
}

MotionDataset load_dataset(const std::filesystem::path& path) { return dataset_from_json(load_json(path), path); }

}  // namespace skelattack
