#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <numbers>
#include <random>

#include "oracle.hpp"
#include "skelattack/dataset.hpp"
#include "skelattack/error.hpp"
#include "skelattack/motion_io.hpp"

using namespace skelattack;
namespace fs = std::filesystem;

namespace {

SkeletonMotion two_joint(Vec3 a, Vec3 b) {
  JointField f(1, 2);
  f.set_point(0, 0, a);
  f.set_point(0, 1, b);
  return SkeletonMotion(oracle::chain(2), f);
}

fs::path temp_path(const std::string& name) {
  auto dir = fs::temp_directory_path() / "skelattack_test_motion";
  fs::create_directories(dir);
  return dir / name;
}

MotionDataset small_dataset(std::uint64_t seed, int frames = 8) {
  SyntheticSpec s;
  s.seed = seed;
  s.class_count = 3;
  s.samples_per_class = 6;
  s.frames = frames;
  s.topology = oracle::chain(6);
  return generate_synthetic_dataset(s);
}

}  // namespace

TEST_CASE("derive_angle_pairs on small topologies") {
  std::vector<Bone> chain{{0, 1}, {1, 2}};
  CHECK(derive_angle_pairs(chain) == std::vector<AnglePair>{{0, 1}});

  std::vector<Bone> star{{0, 1}, {0, 2}, {0, 3}};
  CHECK(derive_angle_pairs(star) == std::vector<AnglePair>{{0, 1}, {0, 2}, {1, 2}});

  std::vector<Bone> disjoint{{0, 1}, {2, 3}};
  CHECK(derive_angle_pairs(disjoint).empty());
}

TEST_CASE("derive_angle_pairs is independent of bone order up to relabeling") {
  std::mt19937_64 rng(5);
  std::vector<Bone> bones{{0, 1}, {1, 2}, {1, 3}, {3, 4}, {4, 5}, {0, 6}};
  auto joint_pairs = [](const std::vector<Bone>& bs) {
    std::vector<std::pair<std::pair<int, int>, std::pair<int, int>>> out;
    for (const auto& p : derive_angle_pairs(bs)) {
      auto a = std::minmax(bs[p.first].source, bs[p.first].target);
      auto b = std::minmax(bs[p.second].source, bs[p.second].target);
      out.push_back(std::minmax(a, b));
    }
    std::sort(out.begin(), out.end());
    return out;
  };
  const auto reference = joint_pairs(bones);
  for (int trial = 0; trial < 10; ++trial) {
    auto shuffled = bones;
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    CHECK(joint_pairs(shuffled) == reference);
  }
}

TEST_CASE("topology validation") {
  CHECK_THROWS_AS(SkeletonTopology(2, {{0, 0}}), ValidationError);
  CHECK_THROWS_AS(SkeletonTopology(2, {{0, 2}}), ValidationError);
  CHECK_THROWS_AS(SkeletonTopology(3, {{0, 1}, {1, 0}}), ValidationError);
  CHECK(SkeletonTopology::from_name("chain16").joint_count() == 16);
  CHECK(SkeletonTopology::from_name("star5").bones().size() == 4);
  CHECK_THROWS_AS(SkeletonTopology::from_name("ring4"), ValidationError);
  const auto topo = SkeletonTopology::chain(5);
  CHECK(topo.angle_pairs() == derive_angle_pairs(topo.bones()));
}

TEST_CASE("bone_lengths examples") {
  CHECK(bone_lengths(two_joint({0, 0, 0}, {1, 0, 0})).values == std::vector<double>{1.0});
  CHECK(bone_lengths(two_joint({0, 0, 0}, {0, 3, 4})).values == std::vector<double>{5.0});
  CHECK(bone_lengths(two_joint({0.5, 0.5, 0.5}, {0.5, 0.5, 0.5})).values == std::vector<double>{0.0});
}

TEST_CASE("bone angle examples") {
  CHECK(bone_angle({1, 0, 0}, {0, 1, 0}) == doctest::Approx(std::numbers::pi / 2).epsilon(1e-15));
  CHECK(bone_angle({1, 0, 0}, {-1, 0, 0}) == doctest::Approx(std::acos(-1.0 + 1e-6)).epsilon(1e-15));
  CHECK(bone_angle({1, 0, 0}, {2, 0, 0}) == doctest::Approx(std::acos(1.0 - 1e-6)).epsilon(1e-15));
  CHECK(bone_angle({1, 0, 0}, {-1, 0, 0}) < std::numbers::pi);
  CHECK(bone_angle({1, 0, 0}, {2, 0, 0}) > 0.0);

  // Outward orientation: for a straight chain 0-1-2 the angle at joint 1 is ~pi.
  JointField f(1, 3);
  f.set_point(0, 0, {0, 0, 0});
  f.set_point(0, 1, {1, 0, 0});
  f.set_point(0, 2, {2, 0, 0});
  const auto straight = bone_angles(SkeletonTopology::chain(3), f);
  CHECK(straight.angles.values[0] == doctest::Approx(std::acos(-1.0 + 1e-6)));

  // Zero-length bone: angle defined as 0 and flagged.
  f.set_point(0, 2, {1, 0, 0});
  const auto degenerate = bone_angles(SkeletonTopology::chain(3), f);
  CHECK(degenerate.angles.values[0] == 0.0);
  CHECK(degenerate.degenerate[0] != 0);
  const auto jac = bone_angle_jacobian({1, 0, 0}, {0, 0, 0});
  CHECK(jac.degenerate);
  CHECK(jac.d_first == Vec3{});
}

TEST_CASE("angle jacobian matches finite differences") {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> n(0.0, 1.0);
  const double h = 1e-6;
  for (int trial = 0; trial < 50; ++trial) {
    Vec3 u{n(rng), n(rng), n(rng)}, v{n(rng), n(rng), n(rng)};
    const auto jac = bone_angle_jacobian(u, v);
    if (jac.saturated) continue;
    double du[3];
    for (int a = 0; a < 3; ++a) {
      Vec3 e{};
      (a == 0 ? e.x : a == 1 ? e.y : e.z) = h;
      du[a] = (bone_angle(u + e, v) - bone_angle(u - e, v)) / (2 * h);
    }
    CHECK(jac.d_first.x == doctest::Approx(du[0]).epsilon(1e-6));
    CHECK(jac.d_first.y == doctest::Approx(du[1]).epsilon(1e-6));
    CHECK(jac.d_first.z == doctest::Approx(du[2]).epsilon(1e-6));
  }
}

TEST_CASE("joint_speeds examples") {
  JointField f(2, 1);
  CHECK(joint_speeds(f).values == std::vector<double>{0.0});
  f.set_point(1, 0, {0, 3, 4});
  CHECK(joint_speeds(f).values == std::vector<double>{5.0});
  JointField g(3, 1);
  g.set_point(1, 0, {1, 0, 0});
  g.set_point(2, 0, {1, 0, 0});
  CHECK(joint_speeds(g).values == std::vector<double>{1.0, 0.0});
  try {
    (void)joint_speeds(JointField(1, 1));
    FAIL("expected an error");
  } catch (const ValidationError& e) {
    CHECK(std::string(e.what()) == "motion too short for speed");
  }
}

TEST_CASE("dynamics match the brute-force oracle") {
  std::mt19937_64 rng(21);
  auto topo = std::make_shared<const SkeletonTopology>(6, std::vector<Bone>{{0, 1}, {1, 2}, {1, 3}, {3, 4}, {0, 5}});
  for (int trial = 0; trial < 20; ++trial) {
    const auto f = oracle::random_field(rng, 5, 6);
    const auto lengths = bone_lengths(*topo, f);
    const auto angles = bone_angles(*topo, f);
    const auto speeds = joint_speeds(f);
    const auto ol = oracle::lengths(*topo, f);
    const auto oa = oracle::angles(*topo, f);
    const auto os = oracle::speeds(f);
    for (int t = 0; t < 5; ++t) {
      for (int b = 0; b < lengths.cols; ++b) CHECK(std::fabs(lengths(t, b) - ol[t][b]) <= 1e-12);
      REQUIRE(oa[t].size() == static_cast<std::size_t>(angles.angles.cols));
      for (int k = 0; k < angles.angles.cols; ++k) CHECK(std::fabs(angles.angles(t, k) - oa[t][k]) <= 1e-12);
    }
    for (int t = 0; t < 4; ++t)
      for (int j = 0; j < 6; ++j) CHECK(std::fabs(speeds(t, j) - os[t][j]) <= 1e-12);
  }
}

TEST_CASE("dynamics invariances") {
  std::mt19937_64 rng(3);
  const auto topo = SkeletonTopology::chain(5);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (int trial = 0; trial < 10; ++trial) {
    const auto f = oracle::random_field(rng, 6, 5);
    const auto lengths = bone_lengths(topo, f);
    const auto angles = bone_angles(topo, f).angles;
    const auto speeds = joint_speeds(f);

    // Same translation for every joint of a frame (and every frame, so speeds
    // are preserved too).
    const Vec3 shift{u(rng), u(rng), u(rng)};
    JointField moved = f;
    for (int t = 0; t < 6; ++t)
      for (int j = 0; j < 5; ++j) moved.add_point(t, j, shift);
    const auto ml = bone_lengths(topo, moved);
    const auto ma = bone_angles(topo, moved).angles;
    const auto ms = joint_speeds(moved);
    for (std::size_t i = 0; i < lengths.values.size(); ++i) CHECK(std::fabs(ml.values[i] - lengths.values[i]) <= 1e-12);
    for (std::size_t i = 0; i < angles.values.size(); ++i) CHECK(std::fabs(ma.values[i] - angles.values[i]) <= 1e-12);
    for (std::size_t i = 0; i < speeds.values.size(); ++i) CHECK(std::fabs(ms.values[i] - speeds.values[i]) <= 1e-12);

    const double c = 0.1 + std::fabs(u(rng));
    JointField scaled = f;
    for (double& v : scaled.values()) v *= c;
    const auto sl = bone_lengths(topo, scaled);
    const auto sa = bone_angles(topo, scaled).angles;
    const auto ss = joint_speeds(scaled);
    for (std::size_t i = 0; i < lengths.values.size(); ++i)
      CHECK(std::fabs(sl.values[i] - c * lengths.values[i]) <= 1e-12);
    for (std::size_t i = 0; i < angles.values.size(); ++i) CHECK(std::fabs(sa.values[i] - angles.values[i]) <= 1e-12);
    for (std::size_t i = 0; i < speeds.values.size(); ++i)
      CHECK(std::fabs(ss.values[i] - c * speeds.values[i]) <= 1e-12);

    JointField reversed(6, 5);
    for (int t = 0; t < 6; ++t)
      for (int j = 0; j < 5; ++j) reversed.set_point(t, j, f.point(5 - t, j));
    const auto rs = joint_speeds(reversed);
    for (int t = 0; t < 5; ++t)
      for (int j = 0; j < 5; ++j) CHECK(rs(t, j) == speeds(4 - t, j));
  }
}

TEST_CASE("motion validation") {
  auto topo = oracle::chain(3);
  CHECK_THROWS_AS(SkeletonMotion(topo, JointField(2, 4)), ValidationError);
  JointField f(2, 3);
  f(1, 2, 0) = std::nan("");
  CHECK_THROWS_AS(SkeletonMotion(topo, f), ValidationError);
  CHECK_THROWS_AS(JointField(2, 3, std::vector<double>(5)), ValidationError);
}

TEST_CASE("normalization examples") {
  auto topo = oracle::chain(2);
  auto make = [&](std::vector<double> values) {
    MotionDataset d;
    d.class_count = 1;
    d.motions.emplace_back(topo, JointField(1, 2, std::move(values)), 0);
    d.splits = {Split::train};
    return d;
  };

  SUBCASE("already spanning [0,1] is the identity") {
    auto [out, t] = normalize_dataset(make({0, 0, 0, 1, 1, 1}));
    CHECK(t == NormalizationTransform{});
    CHECK(out.motions[0].positions().values()[4] == 1.0);
  }
  SUBCASE("axis spanning [-2, 2]") {
    auto [out, t] = normalize_dataset(make({-2, 0, 0, 2, 1, 1}));
    CHECK(t.offset[0] == -2.0);
    CHECK(t.scale[0] == 4.0);
    JointField zero(1, 2, std::vector<double>{0, 0, 0, 0, 0, 0});
    CHECK(t.normalize(zero).values()[0] == 0.5);
  }
  SUBCASE("constant axis maps to 0") {
    auto [out, t] = normalize_dataset(make({0, 7, 0, 1, 7, 1}));
    CHECK(t.scale[1] == 1.0);
    CHECK(t.offset[1] == 7.0);
    CHECK(out.motions[0].positions().values()[1] == 0.0);
    CHECK(out.motions[0].positions().values()[4] == 0.0);
  }
  SUBCASE("round trip") {
    std::mt19937_64 rng(9);
    NormalizationTransform t{{-1.5, 2.0, 0.25}, {3.0, 0.5, 7.0}};
    const auto f = oracle::random_field(rng, 4, 5, -10.0, 10.0);
    const auto back = t.denormalize(t.normalize(f));
    for (std::size_t i = 0; i < f.size(); ++i) CHECK(std::fabs(back.values()[i] - f.values()[i]) <= 1e-12);
  }
}

TEST_CASE("synthetic dataset") {
  const auto a = small_dataset(7);
  const auto b = small_dataset(7);
  const auto c = small_dataset(8);
  REQUIRE(a.motions.size() == 18);
  bool all_equal = true, any_differs = false;
  for (std::size_t i = 0; i < a.motions.size(); ++i) {
    all_equal = all_equal && a.motions[i].positions() == b.motions[i].positions() && a.splits[i] == b.splits[i];
    any_differs = any_differs || !(a.motions[i].positions() == c.motions[i].positions());
  }
  CHECK(all_equal);
  CHECK(any_differs);
  CHECK(dataset_to_json(a).dump() == dataset_to_json(b).dump());

  for (const auto& m : a.motions)
    for (double v : m.positions().values()) {
      CHECK(v >= 0.0);
      CHECK(v <= 1.0);
    }
  CHECK(!a.indices(Split::test).empty());
  CHECK(!a.indices(Split::train).empty());

  // Class centroids are pairwise distinct.
  std::vector<std::vector<double>> centroid(3, std::vector<double>(a.motions[0].positions().size(), 0.0));
  for (const auto& m : a.motions)
    for (std::size_t i = 0; i < centroid[0].size(); ++i) centroid[*m.label()][i] += m.positions().values()[i] / 6.0;
  double total = 0.0;
  for (int p = 0; p < 3; ++p)
    for (int q = p + 1; q < 3; ++q) {
      double s = 0.0;
      for (std::size_t i = 0; i < centroid[p].size(); ++i) s += std::pow(centroid[p][i] - centroid[q][i], 2);
      CHECK(s > 0.0);
      total += std::sqrt(s);
    }
  CHECK(total / 3.0 > 0.0);
}

TEST_CASE("motion file round trip and errors") {
  std::mt19937_64 rng(4);
  auto topo = oracle::chain(4);
  const SkeletonMotion m(topo, oracle::random_field(rng, 5, 4), 2, "probe");
  const auto path = temp_path("motion.json");
  save_motion(m, path);
  const auto back = load_motion(path);
  CHECK(back.name() == "probe");
  CHECK(back.label() == std::optional<int>(2));
  CHECK(back.topology() == m.topology());
  for (std::size_t i = 0; i < m.positions().size(); ++i)
    CHECK(std::fabs(back.positions().values()[i] - m.positions().values()[i]) <= 1e-15);

  auto expect_error = [&](json j, const std::string& needle) {
    const auto p = temp_path("bad.json");
    save_json(j, p);
    try {
      (void)load_motion(p);
      FAIL("expected a parse error");
    } catch (const ParseError& e) {
      const std::string what = e.what();
      CHECK_MESSAGE(what.find(needle) != std::string::npos, what);
      CHECK_MESSAGE(what.find(p.string()) != std::string::npos, what);
    }
  };
  const json good = motion_to_json(m);
  {
    json j = good;
    j["bones"][0] = {0, 0};
    expect_error(j, "self-loop bone");
  }
  {
    json j = good;
    j["frames"] = 6;
    expect_error(j, "frame count mismatch");
  }
  {
    json j = good;
    j["bones"][1] = {1, 9};
    expect_error(j, "out of range");
  }
  {
    json j = good;
    j.erase("positions");
    expect_error(j, "positions");
  }
  {
    const auto p = temp_path("truncated.json");
    write_file_atomic(p, good.dump().substr(0, 40));
    CHECK_THROWS_AS((void)load_motion(p), ParseError);
  }
  CHECK_THROWS_AS((void)load_motion(temp_path("does_not_exist.json")), IoError);
}

TEST_CASE("dataset file round trip") {
  const auto d = small_dataset(3);
  const auto path = temp_path("dataset.json");
  save_dataset(d, path, json{{"note", "x"}});
  const auto back = load_dataset(path);
  CHECK(back.class_count == d.class_count);
  CHECK(back.normalization == d.normalization);
  REQUIRE(back.motions.size() == d.motions.size());
  for (std::size_t i = 0; i < d.motions.size(); ++i) {
    CHECK(back.motions[i].positions() == d.motions[i].positions());
    CHECK(back.splits[i] == d.splits[i]);
  }
  CHECK(load_json(path).at("note") == "x");
  // Serialization is canonical: saving what was loaded gives identical bytes.
  const auto again = temp_path("dataset2.json");
  save_dataset(back, again, json{{"note", "x"}});
  CHECK(read_file(path) == read_file(again));
}
