#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "oracle.hpp"
#include "skelattack/error.hpp"
#include "skelattack/metrics.hpp"

using namespace skelattack;

namespace {

SampleRecord record(int truth, int predicted, std::optional<int> target = std::nullopt, SampleMetrics m = {}) {
  SampleRecord r;
  r.true_label = truth;
  r.predicted = predicted;
  r.target_label = target;
  r.success = target ? predicted == *target : predicted != truth;
  r.metrics = m;
  return r;
}

}  // namespace

TEST_CASE("scalar metric examples") {
  SUBCASE("dB/B") {
    auto topo = oracle::chain(2);
    SkeletonMotion x(topo, JointField(1, 2, std::vector<double>{0, 0, 0, 2, 0, 0}));
    SkeletonMotion y(topo, JointField(1, 2, std::vector<double>{0, 0, 0, 1.9, 0, 0}));
    MotionPair p{&x, &y};
    CHECK(delta_b_over_b({&p, 1}) == doctest::Approx(0.05).epsilon(1e-12));
  }
  SUBCASE("dA/A") {
    auto topo = oracle::chain(3);
    SkeletonMotion x(topo, JointField(1, 3, std::vector<double>{1, 0, 0, 0, 0, 0, 0, 1, 0}));
    SkeletonMotion y(topo, JointField(1, 3, std::vector<double>{1, 0, 0, 0, 0, 0, 1, 1, 0}));
    MotionPair p{&x, &y};
    CHECK(delta_a_over_a({&p, 1}) == doctest::Approx(0.5).epsilon(1e-9));
  }
  SUBCASE("dS/S") {
    auto topo = std::make_shared<const SkeletonTopology>(1, std::vector<Bone>{});
    SkeletonMotion x(topo, JointField(2, 1, std::vector<double>{0, 0, 0, 0.2, 0, 0}));
    SkeletonMotion y(topo, JointField(2, 1, std::vector<double>{0, 0, 0, 0.1, 0, 0}));
    MotionPair p{&x, &y};
    CHECK(delta_s_over_s({&p, 1}) == doctest::Approx(0.1).epsilon(1e-12));
    SkeletonMotion one(topo, JointField(1, 1));
    MotionPair q{&one, &one};
    CHECK_THROWS_AS(delta_s_over_s({&q, 1}), ValidationError);
  }
  SUBCASE("l2") {
    auto topo = oracle::chain(2);
    SkeletonMotion x(topo, JointField(1, 2, 0.5));
    JointField f(1, 2, 0.5);
    f(0, 1, 1) += 0.3;
    SkeletonMotion y(topo, f);
    MotionPair p{&x, &y};
    CHECK(l2_metric({&p, 1}) == doctest::Approx(0.3).epsilon(1e-12));
  }
}

TEST_CASE("identical pairs give zero metrics") {
  std::mt19937_64 rng(1);
  auto topo = oracle::chain(5);
  std::vector<SkeletonMotion> motions;
  for (int i = 0; i < 4; ++i) motions.emplace_back(topo, oracle::random_field(rng, 6, 5));
  std::vector<MotionPair> pairs;
  for (const auto& m : motions) pairs.push_back({&m, &m});
  CHECK(delta_b_over_b(pairs) == 0.0);
  CHECK(delta_a_over_a(pairs) == 0.0);
  CHECK(delta_s_over_s(pairs) == 0.0);
  CHECK(l2_metric(pairs) == 0.0);
  CHECK(sample_metrics(motions[0], motions[0]) == SampleMetrics{});
}

TEST_CASE("metrics match the brute-force oracle on random batches") {
  std::mt19937_64 rng(2);
  auto topo = std::make_shared<const SkeletonTopology>(7, std::vector<Bone>{{0, 1}, {1, 2}, {1, 3}, {3, 4}, {0, 5}, {5, 6}});
  for (int batch = 0; batch < 30; ++batch) {
    const int n = 1 + static_cast<int>(rng() % 5);
    std::vector<SkeletonMotion> xs, ys;
    for (int i = 0; i < n; ++i) {
      xs.emplace_back(topo, oracle::random_field(rng, 5, 7));
      ys.emplace_back(topo, oracle::perturb(rng, xs.back().positions(), 0.05));
    }
    std::vector<MotionPair> pairs;
    oracle::Metrics expect;
    for (int i = 0; i < n; ++i) {
      pairs.push_back({&xs[i], &ys[i]});
      const auto m = oracle::metrics(xs[i], ys[i]);
      expect.dBB += m.dBB / n;
      expect.dAA += m.dAA / n;
      expect.dSS += m.dSS / n;
      expect.l2 += m.l2 / n;
    }
    CHECK(std::fabs(delta_b_over_b(pairs) - expect.dBB) <= 1e-12);
    CHECK(std::fabs(delta_a_over_a(pairs) - expect.dAA) <= 1e-12);
    CHECK(std::fabs(delta_s_over_s(pairs) - expect.dSS) <= 1e-12);
    CHECK(std::fabs(l2_metric(pairs) - expect.l2) <= 1e-12);
  }
}

TEST_CASE("metric invariances") {
  std::mt19937_64 rng(3);
  auto topo = oracle::chain(5);
  std::vector<SkeletonMotion> xs, ys, xt, yt;
  for (int i = 0; i < 5; ++i) {
    xs.emplace_back(topo, oracle::random_field(rng, 4, 5));
    ys.emplace_back(topo, oracle::perturb(rng, xs.back().positions(), 0.05));
    auto shift = [&](const JointField& f) {
      JointField g = f;
      for (int t = 0; t < g.frames(); ++t)
        for (int j = 0; j < g.joints(); ++j) g.add_point(t, j, {0.3, -1.2, 2.5});
      return g;
    };
    xt.emplace_back(topo, shift(xs.back().positions()));
    yt.emplace_back(topo, shift(ys.back().positions()));
  }
  std::vector<MotionPair> pairs, reversed, moved;
  for (int i = 0; i < 5; ++i) {
    pairs.push_back({&xs[i], &ys[i]});
    reversed.push_back({&xs[4 - i], &ys[4 - i]});
    moved.push_back({&xt[i], &yt[i]});
  }
  CHECK(delta_b_over_b(reversed) == doctest::Approx(delta_b_over_b(pairs)).epsilon(1e-14));
  CHECK(delta_a_over_a(reversed) == doctest::Approx(delta_a_over_a(pairs)).epsilon(1e-14));
  CHECK(delta_s_over_s(reversed) == doctest::Approx(delta_s_over_s(pairs)).epsilon(1e-14));
  CHECK(l2_metric(reversed) == doctest::Approx(l2_metric(pairs)).epsilon(1e-14));
  CHECK(std::fabs(delta_b_over_b(moved) - delta_b_over_b(pairs)) <= 1e-12);
  CHECK(std::fabs(delta_a_over_a(moved) - delta_a_over_a(pairs)) <= 1e-12);
  for (const auto& p : pairs) CHECK(l2_metric({&p, 1}) > 0.0);
}

TEST_CASE("mismatched pairs are rejected") {
  SkeletonMotion a(oracle::chain(3), JointField(2, 3));
  SkeletonMotion b(oracle::chain(4), JointField(2, 4));
  auto star = std::make_shared<const SkeletonTopology>(SkeletonTopology::star(3));
  SkeletonMotion c(star, JointField(2, 3));
  SkeletonMotion d(oracle::chain(3), JointField(3, 3));
  CHECK_THROWS_AS(sample_metrics(a, b), ValidationError);
  CHECK_THROWS_AS(sample_metrics(a, c), ValidationError);
  CHECK_THROWS_AS(sample_metrics(a, d), ValidationError);
  MotionPair p{&a, &c};
  CHECK_THROWS_AS(delta_b_over_b({&p, 1}), ValidationError);
}

TEST_CASE("success rate") {
  std::vector<SampleRecord> r{record(0, 1), record(1, 2), record(2, 0), record(0, 0)};
  CHECK(success_rate(r, AttackMode::untargeted) == 0.75);
  r.pop_back();
  CHECK(success_rate(r, AttackMode::untargeted) == 1.0);
  // Predictions differ from the label but miss the target: failures.
  std::vector<SampleRecord> t{record(0, 2, 2), record(0, 1, 2), record(1, 0, 2)};
  CHECK(success_rate(t, AttackMode::targeted) == doctest::Approx(1.0 / 3.0));
  CHECK_THROWS_AS(success_rate(std::vector<SampleRecord>{}, AttackMode::untargeted), ValidationError);

  // Brute-force recount from logits.
  std::mt19937_64 rng(4);
  std::normal_distribution<double> n(0.0, 1.0);
  std::vector<SampleRecord> random;
  int hits = 0;
  for (int i = 0; i < 200; ++i) {
    SampleRecord s;
    s.true_label = static_cast<int>(rng() % 4);
    s.logits = {n(rng), n(rng), n(rng), n(rng)};
    int top = 0;
    for (int k = 1; k < 4; ++k)
      if (s.logits[k] > s.logits[top]) top = k;
    s.predicted = top;
    hits += top != s.true_label;
    random.push_back(s);
  }
  CHECK(success_rate(random, AttackMode::untargeted) == doctest::Approx(hits / 200.0).epsilon(1e-15));
}

TEST_CASE("batch report") {
  SUBCASE("zero perturbation successful batch") {
    std::vector<SampleRecord> r{record(0, 1), record(1, 0)};
    const auto rep = build_report(r, {"m", AttackMode::untargeted, 1.0});
    const std::vector<std::string> labels{"zero"};
    const auto table = format_report_table(labels, {&rep, 1});
    CHECK(table.find("0.0%") != std::string::npos);
    CHECK(table.find("100%") != std::string::npos);
    CHECK(table.find("0.00") != std::string::npos);
    // Row order: dB/B dA/A dS/S SR l2.
    const auto row = table.substr(table.find("zero"));
    CHECK(row.find("0.0%") < row.find("100%"));
    CHECK(row.find("100%") < row.find("0.00 "));
  }
  SUBCASE("means match a hand computation") {
    std::vector<SampleRecord> r{record(0, 1, std::nullopt, {0.01, 0.10, 0.001, 0.5}),
                                record(1, 1, std::nullopt, {0.02, 0.20, 0.002, 1.0}),
                                record(2, 0, std::nullopt, {0.06, 0.30, 0.006, 1.5})};
    const auto rep = build_report(r, {"m", AttackMode::untargeted, 0.1});
    CHECK(rep.n == 3);
    CHECK(rep.dBB == doctest::Approx(0.03).epsilon(1e-14));
    CHECK(rep.dAA == doctest::Approx(0.2).epsilon(1e-14));
    CHECK(rep.dSS == doctest::Approx(0.003).epsilon(1e-14));
    CHECK(rep.l2 == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(rep.sr == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
    const std::vector<std::string> labels{"toy"};
    const auto table = format_report_table(labels, {&rep, 1});
    CHECK(table.find("3.0%") != std::string::npos);
    CHECK(table.find("20.0%") != std::string::npos);
    CHECK(table.find("66.7%") != std::string::npos);
  }
  SUBCASE("empty input") {
    const auto rep = build_report(std::vector<SampleRecord>{}, {"m", AttackMode::untargeted, 1.0});
    CHECK(rep.n == 0);
    CHECK(rep.sr == 0.0);
  }
  SUBCASE("CSV and JSON round trip") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 50; ++trial) {
      BatchReport r{{trial % 2 ? "victim,\"quoted\"" : "mlp", trial % 3 ? AttackMode::targeted : AttackMode::untargeted,
                     u(rng)},
                    static_cast<std::size_t>(rng() % 1000),
                    u(rng),
                    u(rng),
                    u(rng) * 1e-5,
                    u(rng) * 3,
                    u(rng)};
      const auto row = report_csv_row(r);
      const auto c = parse_report_csv_row(row);
      const auto j = report_from_json(nlohmann::json::parse(report_to_json(r).dump()));
      for (const auto& back : {c, j}) {
        CHECK(back.tag.model_id == r.tag.model_id);
        CHECK(back.tag.mode == r.tag.mode);
        CHECK(back.tag.gamma == r.tag.gamma);
        CHECK(back.n == r.n);
        CHECK(back.dBB == r.dBB);
        CHECK(back.dAA == r.dAA);
        CHECK(back.dSS == r.dSS);
        CHECK(back.l2 == r.l2);
        CHECK(back.sr == r.sr);
      }
      SampleMetrics m{u(rng), u(rng), u(rng), u(rng)};
      CHECK(sample_metrics_from_json(nlohmann::json::parse(sample_metrics_to_json(m).dump())) == m);
    }
    CHECK(report_csv_header() == "model,mode,gamma,dBB,dAA,dSS,SR,l2,N");
    CHECK_THROWS_AS(parse_report_csv_row("a,b"), ValidationError);
    CHECK_THROWS_AS(parse_report_csv_row("m,untargeted,x,0,0,0,0,0,1"), ValidationError);
  }
}
