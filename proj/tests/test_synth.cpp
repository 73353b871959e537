#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "godl/inference.hpp"
#include "godl/synth.hpp"

using namespace godl;

namespace {

std::vector<double> heights_of(const SkeletonSequence& seq) {
  std::vector<double> h;
  h.reserve(seq.frames.size());
  for (const auto& f : seq.frames) h.push_back(height(f));
  return h;
}

/// True iff some width-`window` span satisfies both height-drop conditions
/// relative to the initial standing height.
bool any_drop_window(const std::vector<double>& h, double h0, int window, double start_ratio,
                     double drop_ratio) {
  for (size_t t = 0; t + window <= h.size(); ++t) {
    const double front = h[t];
    const double back = h[t + window - 1];
    if (front / h0 > start_ratio && back / front < drop_ratio) return true;
  }
  return false;
}

}  // namespace

TEST_CASE("sequence kinds round-trip through their names") {
  for (auto kind : {SequenceKind::Fall, SequenceKind::SitDown, SequenceKind::LieDown,
                    SequenceKind::Other})
    CHECK(kind_from_string(to_string(kind)) == kind);
  CHECK(to_string(SequenceKind::SitDown) == "sit_down");
  CHECK_THROWS_AS(kind_from_string("jump"), InvalidConfig);
}

TEST_CASE("generate_synthetic produces the advertised frame counts") {
  SynthConfig cfg;
  auto fall = generate_synthetic(cfg, SequenceKind::Fall, 1);
  CHECK(fall.seq.frame_count() == cfg.frames_per_unit * cfg.n_units);
  CHECK(fall.seq.joint_count == 15);
  CHECK(fall.kind == SequenceKind::Fall);
  // Lying down is deliberately slow so no single detector window captures
  // the whole decline.
  auto lie = generate_synthetic(cfg, SequenceKind::LieDown, 1);
  CHECK(lie.seq.frame_count() == 4 * cfg.frames_per_unit * cfg.n_units);
}

TEST_CASE("falls drop below half the standing height within one window") {
  for (std::uint64_t seed : {1, 2, 3, 10, 99}) {
    auto s = generate_synthetic(SynthConfig{}, SequenceKind::Fall, seed);
    auto h = heights_of(s.seq);
    CHECK(any_drop_window(h, h[0], TemporalParams{}.window, 0.9, 0.5));
  }
}

TEST_CASE("sitting settles between 0.55 and 0.7 of standing height") {
  for (std::uint64_t seed : {1, 2, 3, 10, 99}) {
    auto s = generate_synthetic(SynthConfig{}, SequenceKind::SitDown, seed);
    auto h = heights_of(s.seq);
    const double ratio = h.back() / h[0];
    CHECK(ratio > 0.54);
    CHECK(ratio < 0.71);
    // A sit can never satisfy the fall's height-drop test.
    CHECK(!any_drop_window(h, h[0], TemporalParams{}.window, 0.9, 0.5));
  }
}

TEST_CASE("lying down goes below half height but never within one window") {
  for (std::uint64_t seed : {1, 2, 3, 10, 99}) {
    auto s = generate_synthetic(SynthConfig{}, SequenceKind::LieDown, seed);
    auto h = heights_of(s.seq);
    CHECK(*std::min_element(h.begin(), h.end()) / h[0] < 0.5);
    CHECK(!any_drop_window(h, h[0], TemporalParams{}.window, 0.9, 0.5));
  }
}

TEST_CASE("the fast crouch drops quickly enough to fire the height test") {
  // This is the decoy kind: it trips the temporal stage, so only the unit
  // gates can tell it apart from a fall.
  for (std::uint64_t seed : {1, 2, 3}) {
    auto s = generate_synthetic(SynthConfig{}, SequenceKind::Other, seed);
    auto h = heights_of(s.seq);
    CHECK(any_drop_window(h, h[0], TemporalParams{}.window, 0.9, 0.5));
  }
}

TEST_CASE("generation is deterministic per seed") {
  auto a = generate_synthetic(SynthConfig{}, SequenceKind::Fall, 42);
  auto b = generate_synthetic(SynthConfig{}, SequenceKind::Fall, 42);
  CHECK(to_csv(a.seq) == to_csv(b.seq));
  auto c = generate_synthetic(SynthConfig{}, SequenceKind::Fall, 43);
  CHECK(to_csv(a.seq) != to_csv(c.seq));
}

TEST_CASE("generate_synthetic validates its configuration") {
  SynthConfig cfg;
  cfg.joint_count = 12;
  CHECK_THROWS_AS(generate_synthetic(cfg, SequenceKind::Fall, 1), InvalidConfig);
  cfg = SynthConfig{};
  cfg.frames_per_unit = 1;
  CHECK_THROWS_AS(generate_synthetic(cfg, SequenceKind::Fall, 1), InvalidConfig);
  cfg = SynthConfig{};
  cfg.noise_sigma = -0.1;
  CHECK_THROWS_AS(generate_synthetic(cfg, SequenceKind::Fall, 1), InvalidConfig);
}

TEST_CASE("inject_outliers with ratio zero is a no-op") {
  auto s = generate_synthetic(SynthConfig{}, SequenceKind::Fall, 5).seq;
  auto [out, idx] = inject_outliers(s, 0.0, 0.5, 9);
  CHECK(idx.empty());
  CHECK(to_csv(out) == to_csv(s));
}

TEST_CASE("inject_outliers corrupts ceil(ratio * frames) distinct frames") {
  auto s = generate_synthetic(SynthConfig{}, SequenceKind::Fall, 5).seq;  // 60 frames
  auto [out, idx] = inject_outliers(s, 0.1, 0.5, 9);
  REQUIRE(idx.size() == 6);
  CHECK(std::is_sorted(idx.begin(), idx.end()));
  CHECK(std::adjacent_find(idx.begin(), idx.end()) == idx.end());
  CHECK(idx.front() >= 0);
  CHECK(idx.back() < s.frame_count());

  // Exactly the listed frames change; everything else stays bit-identical.
  for (int t = 0; t < s.frame_count(); ++t) {
    bool listed = std::binary_search(idx.begin(), idx.end(), t);
    bool changed = false;
    for (int j = 0; j < s.joint_count; ++j) {
      const Eigen::Vector3d& a = s.frames[t].joints[j];
      const Eigen::Vector3d& b = out.frames[t].joints[j];
      if ((a - b).cwiseAbs().maxCoeff() != 0.0) changed = true;
      // Perturbations are bounded by the magnitude coordinate-wise.
      CHECK((a - b).cwiseAbs().maxCoeff() <= 0.5);
    }
    CHECK(changed == listed);
  }
}

TEST_CASE("inject_outliers draws uniform perturbations of the right scale") {
  // |U(-m, m)| has mean m/2; average over 15 joints * 3 coords * many frames.
  SynthConfig cfg;
  cfg.frames_per_unit = 40;  // 200 frames for a stable Monte Carlo estimate
  auto s = generate_synthetic(cfg, SequenceKind::Fall, 6).seq;
  auto [out, idx] = inject_outliers(s, 0.5, 0.8, 3);
  double sum = 0.0;
  int n = 0;
  for (int t : idx)
    for (int j = 0; j < s.joint_count; ++j) {
      sum += (s.frames[t].joints[j] - out.frames[t].joints[j]).cwiseAbs().sum();
      n += 3;
    }
  const double mean_abs = sum / n;
  CHECK(mean_abs > 0.8 / 2.0 * 0.9);
  CHECK(mean_abs < 0.8 / 2.0 * 1.1);
}

TEST_CASE("inject_outliers is deterministic and validates its arguments") {
  auto s = generate_synthetic(SynthConfig{}, SequenceKind::Fall, 7).seq;
  auto a = inject_outliers(s, 0.2, 0.5, 11);
  auto b = inject_outliers(s, 0.2, 0.5, 11);
  CHECK(a.second == b.second);
  CHECK(to_csv(a.first) == to_csv(b.first));
  CHECK_THROWS_AS(inject_outliers(s, -0.1, 0.5, 1), InvalidConfig);
  CHECK_THROWS_AS(inject_outliers(s, 0.6, 0.5, 1), InvalidConfig);
  CHECK_THROWS_AS(inject_outliers(s, 0.1, -1.0, 1), InvalidConfig);
}
