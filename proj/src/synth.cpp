#include "godl/synth.hpp"

#include <array>
#include <cmath>

#include <Eigen/Dense>

#include "godl/rng.hpp"

namespace godl {

std::string to_string(SequenceKind kind) {
  switch (kind) {
    case SequenceKind::Fall: return "fall";
    case SequenceKind::SitDown: return "sit_down";
    case SequenceKind::LieDown: return "lie_down";
    case SequenceKind::Other: return "other";
  }
  throw InvalidConfig("unknown sequence kind");
}

SequenceKind kind_from_string(const std::string& name) {
  if (name == "fall") return SequenceKind::Fall;
  if (name == "sit_down") return SequenceKind::SitDown;
  if (name == "lie_down") return SequenceKind::LieDown;
  if (name == "other") return SequenceKind::Other;
  throw InvalidConfig("unknown sequence kind: " + name);
}

namespace {

constexpr int kJoints = 15;
constexpr int kPhases = 5;  // every motion is authored as 5 keyframe poses

/// Compact articulation of the 15-joint humanoid. Heights are in meters;
/// pitch folds the torso toward +x, arm swings both arms from straight down
/// (0) toward horizontal forward (pi/2).
struct PoseParams {
  double px, py;      // pelvis position
  double pitch;       // torso pitch
  double arm;         // arm swing
  double foot_dx;     // ankle x offset from the pelvis
  double foot_y;      // ankle height
  double knee_out;    // knee forward offset (bend amount)
};

PoseParams lerp(const PoseParams& a, const PoseParams& b, double s) {
  auto m = [s](double x, double y) { return x + s * (y - x); };
  return {m(a.px, b.px),           m(a.py, b.py),     m(a.pitch, b.pitch), m(a.arm, b.arm),
          m(a.foot_dx, b.foot_dx), m(a.foot_y, b.foot_y), m(a.knee_out, b.knee_out)};
}

/// Joint order: pelvis, spine, chest, neck, head, L shoulder/elbow/wrist,
/// R shoulder/elbow/wrist, L knee/ankle, R knee/ankle.
std::array<Eigen::Vector3d, kJoints> build_pose(const PoseParams& p) {
  const Eigen::Vector3d pelvis(p.px, p.py, 0.0);
  const Eigen::Vector3d u(std::sin(p.pitch), std::cos(p.pitch), 0.0);
  const Eigen::Vector3d a(std::sin(p.arm), -std::cos(p.arm), 0.0);

  std::array<Eigen::Vector3d, kJoints> j;
  j[0] = pelvis;
  j[1] = pelvis + 0.25 * u;
  j[2] = pelvis + 0.50 * u;  // chest
  j[3] = pelvis + 0.70 * u;
  j[4] = pelvis + 0.85 * u;  // head
  for (int side = 0; side < 2; ++side) {
    const double z = side == 0 ? -0.20 : 0.20;
    const Eigen::Vector3d shoulder = j[2] + Eigen::Vector3d(0, 0, z);
    j[5 + 3 * side] = shoulder;
    j[6 + 3 * side] = shoulder + 0.25 * a;
    j[7 + 3 * side] = shoulder + 0.50 * a;
  }
  for (int side = 0; side < 2; ++side) {
    const double z = side == 0 ? -0.12 : 0.12;
    const Eigen::Vector3d ankle(p.px + p.foot_dx, p.foot_y, z);
    const Eigen::Vector3d knee(0.5 * (p.px + ankle.x()) + p.knee_out,
                               0.5 * (p.py + ankle.y()) + 0.03, z);
    j[11 + 2 * side] = knee;
    j[12 + 2 * side] = ankle;
  }
  return j;
}

using Keyframes = std::array<PoseParams, kPhases>;

const PoseParams kStanding{0.00, 0.95, 0.05, 0.10, 0.00, 0.03, 0.05};

Keyframes keyframes_for(SequenceKind kind) {
  switch (kind) {
    case SequenceKind::Fall:
      // Forward fall: crouch, arms fly out, knees hit, end prone. Height
      // collapses below half the standing height within one detector window,
      // and consecutive phases articulate strongly so frame clustering stays
      // well separated.
      return {{kStanding,
               {0.20, 0.62, 0.55, 0.15, 0.10, 0.03, 0.45},
               {0.45, 0.36, 1.15, 1.60, -0.10, 0.03, 0.30},
               {0.72, 0.32, 0.85, 0.85, -0.38, 0.05, 0.10},
               {1.05, 0.18, 1.52, 1.45, -0.85, 0.06, 0.08}}};
    case SequenceKind::SitDown:
      // Controlled sit: height settles around 0.66 of standing.
      return {{kStanding,
               {0.06, 0.78, 0.25, 0.30, 0.02, 0.03, 0.25},
               {0.12, 0.60, 0.38, 0.50, 0.08, 0.03, 0.33},
               {0.16, 0.42, 0.25, 0.35, 0.14, 0.03, 0.36},
               {0.17, 0.36, 0.15, 0.25, 0.16, 0.03, 0.36}}};
    case SequenceKind::LieDown:
      // Deliberate lie-down: passes below half height, but the sequence is
      // generated 4x slower so the decline spans several windows.
      return {{kStanding,
               {0.15, 0.68, 0.40, 0.35, 0.05, 0.03, 0.35},
               {0.35, 0.42, 0.55, 0.70, -0.10, 0.03, 0.28},
               {0.55, 0.38, 0.75, 0.95, 0.30, 0.04, 0.18},
               {0.90, 0.15, 1.30, 1.25, -0.55, 0.06, 0.10}}};
    case SequenceKind::Other:
      // Fast crouching lunge: the height drops fast enough to trip the
      // temporal test, but the poses share nothing with a fall beyond the
      // initial stance.
      return {{kStanding,
               {0.30, 0.92, 0.00, 0.05, 0.05, 0.03, 0.08},
               {0.75, 0.30, 0.95, 0.25, 0.00, 0.03, 0.45},
               {1.10, 0.26, 1.00, 0.30, -0.20, 0.04, 0.40},
               {1.45, 0.24, 1.05, 0.30, -0.30, 0.05, 0.38}}};
  }
  throw InvalidConfig("unknown sequence kind");
}

}  // namespace

LabeledSequence generate_synthetic(const SynthConfig& cfg, SequenceKind kind,
                                   std::uint64_t seed) {
  if (cfg.joint_count != kJoints)
    throw InvalidConfig("generator models a fixed 15-joint humanoid");
  if (cfg.frames_per_unit < 2) throw InvalidConfig("frames_per_unit must be >= 2");
  if (cfg.subspace_dim < 0) throw InvalidConfig("subspace_dim must be >= 0");
  if (cfg.noise_sigma < 0.0) throw InvalidConfig("noise_sigma must be >= 0");

  const Keyframes kf = keyframes_for(kind);
  const int fpu = cfg.frames_per_unit * (kind == SequenceKind::LieDown ? 4 : 1);
  const int n = kPhases * fpu;
  const double dwell = 0.3;  // fraction of each phase held at its keyframe

  Rng rng(seed);
  // Per-phase smooth variation modes: a random joint-space direction each,
  // faded in and out inside the phase. Drawn before the jitter so the layout
  // of draws is stable.
  std::vector<Eigen::MatrixXd> mode_dirs(kPhases);
  std::vector<Eigen::VectorXd> mode_amps(kPhases);
  for (int s = 0; s < kPhases; ++s) {
    mode_dirs[s].resize(3 * kJoints, cfg.subspace_dim);
    mode_amps[s].resize(cfg.subspace_dim);
    for (int d = 0; d < cfg.subspace_dim; ++d) {
      for (int i = 0; i < 3 * kJoints; ++i) mode_dirs[s](i, d) = rng.normal();
      const double norm = mode_dirs[s].col(d).norm();
      if (norm > 0) mode_dirs[s].col(d) /= norm;
      mode_amps[s][d] = 0.05 * rng.normal();
    }
  }

  LabeledSequence out;
  out.kind = kind;
  out.seq.joint_count = kJoints;
  out.seq.source_id = to_string(kind) + "_" + std::to_string(seed);
  out.seq.frames.reserve(n);

  for (int f = 0; f < n; ++f) {
    const int s = f / fpu;
    const double t_local = static_cast<double>(f % fpu);
    const double blend_start = dwell * fpu;
    double u = t_local <= blend_start ? 0.0 : (t_local - blend_start) / (fpu - blend_start);
    const double sblend = 0.5 * (1.0 - std::cos(M_PI * u));
    const PoseParams p = lerp(kf[s], kf[std::min(s + 1, kPhases - 1)], sblend);
    auto joints = build_pose(p);

    // Phase-local variation modes, zero at the phase edges.
    for (int d = 0; d < cfg.subspace_dim; ++d) {
      const double phase_t = (t_local + 0.5) / fpu;
      const double w = mode_amps[s][d] * std::sin(M_PI * phase_t * (d + 1));
      for (int j = 0; j < kJoints; ++j)
        joints[j] += w * mode_dirs[s].block<3, 1>(3 * j, d);
    }

    Frame frame;
    frame.index = f;
    frame.joints.reserve(kJoints);
    for (int j = 0; j < kJoints; ++j) {
      Eigen::Vector3d pt = joints[j];
      for (int a = 0; a < 3; ++a) pt[a] += cfg.noise_sigma * rng.normal();
      frame.joints.push_back(pt);
    }
    out.seq.frames.push_back(std::move(frame));
  }
  return out;
}

std::pair<SkeletonSequence, std::vector<int>> inject_outliers(const SkeletonSequence& seq,
                                                              double ratio, double magnitude,
                                                              std::uint64_t seed) {
  if (ratio < 0.0 || ratio > 0.5) throw InvalidConfig("outlier ratio must be in [0, 0.5]");
  if (magnitude < 0.0) throw InvalidConfig("outlier magnitude must be >= 0");

  const int n = seq.frame_count();
  const double exact = ratio * n;
  // ceil with a guard so 0.1 * 60 stays 6 despite binary rounding.
  int count = static_cast<int>(std::ceil(exact - 1e-9));
  if (count < 0) count = 0;
  if (count > n) count = n;

  Rng rng(seed);
  std::vector<int> picked = rng.sample_without_replacement(n, count);
  std::sort(picked.begin(), picked.end());

  SkeletonSequence out = seq;
  for (int idx : picked)
    for (auto& j : out.frames[idx].joints)
      for (int a = 0; a < 3; ++a) j[a] += rng.uniform(-magnitude, magnitude);
  return {std::move(out), std::move(picked)};
}

}  // namespace godl
