#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "godl/errors.hpp"
#include "godl/skeleton.hpp"

namespace godl {

enum class SequenceKind { Fall, SitDown, LieDown, Other };

std::string to_string(SequenceKind kind);
SequenceKind kind_from_string(const std::string& name);

/// Shape of generated sequences. The pose builder models a fixed 15-joint
/// humanoid, so joint_count must stay 15. LieDown sequences are generated
/// 4x slower (4*frames_per_unit frames per unit) so the height decline
/// spreads over several detector windows.
struct SynthConfig {
  int joint_count = 15;
  int frames_per_unit = 12;
  int n_units = 5;
  int subspace_dim = 2;      // smooth per-unit variation modes
  double noise_sigma = 0.01; // Gaussian jitter on every coordinate (meters)
};

struct LabeledSequence {
  SkeletonSequence seq;
  SequenceKind kind = SequenceKind::Fall;
};

/// Deterministically synthesizes one sequence of the requested kind as
/// piecewise-smooth motion through 5 keyframe poses: `fall` drops below half
/// its standing height within one detector window, `sit_down` settles at
/// 0.55..0.7 of it, `lie_down` sinks below half but over >= 4 windows, and
/// `other` is a fast crouch that drops quickly without fall poses.
LabeledSequence generate_synthetic(const SynthConfig& cfg, SequenceKind kind,
                                   std::uint64_t seed);

/// Corrupts ceil(ratio * frames) uniformly chosen frames by adding
/// independent uniform noise in [-magnitude, magnitude] to every coordinate.
/// Returns the corrupted copy and the sorted corrupted-frame indices.
std::pair<SkeletonSequence, std::vector<int>> inject_outliers(const SkeletonSequence& seq,
                                                              double ratio, double magnitude,
                                                              std::uint64_t seed);

}  // namespace godl
