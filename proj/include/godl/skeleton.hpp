#pragma once

#include <Eigen/Dense>
#include <string>
#include <utility>
#include <vector>

#include "godl/errors.hpp"

namespace godl {

/// One time sample: 3-D coordinates for every tracked joint.
struct Frame {
  int index = 0;
  std::vector<Eigen::Vector3d> joints;
};

/// Time-ordered skeleton recording. `joint_count` is fixed across frames and
/// frame indices are strictly increasing.
struct SkeletonSequence {
  std::vector<Frame> frames;
  int joint_count = 0;
  double frame_rate_hz = 30.0;
  std::string source_id;

  int frame_count() const { return static_cast<int>(frames.size()); }

  /// Throws MalformedInput if any structural invariant is violated
  /// (inconsistent joint counts, <2 joints, non-finite coordinates,
  /// non-increasing frame indices).
  void validate() const;
};

enum class SequenceFormat { Csv, Json };

/// Parses CSV (`frame_index, j0x, j0y, j0z, j1x, ...`) or JSON
/// (`{"joint_count": n, "frame_rate_hz": r, "frames": [[x,y,z,...], ...]}`).
/// Rejects the whole input on the first malformed row, naming its line.
SkeletonSequence parse_sequence(const std::string& text, SequenceFormat format);

/// Reads a file and dispatches on its extension (.csv / .json).
SkeletonSequence load_sequence(const std::string& path);

/// Serializes back to the on-disk formats. Round-trips are byte-stable
/// because doubles are written with 17 significant digits.
std::string to_csv(const SkeletonSequence& seq);
std::string to_json(const SkeletonSequence& seq);

/// Whole-sequence affine normalization: x spans [0,1]; y and z share the
/// x scale so height dynamics survive.
struct NormalizationParams {
  double x_min = 0.0;
  double x_max = 0.0;
  double y_min = 0.0;
  double z_min = 0.0;
  double scale = 0.0;  // x_max - x_min, > 0
};

/// Maps every coordinate through (v - axis_min)/scale with per-sequence
/// statistics. Throws DegenerateExtent when all x coincide.
std::pair<SkeletonSequence, NormalizationParams> normalize(const SkeletonSequence& seq);

/// Undoes `normalize` given the recorded parameters.
SkeletonSequence denormalize(const SkeletonSequence& seq, const NormalizationParams& p);

/// Per-frame feature columns: stacked joint positions followed by w_st-scaled
/// frame-to-frame position differences (first frame's velocity block is zero).
struct FeatureSequence {
  Eigen::MatrixXd vectors;  // 6*joint_count rows, one column per frame
  double w_st = 0.1;
};

/// Builds the spatio-temporal features; requires at least 2 frames.
FeatureSequence build_features(const SkeletonSequence& seq, double w_st);

}  // namespace godl
