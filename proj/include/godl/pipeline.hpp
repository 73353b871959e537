#pragma once

#include <cstdint>
#include <vector>

#include "godl/inference.hpp"
#include "godl/model.hpp"
#include "godl/segmentation.hpp"
#include "godl/skeleton.hpp"

namespace godl {

/// Everything the training pipeline needs in one place.
struct TrainSettings {
  OdlConfig odl;
  GncConfig gnc;
  double alpha = 2.0;
  TemporalParams temporal;
  FeatureParams feature;
  int n_units = 5;
  Trainer trainer = Trainer::Godl;
  /// Independent k-means restarts per sequence; the lowest-inertia run whose
  /// smoothed labels keep every cluster populated wins. Corrupted frames make
  /// single k-means runs unreliable (an outlier can capture a centroid), so
  /// restarting is what keeps segmentation usable under injected noise.
  int segmentation_restarts = 20;
};

/// What to do when one training sequence cannot be processed (degenerate
/// extent, unsegmentable clustering, ...): abort the run or drop just that
/// sequence. The robustness sweep drops, the CLI aborts.
enum class SequenceErrorPolicy { Throw, Skip };

/// Full training pipeline: per sequence normalize (unless the caller already
/// did), build features, k-means the frames into n_units clusters,
/// temporalize, split; then pool each unit's columns across sequences and
/// train all units. Deterministic per seed.
FallModel train_fall_model(const std::vector<SkeletonSequence>& seqs, const TrainSettings& s,
                           std::uint64_t seed, bool already_normalized = false,
                           SequenceErrorPolicy policy = SequenceErrorPolicy::Throw);

}  // namespace godl
