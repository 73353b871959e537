#include "godl/pipeline.hpp"

#include <exception>
#include <string>

#include "godl/rng.hpp"

namespace godl {

FallModel train_fall_model(const std::vector<SkeletonSequence>& seqs, const TrainSettings& s,
                           std::uint64_t seed, bool already_normalized,
                           SequenceErrorPolicy policy) {
  if (seqs.empty()) throw InvalidConfig("training requires at least one sequence");
  if (s.n_units < 1) throw InvalidConfig("n_units must be >= 1");
  if (s.segmentation_restarts < 1) throw InvalidConfig("segmentation_restarts must be >= 1");

  // Segment each sequence independently; the per-sequence seed stream keeps
  // results stable no matter how many sequences precede a given one.
  std::vector<std::vector<SubSequence>> segmented;
  std::exception_ptr first_error;
  for (std::size_t i = 0; i < seqs.size(); ++i) {
    try {
      const SkeletonSequence norm =
          already_normalized ? seqs[i] : normalize(seqs[i]).first;
      const FeatureSequence feats = build_features(norm, s.feature.w_st);
      // Restarted k-means: keep the lowest-inertia run that temporalizes.
      const std::uint64_t restart_base = derive_seed(seed, 1000 + i);
      bool found = false;
      double best_inertia = 0.0;
      Segmentation best_seg;
      std::exception_ptr seg_error;
      for (int r = 0; r < s.segmentation_restarts; ++r) {
        const KmeansResult km =
            kmeans(feats.vectors, s.n_units, derive_seed(restart_base, r));
        try {
          Segmentation seg = temporalize(km.labels);
          if (!found || km.inertia < best_inertia) {
            best_inertia = km.inertia;
            best_seg = std::move(seg);
            found = true;
          }
        } catch (const Error&) {
          if (!seg_error) seg_error = std::current_exception();
        }
      }
      if (!found) std::rethrow_exception(seg_error);
      segmented.push_back(split(feats.vectors, best_seg));
    } catch (const Error&) {
      if (policy == SequenceErrorPolicy::Throw) throw;
      if (!first_error) first_error = std::current_exception();
    }
  }
  if (segmented.empty()) std::rethrow_exception(first_error);

  // Pool each unit's columns across sequences, preserving sequence order.
  const int rows = static_cast<int>(segmented.front().front().columns.rows());
  std::vector<SubSequence> pooled(s.n_units);
  for (int u = 0; u < s.n_units; ++u) {
    pooled[u].unit_index = u + 1;
    int total = 0;
    for (const auto& subs : segmented) total += static_cast<int>(subs[u].columns.cols());
    pooled[u].columns.resize(rows, total);
    int at = 0;
    for (const auto& subs : segmented) {
      const int c = static_cast<int>(subs[u].columns.cols());
      pooled[u].columns.middleCols(at, c) = subs[u].columns;
      at += c;
    }
  }

  FeatureParams feature = s.feature;
  return train_all(pooled, default_unit_labels(s.n_units), s.odl, s.gnc, s.alpha, s.temporal,
                   feature, derive_seed(seed, 2), s.trainer);
}

}  // namespace godl
