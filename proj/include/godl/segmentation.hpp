#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "godl/errors.hpp"
#include "godl/skeleton.hpp"

namespace godl {

/// Default unit names for the 5-unit fall decomposition, in temporal order.
std::vector<std::string> default_unit_labels(int n);

struct KmeansResult {
  std::vector<int> labels;     // one cluster id in [0, k) per frame
  Eigen::MatrixXd centroids;   // one column per cluster
  double inertia = 0.0;        // sum of squared distances to assigned centroid
  int iterations = 0;
};

/// Lloyd's algorithm with k-means++ seeding. Deterministic per seed;
/// assignment ties go to the lowest cluster index. Throws TooFewFrames when
/// there are fewer columns than clusters.
KmeansResult kmeans(const Eigen::MatrixXd& features, int n_clusters,
                    std::uint64_t seed, int max_iter = 100);

/// Temporally ordered partition of a sequence into N unit segments.
/// boundaries[i]..boundaries[i+1] is the half-open frame range of unit i+1.
struct Segmentation {
  std::vector<int> boundaries;          // N+1 strictly increasing, [0 .. frame_count]
  std::vector<std::string> unit_labels; // N names

  int unit_count() const { return static_cast<int>(unit_labels.size()); }
  std::string to_json_string() const;
};

/// Turns a raw per-frame cluster labeling into contiguous ordered segments:
/// width-5 median smoothing, reassignment of fragmented runs to the majority
/// run of their label (ties to the earlier run), then relabeling 1..N by
/// ascending mean frame index. Throws MissingCluster if smoothing empties a
/// cluster.
Segmentation temporalize(const std::vector<int>& labels);

/// Feature columns of one unit's frame range.
struct SubSequence {
  int unit_index = 0;          // 1..N
  Eigen::MatrixXd columns;
};

/// Copies column ranges out of `data` per the segmentation boundaries.
std::vector<SubSequence> split(const Eigen::MatrixXd& data, const Segmentation& seg);

}  // namespace godl
