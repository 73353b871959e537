#include "godl/segmentation.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <numeric>

#include "godl/json_writer.hpp"
#include "godl/rng.hpp"

namespace godl {

std::vector<std::string> default_unit_labels(int n) {
  if (n == 5)
    return {"standing", "bending knee", "opening arm", "knee landing", "arm supporting"};
  std::vector<std::string> out;
  out.reserve(n);
  for (int i = 1; i <= n; ++i) out.push_back("unit " + std::to_string(i));
  return out;
}

namespace {

/// Squared distance with a fixed summation order (head-to-tail over rows).
double sq_dist(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  double s = 0.0;
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

}  // namespace

KmeansResult kmeans(const Eigen::MatrixXd& features, int n_clusters, std::uint64_t seed,
                    int max_iter) {
  const int n = static_cast<int>(features.cols());
  if (n < n_clusters)
    throw TooFewFrames("kmeans: " + std::to_string(n) + " frames for " +
                       std::to_string(n_clusters) + " clusters");
  if (n_clusters < 1) throw InvalidConfig("kmeans: n_clusters must be >= 1");

  Rng rng(seed);
  KmeansResult r;
  r.centroids.resize(features.rows(), n_clusters);

  // k-means++ seeding: first center uniform, then D^2-weighted.
  std::vector<double> d2(n, std::numeric_limits<double>::infinity());
  int first = static_cast<int>(rng.below(n));
  r.centroids.col(0) = features.col(first);
  for (int c = 1; c < n_clusters; ++c) {
    double total = 0.0;
    for (int j = 0; j < n; ++j) {
      d2[j] = std::min(d2[j], sq_dist(features.col(j), r.centroids.col(c - 1)));
      total += d2[j];
    }
    int pick = 0;
    if (total > 0.0) {
      const double target = rng.uniform01() * total;
      double acc = 0.0;
      pick = n - 1;
      for (int j = 0; j < n; ++j) {
        acc += d2[j];
        if (acc >= target) {
          pick = j;
          break;
        }
      }
    } else {
      pick = static_cast<int>(rng.below(n));  // all points coincide
    }
    r.centroids.col(c) = features.col(pick);
  }

  r.labels.assign(n, -1);
  std::vector<int> counts(n_clusters, 0);
  for (int it = 0; it < max_iter; ++it) {
    // Assignment; ties go to the lowest cluster index.
    bool changed = false;
    for (int j = 0; j < n; ++j) {
      int best = 0;
      double best_d = sq_dist(features.col(j), r.centroids.col(0));
      for (int c = 1; c < n_clusters; ++c) {
        const double d = sq_dist(features.col(j), r.centroids.col(c));
        if (d < best_d) {
          best_d = d;
          best = c;
        }
      }
      if (r.labels[j] != best) {
        r.labels[j] = best;
        changed = true;
      }
    }
    r.iterations = it + 1;
    if (!changed) break;

    // Update step; empty clusters keep their previous centroid.
    Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(features.rows(), n_clusters);
    std::fill(counts.begin(), counts.end(), 0);
    for (int j = 0; j < n; ++j) {
      sums.col(r.labels[j]) += features.col(j);
      ++counts[r.labels[j]];
    }
    for (int c = 0; c < n_clusters; ++c)
      if (counts[c] > 0) r.centroids.col(c) = sums.col(c) / counts[c];
  }

  r.inertia = 0.0;
  for (int j = 0; j < n; ++j) r.inertia += sq_dist(features.col(j), r.centroids.col(r.labels[j]));
  return r;
}

namespace {

/// Lower median of the (truncated) window labels[max(0,j-2) .. min(n-1,j+2)].
int window_median(const std::vector<int>& labels, int j) {
  const int n = static_cast<int>(labels.size());
  const int lo = std::max(0, j - 2);
  const int hi = std::min(n - 1, j + 2);
  std::vector<int> win(labels.begin() + lo, labels.begin() + hi + 1);
  std::sort(win.begin(), win.end());
  return win[(win.size() - 1) / 2];
}

struct Run {
  int label;
  int begin;
  int end;  // half-open
  int length() const { return end - begin; }
};

std::vector<Run> find_runs(const std::vector<int>& labels) {
  std::vector<Run> runs;
  for (int j = 0; j < static_cast<int>(labels.size()); ++j) {
    if (runs.empty() || runs.back().label != labels[j]) runs.push_back({labels[j], j, j + 1});
    else runs.back().end = j + 1;
  }
  return runs;
}

}  // namespace

Segmentation temporalize(const std::vector<int>& labels) {
  const int n = static_cast<int>(labels.size());
  if (n == 0) throw TooFewFrames("temporalize: empty label stream");

  std::vector<int> distinct(labels);
  std::sort(distinct.begin(), distinct.end());
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
  const int n_units = static_cast<int>(distinct.size());

  // 1. Median smoothing (width 5, truncated at the edges, lower median).
  std::vector<int> smoothed(n);
  for (int j = 0; j < n; ++j) smoothed[j] = window_median(labels, j);

  for (int id : distinct)
    if (std::count(smoothed.begin(), smoothed.end(), id) == 0)
      throw MissingCluster("cluster " + std::to_string(id) + " empty after smoothing");

  // 2. Fragmented clusters: keep each label's majority run (ties to the
  // earlier run); frames of minority fragments join the run they border,
  // resolved by flood-filling from the surviving runs.
  auto runs = find_runs(smoothed);
  std::map<int, Run> majority;
  for (const Run& r : runs) {
    auto it = majority.find(r.label);
    if (it == majority.end() || r.length() > it->second.length()) majority[r.label] = r;
  }
  std::vector<int> owned(n, -1);
  for (const auto& [label, r] : majority)
    for (int j = r.begin; j < r.end; ++j) owned[j] = label;
  // Fill gaps from the nearest owned frame (earlier wins at equal distance).
  for (int j = 0; j < n; ++j) {
    if (owned[j] != -1) continue;
    int left = j - 1, right = j + 1;
    while (left >= 0 && owned[left] == -1) --left;
    while (right < n && owned[right] == -1) ++right;
    const bool has_left = left >= 0;
    const bool has_right = right < n;
    if (has_left && (!has_right || (j - left) <= (right - j))) smoothed[j] = owned[left];
    else if (has_right) smoothed[j] = owned[right];
    // (At least one run exists, so one side is always available.)
  }
  for (int j = 0; j < n; ++j)
    if (owned[j] != -1) smoothed[j] = owned[j];

  // 3. Relabel 1..N by ascending mean frame index.
  std::map<int, std::pair<double, int>> stats;  // label -> (sum of indices, count)
  for (int j = 0; j < n; ++j) {
    auto& s = stats[smoothed[j]];
    s.first += j;
    s.second += 1;
  }
  std::vector<std::pair<double, int>> order;  // (mean index, label)
  for (const auto& [label, s] : stats) order.emplace_back(s.first / s.second, label);
  std::sort(order.begin(), order.end());

  if (static_cast<int>(order.size()) != n_units)
    throw MissingCluster("cluster count changed during smoothing");

  std::map<int, int> rank;
  for (int i = 0; i < n_units; ++i) rank[order[i].second] = i + 1;

  std::vector<int> final_labels(n);
  for (int j = 0; j < n; ++j) final_labels[j] = rank[smoothed[j]];

  // After majority-run consolidation every label is one contiguous run; the
  // mean-index ordering therefore matches the run order.
  Segmentation seg;
  seg.boundaries.push_back(0);
  for (int j = 1; j < n; ++j)
    if (final_labels[j] != final_labels[j - 1]) {
      if (final_labels[j] != final_labels[j - 1] + 1)
        throw MissingCluster("labels not temporally separable");
      seg.boundaries.push_back(j);
    }
  seg.boundaries.push_back(n);
  if (static_cast<int>(seg.boundaries.size()) != n_units + 1)
    throw MissingCluster("labels not temporally separable");
  seg.unit_labels = default_unit_labels(n_units);
  return seg;
}

std::string Segmentation::to_json_string() const {
  JsonWriter w;
  w.begin_object();
  w.key("boundaries");
  w.begin_array();
  for (int b : boundaries) w.value(static_cast<long long>(b));
  w.end_array();
  w.key("labels");
  w.begin_array();
  for (const auto& l : unit_labels) w.value(std::string_view(l));
  w.end_array();
  w.end_object();
  return w.take();
}

std::vector<SubSequence> split(const Eigen::MatrixXd& data, const Segmentation& seg) {
  const int n = static_cast<int>(data.cols());
  if (seg.boundaries.empty() || seg.boundaries.front() != 0 || seg.boundaries.back() != n)
    throw InvalidConfig("split: boundaries do not cover the sequence");
  std::vector<SubSequence> out;
  for (size_t i = 0; i + 1 < seg.boundaries.size(); ++i) {
    const int b = seg.boundaries[i];
    const int e = seg.boundaries[i + 1];
    if (e <= b) throw InvalidConfig("split: empty segment");
    SubSequence s;
    s.unit_index = static_cast<int>(i) + 1;
    s.columns = data.middleCols(b, e - b);
    out.push_back(std::move(s));
  }
  return out;
}

}  // namespace godl
