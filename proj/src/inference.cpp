#include "godl/inference.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>

#include "godl/json_writer.hpp"

namespace godl {

bool unit_gate(double e, const UnitTrainResult& unit, double alpha) {
  if (!(alpha > 0.0)) throw InvalidConfig("unit_gate: alpha must be > 0");
  if (unit.e_std > 0.0) return std::abs(e - unit.e_mean) / unit.e_std < alpha;
  // Degenerate statistics: all inlier errors identical during training.
  return e <= unit.e_mean * (1.0 + 1e-6);
}

double height(const Frame& frame) {
  if (frame.joints.size() < 2) throw InvalidConfig("height: needs at least 2 joints");
  double lo = frame.joints[0].y();
  double hi = lo;
  for (const auto& j : frame.joints) {
    lo = std::min(lo, j.y());
    hi = std::max(hi, j.y());
  }
  return hi - lo;
}

bool temporal_check(const std::vector<double>& ring, double h_init, const TemporalParams& p) {
  if (static_cast<int>(ring.size()) != p.window)
    throw InvalidConfig("temporal_check: ring must hold exactly window samples");
  if (!(h_init > 0.0)) throw InvalidConfig("temporal_check: h_init must be > 0");
  const double h0 = ring.front();
  const double hT = ring.back();
  if (!(h0 > 0.0)) return false;
  return (h0 / h_init > p.start_ratio) && (hT / h0 < p.drop_ratio);
}

DetectionResult detect(const SkeletonSequence& normalized_stream, const FallModel& model,
                       const DetectorConfig& cfg) {
  DetectionResult result;
  const int n = normalized_stream.frame_count();
  if (n == 0) return result;
  normalized_stream.validate();

  const int N = model.unit_count();
  const Eigen::Index feat_rows = 6 * normalized_stream.joint_count;
  for (const auto& u : model.units)
    if (u.dictionary.atoms.rows() != feat_rows)
      throw ModelMismatch("stream features have " + std::to_string(feat_rows) +
                          " rows, model unit expects " +
                          std::to_string(u.dictionary.atoms.rows()));

  // Feature columns are causal (velocity looks one frame back), so building
  // them up front does not let the detector peek ahead.
  Eigen::MatrixXd feats;
  if (n >= 2) {
    feats = build_features(normalized_stream, model.feature.w_st).vectors;
  } else {
    feats.resize(feat_rows, 1);
    feats.setZero();
    for (int j = 0; j < normalized_stream.joint_count; ++j)
      feats.block<3, 1>(3 * j, 0) = normalized_stream.frames[0].joints[j];
  }

  std::vector<double> lipschitz(N);
  for (int u = 0; u < N; ++u) lipschitz[u] = lipschitz_constant(model.units[u].dictionary.atoms);

  const int T = model.temporal.window;
  std::deque<double> ring;
  int stage = 0;
  int consecutive = 0;
  double h_init_sum = 0.0;
  int h_init_count = 0;
  int last_progress = 0;
  int episode_start = -1;
  int temporal_fired_at = std::numeric_limits<int>::min();
  bool armed = true;

  for (int j = 0; j < n; ++j) {
    const double h = height(normalized_stream.frames[j]);
    ring.push_back(h);
    if (static_cast<int>(ring.size()) > T) ring.pop_front();

    FrameRecord rec;
    rec.frame = normalized_stream.frames[j].index;
    rec.h = h;

    if (armed && stage < N) {
      const UnitTrainResult& unit = model.units[stage];
      auto [e, x] = frame_error(feats.col(j), unit.dictionary, model.lambda, {}, lipschitz[stage]);
      rec.e = e;
      rec.gate = unit_gate(e, unit, model.alpha);
      if (stage == 0 && rec.gate) {
        h_init_sum += h;
        ++h_init_count;
      }
      consecutive = rec.gate ? consecutive + 1 : 0;
      if (consecutive >= cfg.m_consecutive) {
        if (stage == 0) episode_start = j;
        ++stage;
        consecutive = 0;
        last_progress = j;
      }
    }
    rec.stage = stage;

    const double h_init = h_init_count > 0 ? h_init_sum / h_init_count : 0.0;
    if (static_cast<int>(ring.size()) == T && h_init > 0.0) {
      std::vector<double> window(ring.begin(), ring.end());
      if (temporal_check(window, h_init, model.temporal)) temporal_fired_at = j;
    }

    // Event: the full unit sequence completed and the height-drop fired
    // within the last window (conjunction of both detectors).
    if (armed && stage == N && temporal_fired_at > j - T) {
      result.events.push_back({episode_start >= 0 ? episode_start : j, j});
      armed = false;
    }

    if (!armed) {
      // Post-event: re-arm once the subject is upright again.
      if (h_init > 0.0 && h > model.temporal.start_ratio * h_init) {
        armed = true;
        stage = 0;
        consecutive = 0;
        episode_start = -1;
        last_progress = j;
        temporal_fired_at = std::numeric_limits<int>::min();
      }
    } else if (stage > 0 && j - last_progress >= cfg.reset_timeout_factor * T) {
      // Stalled mid-sequence: give up on this episode.
      stage = 0;
      consecutive = 0;
      episode_start = -1;
      last_progress = j;
    }

    result.frames.push_back(rec);
  }
  return result;
}

std::string DetectionResult::to_json_string() const {
  JsonWriter w;
  w.begin_object();
  w.key("frames");
  w.begin_array();
  for (const FrameRecord& r : frames) {
    w.begin_object();
    w.key("frame");
    w.value(static_cast<long long>(r.frame));
    w.key("stage");
    w.value(static_cast<long long>(r.stage));
    w.key("e");
    w.value(r.e);
    w.key("gate");
    w.value(r.gate);
    w.key("h");
    w.value(r.h);
    w.end_object();
  }
  w.end_array();
  w.key("events");
  w.begin_array();
  for (const Event& e : events) {
    w.begin_object();
    w.key("start");
    w.value(static_cast<long long>(e.start));
    w.key("end");
    w.value(static_cast<long long>(e.end));
    w.end_object();
  }
  w.end_array();
  w.end_object();
  return w.take();
}

}  // namespace godl
