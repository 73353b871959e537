#pragma once

#include <string>
#include <vector>

#include "godl/model.hpp"
#include "godl/skeleton.hpp"

namespace godl {

/// True iff |e - e_mean| / e_std < alpha (strict). With e_std == 0 the gate
/// degrades to the absolute test e <= e_mean * (1 + 1e-6).
bool unit_gate(double e, const UnitTrainResult& unit, double alpha);

/// Skeleton height of one frame: max - min over joint y coordinates.
double height(const Frame& frame);

/// Both height-drop conditions, strictly:
///   ring.front()/h_init > start_ratio  and  ring.back()/ring.front() < drop_ratio.
/// `ring` is ordered oldest first and must hold exactly `p.window` samples.
bool temporal_check(const std::vector<double>& ring, double h_init, const TemporalParams& p);

struct DetectorConfig {
  int m_consecutive = 2;       // gate passes needed to advance a stage
  int reset_timeout_factor = 5;  // reset after factor*window frames without progress
};

struct FrameRecord {
  int frame = 0;
  int stage = 0;    // stages completed so far (0..N)
  double e = 0.0;   // reconstruction error vs the unit under test
  bool gate = false;
  double h = 0.0;
};

struct Event {
  int start = 0;  // frame where the episode's first stage advance happened
  int end = 0;    // frame where the event was declared
};

struct DetectionResult {
  std::vector<FrameRecord> frames;
  std::vector<Event> events;

  std::string to_json_string() const;
};

/// Streams a normalized sequence through the staged detector: each frame is
/// scored against the unit after the current stage; m_consecutive passes
/// advance the stage; h_init is the running mean height of frames the
/// standing unit accepted; an event fires at the first frame where all N
/// stages are complete and the height-drop test fired within the last
/// `window` frames. After an event the machine re-arms once height recovers
/// above start_ratio*h_init; it also resets after reset_timeout_factor*window
/// frames without stage progress. Throws ModelMismatch when feature
/// dimensions disagree with the model.
DetectionResult detect(const SkeletonSequence& normalized_stream, const FallModel& model,
                       const DetectorConfig& cfg = {});

}  // namespace godl
