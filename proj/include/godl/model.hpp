#pragma once

#include <string>
#include <vector>

#include "godl/gnc.hpp"

namespace godl {

/// Height-drop window test parameters: over the last `window` frames the
/// oldest height must exceed start_ratio of the standing height and the
/// newest must fall below drop_ratio of the window's oldest.
struct TemporalParams {
  int window = 30;
  double start_ratio = 0.9;
  double drop_ratio = 0.5;
};

struct FeatureParams {
  double w_st = 0.1;
};

/// Everything the detector needs: one trained unit per sub-action in
/// temporal order, the training regularizer/inlier scale, the gate width
/// alpha, and the temporal/feature settings. Serializes to versioned JSON
/// with 17-significant-digit doubles so identical models are byte-identical.
struct FallModel {
  double lambda = 0.1;
  double c2 = 0.5;
  double alpha = 2.0;
  std::vector<UnitTrainResult> units;
  TemporalParams temporal;
  FeatureParams feature;

  int unit_count() const { return static_cast<int>(units.size()); }
};

std::string model_to_json(const FallModel& m);
FallModel model_from_json(const std::string& text);

void save_model(const FallModel& m, const std::string& path);
FallModel load_model(const std::string& path);

/// Trains every unit (GODL or the plain-ODL baseline) with its own atom
/// count from cfg.atom_dims (cycled if shorter than N) and an independent
/// per-unit seed stream, then assembles the model. Unit failures are
/// rethrown with the unit index attached.
FallModel train_all(const std::vector<SubSequence>& subs,
                    const std::vector<std::string>& unit_labels, const OdlConfig& odl_cfg,
                    const GncConfig& gnc_cfg, double alpha, const TemporalParams& temporal,
                    const FeatureParams& feature, std::uint64_t seed,
                    Trainer trainer = Trainer::Godl);

}  // namespace godl
