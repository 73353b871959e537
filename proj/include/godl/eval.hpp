#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "godl/inference.hpp"
#include "godl/model.hpp"
#include "godl/pipeline.hpp"
#include "godl/synth.hpp"

namespace godl {

/// Confusion counts for fall-vs-rest classification (positive = at least one
/// fall event detected). Ratios with a zero denominator are reported as
/// absent rather than 0.
struct Metrics {
  int tp = 0;
  int fp = 0;
  int tn = 0;
  int fn = 0;

  int total() const { return tp + fp + tn + fn; }
  std::optional<double> accuracy() const;
  std::optional<double> recall() const;
  std::optional<double> precision() const;
};

/// Normalizes and runs the detector over every labeled sequence and tallies
/// the confusion counts against the ground-truth kinds.
Metrics evaluate(const FallModel& model, const std::vector<LabeledSequence>& dataset);

/// Noise-robustness sweep configuration. Every (ratio, trainer, seed) cell
/// regenerates the same training falls (shared across trainers and ratios
/// for a given seed index), corrupts them at `ratio`, trains, and evaluates
/// on one clean test set shared by all cells.
struct SweepSettings {
  std::vector<double> ratios = {0.0, 0.02, 0.04, 0.06, 0.08, 0.10};
  int n_seeds = 10;
  std::uint64_t base_seed = 1;
  std::vector<Trainer> trainers = {Trainer::Godl, Trainer::Odl};
  int jobs = 1;
  double outlier_magnitude = 0.5;
  int train_sequences = 25;
  int test_per_kind = 12;
  std::uint64_t test_seed = 1000003;
  SynthConfig synth;
  TrainSettings train;
};

struct SweepRow {
  double ratio = 0.0;
  Trainer trainer = Trainer::Godl;
  int seed = 0;
  Metrics metrics;
};

struct SweepReport {
  std::vector<SweepRow> rows;  // ordered by (ratio, trainer, seed)

  /// `ratio,trainer,seed,accuracy,recall,precision` with a header line;
  /// absent ratios serialize as empty cells.
  std::string to_csv() const;
  /// Per-(ratio, trainer) means and standard deviations of each metric.
  std::string aggregate_json() const;

  /// Mean of a metric over the rows of one (ratio, trainer) group.
  std::optional<double> mean_accuracy(double ratio, Trainer trainer) const;
};

/// Runs all sweep cells (up to `jobs` in parallel) and assembles the report
/// in deterministic cell order regardless of scheduling.
SweepReport noise_sweep(const SweepSettings& s);

std::string to_string(Trainer trainer);
Trainer trainer_from_string(const std::string& name);

}  // namespace godl
