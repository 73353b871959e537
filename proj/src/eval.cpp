#include "godl/eval.hpp"

#include <atomic>
#include <cmath>
#include <exception>
#include <thread>
#include <utility>

#include "godl/json_writer.hpp"
#include "godl/rng.hpp"

namespace godl {

std::optional<double> Metrics::accuracy() const {
  if (total() == 0) return std::nullopt;
  return static_cast<double>(tp + tn) / total();
}

std::optional<double> Metrics::recall() const {
  if (tp + fn == 0) return std::nullopt;
  return static_cast<double>(tp) / (tp + fn);
}

std::optional<double> Metrics::precision() const {
  if (tp + fp == 0) return std::nullopt;
  return static_cast<double>(tp) / (tp + fp);
}

Metrics evaluate(const FallModel& model, const std::vector<LabeledSequence>& dataset) {
  Metrics m;
  for (const LabeledSequence& ls : dataset) {
    const SkeletonSequence norm = normalize(ls.seq).first;
    const bool predicted = !detect(norm, model).events.empty();
    const bool actual = ls.kind == SequenceKind::Fall;
    if (actual)
      ++(predicted ? m.tp : m.fn);
    else
      ++(predicted ? m.fp : m.tn);
  }
  return m;
}

std::string to_string(Trainer trainer) {
  return trainer == Trainer::Godl ? "godl" : "odl";
}

Trainer trainer_from_string(const std::string& name) {
  if (name == "godl") return Trainer::Godl;
  if (name == "odl") return Trainer::Odl;
  throw InvalidConfig("unknown trainer: " + name);
}

namespace {

double mean_of(const std::vector<double>& v) {
  double s = 0;
  for (double x : v) s += x;
  return s / v.size();
}

double stddev_of(const std::vector<double>& v, double mean) {
  double s = 0;
  for (double x : v) s += (x - mean) * (x - mean);
  return std::sqrt(s / v.size());
}

}  // namespace

std::string SweepReport::to_csv() const {
  std::string out = "ratio,trainer,seed,accuracy,recall,precision\n";
  for (const SweepRow& r : rows) {
    out += format_double(r.ratio);
    out += ',';
    out += to_string(r.trainer);
    out += ',';
    out += std::to_string(r.seed);
    for (const auto& v : {r.metrics.accuracy(), r.metrics.recall(), r.metrics.precision()}) {
      out += ',';
      if (v) out += format_double(*v);
    }
    out += '\n';
  }
  return out;
}

std::string SweepReport::aggregate_json() const {
  std::vector<std::pair<double, Trainer>> groups;
  for (const SweepRow& r : rows) {
    const std::pair<double, Trainer> key{r.ratio, r.trainer};
    bool seen = false;
    for (const auto& g : groups) seen = seen || g == key;
    if (!seen) groups.push_back(key);
  }

  JsonWriter w;
  w.begin_object();
  w.key("groups");
  w.begin_array();
  for (const auto& [ratio, trainer] : groups) {
    int n = 0;
    std::vector<double> acc, rec, prec;
    for (const SweepRow& r : rows) {
      if (r.ratio != ratio || r.trainer != trainer) continue;
      ++n;
      if (auto v = r.metrics.accuracy()) acc.push_back(*v);
      if (auto v = r.metrics.recall()) rec.push_back(*v);
      if (auto v = r.metrics.precision()) prec.push_back(*v);
    }
    w.begin_object();
    w.key("ratio");
    w.value(ratio);
    w.key("trainer");
    w.value(to_string(trainer));
    w.key("n");
    w.value(static_cast<long long>(n));
    auto stat = [&w](const char* name, const std::vector<double>& v) {
      const std::string mean_key = std::string("mean_") + name;
      const std::string std_key = std::string("std_") + name;
      w.key(mean_key);
      if (v.empty()) {
        w.null();
        w.key(std_key);
        w.null();
      } else {
        const double m = mean_of(v);
        w.value(m);
        w.key(std_key);
        w.value(stddev_of(v, m));
      }
    };
    stat("accuracy", acc);
    stat("recall", rec);
    stat("precision", prec);
    w.end_object();
  }
  w.end_array();
  w.end_object();
  return w.take();
}

std::optional<double> SweepReport::mean_accuracy(double ratio, Trainer trainer) const {
  std::vector<double> acc;
  for (const SweepRow& r : rows)
    if (r.ratio == ratio && r.trainer == trainer)
      if (auto v = r.metrics.accuracy()) acc.push_back(*v);
  if (acc.empty()) return std::nullopt;
  return mean_of(acc);
}

SweepReport noise_sweep(const SweepSettings& s) {
  if (s.ratios.empty()) throw InvalidConfig("sweep needs at least one ratio");
  if (s.trainers.empty()) throw InvalidConfig("sweep needs at least one trainer");
  if (s.n_seeds < 1) throw InvalidConfig("n_seeds must be >= 1");
  if (s.jobs < 1) throw InvalidConfig("jobs must be >= 1");
  if (s.train_sequences < 1) throw InvalidConfig("train_sequences must be >= 1");
  if (s.test_per_kind < 0) throw InvalidConfig("test_per_kind must be >= 0");

  // One clean, labeled test set shared by every cell.
  const SequenceKind kinds[] = {SequenceKind::Fall, SequenceKind::SitDown,
                                SequenceKind::LieDown, SequenceKind::Other};
  std::vector<LabeledSequence> test_set;
  for (int k = 0; k < 4; ++k)
    for (int i = 0; i < s.test_per_kind; ++i)
      test_set.push_back(
          generate_synthetic(s.synth, kinds[k], derive_seed(s.test_seed, 500'000 + k * 10'000 + i)));

  const int n_ratios = static_cast<int>(s.ratios.size());
  const int n_trainers = static_cast<int>(s.trainers.size());
  const int total = n_ratios * n_trainers * s.n_seeds;

  SweepReport report;
  report.rows.resize(total);
  std::vector<std::exception_ptr> errors(total);

  auto run_cell = [&](int c) {
    const int seed_idx = c % s.n_seeds;
    const int trainer_idx = (c / s.n_seeds) % n_trainers;
    const int ratio_idx = c / (s.n_seeds * n_trainers);
    const double ratio = s.ratios[ratio_idx];

    // The same clean training falls are regenerated for every trainer and
    // ratio of a given seed index, so cells differ only in the corruption
    // applied and the trainer used.
    std::vector<SkeletonSequence> train;
    train.reserve(s.train_sequences);
    for (int i = 0; i < s.train_sequences; ++i) {
      const LabeledSequence ls = generate_synthetic(
          s.synth, SequenceKind::Fall, derive_seed(s.base_seed, 700'000 + seed_idx * 1'000 + i));
      SkeletonSequence norm = normalize(ls.seq).first;
      // Corrupt after normalization: the outlier magnitude is specified in
      // normalized units and must not perturb the scale estimate itself.
      auto corrupted = inject_outliers(
          norm, ratio, s.outlier_magnitude,
          derive_seed(s.base_seed, 900'000'000 + ratio_idx * 1'000'000 + seed_idx * 1'000 + i));
      train.push_back(std::move(corrupted.first));
    }

    TrainSettings ts = s.train;
    ts.trainer = s.trainers[trainer_idx];
    const FallModel model =
        train_fall_model(train, ts, derive_seed(s.base_seed, 30'000 + seed_idx),
                         /*already_normalized=*/true, SequenceErrorPolicy::Skip);

    SweepRow row;
    row.ratio = ratio;
    row.trainer = s.trainers[trainer_idx];
    row.seed = seed_idx;
    row.metrics = evaluate(model, test_set);
    report.rows[c] = row;
  };

  const int workers = std::min(s.jobs, total);
  if (workers <= 1) {
    for (int c = 0; c < total; ++c) run_cell(c);
  } else {
    std::atomic<int> next{0};
    auto worker = [&]() {
      for (int c = next.fetch_add(1); c < total; c = next.fetch_add(1)) {
        try {
          run_cell(c);
        } catch (...) {
          errors[c] = std::current_exception();
        }
      }
    };
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int t = 0; t < workers; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    for (int c = 0; c < total; ++c)
      if (errors[c]) std::rethrow_exception(errors[c]);
  }
  return report;
}

}  // namespace godl
