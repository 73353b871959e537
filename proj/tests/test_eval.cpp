#include <doctest.h>

#include <cmath>

#include "godl/eval.hpp"

using namespace godl;

namespace {

SweepRow make_row(double ratio, Trainer trainer, int seed, Metrics m) {
  SweepRow r;
  r.ratio = ratio;
  r.trainer = trainer;
  r.seed = seed;
  r.metrics = m;
  return r;
}

}  // namespace

TEST_CASE("metrics ratios follow the confusion counts") {
  Metrics m{9, 1, 89, 1};
  CHECK(m.total() == 100);
  CHECK(*m.accuracy() == doctest::Approx(0.98).epsilon(1e-12));
  CHECK(*m.recall() == doctest::Approx(0.9).epsilon(1e-12));
  CHECK(*m.precision() == doctest::Approx(0.9).epsilon(1e-12));
}

TEST_CASE("metrics with empty denominators are absent, not zero") {
  Metrics none;  // nothing evaluated at all
  CHECK(!none.accuracy().has_value());
  CHECK(!none.recall().has_value());
  CHECK(!none.precision().has_value());

  Metrics all_negative{0, 0, 10, 0};  // never predicted or saw a fall
  CHECK(*all_negative.accuracy() == 1.0);
  CHECK(!all_negative.recall().has_value());
  CHECK(!all_negative.precision().has_value());

  Metrics perfect{5, 0, 5, 0};
  CHECK(*perfect.accuracy() == 1.0);
  CHECK(*perfect.recall() == 1.0);
  CHECK(*perfect.precision() == 1.0);
}

TEST_CASE("trainer names round-trip and reject unknowns") {
  CHECK(to_string(Trainer::Godl) == "godl");
  CHECK(to_string(Trainer::Odl) == "odl");
  CHECK(trainer_from_string("godl") == Trainer::Godl);
  CHECK(trainer_from_string("odl") == Trainer::Odl);
  CHECK_THROWS_AS(trainer_from_string("sgd"), InvalidConfig);
}

TEST_CASE("sweep CSV lists one row per cell with absent cells left empty") {
  SweepReport rep;
  rep.rows.push_back(make_row(0.0, Trainer::Godl, 1, Metrics{5, 0, 5, 0}));
  rep.rows.push_back(make_row(0.0, Trainer::Odl, 1, Metrics{4, 1, 4, 1}));
  rep.rows.push_back(make_row(0.5, Trainer::Godl, 1, Metrics{0, 0, 10, 0}));
  const std::string csv = rep.to_csv();

  CHECK(csv.rfind("ratio,trainer,seed,accuracy,recall,precision\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 4);  // header + 3 rows
  CHECK(csv.find("0,godl,1,1,1,1\n") != std::string::npos);
  CHECK(csv.find("0,odl,1,") != std::string::npos);
  // The all-negative cell has accuracy but no recall/precision: trailing
  // empty cells.
  CHECK(csv.find("0.5,godl,1,1,,\n") != std::string::npos);
}

TEST_CASE("mean_accuracy averages rows of one (ratio, trainer) group") {
  SweepReport rep;
  rep.rows.push_back(make_row(0.1, Trainer::Godl, 1, Metrics{8, 0, 10, 2}));   // 0.9
  rep.rows.push_back(make_row(0.1, Trainer::Godl, 2, Metrics{10, 0, 10, 0}));  // 1.0
  rep.rows.push_back(make_row(0.1, Trainer::Odl, 1, Metrics{5, 5, 5, 5}));     // 0.5
  CHECK(*rep.mean_accuracy(0.1, Trainer::Godl) == doctest::Approx(0.95).epsilon(1e-12));
  CHECK(*rep.mean_accuracy(0.1, Trainer::Odl) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(!rep.mean_accuracy(0.2, Trainer::Godl).has_value());
}

TEST_CASE("aggregate_json groups by ratio and trainer") {
  SweepReport rep;
  rep.rows.push_back(make_row(0.0, Trainer::Godl, 1, Metrics{5, 0, 5, 0}));
  rep.rows.push_back(make_row(0.0, Trainer::Godl, 2, Metrics{4, 0, 5, 1}));
  const std::string js = rep.aggregate_json();
  CHECK(js.find("\"ratio\":0") != std::string::npos);
  CHECK(js.find("\"trainer\":\"godl\"") != std::string::npos);
  CHECK(js.find("\"n\":2") != std::string::npos);
  CHECK(js.find("\"mean_accuracy\":0.9") != std::string::npos);
  CHECK(js.find("\"std_accuracy\":") != std::string::npos);
}

TEST_CASE("evaluate tallies fall-vs-rest over a labeled dataset") {
  std::vector<SkeletonSequence> train;
  for (std::uint64_t seed = 1; seed <= 6; ++seed)
    train.push_back(generate_synthetic(SynthConfig{}, SequenceKind::Fall, seed).seq);
  TrainSettings ts;
  ts.odl.lambda = 0.01;
  FallModel model = train_fall_model(train, ts, 1);

  std::vector<LabeledSequence> dataset;
  dataset.push_back(generate_synthetic(SynthConfig{}, SequenceKind::Fall, 200));
  dataset.push_back(generate_synthetic(SynthConfig{}, SequenceKind::Fall, 201));
  dataset.push_back(generate_synthetic(SynthConfig{}, SequenceKind::SitDown, 202));
  dataset.push_back(generate_synthetic(SynthConfig{}, SequenceKind::Other, 203));
  Metrics m = evaluate(model, dataset);
  CHECK(m.total() == 4);
  CHECK(m.tp == 2);
  CHECK(m.tn == 2);
  CHECK(m.fp == 0);
  CHECK(m.fn == 0);
}

TEST_CASE("noise_sweep produces deterministic rows in cell order") {
  SweepSettings s;
  s.ratios = {0.0, 0.04};
  s.n_seeds = 1;
  s.jobs = 4;
  s.train_sequences = 6;
  s.test_per_kind = 3;
  s.train.odl.lambda = 0.01;

  SweepReport rep = noise_sweep(s);
  REQUIRE(rep.rows.size() == 4);  // |ratios| * |trainers| * seeds
  CHECK(rep.rows[0].ratio == 0.0);
  CHECK(rep.rows[0].trainer == Trainer::Godl);
  CHECK(rep.rows[1].ratio == 0.0);
  CHECK(rep.rows[1].trainer == Trainer::Odl);
  CHECK(rep.rows[2].ratio == 0.04);
  CHECK(rep.rows[3].ratio == 0.04);

  // Without corruption the two trainers must behave nearly identically.
  const double g = *rep.rows[0].metrics.accuracy();
  const double o = *rep.rows[1].metrics.accuracy();
  CHECK(std::abs(g - o) <= 0.02);

  // Scheduling must not leak into the result: a serial rerun is identical.
  SweepSettings serial = s;
  serial.jobs = 1;
  CHECK(noise_sweep(serial).to_csv() == rep.to_csv());
}

TEST_CASE("noise_sweep validates its settings") {
  SweepSettings s;
  s.ratios = {};
  CHECK_THROWS_AS(noise_sweep(s), InvalidConfig);
  s = SweepSettings{};
  s.trainers = {};
  CHECK_THROWS_AS(noise_sweep(s), InvalidConfig);
  s = SweepSettings{};
  s.n_seeds = 0;
  CHECK_THROWS_AS(noise_sweep(s), InvalidConfig);
  s = SweepSettings{};
  s.jobs = 0;
  CHECK_THROWS_AS(noise_sweep(s), InvalidConfig);
}
