#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "godl/model.hpp"
#include "godl/rng.hpp"
#include "oracles.hpp"

using namespace godl;

namespace {

FallModel tiny_model() {
  FallModel m;
  m.lambda = 0.1;
  m.c2 = 0.5;
  m.alpha = 2.0;
  UnitTrainResult u;
  u.dictionary.atoms = Eigen::MatrixXd(3, 2);
  const double r = 1.0 / std::sqrt(3.0);
  u.dictionary.atoms << 1, r, 0, r, 0, r;
  u.weights = Eigen::VectorXd(3);
  u.weights << 1.0, 1.0 / 3.0, 0.2;
  u.e_mean = 0.0123456789012345678;
  u.e_std = 1e-7;
  u.unit_label = "standing";
  m.units.push_back(u);
  u.unit_label = "knee \"landing\"";  // exercises string escaping
  u.dictionary.atoms.col(1) *= 0.5;
  m.units.push_back(u);
  return m;
}

SubSequence make_unit_sub(int unit_index, std::uint64_t stream) {
  Rng rng(stream);
  SubSequence s;
  s.unit_index = unit_index;
  s.columns = oracle::synthetic_unit(rng, 8, 14, 1, 0.5);
  return s;
}

}  // namespace

TEST_CASE("model JSON is version 1 and byte-stable across round trips") {
  FallModel m = tiny_model();
  const std::string js = model_to_json(m);
  CHECK(js.find("\"version\":1") != std::string::npos);
  FallModel back = model_from_json(js);
  CHECK(model_to_json(back) == js);  // parse -> re-serialize is the identity

  // 17-significant-digit doubles survive exactly, not just approximately.
  CHECK(back.lambda == m.lambda);
  CHECK(back.units[0].e_mean == m.units[0].e_mean);
  CHECK(back.units[0].e_std == m.units[0].e_std);
  CHECK((back.units[0].dictionary.atoms - m.units[0].dictionary.atoms).cwiseAbs().maxCoeff() ==
        0.0);
  CHECK((back.units[1].weights - m.units[1].weights).cwiseAbs().maxCoeff() == 0.0);
  CHECK(back.units[1].unit_label == "knee \"landing\"");
  CHECK(back.temporal.window == m.temporal.window);
  CHECK(back.feature.w_st == m.feature.w_st);
}

TEST_CASE("model_from_json rejects malformed documents") {
  const std::string good = model_to_json(tiny_model());
  CHECK_THROWS_AS(model_from_json("{"), MalformedInput);
  CHECK_THROWS_AS(model_from_json("[]"), MalformedInput);

  std::string wrong_version = good;
  wrong_version.replace(wrong_version.find("\"version\":1"), 11, "\"version\":2");
  CHECK_THROWS_AS(model_from_json(wrong_version), MalformedInput);

  std::string missing_field = good;
  missing_field.replace(missing_field.find("\"lambda\""), 8, "\"lambdaX\"");
  CHECK_THROWS_AS(model_from_json(missing_field), MalformedInput);
}

TEST_CASE("model_from_json enforces unit invariants") {
  FallModel m = tiny_model();
  m.units.clear();
  CHECK_THROWS_AS(model_from_json(model_to_json(m)), MalformedInput);

  m = tiny_model();
  m.units[0].dictionary.atoms *= 3.0;  // oversize atoms serialize fine but fail validation
  CHECK_THROWS_AS(model_from_json(model_to_json(m)), InvalidConfig);
}

TEST_CASE("save_model and load_model preserve bytes on disk") {
  const std::string dir = "/tmp/godl_test_model";
  std::filesystem::create_directories(dir);
  FallModel m = tiny_model();
  save_model(m, dir + "/m.json");
  FallModel back = load_model(dir + "/m.json");
  CHECK(model_to_json(back) == model_to_json(m));
  // Saving the reloaded model yields an identical file.
  save_model(back, dir + "/m2.json");
  std::ifstream a(dir + "/m.json", std::ios::binary), b(dir + "/m2.json", std::ios::binary);
  std::stringstream sa, sb;
  sa << a.rdbuf();
  sb << b.rdbuf();
  CHECK(sa.str() == sb.str());

  CHECK_THROWS_AS(load_model(dir + "/missing.json"), IoError);
  CHECK_THROWS_AS(save_model(m, "/nonexistent_dir_zz/m.json"), IoError);
}

TEST_CASE("train_all cycles atom counts over the unit index") {
  std::vector<SubSequence> subs;
  std::vector<std::string> labels;
  for (int i = 1; i <= 7; ++i) {
    subs.push_back(make_unit_sub(i, 100 + i));
    labels.push_back("u" + std::to_string(i));
  }
  OdlConfig odl_cfg;
  odl_cfg.lambda = 0.01;
  FallModel m = train_all(subs, labels, odl_cfg, GncConfig{}, 2.0, TemporalParams{},
                          FeatureParams{}, 7);
  REQUIRE(m.unit_count() == 7);
  const int expect[7] = {4, 5, 6, 10, 13, 4, 5};
  for (int i = 0; i < 7; ++i) {
    CHECK(m.units[i].dictionary.atom_count() == expect[i]);
    CHECK(m.units[i].unit_label == labels[i]);
  }
  CHECK(m.lambda == odl_cfg.lambda);
  CHECK(m.c2 == GncConfig{}.c2);
  CHECK(m.alpha == 2.0);
}

TEST_CASE("train_all is deterministic and supports the plain baseline") {
  std::vector<SubSequence> subs = {make_unit_sub(1, 11), make_unit_sub(2, 12)};
  std::vector<std::string> labels = {"a", "b"};
  OdlConfig odl_cfg;
  odl_cfg.lambda = 0.01;
  FallModel g1 = train_all(subs, labels, odl_cfg, GncConfig{}, 2.0, TemporalParams{},
                           FeatureParams{}, 3);
  FallModel g2 = train_all(subs, labels, odl_cfg, GncConfig{}, 2.0, TemporalParams{},
                           FeatureParams{}, 3);
  CHECK(model_to_json(g1) == model_to_json(g2));

  FallModel o = train_all(subs, labels, odl_cfg, GncConfig{}, 2.0, TemporalParams{},
                          FeatureParams{}, 3, Trainer::Odl);
  for (const auto& u : o.units) {
    CHECK(u.weights.minCoeff() == 1.0);
    CHECK(u.weights.maxCoeff() == 1.0);
  }
}

TEST_CASE("train_all validates inputs and names the failing unit") {
  CHECK_THROWS_AS(train_all({}, {}, OdlConfig{}, GncConfig{}, 2.0, TemporalParams{},
                            FeatureParams{}, 1),
                  InvalidConfig);
  std::vector<SubSequence> subs = {make_unit_sub(1, 1)};
  CHECK_THROWS_AS(train_all(subs, {"a", "b"}, OdlConfig{}, GncConfig{}, 2.0, TemporalParams{},
                            FeatureParams{}, 1),
                  InvalidConfig);

  // A unit no dictionary can fit is reported with its index and label.
  SubSequence hopeless;
  hopeless.unit_index = 1;
  hopeless.columns = Eigen::MatrixXd::Zero(3, 5);
  hopeless.columns.row(0).setConstant(10.0);
  OdlConfig odl_cfg;
  odl_cfg.lambda = 0.1;
  CHECK_THROWS_WITH_AS(train_all({hopeless}, {"bad unit"}, odl_cfg, GncConfig{}, 2.0,
                                 TemporalParams{}, FeatureParams{}, 1),
                       doctest::Contains("unit 1 (bad unit)"), AllOutliers);
}
