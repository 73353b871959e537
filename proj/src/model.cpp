#include "godl/model.hpp"

#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "godl/json_writer.hpp"
#include "godl/rng.hpp"

namespace godl {

std::string model_to_json(const FallModel& m) {
  JsonWriter w;
  w.begin_object();
  w.key("version");
  w.value(1);
  w.key("lambda");
  w.value(m.lambda);
  w.key("c2");
  w.value(m.c2);
  w.key("alpha");
  w.value(m.alpha);
  w.key("units");
  w.begin_array();
  for (const UnitTrainResult& u : m.units) {
    w.begin_object();
    w.key("label");
    w.value(std::string_view(u.unit_label));
    w.key("atoms");
    w.begin_array();
    for (Eigen::Index i = 0; i < u.dictionary.atoms.rows(); ++i) {
      w.begin_array();
      for (Eigen::Index j = 0; j < u.dictionary.atoms.cols(); ++j)
        w.value(u.dictionary.atoms(i, j));
      w.end_array();
    }
    w.end_array();
    w.key("e_mean");
    w.value(u.e_mean);
    w.key("e_std");
    w.value(u.e_std);
    w.key("weights");
    w.begin_array();
    for (Eigen::Index j = 0; j < u.weights.size(); ++j) w.value(u.weights[j]);
    w.end_array();
    w.end_object();
  }
  w.end_array();
  w.key("temporal");
  w.begin_object();
  w.key("window");
  w.value(m.temporal.window);
  w.key("start_ratio");
  w.value(m.temporal.start_ratio);
  w.key("drop_ratio");
  w.value(m.temporal.drop_ratio);
  w.end_object();
  w.key("feature");
  w.begin_object();
  w.key("w_st");
  w.value(m.feature.w_st);
  w.end_object();
  w.end_object();
  return w.take();
}

FallModel model_from_json(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw MalformedInput(std::string("invalid model JSON: ") + e.what());
  }
  if (!doc.is_object()) throw MalformedInput("model JSON must be an object");
  if (!doc.contains("version") || !doc["version"].is_number_integer() ||
      doc["version"].get<int>() != 1)
    throw MalformedInput("unsupported model version");

  FallModel m;
  try {
    m.lambda = doc.at("lambda").get<double>();
    m.c2 = doc.at("c2").get<double>();
    m.alpha = doc.at("alpha").get<double>();
    const auto& temporal = doc.at("temporal");
    m.temporal.window = temporal.at("window").get<int>();
    m.temporal.start_ratio = temporal.at("start_ratio").get<double>();
    m.temporal.drop_ratio = temporal.at("drop_ratio").get<double>();
    m.feature.w_st = doc.at("feature").at("w_st").get<double>();

    for (const auto& ju : doc.at("units")) {
      UnitTrainResult u;
      u.unit_label = ju.at("label").get<std::string>();
      const auto& atoms = ju.at("atoms");
      if (!atoms.is_array() || atoms.empty() || !atoms[0].is_array())
        throw MalformedInput("unit atoms must be a nonempty 2-D array");
      const Eigen::Index rows = static_cast<Eigen::Index>(atoms.size());
      const Eigen::Index cols = static_cast<Eigen::Index>(atoms[0].size());
      u.dictionary.atoms.resize(rows, cols);
      for (Eigen::Index i = 0; i < rows; ++i) {
        const auto& row = atoms[i];
        if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols)
          throw MalformedInput("unit atom rows must have equal length");
        for (Eigen::Index j = 0; j < cols; ++j)
          u.dictionary.atoms(i, j) = row[j].get<double>();
      }
      u.dictionary.unit_index = static_cast<int>(m.units.size()) + 1;
      u.e_mean = ju.at("e_mean").get<double>();
      u.e_std = ju.at("e_std").get<double>();
      const auto& weights = ju.at("weights");
      u.weights.resize(static_cast<Eigen::Index>(weights.size()));
      for (Eigen::Index j = 0; j < u.weights.size(); ++j) u.weights[j] = weights[j].get<double>();
      m.units.push_back(std::move(u));
    }
  } catch (const nlohmann::json::exception& e) {
    throw MalformedInput(std::string("model JSON missing or mistyped field: ") + e.what());
  }
  if (m.units.empty()) throw MalformedInput("model has no units");
  if (!(m.alpha > 0.0)) throw MalformedInput("model alpha must be > 0");
  for (const auto& u : m.units) u.dictionary.check_norms();
  return m;
}

void save_model(const FallModel& m, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path);
  out << model_to_json(m) << '\n';
  if (!out) throw IoError("write failed: " + path);
}

FallModel load_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return model_from_json(buf.str());
}

FallModel train_all(const std::vector<SubSequence>& subs,
                    const std::vector<std::string>& unit_labels, const OdlConfig& odl_cfg,
                    const GncConfig& gnc_cfg, double alpha, const TemporalParams& temporal,
                    const FeatureParams& feature, std::uint64_t seed, Trainer trainer) {
  if (subs.empty()) throw InvalidConfig("train_all: no sub-sequences");
  if (unit_labels.size() != subs.size())
    throw InvalidConfig("train_all: label/sub-sequence count mismatch");

  FallModel m;
  m.lambda = odl_cfg.lambda;
  m.c2 = gnc_cfg.c2;
  m.alpha = alpha;
  m.temporal = temporal;
  m.feature = feature;
  for (size_t i = 0; i < subs.size(); ++i) {
    try {
      UnitTrainResult u = trainer == Trainer::Godl
                              ? godl_train(subs[i], odl_cfg, gnc_cfg, derive_seed(seed, i + 1))
                              : odl_train(subs[i], odl_cfg, gnc_cfg, derive_seed(seed, i + 1));
      u.unit_label = unit_labels[i];
      m.units.push_back(std::move(u));
    } catch (const AllOutliers& e) {
      throw AllOutliers("unit " + std::to_string(i + 1) + " (" + unit_labels[i] +
                        "): " + e.what());
    } catch (const Error& e) {
      throw Error("unit " + std::to_string(i + 1) + " (" + unit_labels[i] + "): " + e.what());
    }
  }
  return m;
}

}  // namespace godl
