#include <algorithm>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "godl/eval.hpp"
#include "godl/inference.hpp"
#include "godl/json_writer.hpp"
#include "godl/pipeline.hpp"
#include "godl/rng.hpp"
#include "godl/synth.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

/// Merged, flat view of every tunable. Resolution order: built-in defaults,
/// then --config file, then explicit flags.
struct RunConfig {
  godl::OdlConfig odl;
  godl::GncConfig gnc;
  godl::TemporalParams temporal;
  godl::FeatureParams feature;
  godl::SynthConfig synth;
  double alpha = 2.0;
  int units = 5;
  std::uint64_t seed = 1;
  int m_consecutive = 2;
  // sweep harness
  std::vector<double> ratios = {0.0, 0.02, 0.04, 0.06, 0.08, 0.10};
  int seeds = 10;
  std::vector<std::string> trainers = {"godl", "odl"};
  int jobs = 1;
  double magnitude = 0.5;
  int train_sequences = 25;
  int test_per_kind = 12;
};

void apply_config_file(RunConfig& c, const std::string& path) {
  std::ifstream f(path);
  if (!f) throw godl::InvalidConfig("cannot open config file: " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  json j;
  try {
    j = json::parse(ss.str());
  } catch (const json::exception&) {
    throw godl::InvalidConfig("config file is not valid JSON: " + path);
  }
  if (!j.is_object()) throw godl::InvalidConfig("config must be a flat JSON object");
  for (const auto& [k, v] : j.items()) {
    try {
      if (k == "lambda") c.odl.lambda = v.get<double>();
      else if (k == "inner_max_iter") c.odl.inner_max_iter = v.get<int>();
      else if (k == "conv_tol") c.odl.conv_tol = v.get<double>();
      else if (k == "atom_dims") c.odl.atom_dims = v.get<std::vector<int>>();
      else if (k == "c2") c.gnc.c2 = v.get<double>();
      else if (k == "mu_divisor") c.gnc.mu_divisor = v.get<double>();
      else if (k == "weight_cutoff") c.gnc.inlier_weight_cutoff = v.get<double>();
      else if (k == "window") c.temporal.window = v.get<int>();
      else if (k == "start_ratio") c.temporal.start_ratio = v.get<double>();
      else if (k == "drop_ratio") c.temporal.drop_ratio = v.get<double>();
      else if (k == "w_st") c.feature.w_st = v.get<double>();
      else if (k == "alpha") c.alpha = v.get<double>();
      else if (k == "units") c.units = v.get<int>();
      else if (k == "seed") c.seed = v.get<std::uint64_t>();
      else if (k == "m_consecutive") c.m_consecutive = v.get<int>();
      else if (k == "frames_per_unit") c.synth.frames_per_unit = v.get<int>();
      else if (k == "subspace_dim") c.synth.subspace_dim = v.get<int>();
      else if (k == "noise_sigma") c.synth.noise_sigma = v.get<double>();
      else if (k == "ratios") c.ratios = v.get<std::vector<double>>();
      else if (k == "seeds") c.seeds = v.get<int>();
      else if (k == "trainers") c.trainers = v.get<std::vector<std::string>>();
      else if (k == "jobs") c.jobs = v.get<int>();
      else if (k == "magnitude") c.magnitude = v.get<double>();
      else if (k == "train_sequences") c.train_sequences = v.get<int>();
      else if (k == "test_per_kind") c.test_per_kind = v.get<int>();
      else throw godl::InvalidConfig("unknown config key: " + k);
    } catch (const json::exception&) {
      throw godl::InvalidConfig("bad value for config key: " + k);
    }
  }
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw godl::IoError("cannot open for writing: " + path);
  f << content;
  if (!f) throw godl::IoError("write failed: " + path);
}

void emit(const std::string& out_path, const std::string& content) {
  if (out_path.empty())
    std::cout << content;
  else
    write_file(out_path, content);
}

std::vector<std::string> list_sequence_files(const std::string& dir) {
  if (!fs::is_directory(dir)) throw godl::IoError("not a directory: " + dir);
  std::vector<std::string> files;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (!e.is_regular_file()) continue;
    const std::string ext = e.path().extension().string();
    if (ext == ".csv" || ext == ".json") files.push_back(e.path().string());
  }
  std::sort(files.begin(), files.end());
  return files;
}

godl::TrainSettings settings_from(const RunConfig& c, godl::Trainer trainer) {
  godl::TrainSettings ts;
  ts.odl = c.odl;
  ts.gnc = c.gnc;
  ts.alpha = c.alpha;
  ts.temporal = c.temporal;
  ts.feature = c.feature;
  ts.n_units = c.units;
  ts.trainer = trainer;
  return ts;
}

void print_weight_histograms(const godl::FallModel& model, double cutoff) {
  for (std::size_t u = 0; u < model.units.size(); ++u) {
    const auto& unit = model.units[u];
    const auto& w = unit.weights;
    int inliers = 0;
    for (int i = 0; i < w.size(); ++i)
      if (w[i] >= cutoff) ++inliers;
    std::cout << "unit " << (u + 1) << " (" << unit.unit_label << "): frames=" << w.size()
              << " inliers=" << inliers << " e_mean=" << unit.e_mean << " e_std=" << unit.e_std
              << "\n";
    for (int b = 0; b < 10; ++b) {
      const double lo = 0.1 * b;
      const double hi = 0.1 * (b + 1);
      int count = 0;
      for (int i = 0; i < w.size(); ++i)
        if (w[i] >= lo && (b == 9 ? w[i] <= hi : w[i] < hi)) ++count;
      std::cout << "  w [" << lo << "," << hi << (b == 9 ? "]" : ")") << " " << count << " ";
      for (int i = 0; i < std::min(count, 60); ++i) std::cout << '#';
      std::cout << "\n";
    }
  }
}

int cmd_train(const RunConfig& cfg, const std::string& data_dir, const std::string& out,
              godl::Trainer trainer) {
  const auto files = list_sequence_files(data_dir);
  if (files.empty()) throw godl::Error("no sequences found in " + data_dir);
  std::vector<godl::SkeletonSequence> seqs;
  seqs.reserve(files.size());
  for (const auto& f : files) seqs.push_back(godl::load_sequence(f));

  const godl::FallModel model = godl::train_fall_model(seqs, settings_from(cfg, trainer), cfg.seed);
  godl::save_model(model, out.empty() ? "model.json" : out);
  print_weight_histograms(model, cfg.gnc.inlier_weight_cutoff);
  std::cout << "model written to " << (out.empty() ? "model.json" : out) << "\n";
  return 0;
}

int cmd_detect(const RunConfig& cfg, const std::string& model_path, const std::string& seq_path,
               const std::string& out, const double* alpha_override) {
  godl::FallModel model = godl::load_model(model_path);
  if (alpha_override) model.alpha = *alpha_override;
  const godl::SkeletonSequence seq = godl::load_sequence(seq_path);
  const godl::SkeletonSequence norm = godl::normalize(seq).first;
  godl::DetectorConfig dc;
  dc.m_consecutive = cfg.m_consecutive;
  const godl::DetectionResult r = godl::detect(norm, model, dc);
  emit(out, r.to_json_string() + "\n");
  return 0;
}

godl::SequenceKind kind_from_filename(const fs::path& p) {
  const std::string name = p.filename().string();
  for (const char* prefix : {"sit_down_", "lie_down_", "other_", "fall_"})
    if (name.rfind(prefix, 0) == 0)
      return godl::kind_from_string(std::string(prefix, std::strlen(prefix) - 1));
  throw godl::Error("cannot infer label from filename (expected fall_/sit_down_/lie_down_/other_ prefix): " +
                    name);
}

int cmd_eval(const std::string& model_path, const std::string& data_dir, const std::string& out) {
  const godl::FallModel model = godl::load_model(model_path);
  const auto files = list_sequence_files(data_dir);
  if (files.empty()) throw godl::Error("no sequences found in " + data_dir);
  std::vector<godl::LabeledSequence> dataset;
  dataset.reserve(files.size());
  for (const auto& f : files) {
    godl::LabeledSequence ls;
    ls.kind = kind_from_filename(fs::path(f));
    ls.seq = godl::load_sequence(f);
    dataset.push_back(std::move(ls));
  }
  const godl::Metrics m = godl::evaluate(model, dataset);

  godl::JsonWriter w;
  w.begin_object();
  w.key("tp"); w.value(static_cast<long long>(m.tp));
  w.key("fp"); w.value(static_cast<long long>(m.fp));
  w.key("tn"); w.value(static_cast<long long>(m.tn));
  w.key("fn"); w.value(static_cast<long long>(m.fn));
  auto ratio = [&w](const char* name, std::optional<double> v) {
    w.key(name);
    if (v) w.value(*v); else w.null();
  };
  ratio("accuracy", m.accuracy());
  ratio("recall", m.recall());
  ratio("precision", m.precision());
  w.end_object();
  emit(out, w.take() + "\n");
  return 0;
}

int cmd_sweep(const RunConfig& cfg, const std::string& out) {
  godl::SweepSettings s;
  s.ratios = cfg.ratios;
  s.n_seeds = cfg.seeds;
  s.base_seed = cfg.seed;
  s.trainers.clear();
  for (const auto& t : cfg.trainers) s.trainers.push_back(godl::trainer_from_string(t));
  s.jobs = cfg.jobs;
  s.outlier_magnitude = cfg.magnitude;
  s.train_sequences = cfg.train_sequences;
  s.test_per_kind = cfg.test_per_kind;
  s.synth = cfg.synth;
  s.train = settings_from(cfg, godl::Trainer::Godl);

  const godl::SweepReport report = godl::noise_sweep(s);
  if (out.empty()) {
    std::cout << report.to_csv();
  } else {
    write_file(out, report.to_csv());
    std::cout << report.aggregate_json() << "\n";
  }
  return 0;
}

int cmd_synth(const RunConfig& cfg, const std::string& kind_name, int n, const std::string& out) {
  const godl::SequenceKind kind = godl::kind_from_string(kind_name);
  const std::string dir = out.empty() ? "." : out;
  fs::create_directories(dir);
  for (int i = 0; i < n; ++i) {
    const godl::LabeledSequence ls =
        godl::generate_synthetic(cfg.synth, kind, godl::derive_seed(cfg.seed, 100 + i));
    const std::string path = dir + "/" + kind_name + "_" + std::to_string(i) + ".csv";
    write_file(path, godl::to_csv(ls.seq));
    std::cout << path << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"GODL: robust action-unit dictionary learning and fall-event detection"};
  app.require_subcommand(1);

  std::string config_path, out_path, model_path, data_dir, seq_path;
  std::string kind_name = "fall", trainer_name = "godl";
  std::uint64_t seed = 0;
  int n = 10, units = 0, seeds = 0, jobs = 0, m_consecutive = 0;
  double lambda = 0, c2 = 0, alpha = 0, w_st = 0, magnitude = 0;
  std::vector<double> ratios;
  std::vector<std::string> trainers;

  CLI::Option *o_seed, *o_units, *o_lambda, *o_c2, *o_alpha, *o_wst;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "flat JSON config file");
    o_seed = sub->add_option("--seed", seed, "base RNG seed");
    sub->add_option("--out", out_path, "output path");
    o_lambda = sub->add_option("--lambda", lambda, "sparse-coding regularizer");
    o_c2 = sub->add_option("--c2", c2, "squared inlier threshold");
    o_alpha = sub->add_option("--alpha", alpha, "statistical gate width");
    o_wst = sub->add_option("--w-st", w_st, "velocity feature weight");
    o_units = sub->add_option("--units", units, "number of action units");
  };

  CLI::App* train = app.add_subcommand("train", "train a fall model from a directory of sequences");
  add_common(train);
  auto* t_seed = o_seed; auto* t_units = o_units; auto* t_lambda = o_lambda;
  auto* t_c2 = o_c2; auto* t_alpha = o_alpha; auto* t_wst = o_wst;
  train->add_option("data_dir", data_dir, "directory of .csv/.json sequences")->required();
  train->add_option("--trainer", trainer_name, "godl or odl");

  CLI::App* detect = app.add_subcommand("detect", "run the detector over one sequence");
  add_common(detect);
  auto* d_seed = o_seed; auto* d_alpha = o_alpha;
  detect->add_option("--model", model_path, "trained model JSON")->required();
  detect->add_option("sequence", seq_path, "sequence file")->required();
  detect->add_option("--m-consecutive", m_consecutive, "gate passes needed per stage");
  auto* d_mcons = detect->get_option("--m-consecutive");

  CLI::App* eval = app.add_subcommand("eval", "evaluate a model on a labeled directory");
  add_common(eval);
  eval->add_option("--model", model_path, "trained model JSON")->required();
  eval->add_option("data_dir", data_dir, "directory of kind-prefixed sequences")->required();

  CLI::App* sweep = app.add_subcommand("sweep", "noise-robustness sweep (GODL vs ODL)");
  add_common(sweep);
  auto* s_seed = o_seed; auto* s_lambda = o_lambda; auto* s_units = o_units;
  auto* s_c2 = o_c2; auto* s_alpha = o_alpha; auto* s_wst = o_wst;
  auto* s_ratios = sweep->add_option("--ratios", ratios, "outlier ratios")->delimiter(',');
  auto* s_seeds = sweep->add_option("--seeds", seeds, "seeds per cell group");
  auto* s_trainers = sweep->add_option("--trainers", trainers, "trainers to compare")->delimiter(',');
  auto* s_jobs = sweep->add_option("--jobs", jobs, "parallel cells");
  auto* s_mag = sweep->add_option("--magnitude", magnitude, "outlier magnitude (normalized units)");

  CLI::App* synth = app.add_subcommand("synth", "generate synthetic sequences");
  add_common(synth);
  auto* sy_seed = o_seed;
  synth->add_option("--kind", kind_name, "fall, sit_down, lie_down, other");
  synth->add_option("--n", n, "number of sequences");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    RunConfig cfg;
    if (sweep->parsed()) cfg.odl.lambda = 0.01;  // harness default; see README
    if (!config_path.empty()) apply_config_file(cfg, config_path);

    auto apply_common = [&](CLI::Option* so, CLI::Option* uo, CLI::Option* lo, CLI::Option* co,
                            CLI::Option* ao, CLI::Option* wo) {
      if (so->count()) cfg.seed = seed;
      if (uo->count()) cfg.units = units;
      if (lo->count()) cfg.odl.lambda = lambda;
      if (co->count()) cfg.gnc.c2 = c2;
      if (ao->count()) cfg.alpha = alpha;
      if (wo->count()) cfg.feature.w_st = w_st;
    };

    if (train->parsed()) {
      apply_common(t_seed, t_units, t_lambda, t_c2, t_alpha, t_wst);
      return cmd_train(cfg, data_dir, out_path, godl::trainer_from_string(trainer_name));
    }
    if (detect->parsed()) {
      if (d_seed->count()) cfg.seed = seed;
      if (d_mcons->count()) cfg.m_consecutive = m_consecutive;
      return cmd_detect(cfg, model_path, seq_path, out_path,
                        d_alpha->count() ? &alpha : nullptr);
    }
    if (eval->parsed()) return cmd_eval(model_path, data_dir, out_path);
    if (sweep->parsed()) {
      apply_common(s_seed, s_units, s_lambda, s_c2, s_alpha, s_wst);
      if (s_ratios->count()) cfg.ratios = ratios;
      if (s_seeds->count()) cfg.seeds = seeds;
      if (s_trainers->count()) cfg.trainers = trainers;
      if (s_jobs->count()) cfg.jobs = jobs;
      if (s_mag->count()) cfg.magnitude = magnitude;
      return cmd_sweep(cfg, out_path);
    }
    if (synth->parsed()) {
      if (sy_seed->count()) cfg.seed = seed;
      return cmd_synth(cfg, kind_name, n, out_path);
    }
    return 2;
  } catch (const godl::InvalidConfig& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const godl::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
