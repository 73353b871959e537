#include "godl/skeleton.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include <nlohmann/json.hpp>

#include "godl/json_writer.hpp"

namespace godl {
namespace {

bool parse_double(std::string_view cell, double& out) {
  // std::from_chars does not skip whitespace; trim the cell first.
  size_t b = 0, e = cell.size();
  while (b < e && std::isspace(static_cast<unsigned char>(cell[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(cell[e - 1]))) --e;
  if (b == e) return false;
  const char* first = cell.data() + b;
  const char* last = cell.data() + e;
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last;
}

SkeletonSequence parse_csv(const std::string& text) {
  SkeletonSequence seq;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;

    std::vector<double> cells;
    size_t pos = 0;
    while (pos <= line.size()) {
      const size_t comma = line.find(',', pos);
      const size_t end = comma == std::string::npos ? line.size() : comma;
      double v = 0.0;
      if (!parse_double(std::string_view(line).substr(pos, end - pos), v))
        throw MalformedInput("line " + std::to_string(line_no) + ": non-numeric cell");
      if (!std::isfinite(v))
        throw MalformedInput("line " + std::to_string(line_no) + ": non-finite value");
      cells.push_back(v);
      if (comma == std::string::npos) break;
      pos = comma + 1;
    }
    if (cells.size() < 7 || (cells.size() - 1) % 3 != 0)
      throw MalformedInput("line " + std::to_string(line_no) +
                           ": expected frame_index plus x,y,z per joint (>= 2 joints)");

    const int joints = static_cast<int>((cells.size() - 1) / 3);
    if (seq.frames.empty()) {
      seq.joint_count = joints;
    } else if (joints != seq.joint_count) {
      throw MalformedInput("line " + std::to_string(line_no) + ": row length mismatch");
    }

    Frame f;
    f.index = static_cast<int>(cells[0]);
    if (static_cast<double>(f.index) != cells[0] || f.index < 0)
      throw MalformedInput("line " + std::to_string(line_no) +
                           ": frame index must be a nonnegative integer");
    if (!seq.frames.empty() && f.index <= seq.frames.back().index)
      throw MalformedInput("line " + std::to_string(line_no) +
                           ": frame indices must be strictly increasing");
    f.joints.reserve(joints);
    for (int j = 0; j < joints; ++j)
      f.joints.emplace_back(cells[1 + 3 * j], cells[2 + 3 * j], cells[3 + 3 * j]);
    seq.frames.push_back(std::move(f));
  }
  if (seq.frames.empty()) throw MalformedInput("empty input: no frames");
  return seq;
}

SkeletonSequence parse_json_seq(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw MalformedInput(std::string("invalid JSON: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("joint_count") || !doc.contains("frames"))
    throw MalformedInput("JSON sequence needs joint_count and frames");

  SkeletonSequence seq;
  if (!doc["joint_count"].is_number_integer())
    throw MalformedInput("joint_count must be an integer");
  seq.joint_count = doc["joint_count"].get<int>();
  if (seq.joint_count < 2) throw MalformedInput("joint_count must be >= 2");
  if (doc.contains("frame_rate_hz")) {
    if (!doc["frame_rate_hz"].is_number()) throw MalformedInput("frame_rate_hz must be a number");
    seq.frame_rate_hz = doc["frame_rate_hz"].get<double>();
    if (!(seq.frame_rate_hz > 0)) throw MalformedInput("frame_rate_hz must be positive");
  }
  if (doc.contains("source_id")) {
    if (!doc["source_id"].is_string()) throw MalformedInput("source_id must be a string");
    seq.source_id = doc["source_id"].get<std::string>();
  }
  const auto& frames = doc["frames"];
  if (!frames.is_array() || frames.empty()) throw MalformedInput("frames must be a nonempty array");
  int idx = 0;
  for (const auto& row : frames) {
    if (!row.is_array() || row.size() != static_cast<size_t>(3 * seq.joint_count))
      throw MalformedInput("frame " + std::to_string(idx) + ": row length mismatch");
    Frame f;
    f.index = idx++;
    for (size_t j = 0; j + 2 < row.size(); j += 3) {
      if (!row[j].is_number() || !row[j + 1].is_number() || !row[j + 2].is_number())
        throw MalformedInput("frame " + std::to_string(f.index) + ": non-numeric cell");
      const double x = row[j].get<double>();
      const double y = row[j + 1].get<double>();
      const double z = row[j + 2].get<double>();
      if (!std::isfinite(x) || !std::isfinite(y) || !std::isfinite(z))
        throw MalformedInput("frame " + std::to_string(f.index) + ": non-finite value");
      f.joints.emplace_back(x, y, z);
    }
    seq.frames.push_back(std::move(f));
  }
  return seq;
}

}  // namespace

void SkeletonSequence::validate() const {
  if (frames.empty()) throw MalformedInput("sequence has no frames");
  if (joint_count < 2) throw MalformedInput("sequence needs at least 2 joints");
  int prev = -1;
  for (const Frame& f : frames) {
    if (static_cast<int>(f.joints.size()) != joint_count)
      throw MalformedInput("frame " + std::to_string(f.index) + ": joint count mismatch");
    if (f.index <= prev)
      throw MalformedInput("frame indices must be strictly increasing");
    prev = f.index;
    for (const auto& p : f.joints)
      if (!p.allFinite())
        throw MalformedInput("frame " + std::to_string(f.index) + ": non-finite coordinate");
  }
}

SkeletonSequence parse_sequence(const std::string& text, SequenceFormat format) {
  SkeletonSequence seq =
      format == SequenceFormat::Csv ? parse_csv(text) : parse_json_seq(text);
  seq.validate();
  return seq;
}

SkeletonSequence load_sequence(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  const bool json = path.size() >= 5 && path.substr(path.size() - 5) == ".json";
  SkeletonSequence seq =
      parse_sequence(buf.str(), json ? SequenceFormat::Json : SequenceFormat::Csv);
  if (seq.source_id.empty()) seq.source_id = path;
  return seq;
}

std::string to_csv(const SkeletonSequence& seq) {
  std::string out;
  for (const Frame& f : seq.frames) {
    out += std::to_string(f.index);
    for (const auto& p : f.joints)
      for (int a = 0; a < 3; ++a) {
        out += ',';
        out += format_double(p[a]);
      }
    out += '\n';
  }
  return out;
}

std::string to_json(const SkeletonSequence& seq) {
  JsonWriter w;
  w.begin_object();
  w.key("joint_count");
  w.value(seq.joint_count);
  w.key("frame_rate_hz");
  w.value(seq.frame_rate_hz);
  w.key("frames");
  w.begin_array();
  for (const Frame& f : seq.frames) {
    w.begin_array();
    for (const auto& p : f.joints)
      for (int a = 0; a < 3; ++a) w.value(p[a]);
    w.end_array();
  }
  w.end_array();
  w.end_object();
  return w.take();
}

std::pair<SkeletonSequence, NormalizationParams> normalize(const SkeletonSequence& seq) {
  seq.validate();
  NormalizationParams p;
  p.x_min = std::numeric_limits<double>::infinity();
  p.x_max = -std::numeric_limits<double>::infinity();
  p.y_min = std::numeric_limits<double>::infinity();
  p.z_min = std::numeric_limits<double>::infinity();
  for (const Frame& f : seq.frames)
    for (const auto& j : f.joints) {
      p.x_min = std::min(p.x_min, j.x());
      p.x_max = std::max(p.x_max, j.x());
      p.y_min = std::min(p.y_min, j.y());
      p.z_min = std::min(p.z_min, j.z());
    }
  p.scale = p.x_max - p.x_min;
  if (!(p.scale > 0.0)) throw DegenerateExtent("x extent is zero over the sequence");

  SkeletonSequence out = seq;
  for (Frame& f : out.frames)
    for (auto& j : f.joints) {
      j.x() = (j.x() - p.x_min) / p.scale;
      j.y() = (j.y() - p.y_min) / p.scale;
      j.z() = (j.z() - p.z_min) / p.scale;
    }
  return {std::move(out), p};
}

SkeletonSequence denormalize(const SkeletonSequence& seq, const NormalizationParams& p) {
  SkeletonSequence out = seq;
  for (Frame& f : out.frames)
    for (auto& j : f.joints) {
      j.x() = j.x() * p.scale + p.x_min;
      j.y() = j.y() * p.scale + p.y_min;
      j.z() = j.z() * p.scale + p.z_min;
    }
  return out;
}

FeatureSequence build_features(const SkeletonSequence& seq, double w_st) {
  seq.validate();
  const int n = seq.frame_count();
  if (n < 2) throw TooShort("build_features needs at least 2 frames");
  const int jc = seq.joint_count;

  FeatureSequence fs;
  fs.w_st = w_st;
  fs.vectors.resize(6 * jc, n);
  for (int t = 0; t < n; ++t) {
    for (int j = 0; j < jc; ++j)
      fs.vectors.block<3, 1>(3 * j, t) = seq.frames[t].joints[j];
    if (t == 0) {
      fs.vectors.block(3 * jc, 0, 3 * jc, 1).setZero();
    } else {
      for (int j = 0; j < jc; ++j)
        fs.vectors.block<3, 1>(3 * jc + 3 * j, t) =
            w_st * (seq.frames[t].joints[j] - seq.frames[t - 1].joints[j]);
    }
  }
  return fs;
}

}  // namespace godl
