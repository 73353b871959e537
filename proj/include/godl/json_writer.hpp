#pragma once

#include <cmath>
#include <cstdio>
#include <string>
#include <string_view>

namespace godl {

/// Formats a double with 17 significant digits, enough for an exact
/// binary64 round-trip through decimal text.
inline std::string format_double(double v) {
  if (std::isnan(v)) return "null";
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  std::string s(buf);
  // Bare "inf" is not valid JSON; the library never emits non-finite values
  // on purpose, this keeps a stray one parseable.
  if (s.find("inf") != std::string::npos) return v > 0 ? "1e999" : "-1e999";
  return s;
}

/// Minimal append-only JSON writer with deterministic key order and
/// round-trip-exact number formatting. Callers emit keys in a fixed order,
/// so identical inputs produce byte-identical documents.
class JsonWriter {
 public:
  void begin_object() {
    sep();
    out_ += '{';
    fresh_ = true;
  }
  void end_object() {
    out_ += '}';
    fresh_ = false;
  }
  void begin_array() {
    sep();
    out_ += '[';
    fresh_ = true;
  }
  void end_array() {
    out_ += ']';
    fresh_ = false;
  }
  void key(std::string_view k) {
    sep();
    append_string(k);
    out_ += ':';
    fresh_ = true;
  }
  void value(double v) {
    sep();
    out_ += format_double(v);
  }
  void value(int v) { value(static_cast<long long>(v)); }
  void value(long long v) {
    sep();
    out_ += std::to_string(v);
  }
  void value(bool v) {
    sep();
    out_ += v ? "true" : "false";
  }
  void value(std::string_view s) {
    sep();
    append_string(s);
  }
  void null() {
    sep();
    out_ += "null";
  }

  const std::string& str() const { return out_; }
  std::string take() { return std::move(out_); }

 private:
  void sep() {
    if (!fresh_ && !out_.empty() && out_.back() != '{' && out_.back() != '[' && out_.back() != ':')
      out_ += ',';
    fresh_ = false;
  }
  void append_string(std::string_view s) {
    out_ += '"';
    for (char c : s) {
      switch (c) {
        case '"': out_ += "\\\""; break;
        case '\\': out_ += "\\\\"; break;
        case '\n': out_ += "\\n"; break;
        case '\r': out_ += "\\r"; break;
        case '\t': out_ += "\\t"; break;
        default:
          if (static_cast<unsigned char>(c) < 0x20) {
            char buf[8];
            std::snprintf(buf, sizeof(buf), "\\u%04x", c);
            out_ += buf;
          } else {
            out_ += c;
          }
      }
    }
    out_ += '"';
  }

  std::string out_;
  bool fresh_ = true;
};

}  // namespace godl
