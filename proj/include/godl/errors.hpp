#pragma once

#include <stdexcept>
#include <string>

namespace godl {

/// Base class for all library errors.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Input file/stream rejected (bad row, non-numeric cell, NaN, empty file).
struct MalformedInput : Error {
  using Error::Error;
};

/// Normalization impossible: x extent is zero over the sequence.
struct DegenerateExtent : Error {
  using Error::Error;
};

/// Sequence too short for the requested operation.
struct TooShort : Error {
  using Error::Error;
};

/// Fewer frames than clusters requested.
struct TooFewFrames : Error {
  using Error::Error;
};

/// A cluster id ended up with zero frames after smoothing.
struct MissingCluster : Error {
  using Error::Error;
};

/// Iterates diverged to non-finite values; signals a broken dictionary upstream.
struct NonFinite : Error {
  using Error::Error;
};

/// No frame reached the inlier weight cutoff at the end of training.
struct AllOutliers : Error {
  using Error::Error;
};

/// Model and input stream disagree on dimensions.
struct ModelMismatch : Error {
  using Error::Error;
};

/// Configuration value out of range or unknown key.
struct InvalidConfig : Error {
  using Error::Error;
};

/// Filesystem-level failure.
struct IoError : Error {
  using Error::Error;
};

}  // namespace godl
