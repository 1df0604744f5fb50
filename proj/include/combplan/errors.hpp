#pragma once

#include <stdexcept>
#include <string>

namespace combplan {

// Base class for everything this library throws on purpose.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct InvalidParameterError : Error {
  using Error::Error;
};

// build_frame: tangent and normal (nearly) parallel.
struct DegenerateFrameError : Error {
  using Error::Error;
};

// align_target: fewer than 3 correspondences or collinear landmarks.
struct AlignmentError : Error {
  using Error::Error;
};

// Grid dimension mismatch.
struct ShapeError : Error {
  using Error::Error;
};

// trace_strand: seed outside the mask or untraceable.
struct InvalidSeedError : Error {
  using Error::Error;
};

// representative_strand: largest cluster is empty.
struct NoRepresentativeError : Error {
  using Error::Error;
};

// generate_stroke: representative strand has no usable length.
struct InvalidRepresentativeError : Error {
  using Error::Error;
};

// Stroke planning cannot proceed (e.g. no candidate targets in radius).
struct PlanningError : Error {
  using Error::Error;
};

// lift_point: no defined depth within the search neighborhood.
struct DepthHoleError : Error {
  using Error::Error;
};

// ransac_plane: no valid (non-collinear) hypothesis found.
struct PlaneFitError : Error {
  using Error::Error;
};

struct ConfigError : Error {
  using Error::Error;
};

struct IoError : Error {
  using Error::Error;
};

}  // namespace combplan
