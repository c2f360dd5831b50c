#pragma once

#include <stdexcept>
#include <string>

namespace aek {

/// Violated geometric precondition (non-convex point, degenerate pair, ...).
class GeometryError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NonConvexPoint : public GeometryError {
 public:
  using GeometryError::GeometryError;
};

class PatchBounds : public GeometryError {
 public:
  using GeometryError::GeometryError;
};

class DegeneratePair : public GeometryError {
 public:
  using GeometryError::GeometryError;
};

class DegenerateCone : public GeometryError {
 public:
  using GeometryError::GeometryError;
};

class NoSolution : public GeometryError {
 public:
  using GeometryError::GeometryError;
};

class RankDeficient : public GeometryError {
 public:
  using GeometryError::GeometryError;
};

/// An exact computation needs an irrational value (e.g. sqrt(2) in rational mode).
class NotRepresentable : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

}  // namespace aek
