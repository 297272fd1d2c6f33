#pragma once

#include <stdexcept>
#include <string>

namespace qhi {

// Common base so callers can catch everything from this library at once.
struct Error : std::runtime_error {
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

struct NotPseudoAnosov : Error {
  explicit NotPseudoAnosov(const std::string& what) : Error(what) {}
};

struct OverflowError : Error {
  explicit OverflowError(const std::string& what) : Error(what) {}
};

struct InvalidParameter : Error {
  explicit InvalidParameter(const std::string& what) : Error(what) {}
};

// A shear coordinate hit 0 or -1 (a pole/zero of the coordinate change).
struct DegenerateWeight : Error {
  int step_index;
  DegenerateWeight(const std::string& what, int step = -1)
      : Error(what), step_index(step) {}
};

struct NoSolutionFound : Error {
  explicit NoSolutionFound(const std::string& what) : Error(what) {}
};

struct NoGeometricCandidate : Error {
  explicit NoGeometricCandidate(const std::string& what) : Error(what) {}
};

// A factor (1 + q^e X^{+-1}) in an automorphism or entry formula is singular.
struct SingularFactor : Error {
  explicit SingularFactor(const std::string& what) : Error(what) {}
};

struct InconsistentCentrals : Error {
  explicit InconsistentCentrals(const std::string& what) : Error(what) {}
};

struct NonPeriodicTrajectory : Error {
  explicit NonPeriodicTrajectory(const std::string& what) : Error(what) {}
};

struct IllConditioned : Error {
  explicit IllConditioned(const std::string& what) : Error(what) {}
};

}  // namespace qhi
