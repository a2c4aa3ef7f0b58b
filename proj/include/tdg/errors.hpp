#pragma once

#include <stdexcept>
#include <string>

namespace tdg {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Rejected input: non-finite coordinates, out-of-range parameters, malformed targets.
struct InvalidArgument : Error {
  using Error::Error;
};

/// Players coincide (separation below 1e-12); the game has already terminated.
struct DegenerateState : Error {
  using Error::Error;
};

/// An iterative solver exhausted its budget.
struct NonConvergence : Error {
  using Error::Error;
};

/// A capture-game operation was invoked outside the capture space (or vice versa).
struct WrongSubspace : Error {
  using Error::Error;
};

/// Ray tracing of the barrier curve found no sign change on a ray.
struct BracketingFailure : Error {
  BracketingFailure(const std::string& what, int ray) : Error(what), ray_index(ray) {}
  int ray_index;
};

/// The escape problem has an empty feasible set.
struct Infeasible : Error {
  using Error::Error;
};

/// The escape point coincides with the evader; heading angles are indeterminate.
struct DegeneratePoint : Error {
  using Error::Error;
};

}  // namespace tdg
