#pragma once

#include <stdexcept>
#include <string>

namespace fmcf {

// Grid spacing too large for the requested domain.
class GridTooCoarse : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// The explicit stepper produced a non-finite value.
class NumericalBlowup : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// An internal invariant that should be impossible was violated.
class ConsistencyError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// solve_radii with c exactly at the tangential value 1/r_min.
class TangentialRoot : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

}  // namespace fmcf
