#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "rigidity/manifold.hpp"

namespace rigidity {

struct SuiteResult {
  std::string name;
  bool pass = false;
  std::string detail;  // check count when passing, first failed check otherwise
};

// Cross-module invariant sweeps behind `verify-suite`: geodesic round trips,
// metric axioms, the convexity/injectivity ladder, and predicate/witness
// agreement per model, followed by global closure round trips, audit spot
// checks, and the beyond-convexity demo.  Runs each suite to completion and
// never throws; unexpected errors fail the suite that hit them.
std::vector<SuiteResult> run_invariant_suites(const std::optional<ManifoldModel>& only, std::uint64_t seed);

}  // namespace rigidity
