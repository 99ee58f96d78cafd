#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "osm/problem.hpp"
#include "osm/spectral.hpp"

namespace osm {

struct SuiteResult {
  std::string name;
  bool pass = false;
  double worst = 0.0;      // largest observed defect (or smallest margin, see note)
  double tolerance = 0.0;
  std::string note;
};

/// Runs every property suite on `pb`. Random draws come from a generator
/// seeded with `seed`, so the output is reproducible.
std::vector<SuiteResult> run_verify(const Problem& pb, std::uint64_t seed, const AnalysisOptions& opt = {});

}  // namespace osm
