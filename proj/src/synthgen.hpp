#pragma once

#include <cstdint>
#include <vector>

namespace hyplan {

// Deterministic synthetic year of per-unit profiles: regime-switching wind,
// clear/cloudy solar with seasonal amplitude, two-peak load. Used by the
// bundled example decks and the test fixtures.
struct SynthProfiles {
  std::vector<std::vector<double>> wt, pv, load;  // [day][hour]
};

SynthProfiles generate_synthetic_year(int days, int hours, uint64_t seed);

}  // namespace hyplan
