#include "synthgen.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace hyplan {

SynthProfiles generate_synthetic_year(int days, int hours, uint64_t seed) {
  SynthProfiles p;
  p.wt.assign(size_t(days), std::vector<double>(size_t(hours), 0.0));
  p.pv = p.wt;
  p.load = p.wt;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const double pi = 3.14159265358979323846;

  for (int d = 0; d < days; ++d) {
    double season = std::cos(2.0 * pi * d / std::max(days, 1));  // +1 winter, -1 summer

    // wind: regimes with winter bias
    bool windy = uni(rng) < 0.45 + 0.15 * season;
    double base = windy ? 0.55 + 0.35 * uni(rng) : 0.08 + 0.27 * uni(rng);
    double phase = 2.0 * pi * uni(rng);
    double ar = 0.0;
    for (int t = 0; t < hours; ++t) {
      ar = 0.75 * ar + 0.06 * gauss(rng);
      double diurnal = 0.08 * std::sin(2.0 * pi * t / hours + phase);
      p.wt[size_t(d)][size_t(t)] = std::clamp(base + diurnal + ar, 0.0, 1.2);
    }

    // solar: clear-sky bell scaled by season and cloud state
    double amp = 0.75 - 0.2 * season;
    bool clear = uni(rng) < 0.6;
    double cloud = clear ? 0.85 + 0.15 * uni(rng) : 0.3 + 0.4 * uni(rng);
    for (int t = 0; t < hours; ++t) {
      double frac = (t + 0.5) / hours;
      double sun = std::sin(pi * (frac - 0.25) / 0.5);
      double v = frac >= 0.25 && frac <= 0.75 ? amp * cloud * std::max(sun, 0.0) : 0.0;
      v += 0.01 * gauss(rng);
      p.pv[size_t(d)][size_t(t)] = std::clamp(v, 0.0, 1.2);
    }

    // load: two peaks, weekend dip, mild seasonality
    bool weekend = d % 7 >= 5;
    double lvl = (weekend ? 0.82 : 0.92) + 0.04 * season;
    for (int t = 0; t < hours; ++t) {
      double frac = double(t) / hours;
      double morning = std::exp(-std::pow((frac - 0.42), 2) / 0.006);
      double evening = std::exp(-std::pow((frac - 0.83), 2) / 0.008);
      double shape = 0.62 + 0.22 * morning + 0.3 * evening;
      double v = lvl * shape + 0.015 * gauss(rng);
      p.load[size_t(d)][size_t(t)] = std::clamp(v, 0.2, 1.2);
    }
  }
  return p;
}

}  // namespace hyplan
