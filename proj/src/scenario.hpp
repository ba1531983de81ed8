#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "config.hpp"

namespace hyplan {

// One day of per-unit profiles, hours_per_day values each.
struct DailyProfile {
  std::vector<double> wt, pv, load;
};

// Weighted typical days. weights[s] counts the input days represented by
// scenario s; the weights sum to the input day count.
struct ScenarioSet {
  int hours_per_day = 0;
  std::vector<DailyProfile> scenarios;
  std::vector<int> weights;
  int count() const { return int(scenarios.size()); }
  int total_days() const;
};

// Second-moment model of per-unit forecast errors. The stacked error vector
// of a scenario day is indexed 2*t + src with src 0=wt, 1=pv. Cross-scenario
// covariance is zero: scenarios partition the historical days, so the full
// matrix is block-diagonal with one dense 2T x 2T block per scenario.
struct MomentModel {
  int scenario_count = 0;
  int hours_per_day = 0;
  std::vector<Eigen::MatrixXd> sigma_day;  // one 2T x 2T block per scenario

  Eigen::Matrix2d sigma(int s, int t) const;                 // spatial block
  Eigen::Matrix4d sigma_pair(int s, int t1, int t2) const;   // two-hour block
  Eigen::MatrixXd full() const;                              // 2ST x 2ST
};

std::vector<DailyProfile> load_profile_days(const SystemConfig& cfg);

ScenarioSet cluster_typical_days(const std::vector<DailyProfile>& days, int S, uint64_t seed);

MomentModel estimate_moments(const std::vector<DailyProfile>& samples, const ScenarioSet& scen);

// Assembles the block covariance across all (scenario, hour) pairs and
// repairs it to PSD.
Eigen::MatrixXd assemble_block_covariance(const MomentModel& m);

// Symmetrizes, clips negative eigenvalues at zero. Identity on PSD input.
Eigen::MatrixXd ensure_psd(const Eigen::MatrixXd& m);

// Factor L with L^T L = M (M symmetric PSD), via eigendecomposition.
Eigen::MatrixXd psd_sqrt(const Eigen::MatrixXd& m);

std::string scenarios_to_json(const ScenarioSet& s);
ScenarioSet scenarios_from_json(const std::string& text);
std::string moments_to_json(const MomentModel& m);
MomentModel moments_from_json(const std::string& text);

// Single k-means run (k-means++ seeding, Lloyd iterations). Exposed for the
// objective-monotonicity property test; `wcss_trace` records the objective
// after every assignment step.
double kmeans_once(const std::vector<std::vector<double>>& points, int S, uint64_t seed,
                   std::vector<int>& assign, std::vector<std::vector<double>>& centroids,
                   std::vector<double>* wcss_trace);

}  // namespace hyplan
