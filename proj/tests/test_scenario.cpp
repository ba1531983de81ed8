#include <Eigen/Dense>
#include <random>

#include "doctest.h"
#include "scenario.hpp"
#include "test_support.hpp"
#include "util.hpp"

using namespace hyplan;

namespace {

DailyProfile flat_day(int T, double wt, double pv, double load) {
  DailyProfile d;
  d.wt.assign(size_t(T), wt);
  d.pv.assign(size_t(T), pv);
  d.load.assign(size_t(T), load);
  return d;
}

}  // namespace

TEST_CASE("two-means on separable duplicated days recovers the inputs") {
  const int T = 6;
  DailyProfile a = flat_day(T, 0.8, 0.1, 0.7);
  DailyProfile b = flat_day(T, 0.1, 0.6, 0.9);
  std::vector<DailyProfile> days{a, a, b, b};
  ScenarioSet s = cluster_typical_days(days, 2, 7);
  REQUIRE(s.count() == 2);
  CHECK(s.weights[0] == 2);
  CHECK(s.weights[1] == 2);
  // each centroid equals one input exactly
  bool found_a = false, found_b = false;
  for (const auto& c : s.scenarios) {
    if (std::abs(c.wt[0] - 0.8) < 1e-12) found_a = true;
    if (std::abs(c.wt[0] - 0.1) < 1e-12) found_b = true;
  }
  CHECK(found_a);
  CHECK(found_b);
}

TEST_CASE("weights always sum to the day count") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  const int T = 8;
  std::vector<DailyProfile> days;
  for (int d = 0; d < 73; ++d) {
    DailyProfile p;
    for (int t = 0; t < T; ++t) {
      p.wt.push_back(uni(rng));
      p.pv.push_back(uni(rng));
      p.load.push_back(uni(rng));
    }
    days.push_back(p);
  }
  for (int S : {1, 3, 5}) {
    ScenarioSet s = cluster_typical_days(days, S, 42);
    CHECK(s.total_days() == 73);
    for (int w : s.weights) CHECK(w >= 1);
  }
}

TEST_CASE("degenerate clustering with S = day count") {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  std::vector<DailyProfile> days;
  for (int d = 0; d < 5; ++d) {
    DailyProfile p;
    for (int t = 0; t < 4; ++t) {
      p.wt.push_back(uni(rng));
      p.pv.push_back(uni(rng));
      p.load.push_back(uni(rng));
    }
    days.push_back(p);
  }
  ScenarioSet s = cluster_typical_days(days, 5, 11);
  for (int w : s.weights) CHECK(w == 1);
}

TEST_CASE("clustering is deterministic for a fixed seed and rejects bad S") {
  std::vector<DailyProfile> days(10, flat_day(4, 0.5, 0.5, 0.5));
  for (size_t i = 0; i < days.size(); ++i) days[i].wt[0] = 0.1 * double(i);
  ScenarioSet a = cluster_typical_days(days, 3, 123);
  ScenarioSet b = cluster_typical_days(days, 3, 123);
  CHECK(scenarios_to_json(a) == scenarios_to_json(b));
  CHECK_THROWS_AS(cluster_typical_days(days, 11, 1), HypError);
  CHECK_THROWS_AS(cluster_typical_days({}, 1, 1), HypError);
}

TEST_CASE("k-means objective is non-increasing within a run") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  std::vector<std::vector<double>> pts;
  for (int i = 0; i < 60; ++i) {
    std::vector<double> p(6);
    for (auto& v : p) v = uni(rng);
    pts.push_back(p);
  }
  std::vector<int> assign;
  std::vector<std::vector<double>> cent;
  std::vector<double> trace;
  kmeans_once(pts, 4, 99, assign, cent, &trace);
  REQUIRE(trace.size() >= 2);
  for (size_t i = 1; i < trace.size(); ++i) CHECK(trace[i] <= trace[i - 1] + 1e-9);
}

TEST_CASE("moments vanish when samples equal the centroids") {
  ScenarioSet scen = testing::tiny_scenarios(6);
  std::vector<DailyProfile> samples;
  for (const auto& c : scen.scenarios) {
    samples.push_back(c);
    samples.push_back(c);
  }
  MomentModel m = estimate_moments(samples, scen);
  for (const auto& day : m.sigma_day) CHECK(day.cwiseAbs().maxCoeff() == doctest::Approx(0.0));
}

TEST_CASE("estimate_moments requires two sample days per scenario") {
  ScenarioSet scen = testing::tiny_scenarios(6);
  std::vector<DailyProfile> samples{scen.scenarios[0], scen.scenarios[0], scen.scenarios[1]};
  CHECK_THROWS_WITH_AS(estimate_moments(samples, scen), doctest::Contains("at least 2"),
                       HypError);
}

TEST_CASE("independent sources estimate near-zero cross covariance") {
  const int T = 6, n = 2000;
  ScenarioSet scen;
  scen.hours_per_day = T;
  scen.scenarios = {flat_day(T, 0.5, 0.5, 0.5)};
  scen.weights = {n};
  const double v = 0.01;  // variance
  std::mt19937_64 rng(5);
  std::normal_distribution<double> g(0.0, std::sqrt(v));
  std::vector<DailyProfile> samples;
  for (int d = 0; d < n; ++d) {
    DailyProfile p = scen.scenarios[0];
    for (int t = 0; t < T; ++t) {
      p.wt[size_t(t)] = std::clamp(p.wt[size_t(t)] + g(rng), 0.0, 1.5);
      p.pv[size_t(t)] = std::clamp(p.pv[size_t(t)] + g(rng), 0.0, 1.5);
    }
    samples.push_back(p);
  }
  MomentModel m = estimate_moments(samples, scen);
  double tol = 3.0 * v / std::sqrt(double(n));
  for (int t = 0; t < T; ++t) {
    Eigen::Matrix2d s = m.sigma(0, t);
    CHECK(std::abs(s(0, 1)) <= tol * 3);
    CHECK(s(0, 0) == doctest::Approx(v).epsilon(0.15));
  }
}

TEST_CASE("correlated sources recover the correlation within 0.1") {
  const int T = 4, n = 800;
  const double rho = 0.5, sd = 0.1;
  ScenarioSet scen;
  scen.hours_per_day = T;
  scen.scenarios = {flat_day(T, 0.6, 0.6, 0.6)};
  scen.weights = {n};
  std::mt19937_64 rng(31);
  std::normal_distribution<double> g(0.0, 1.0);
  std::vector<DailyProfile> samples;
  for (int d = 0; d < n; ++d) {
    DailyProfile p = scen.scenarios[0];
    for (int t = 0; t < T; ++t) {
      double z1 = g(rng), z2 = g(rng);
      double e1 = sd * z1;
      double e2 = sd * (rho * z1 + std::sqrt(1 - rho * rho) * z2);
      p.wt[size_t(t)] = std::clamp(p.wt[size_t(t)] + e1, 0.0, 1.5);
      p.pv[size_t(t)] = std::clamp(p.pv[size_t(t)] + e2, 0.0, 1.5);
    }
    samples.push_back(p);
  }
  MomentModel m = estimate_moments(samples, scen);
  for (int t = 0; t < T; ++t) {
    Eigen::Matrix2d s = m.sigma(0, t);
    double corr = s(0, 1) / std::sqrt(s(0, 0) * s(1, 1));
    CHECK(std::abs(corr - rho) <= 0.1);
  }
}

TEST_CASE("ensure_psd is a fixed point on PSD input and clips otherwise") {
  Eigen::MatrixXd id = Eigen::MatrixXd::Identity(3, 3);
  CHECK(((ensure_psd(id) - id).cwiseAbs().maxCoeff()) <= 1e-12);

  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(2, 2);
  d(0, 0) = 1;
  d(1, 1) = -0.1;
  Eigen::MatrixXd r = ensure_psd(d);
  CHECK(r(0, 0) == doctest::Approx(1.0));
  CHECK(r(1, 1) == doctest::Approx(0.0).epsilon(1e-12));

  std::mt19937_64 rng(8);
  std::normal_distribution<double> g(0.0, 1.0);
  Eigen::MatrixXd m(6, 6);
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 6; ++j) m(i, j) = g(rng);
  Eigen::MatrixXd sym = 0.5 * (m + m.transpose());
  Eigen::MatrixXd rep = ensure_psd(sym);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(rep);
  CHECK(es.eigenvalues().minCoeff() >= -1e-10);
  CHECK((rep - rep.transpose()).cwiseAbs().maxCoeff() <= 1e-12);
  CHECK_THROWS_AS(ensure_psd(Eigen::MatrixXd::Zero(2, 3)), HypError);
}

TEST_CASE("block covariance assembles diagonal blocks faithfully") {
  MomentModel m = testing::tiny_moments(2, 3);
  Eigen::MatrixXd full = assemble_block_covariance(m);
  CHECK(full.rows() == 2 * 2 * 3);
  for (int s = 0; s < 2; ++s)
    for (int t = 0; t < 3; ++t) {
      Eigen::Matrix2d blk = full.block<2, 2>(2 * (s * 3 + t), 2 * (s * 3 + t));
      CHECK((blk - m.sigma(s, t)).cwiseAbs().maxCoeff() <= 1e-12);
    }
  // single-block case
  MomentModel one;
  one.scenario_count = 1;
  one.hours_per_day = 1;
  one.sigma_day.push_back((Eigen::MatrixXd(2, 2) << 0.02, 0.005, 0.005, 0.01).finished());
  Eigen::MatrixXd f1 = assemble_block_covariance(one);
  CHECK((f1 - one.sigma_day[0]).cwiseAbs().maxCoeff() <= 1e-12);
  // symmetry and PSD after repair
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(full);
  CHECK(es.eigenvalues().minCoeff() >= -1e-10);
  CHECK((full - full.transpose()).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("pair blocks embed the two hour covariance") {
  MomentModel m = testing::tiny_moments(1, 4);
  Eigen::Matrix4d pair = m.sigma_pair(0, 1, 2);
  CHECK((pair.block<2, 2>(0, 0) - m.sigma(0, 1)).cwiseAbs().maxCoeff() <= 1e-15);
  CHECK((pair.block<2, 2>(2, 2) - m.sigma(0, 2)).cwiseAbs().maxCoeff() <= 1e-15);
  CHECK((pair - pair.transpose()).cwiseAbs().maxCoeff() <= 1e-15);
}

TEST_CASE("moment files reload bit-identically") {
  std::string dir = testing::temp_dir("moments");
  MomentModel m = testing::tiny_moments(2, 5);
  write_file(dir + "/m.json", moments_to_json(m));
  MomentModel back = moments_from_json(read_file(dir + "/m.json"));
  REQUIRE(back.sigma_day.size() == m.sigma_day.size());
  for (size_t s = 0; s < m.sigma_day.size(); ++s)
    CHECK((back.sigma_day[s] - m.sigma_day[s]).cwiseAbs().maxCoeff() == 0.0);
  // and the serialized form is stable
  CHECK(moments_to_json(back) == moments_to_json(m));
}

TEST_CASE("scenario files reload identically") {
  std::string dir = testing::temp_dir("scenfile");
  ScenarioSet s = testing::tiny_scenarios(6);
  write_file(dir + "/s.json", scenarios_to_json(s));
  ScenarioSet back = scenarios_from_json(read_file(dir + "/s.json"));
  CHECK(scenarios_to_json(back) == scenarios_to_json(s));
}

TEST_CASE("psd_sqrt factors satisfy L'L = M") {
  MomentModel m = testing::tiny_moments(1, 4);
  Eigen::MatrixXd M = m.sigma_day[0];
  Eigen::MatrixXd L = psd_sqrt(M);
  CHECK(((L.transpose() * L) - M).cwiseAbs().maxCoeff() <= 1e-10);
}
