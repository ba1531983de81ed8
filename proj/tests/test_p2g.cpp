#include <cmath>
#include <random>

#include "doctest.h"
#include "p2g.hpp"
#include "test_support.hpp"
#include "util.hpp"

using namespace hyplan;

TEST_CASE("equal split divides power symmetrically") {
  ConversionCurve cv{-0.01, 20, 0};
  DispatchResult r = equal_split_dispatch(12, 2, cv, 2, 10);
  CHECK(r.per_facility_mw == doctest::Approx(6.0));
  CHECK(r.total_hydrogen_kg_h == doctest::Approx(2 * (-0.01 * 36 + 20 * 6)));
  CHECK(r.total_hydrogen_kg_h == doctest::Approx(239.28));

  DispatchResult one = equal_split_dispatch(7.5, 1, cv, 2, 10);
  CHECK(one.per_facility_mw == doctest::Approx(7.5));

  CHECK_THROWS_AS(equal_split_dispatch(25, 2, cv, 2, 10), HypError);
  CHECK_THROWS_AS(equal_split_dispatch(1, 2, cv, 2, 10), HypError);
  CHECK_THROWS_AS(equal_split_dispatch(4, 0, cv, 2, 10), HypError);
}

TEST_CASE("oracle equals a naive exhaustive enumeration on small grids") {
  ConversionCurve cv{-0.04, 18, 3};
  const double pmin = 2, pmax = 10, step = 1.0;
  const int n = 3;
  const double total = 17;
  DispatchResult dp = brute_force_dispatch_oracle(total, n, cv, pmin, pmax, step);

  // explicit enumeration over the same grid
  const int K = int(std::floor((pmax - pmin) / step + 1e-9));
  int target = int(std::lround((total - n * pmin) / step));
  double best = -1;
  for (int k1 = 0; k1 <= K; ++k1)
    for (int k2 = 0; k2 <= K; ++k2) {
      int k3 = target - k1 - k2;
      if (k3 < 0 || k3 > K) continue;
      double h = cv.value(pmin + k1 * step) + cv.value(pmin + k2 * step) +
                 cv.value(pmin + k3 * step);
      best = std::max(best, h);
    }
  CHECK(dp.total_hydrogen_kg_h == doctest::Approx(best).epsilon(1e-12));
  CHECK(dp.allocation.size() == 3);
  double sum = 0;
  for (double a : dp.allocation) sum += a;
  CHECK(sum == doctest::Approx(total).epsilon(1e-9));
}

TEST_CASE("linear curve ties the oracle with equal split exactly") {
  ConversionCurve cv{0.0, 20, 1};
  double total = 14;
  DispatchResult dp = brute_force_dispatch_oracle(total, 2, cv, 2, 10, 0.05);
  DispatchResult es = equal_split_dispatch(dp.achieved_total_mw, 2, cv, 2, 10);
  CHECK(dp.total_hydrogen_kg_h == doctest::Approx(es.total_hydrogen_kg_h).epsilon(1e-12));
}

TEST_CASE("a convex curve strictly beats equal split, confirming concavity matters") {
  ConversionCurve cv{+0.01, 20, 0};  // test-only: violates the model's concavity
  double total = 12;
  double equal = 2 * cv.value(6.0);
  DispatchResult dp = brute_force_dispatch_oracle(total, 2, cv, 2, 10, 0.05);
  CHECK(dp.total_hydrogen_kg_h > equal + 1e-6);
}

TEST_CASE("equal-split optimality property over random concave curves") {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  const double pmin = 2, pmax = 10;
  for (int trial = 0; trial < 200; ++trial) {
    double a = -0.2 * uni(rng) - 1e-4;
    double b = 10 + 20 * uni(rng);
    double c = 5 * uni(rng) - a * pmin * pmin;  // keep the curve nonnegative
    ConversionCurve cv{a, b, c};
    int n = 2 + int(rng() % 4);
    double total = n * pmin + (n * (pmax - pmin)) * uni(rng);
    double step = (pmax - pmin) / 200.0;
    DispatchResult dp = brute_force_dispatch_oracle(total, n, cv, pmin, pmax, step);
    DispatchResult es = equal_split_dispatch(dp.achieved_total_mw, n, cv, pmin, pmax);
    double bound = std::abs(a) * step * step * n + 1e-9;
    CHECK(dp.total_hydrogen_kg_h - es.total_hydrogen_kg_h <= bound);
    CHECK(es.total_hydrogen_kg_h - dp.total_hydrogen_kg_h <= bound);
  }
}

TEST_CASE("farm online counts follow the lifetime window") {
  PlanningModel m;
  SystemConfig cfg = testing::tiny_config(6, 4);
  cfg.p2g.lifetime_epochs = 2;
  SourceRegion& r = cfg.sources[0];
  r.max_new_farms.assign(6, 3);
  r.max_online_farms.assign(6, 50);

  FarmPlanCols cols;
  cols.delta.resize(6);
  cols.chi.resize(6);
  for (int y = 0; y < 6; ++y) {
    for (int k = 0; k < 3; ++k)
      cols.delta[size_t(y)].push_back(
          m.add_var("d" + std::to_string(y) + "_" + std::to_string(k), 0, 1, VarKind::Binary));
    cols.chi[size_t(y)] = m.add_var("chi" + std::to_string(y), 0, 50, VarKind::Continuous);
  }
  emit_farm_planning_constraints(m, cols, r, cfg.horizon, cfg.p2g);

  // build 3 farms in epoch 1 only -> online (3,3,0,0,0,0)
  std::vector<double> x(size_t(m.num_vars()), 0.0);
  for (int k = 0; k < 3; ++k) x[size_t(cols.delta[0][size_t(k)])] = 1.0;
  x[size_t(cols.chi[0])] = 3;
  x[size_t(cols.chi[1])] = 3;
  for (const auto& row : m.rows) {
    double act = m.row_activity(row, x);
    if (row.sense == RowSense::EQ) CHECK(act == doctest::Approx(row.rhs));
    else CHECK(act <= row.rhs + 1e-12);
  }

  // the rolling count: each build contributes min(lifetime, remaining) online-epochs
  int online_sum = 0;
  for (int y = 0; y < 6; ++y) {
    int chi = 0;
    for (int tau = std::max(0, y - 1); tau <= y; ++tau)
      if (tau == 0) chi += 3;
    online_sum += chi;
  }
  CHECK(online_sum == 3 * 2);  // 3 builds x lifetime 2 epochs
}

TEST_CASE("empty build plan keeps online counts at zero") {
  PlanningModel m;
  SystemConfig cfg = testing::tiny_config(3, 4);
  FarmPlanCols cols;
  cols.delta.resize(3);
  cols.chi.resize(3);
  for (int y = 0; y < 3; ++y) {
    cols.delta[size_t(y)].push_back(m.add_var("d" + std::to_string(y), 0, 1, VarKind::Binary));
    cols.chi[size_t(y)] = m.add_var("chi" + std::to_string(y), 0, 2, VarKind::Continuous);
  }
  emit_farm_planning_constraints(m, cols, cfg.sources[0], cfg.horizon, cfg.p2g);
  std::vector<double> x(size_t(m.num_vars()), 0.0);
  for (const auto& row : m.rows)
    if (row.sense == RowSense::EQ) CHECK(m.row_activity(row, x) == doctest::Approx(row.rhs));
}

TEST_CASE("cluster operation constraints evaluate as written") {
  PlanningModel m;
  SystemConfig cfg = testing::tiny_config(1, 3);
  P2GTechnology tech = cfg.p2g;
  tech.facilities_per_farm = 100;

  ClusterDayCols cols;
  cols.chi = m.add_var("chi", 0, 50, VarKind::Continuous);
  const int T = 3;
  for (int t = 0; t < T; ++t) {
    cols.x.push_back(m.add_var("x" + std::to_string(t), 0, 5000, VarKind::Integer));
    cols.u.push_back(m.add_var("u" + std::to_string(t), 0, 5000, VarKind::Integer));
    cols.ponsum.push_back(m.add_var("pon" + std::to_string(t), 0, kInf, VarKind::Continuous));
    cols.pcl.push_back(m.add_var("pcl" + std::to_string(t), 0, kInf, VarKind::Continuous));
    cols.hm.push_back(m.add_var("hm" + std::to_string(t), 0, kInf, VarKind::Continuous));
  }
  emit_cluster_operation_constraints(m, cols, tech, T, {});

  // x=100 at t0: aggregate ON power band is [200, 1000]
  std::vector<double> x(size_t(m.num_vars()), 0.0);
  x[size_t(cols.chi)] = 1;  // 100 facilities online
  x[size_t(cols.x[0])] = 100;
  x[size_t(cols.ponsum[0])] = 1000;
  x[size_t(cols.pcl[0])] = 1000;
  x[size_t(cols.hm[0])] = tech.conversion.b * 1000 + tech.conversion.c * 100;
  // keep the cyclic day consistent: all hours equal
  for (int t = 1; t < T; ++t) {
    x[size_t(cols.x[t])] = 100;
    x[size_t(cols.ponsum[t])] = 1000;
    x[size_t(cols.pcl[t])] = 1000;
    x[size_t(cols.hm[t])] = tech.conversion.b * 1000 + tech.conversion.c * 100;
  }
  for (const auto& row : m.rows) {
    double act = m.row_activity(row, x);
    if (row.sense == RowSense::EQ) CHECK(act == doctest::Approx(row.rhs));
    else CHECK(act <= row.rhs + 1e-9);
  }
  // pushing above the band breaks it
  x[size_t(cols.ponsum[0])] = 1000.5;
  bool violated = false;
  for (const auto& row : m.rows)
    if (row.sense == RowSense::LE && m.row_activity(row, x) > row.rhs + 1e-9) violated = true;
  CHECK(violated);
}

TEST_CASE("all-off hours force zero cluster power") {
  PlanningModel m;
  SystemConfig cfg = testing::tiny_config(1, 2);
  ClusterDayCols cols;
  cols.chi = m.add_var("chi", 0, 2, VarKind::Continuous);
  for (int t = 0; t < 2; ++t) {
    cols.x.push_back(m.add_var("x" + std::to_string(t), 0, 4, VarKind::Integer));
    cols.u.push_back(m.add_var("u" + std::to_string(t), 0, 4, VarKind::Integer));
    cols.ponsum.push_back(m.add_var("pon" + std::to_string(t), 0, kInf, VarKind::Continuous));
    cols.pcl.push_back(m.add_var("pcl" + std::to_string(t), 0, kInf, VarKind::Continuous));
    cols.hm.push_back(m.add_var("hm" + std::to_string(t), 0, kInf, VarKind::Continuous));
  }
  emit_cluster_operation_constraints(m, cols, cfg.p2g, 2, {});
  std::vector<double> x(size_t(m.num_vars()), 0.0);
  x[size_t(cols.pcl[0])] = 1.0;  // power with nothing on: must violate
  bool violated = false;
  for (const auto& row : m.rows) {
    double act = m.row_activity(row, x);
    if (row.sense == RowSense::EQ && std::abs(act - row.rhs) > 1e-12) violated = true;
    if (row.sense == RowSense::LE && act > row.rhs + 1e-12) violated = true;
  }
  CHECK(violated);
}

TEST_CASE("ramp headroom matches the hand-evaluated bound") {
  // x=50 of 100 online facilities: 50*10 + 50*10 = 1000 MW of headroom
  PlanningModel m;
  SystemConfig cfg = testing::tiny_config(1, 2);
  P2GTechnology tech = cfg.p2g;
  tech.facilities_per_farm = 100;
  ClusterDayCols cols;
  cols.chi = m.add_var("chi", 0, 50, VarKind::Continuous);
  for (int t = 0; t < 2; ++t) {
    cols.x.push_back(m.add_var("x" + std::to_string(t), 0, 5000, VarKind::Integer));
    cols.u.push_back(m.add_var("u" + std::to_string(t), 0, 5000, VarKind::Integer));
    cols.ponsum.push_back(m.add_var("pon" + std::to_string(t), 0, kInf, VarKind::Continuous));
    cols.pcl.push_back(m.add_var("pcl" + std::to_string(t), 0, kInf, VarKind::Continuous));
    cols.hm.push_back(m.add_var("hm" + std::to_string(t), 0, kInf, VarKind::Continuous));
  }
  emit_cluster_operation_constraints(m, cols, tech, 2, {});
  // locate the ramp row for t=0 and check its headroom at x=50, chi=1
  std::vector<double> x(size_t(m.num_vars()), 0.0);
  x[size_t(cols.chi)] = 1;
  x[size_t(cols.x[0])] = 50;
  double headroom = 0;
  bool found = false;
  for (const auto& row : m.rows) {
    if (row.tag != "p2g_ramp" || found) continue;
    // row: pcl[t1] - pcl[t0] + (pmax-ramp)x - N*pmax*chi <= 0
    headroom = -m.row_activity(row, x);
    found = true;
  }
  REQUIRE(found);
  CHECK(headroom == doctest::Approx(50 * 10 + 50 * 10));
}

TEST_CASE("quadratic mode emits a sound concave envelope") {
  PlanningModel m;
  SystemConfig cfg = testing::tiny_config(1, 1);
  ClusterEmitOptions opt;
  opt.quadratic_hydrogen = true;
  opt.envelope_pieces = 5;
  ClusterDayCols cols;
  cols.chi = m.add_var("chi", 0, 2, VarKind::Continuous);
  cols.x.push_back(m.add_var("x0", 0, 4, VarKind::Integer));
  cols.u.push_back(m.add_var("u0", 0, 4, VarKind::Integer));
  cols.ponsum.push_back(m.add_var("pon0", 0, kInf, VarKind::Continuous));
  cols.pcl.push_back(m.add_var("pcl0", 0, kInf, VarKind::Continuous));
  cols.hm.push_back(m.add_var("hm0", 0, kInf, VarKind::Continuous));
  emit_cluster_operation_constraints(m, cols, cfg.p2g, 1, opt);

  const ConversionCurve& cv = cfg.p2g.conversion;
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> uni(cfg.p2g.p_min_mw, cfg.p2g.p_max_mw);
  for (int trial = 0; trial < 50; ++trial) {
    int n = 1 + int(rng() % 4);
    double per = uni(rng);
    std::vector<double> x(size_t(m.num_vars()), 0.0);
    x[size_t(cols.chi)] = 2;
    x[size_t(cols.x[0])] = n;
    x[size_t(cols.ponsum[0])] = n * per;
    x[size_t(cols.pcl[0])] = n * per;
    double truth = n * cv.value(per);
    // the envelope admits the true value...
    x[size_t(cols.hm[0])] = truth;
    for (const auto& row : m.rows)
      if (row.tag == "p2g_h2_env") CHECK(m.row_activity(row, x) <= row.rhs + 1e-9);
    // ...and clips values above the tangent hull
    x[size_t(cols.hm[0])] = truth + 0.05 * std::abs(cv.a) *
                                        (cfg.p2g.p_max_mw - cfg.p2g.p_min_mw) *
                                        (cfg.p2g.p_max_mw - cfg.p2g.p_min_mw) * n +
                            1e-3;
    bool clipped = false;
    for (const auto& row : m.rows)
      if (row.tag == "p2g_h2_env" && m.row_activity(row, x) > row.rhs + 1e-12) clipped = true;
    CHECK(clipped);
  }
}
