#include <algorithm>
#include <cmath>
#include <random>

#include "doctest.h"
#include "econ.hpp"
#include "solver.hpp"
#include "test_support.hpp"
#include "util.hpp"

using namespace hyplan;

namespace {

PlanningModel cone_toy() {
  // min y  s.t. ||(x1, x2)|| <= y, x1 >= 3, x2 = 4 fixed by bounds
  PlanningModel m;
  int x1 = m.add_var("x1", 3, 10, VarKind::Continuous, 0.0);
  int x2 = m.add_var("x2", 4, 4, VarKind::Continuous, 0.0);
  int y = m.add_var("y", 0, 100, VarKind::Continuous, 1.0);
  ConeDef c;
  c.tag = "toy";
  c.scale = 1.0;
  LinExpr e1, e2;
  e1.add(x1, 1.0);
  e2.add(x2, 1.0);
  c.vec = {e1, e2};
  c.bound.add(y, 1.0);
  m.add_cone(c);
  m.add_row("bound_nonneg", RowSense::GE, 0.0, {{y, 1.0}});
  return m;
}

}  // namespace

TEST_CASE("relaxation with cuts converges to the cone optimum") {
  PlanningModel m = cone_toy();
  MisocpSolver solver(m);
  SolveOptions opt;
  opt.cut_tol = 1e-8;
  RelaxationSolution sol = solver.solve_relaxation_with_cuts(opt);
  REQUIRE(sol.status == LpStatus::Optimal);
  // optimum: x1=3, x2=4 -> y = 5
  CHECK(sol.objective == doctest::Approx(5.0).epsilon(1e-6));
  CHECK(sol.max_cone_violation <= 1e-6);
}

TEST_CASE("separation count drops to zero at a clean point") {
  PlanningModel m = cone_toy();
  MisocpSolver solver(m);
  std::vector<double> clean{3.0, 4.0, 5.0 + 1e-9};
  CHECK(solver.separate_soc_cuts(clean, 1e-6) == 0);
}

TEST_CASE("tangent cut at (3,4) with bound 4 matches the hand value") {
  PlanningModel m = cone_toy();
  MisocpSolver solver(m);
  std::vector<double> x{3.0, 4.0, 4.0};  // ||v||=5 > 4: violated by 1
  int added = solver.separate_soc_cuts(x, 1e-6);
  CHECK(added == 1);
  // the cut is 0.6 x1 + 0.8 x2 - y <= 0; at the point: 1.8+3.2-4 = 1
  RelaxationSolution sol = solver.solve_relaxation();
  REQUIRE(sol.status == LpStatus::Optimal);
  CHECK(sol.objective >= 5.0 - 1e-6);  // the cut already forces y >= 5 here
}

TEST_CASE("repeated separation decreases the violation monotonically to tolerance") {
  PlanningModel m = cone_toy();
  MisocpSolver solver(m);
  double prev = 1e30;
  for (int round = 0; round < 30; ++round) {
    RelaxationSolution sol = solver.solve_relaxation();
    REQUIRE(sol.status == LpStatus::Optimal);
    CHECK(sol.max_cone_violation <= prev + 1e-9);
    prev = sol.max_cone_violation;
    if (solver.separate_soc_cuts(sol.x, 1e-9) == 0) break;
  }
  CHECK(prev <= 1e-6);
}

TEST_CASE("cut validity: cone-feasible samples satisfy every separated cut") {
  PlanningModel m = cone_toy();
  MisocpSolver solver(m);
  SolveOptions opt;
  solver.solve_relaxation_with_cuts(opt);
  // sample cone-feasible points and check them against the refined relaxation
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  for (int k = 0; k < 200; ++k) {
    double x1 = 3 + 7 * uni(rng);
    double x2 = 4.0;
    double y = std::sqrt(x1 * x1 + x2 * x2) + 5 * uni(rng);
    if (y > 100) continue;
    std::vector<double> pt{x1, x2, y};
    ResidualReport rr = check_feasibility(m, pt, 1e-6);
    CHECK(rr.cone <= 1e-9);  // by construction
    // and a fresh solver loaded with the same cuts accepts the point:
    // tangent cuts never exclude cone-feasible points
    for (const auto& cone : m.cones) {
      double nrm = 0;
      for (const auto& e : cone.vec) {
        double v = m.eval(e, pt);
        nrm += v * v;
      }
      CHECK(std::sqrt(nrm) <= cone.scale * m.eval(cone.bound, pt) + 1e-9);
    }
  }
}

TEST_CASE("binary knapsack solves to the enumerated optimum") {
  PlanningModel m;
  int x1 = m.add_var("x1", 0, 1, VarKind::Binary, -5.0);
  int x2 = m.add_var("x2", 0, 1, VarKind::Binary, -4.0);
  int x3 = m.add_var("x3", 0, 1, VarKind::Binary, -3.0);
  m.add_row("cap", RowSense::LE, 5.0, {{x1, 2.0}, {x2, 3.0}, {x3, 1.0}});
  MisocpSolver solver(m);
  SolveReport rep = solver.branch_and_bound({});
  REQUIRE(rep.has_incumbent);
  CHECK(rep.incumbent_obj == doctest::Approx(-9.0).epsilon(1e-9));
  CHECK(rep.incumbent[size_t(x1)] == doctest::Approx(1.0));
  CHECK(rep.incumbent[size_t(x2)] == doctest::Approx(1.0));
  CHECK(rep.incumbent[size_t(x3)] == doctest::Approx(0.0));
  CHECK(rep.reason == TermReason::Optimal);
  CHECK(rep.gap <= 1e-9);
}

TEST_CASE("general integer branching matches exhaustive search") {
  PlanningModel m;
  int x = m.add_var("x", 0, 3, VarKind::Integer, -3.0);
  int y = m.add_var("y", 0, 3, VarKind::Integer, -2.0);
  m.add_row("r1", RowSense::LE, 7.0, {{x, 2.0}, {y, 1.0}});
  m.add_row("r2", RowSense::LE, 8.0, {{x, 1.0}, {y, 2.5}});
  MisocpSolver solver(m);
  SolveReport rep = solver.branch_and_bound({});
  REQUIRE(rep.has_incumbent);
  double best = 0;
  for (int xi = 0; xi <= 3; ++xi)
    for (int yi = 0; yi <= 3; ++yi) {
      if (2 * xi + yi > 7 || xi + 2.5 * yi > 8) continue;
      best = std::min(best, -3.0 * xi - 2.0 * yi);
    }
  CHECK(rep.incumbent_obj == doctest::Approx(best).epsilon(1e-9));
}

TEST_CASE("all-integer relaxation solves in one node") {
  PlanningModel m;
  int x = m.add_var("x", 0, 5, VarKind::Integer, 1.0);
  m.add_row("fix", RowSense::GE, 2.0, {{x, 1.0}});
  MisocpSolver solver(m);
  SolveReport rep = solver.branch_and_bound({});
  CHECK(rep.nodes == 1);
  CHECK(rep.incumbent_obj == doctest::Approx(2.0));
  CHECK(rep.gap <= 1e-12);
}

TEST_CASE("constructed infeasibility is reported") {
  PlanningModel m;
  int x = m.add_var("x", 0, 1, VarKind::Binary, 1.0);
  m.add_row("force", RowSense::GE, 2.0, {{x, 1.0}});
  MisocpSolver solver(m);
  SolveReport rep = solver.branch_and_bound({});
  CHECK(rep.reason == TermReason::Infeasible);
  CHECK_FALSE(rep.has_incumbent);
}

TEST_CASE("check_feasibility quantifies violations") {
  PlanningModel m = cone_toy();
  std::vector<double> good{3.0, 4.0, 5.1};
  ResidualReport ok = check_feasibility(m, good, 1e-6);
  CHECK(ok.pass(1e-6));
  std::vector<double> bad{3.0, 4.0, 4.9};  // cone violated: 5 > 4.9
  ResidualReport r = check_feasibility(m, bad, 1e-6);
  CHECK_FALSE(r.pass(1e-6));
  CHECK(r.cone == doctest::Approx((5.0 - 4.9) / (1 + 4.9)).epsilon(1e-9));
  std::vector<double> out_of_bounds{2.9, 4.0, 6.0};
  CHECK(check_feasibility(m, out_of_bounds, 1e-6).bounds > 1e-6);
  std::vector<double> short_vec{1.0};
  CHECK_THROWS_AS(check_feasibility(m, short_vec, 1e-6), HypError);
}

TEST_CASE("tiny planning model solves and the incumbent verifies") {
  ModelBundle bundle = testing::tiny_bundle(true, true, 2, 6);
  MisocpSolver solver(bundle.model);
  SolveOptions opt;
  opt.gap_tol = 1e-4;
  SolveReport rep = solver.branch_and_bound(opt);
  REQUIRE(rep.has_incumbent);
  ResidualReport rr = check_feasibility(bundle.model, rep.incumbent, opt.int_tol);
  INFO("linear ", rr.linear, " cone ", rr.cone, " int ", rr.integrality, " bounds ", rr.bounds);
  CHECK(rr.pass(1e-5));
  CHECK(rep.incumbent_obj < 0);  // the plan turns a profit
  // bound history is monotone
  for (size_t i = 1; i < rep.bound_history.size(); ++i)
    CHECK(rep.bound_history[i] >= rep.bound_history[i - 1] - 1e-9);
  CHECK(rep.best_bound <= rep.incumbent_obj + 1e-6 * std::abs(rep.incumbent_obj));
}

TEST_CASE("integer commitment solve matches leaf enumeration") {
  // two-hour day, all integer assignments enumerated with an LP per leaf
  SystemConfig cfg = testing::tiny_config(1, 2);
  ScenarioSet scen;
  scen.hours_per_day = 2;
  DailyProfile d;
  d.wt = {0.8, 0.4};
  d.pv = {0.5, 0.0};
  d.load = {0.9, 0.7};
  scen.scenarios = {d};
  scen.weights = {365};
  MomentModel mom = testing::tiny_moments(1, 2);
  BuildOptions bopt;
  bopt.drcc = true;
  bopt.epsilon = 0.1;
  bopt.relax_integers = false;
  ModelBundle bundle = build_model(cfg, scen, mom, bopt);

  SolveOptions sopt;
  sopt.gap_tol = 1e-6;
  MisocpSolver solver(bundle.model);
  SolveReport rep = solver.branch_and_bound(sopt);
  REQUIRE(rep.has_incumbent);

  // enumerate sigma/delta/x/u assignments; x,u <= 2 (one farm of two units)
  double best = std::numeric_limits<double>::infinity();
  const VarIndex& ix = bundle.idx;
  for (int sh = 0; sh <= 1; ++sh)
    for (int sp = 0; sp <= 1; ++sp)
      for (int de = 0; de <= 1; ++de)
        for (int x0 = 0; x0 <= 2; ++x0)
          for (int x1 = 0; x1 <= 2; ++x1)
            for (int u0 = 0; u0 <= 2; ++u0)
              for (int u1 = 0; u1 <= 2; ++u1) {
                PlanningModel leaf = bundle.model;
                auto fix = [&](int col, double v) {
                  leaf.vars[size_t(col)].lb = v;
                  leaf.vars[size_t(col)].ub = v;
                };
                fix(ix.sigma[0][0][0], sh);
                fix(ix.sigma[1][0][0], sp);
                fix(ix.delta[0][0][0], de);
                fix(ix.x[0][0][0][0], x0);
                fix(ix.x[0][0][0][1], x1);
                fix(ix.u[0][0][0][0], u0);
                fix(ix.u[0][0][0][1], u1);
                MisocpSolver leaf_solver(leaf);
                RelaxationSolution sol = leaf_solver.solve_relaxation_with_cuts(sopt);
                if (sol.status == LpStatus::Optimal) best = std::min(best, sol.objective);
              }
  REQUIRE(std::isfinite(best));
  CHECK(rep.incumbent_obj ==
        doctest::Approx(best).epsilon(1e-4));
}

TEST_CASE("deterministic mode admits the zeroed drcc solution") {
  for (uint64_t seed : {1ull, 2ull}) {
    (void)seed;
    ModelBundle drcc = testing::tiny_bundle(true, true, 2, 6);
    MisocpSolver solver(drcc.model);
    SolveOptions opt;
    SolveReport rep = solver.branch_and_bound(opt);
    REQUIRE(rep.has_incumbent);
    // zero out every response, then check against the deterministic model
    ModelBundle det = testing::tiny_bundle(true, true, 2, 6);
    deterministic_mode(det);
    std::vector<double> x = rep.incumbent;
    for (int j = 0; j < det.model.num_vars(); ++j)
      if (det.model.vars[size_t(j)].beta_of >= 0 ||
          (det.model.vars[size_t(j)].lb == 0 && det.model.vars[size_t(j)].ub == 0))
        x[size_t(j)] = 0.0;
    ResidualReport rr = check_feasibility(det.model, x, opt.int_tol);
    INFO("linear ", rr.linear, " bounds ", rr.bounds);
    CHECK(rr.linear <= 1e-5);
    CHECK(rr.bounds <= 1e-6);
  }
}

TEST_CASE("solver runs are deterministic") {
  ModelBundle b1 = testing::tiny_bundle(true, true, 2, 6);
  ModelBundle b2 = testing::tiny_bundle(true, true, 2, 6);
  MisocpSolver s1(b1.model), s2(b2.model);
  SolveOptions opt;
  SolveReport r1 = s1.branch_and_bound(opt);
  SolveReport r2 = s2.branch_and_bound(opt);
  CHECK(solve_report_json(r1) == solve_report_json(r2));
  REQUIRE(r1.has_incumbent);
  REQUIRE(r2.has_incumbent);
  CHECK(r1.incumbent == r2.incumbent);  // bitwise
}
