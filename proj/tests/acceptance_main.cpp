// Acceptance suite: one pass/fail line per criterion. Run all criteria with
// no arguments or a single one with --criterion N.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <random>
#include <string>
#include <vector>

#include "accept_support.hpp"
#include "assembly.hpp"
#include "drcc.hpp"
#include "econ.hpp"
#include "p2g.hpp"
#include "scenario.hpp"
#include "solver.hpp"
#include "synthgen.hpp"
#include "test_support.hpp"
#include "util.hpp"

using namespace hyplan;

namespace {

int g_failures = 0;

void report(int crit, bool pass, const std::string& what, const std::string& detail = "") {
  std::printf("%s criterion %d: %s%s%s\n", pass ? "PASS" : "FAIL", crit, what.c_str(),
              detail.empty() ? "" : " -- ", detail.c_str());
  std::fflush(stdout);
  if (!pass) ++g_failures;
}

double now_s() {
  static auto t0 = std::chrono::steady_clock::now();
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::vector<DailyProfile> synth_days(int days, int hours, uint64_t seed) {
  SynthProfiles p = generate_synthetic_year(days, hours, seed);
  std::vector<DailyProfile> out(static_cast<size_t>(days));
  for (int d = 0; d < days; ++d) {
    out[size_t(d)].wt = p.wt[size_t(d)];
    out[size_t(d)].pv = p.pv[size_t(d)];
    out[size_t(d)].load = p.load[size_t(d)];
  }
  return out;
}

// ---------- criterion 1: equal-split optimality ----------
void criterion1() {
  const double t0 = now_s();
  std::mt19937_64 rng(1001);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  const double pmin = 2, pmax = 10;
  const double step = (pmax - pmin) / 200.0;
  bool ok = true;
  std::string detail;
  for (int trial = 0; trial < 1000 && ok; ++trial) {
    double a = -0.25 * uni(rng) - 1e-5;
    double b = 8 + 25 * uni(rng);
    double c = 6 * uni(rng) - a * pmin * pmin;
    ConversionCurve cv{a, b, c};
    int n = 2 + int(rng() % 4);
    double total = n * pmin + n * (pmax - pmin) * uni(rng);
    DispatchResult dp = brute_force_dispatch_oracle(total, n, cv, pmin, pmax, step);
    DispatchResult es = equal_split_dispatch(dp.achieved_total_mw, n, cv, pmin, pmax);
    double excess = dp.total_hydrogen_kg_h - es.total_hydrogen_kg_h;
    double bound = std::abs(a) * step * step * n + 1e-9;
    if (excess > bound || -excess > bound) {
      ok = false;
      detail = "trial " + std::to_string(trial) + ": excess " + format_double(excess) +
               " vs bound " + format_double(bound);
    }
  }
  double secs = now_s() - t0;
  if (secs >= 10.0) {
    ok = false;
    detail += " runtime " + format_double(secs) + "s >= 10s";
  }
  report(1, ok, "equal-split optimality over 1000 random concave curves",
         ok ? format_double(secs) + "s" : detail);
}

// ---------- criterion 2: cantelli soundness ----------
void criterion2() {
  std::mt19937_64 rng(2002);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  const int n = 100000;
  bool ok = true;
  std::string detail;
  int case_id = 0;
  for (int kind = 0; kind < 2 && ok; ++kind) {
    const int count = kind == 0 ? 50 : 20;
    for (int trial = 0; trial < count && ok; ++trial) {
      int dim = kind == 0 ? 2 : 4 + int(rng() % 5);
      Eigen::MatrixXd G(dim, dim);
      for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j) G(i, j) = gauss(rng);
      Eigen::MatrixXd S = G * G.transpose() + 0.02 * Eigen::MatrixXd::Identity(dim, dim);
      ChanceConstraintSpec spec;
      if (kind == 0) {
        // rank-1: one scalar response along the all-ones direction
        spec.response = Eigen::VectorXd::Constant(dim, 2.0 * uni(rng) - 1.0);
        spec.level = CovLevel::Single;
      } else {
        spec.response = Eigen::VectorXd::NullaryExpr(dim, [&](int) { return gauss(rng); });
        spec.level = CovLevel::Full;
      }
      for (double eps : {0.05, 0.1, 0.2}) {
        spec.epsilon = eps;
        double norm = std::sqrt(std::max(0.0, spec.response.dot(S * spec.response)));
        spec.slack = norm / cantelli_scale(eps);  // cone-tight
        double tol = 3.0 * std::sqrt(eps * (1.0 - eps) / n);
        double vg = monte_carlo_violation(spec, S, ErrorFamily::Gaussian, n,
                                          uint64_t(40000 + case_id));
        double vt = monte_carlo_violation(spec, S, ErrorFamily::TwoPoint, n,
                                          uint64_t(50000 + case_id));
        ++case_id;
        if (vg > eps) {
          ok = false;
          detail = "gaussian violation " + format_double(vg) + " > eps " + format_double(eps);
        }
        if (vt > eps + tol) {
          ok = false;
          detail = "two-point violation " + format_double(vt) + " > eps+tol";
        }
      }
    }
  }
  report(2, ok, "cantelli cone soundness under moment-matched distributions", detail);
}

// ---------- criterion 3: enumeration oracle ----------
void criterion3() {
  const double t0 = now_s();
  ModelBundle bundle = testing::tiny_bundle(true, true, 2, 6);
  SolveOptions opt;
  opt.gap_tol = 1e-6;
  MisocpSolver solver(bundle.model);
  SolveReport rep = solver.branch_and_bound(opt);

  bool ok = rep.has_incumbent;
  std::string detail;
  if (ok) {
    const VarIndex& ix = bundle.idx;
    std::vector<int> bins;
    for (int c = 0; c < 2; ++c)
      for (int y = 0; y < 2; ++y)
        for (int col : ix.sigma[c][y]) bins.push_back(col);
    for (int y = 0; y < 2; ++y)
      for (int col : ix.delta[0][y]) bins.push_back(col);
    double best = std::numeric_limits<double>::infinity();
    const int combos = 1 << bins.size();
    for (int mask = 0; mask < combos; ++mask) {
      PlanningModel leaf = bundle.model;
      for (size_t k = 0; k < bins.size(); ++k) {
        double v = (mask >> k) & 1;
        leaf.vars[size_t(bins[k])].lb = v;
        leaf.vars[size_t(bins[k])].ub = v;
      }
      MisocpSolver ls(leaf);
      RelaxationSolution sol = ls.solve_relaxation_with_cuts(opt);
      if (sol.status == LpStatus::Optimal) best = std::min(best, sol.objective);
    }
    double rel = std::abs(rep.incumbent_obj - best) / std::max(1.0, std::abs(best));
    ok = rel <= 1e-4;
    detail = "b&b " + format_double(rep.incumbent_obj) + " vs enumeration " +
             format_double(best) + " over " + std::to_string(combos) + " leaves (rel " +
             format_double(rel) + ")";
  } else {
    detail = "no incumbent";
  }
  double secs = now_s() - t0;
  if (secs >= 300) {
    ok = false;
    detail += " runtime " + format_double(secs) + "s >= 300s";
  }
  report(3, ok, "branch-and-bound matches full integer enumeration", detail);
}

// ---------- criterion 4: deterministic/DRCC ordering ----------
void criterion4() {
  bool ok = true;
  std::string detail;
  std::mt19937_64 rng(4004);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  for (int inst = 0; inst < 10 && ok; ++inst) {
    SystemConfig cfg = testing::tiny_config(2, 6);
    cfg.sources[0].wt_cap_epoch_mw.assign(2, 150 + 150 * uni(rng));
    cfg.sources[0].pv_cap_epoch_mw.assign(2, 150 + 150 * uni(rng));
    cfg.costs.electricity = {0.3 + 0.2 * uni(rng), 0.2};
    cfg.costs.h2_source[1] = {25 + 10 * uni(rng), 30};
    ScenarioSet scen = testing::tiny_scenarios(6);
    MomentModel mom = testing::tiny_moments(2, 6, 0.05 + 0.1 * uni(rng), 0.04 + 0.05 * uni(rng));
    BuildOptions bopt;
    bopt.epsilon = 0.1;
    bopt.relax_integers = true;

    bopt.drcc = true;
    ModelBundle with = build_model(cfg, scen, mom, bopt);
    bopt.drcc = false;
    ModelBundle without = build_model(cfg, scen, mom, bopt);

    SolveOptions sopt;
    sopt.gap_tol = 1e-6;
    MisocpSolver s1(with.model), s2(without.model);
    SolveReport r1 = s1.branch_and_bound(sopt);
    SolveReport r2 = s2.branch_and_bound(sopt);
    if (!r1.has_incumbent || !r2.has_incumbent) {
      ok = false;
      detail = "instance " + std::to_string(inst) + ": missing incumbent";
      break;
    }
    // minimization: the chance-constrained program is a restriction
    if (r1.incumbent_obj < r2.incumbent_obj - 1e-6 * std::max(1.0, std::abs(r2.incumbent_obj))) {
      ok = false;
      detail = "instance " + std::to_string(inst) + ": drcc " + format_double(r1.incumbent_obj) +
               " < deterministic " + format_double(r2.incumbent_obj);
    }
  }
  report(4, ok, "drcc optimum never beats the deterministic optimum", detail);
}

// ---------- criterion 5: directional trends ----------
struct TrendResult {
  bool solved = false;
  double e_share = 0;
  int online_farms_max = 0;
  int hp_lines = 0;
  double objective = 0;
};

TrendResult solve_accept(const SystemConfig& cfg, const ScenarioSet& scen, const MomentModel& mom,
                         bool drcc, double epsilon, double gap) {
  BuildOptions bopt;
  bopt.drcc = drcc;
  bopt.epsilon = epsilon;
  bopt.relax_integers = true;
  ModelBundle bundle = build_model(cfg, scen, mom, bopt);
  MisocpSolver solver(bundle.model);
  SolveOptions sopt;
  sopt.gap_tol = gap;
  sopt.time_limit_s = 570;
  SolveReport rep = solver.branch_and_bound(sopt);
  TrendResult out;
  if (!rep.has_incumbent) return out;
  out.solved = true;
  out.objective = rep.incumbent_obj;
  PlanReport plan = compute_plan_report(bundle, cfg, scen, rep.incumbent);
  double e = 0, h = 0;
  for (const auto& ep : plan.epochs) {
    e += ep.energy_e_mwh;
    h += ep.energy_h_mwh;
    out.online_farms_max = std::max(out.online_farms_max, ep.online_farms);
    out.hp_lines = std::max(out.hp_lines, ep.online_hp_lines);
  }
  out.e_share = e + h > 0 ? e / (e + h) : 0;
  return out;
}

void criterion5() {
  const double gap = 1e-3;
  SystemConfig cfg = testing::accept_config();
  auto days = synth_days(365, 24, 777);
  ScenarioSet scen2 = cluster_typical_days(days, 2, 42);
  MomentModel mom2 = estimate_moments(days, scen2);
  ScenarioSet scen4 = cluster_typical_days(days, 4, 42);
  MomentModel mom4 = estimate_moments(days, scen4);

  // (a) epsilon: off -> 0.1 -> 0.01
  double t0 = now_s();
  TrendResult off = solve_accept(cfg, scen2, mom2, false, 0.1, gap);
  double t_off = now_s() - t0;
  t0 = now_s();
  TrendResult e10 = solve_accept(cfg, scen2, mom2, true, 0.1, gap);
  double t_e10 = now_s() - t0;
  t0 = now_s();
  TrendResult e01 = solve_accept(cfg, scen2, mom2, true, 0.01, gap);
  double t_e01 = now_s() - t0;
  bool ok_a = off.solved && e10.solved && e01.solved &&
              e10.online_farms_max <= off.online_farms_max &&
              e01.online_farms_max <= e10.online_farms_max &&
              e10.e_share >= off.e_share - 1e-9 && e01.e_share >= e10.e_share - 1e-9;
  report(5, ok_a, "(a) shrinking epsilon: fewer online farms, larger electricity share",
         "farms " + std::to_string(off.online_farms_max) + "/" +
             std::to_string(e10.online_farms_max) + "/" + std::to_string(e01.online_farms_max) +
             ", e-share " + format_double(off.e_share) + "/" + format_double(e10.e_share) + "/" +
             format_double(e01.e_share) + ", times " + format_double(t_off) + "/" +
             format_double(t_e10) + "/" + format_double(t_e01) + "s");

  // (b) scenario count: S=2 -> S=4 with drcc at the deck epsilon
  t0 = now_s();
  TrendResult s4 = solve_accept(cfg, scen4, mom4, true, 0.1, gap);
  double t_s4 = now_s() - t0;
  bool ok_b = e10.solved && s4.solved && s4.e_share <= e10.e_share + 1e-9;
  report(5, ok_b, "(b) more typical days: electricity share does not rise",
         "e-share S=2 " + format_double(e10.e_share) + " vs S=4 " + format_double(s4.e_share) +
             ", time " + format_double(t_s4) + "s");

  // (c) transport demand growth zeroed: higher e-share, no pipeline
  SystemConfig flat = cfg;
  for (auto& r : flat.sources) {
    auto& tr = r.sector_caps_kg[1];
    for (size_t y = 1; y < tr.size(); ++y) tr[y] = tr[0];
  }
  for (auto& r : flat.demands) {
    auto& tr = r.sector_caps_kg[1];
    for (size_t y = 1; y < tr.size(); ++y) tr[y] = tr[0];
  }
  t0 = now_s();
  TrendResult c = solve_accept(flat, scen2, mom2, true, 0.1, gap);
  double t_c = now_s() - t0;
  bool ok_c = c.solved && c.e_share > e10.e_share + 1e-9 && c.hp_lines == 0;
  report(5, ok_c, "(c) flat transport demand: strictly higher electricity share, no pipeline",
         "e-share " + format_double(e10.e_share) + " -> " + format_double(c.e_share) +
             ", hp lines " + std::to_string(c.hp_lines) + ", time " + format_double(t_c) + "s");
}

// ---------- criterion 6: accounting identities ----------
void criterion6() {
  ModelBundle bundle = testing::tiny_bundle(true, true, 2, 6);
  MisocpSolver solver(bundle.model);
  SolveOptions opt;
  SolveReport rep = solver.branch_and_bound(opt);
  bool ok = rep.has_incumbent;
  std::string detail;
  if (ok) {
    SystemConfig cfg = testing::tiny_config(2, 6);
    ScenarioSet scen = testing::tiny_scenarios(6);
    double obj = objective_value(bundle, rep.incumbent);
    BreakdownValues bv = evaluate_breakdown(bundle, rep.incumbent);
    double rel = std::abs(obj - bv.objective()) / std::max(1.0, std::abs(obj));
    if (rel > 1e-6) {
      ok = false;
      detail = "objective vs breakdown rel " + format_double(rel);
    }
    PlanReport plan = compute_plan_report(bundle, cfg, scen, rep.incumbent);
    for (const auto& e : plan.epochs) {
      if (e.mass_balance_residual > 1e-6) {
        ok = false;
        detail = "epoch " + std::to_string(e.epoch) + " mass balance residual " +
                 format_double(e.mass_balance_residual);
      }
    }
  } else {
    detail = "no incumbent";
  }
  // exact beta identity at zero rate
  DiscountModel dm = discount_factors(0.0, {4, 5, 24});
  for (int e = 0; e < 4; ++e) {
    double sum = 0;
    for (int k = 0; k < 5; ++k) sum += dm.alpha[size_t(e * 5 + k)];
    if (dm.beta[size_t(e)] != sum) {
      ok = false;
      detail = "beta != sum(alpha) at r=0";
    }
  }
  report(6, ok, "objective decomposition, hydrogen mass balance, discount identity", detail);
}

// ---------- criterion 7: count audits ----------
void criterion7() {
  bool ok = true;
  std::string detail;
  struct Shape {
    int epochs, hours;
    bool drcc, relax, quad;
  };
  int idx = 0;
  for (Shape sh : {Shape{2, 6, true, true, false}, Shape{3, 4, false, false, false},
                   Shape{2, 8, true, false, true}}) {
    SystemConfig cfg = testing::tiny_config(sh.epochs, sh.hours);
    ScenarioSet scen = testing::tiny_scenarios(sh.hours);
    MomentModel mom = testing::tiny_moments(scen.count(), sh.hours);
    BuildOptions opt;
    opt.drcc = sh.drcc;
    opt.epsilon = 0.1;
    opt.relax_integers = sh.relax;
    opt.quadratic_hydrogen = sh.quad;
    ModelBundle bundle = build_model(cfg, scen, mom, opt);
    std::string diff;
    if (!stats_match(predict_stats(cfg, scen.count(), opt), bundle.model.stats(), &diff)) {
      ok = false;
      detail = "shape " + std::to_string(idx) + ": " + diff;
    }
    ++idx;
  }
  report(7, ok, "variable/row/cone counts match closed forms on three shapes", detail);
}

// ---------- criterion 8: solver hygiene ----------
void criterion8() {
  bool ok = true;
  std::string detail;
  std::string first_incumbent, first_report;
  for (int run = 0; run < 3 && ok; ++run) {
    ModelBundle bundle = testing::tiny_bundle(true, true, 2, 6);
    MisocpSolver solver(bundle.model);
    SolveOptions opt;
    SolveReport rep = solver.branch_and_bound(opt);
    if (!rep.has_incumbent) {
      ok = false;
      detail = "no incumbent";
      break;
    }
    ResidualReport rr = check_feasibility(bundle.model, rep.incumbent, opt.int_tol);
    if (!rr.pass(1e-5)) {
      ok = false;
      detail = "incumbent residuals: linear " + format_double(rr.linear) + " cone " +
               format_double(rr.cone) + " bounds " + format_double(rr.bounds) + " int " +
               format_double(rr.integrality);
      break;
    }
    for (size_t i = 1; i < rep.bound_history.size(); ++i) {
      if (rep.bound_history[i] < rep.bound_history[i - 1] - 1e-9) {
        ok = false;
        detail = "bound regressed at node " + std::to_string(i);
      }
    }
    std::string inc;
    for (double v : rep.incumbent) inc += format_double(v) + ",";
    std::string rj = solve_report_json(rep);
    if (run == 0) {
      first_incumbent = inc;
      first_report = rj;
    } else if (inc != first_incumbent || rj != first_report) {
      ok = false;
      detail = "rerun " + std::to_string(run) + " differs byte-wise";
    }
  }
  report(8, ok, "incumbent feasibility, bound monotonicity, byte-exact determinism", detail);
}

}  // namespace

int main(int argc, char** argv) {
  int only = 0;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--criterion") == 0 && i + 1 < argc) only = std::atoi(argv[++i]);
  }
  auto want = [&](int c) { return only == 0 || only == c; };
  try {
    if (want(1)) criterion1();
    if (want(2)) criterion2();
    if (want(3)) criterion3();
    if (want(4)) criterion4();
    if (want(5)) criterion5();
    if (want(6)) criterion6();
    if (want(7)) criterion7();
    if (want(8)) criterion8();
  } catch (const std::exception& e) {
    std::printf("FAIL criterion %d: unhandled error -- %s\n", only, e.what());
    return 1;
  }
  return g_failures == 0 ? 0 : 1;
}
