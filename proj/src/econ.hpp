#pragma once

#include <string>
#include <vector>

#include "assembly.hpp"
#include "solver.hpp"

namespace hyplan {

struct EpochReport {
  int epoch = 0;
  double new_wt_mw = 0, new_pv_mw = 0;
  double online_wt_mw = 0, online_pv_mw = 0;
  int new_hvdc_lines = 0, online_hvdc_lines = 0;
  int new_hp_lines = 0, online_hp_lines = 0;
  int new_farms = 0, online_farms = 0;
  double energy_e_mwh = 0, energy_h_mwh = 0, spill_mwh = 0;  // per year
  double e_share = 0;                                        // E / (E + H)
  double hydrogen_kg = 0;                                    // produced per year
  double h2_source_kg = 0, h2_pipeline_kg = 0;               // offtake split
  double auh_re = 0, auh_hvdc = 0, auh_hp = 0, auh_p2g = 0;
  bool auh_re_zero_cap = false, auh_hvdc_zero_cap = false;
  bool auh_hp_zero_cap = false, auh_p2g_zero_cap = false;
  double mass_balance_residual = 0;  // relative, closes to ~0
};

struct LevelizedMetrics {
  double lcoe_re = 0;         // RMB/kWh, renewable cost over all delivered energy
  double lco_hvdc_add = 0;    // RMB/kWh over electricity stream
  double lco_p2g_add = 0;     // RMB/kWh over hydrogen stream
  double lco_hp_add = 0;      // RMB/kWh over hydrogen stream
  double lcoh_rmb_per_kg = 0;
  double lcoh_rmb_per_kwh = 0;
  double lpoe_rmb_per_kwh = 0;  // levelized electricity profit
  double lpoh_rmb_per_kg = 0;   // levelized hydrogen profit
  bool zero_e_energy = false, zero_h_energy = false;
};

struct PlanReport {
  std::vector<EpochReport> epochs;
  LevelizedMetrics levelized;
  BreakdownValues breakdown;
  double objective = 0;
  double profit_npv_rmb = 0;      // revenues minus costs
  double h2_source_share = 0;     // P2G(S) share of hydrogen offtake
  double npv_e_mwh = 0, npv_h_mwh = 0, npv_h2_kg = 0;
};

PlanReport compute_plan_report(const ModelBundle& bundle, const SystemConfig& cfg,
                               const ScenarioSet& scen, const std::vector<double>& x);

std::string plan_report_json(const PlanReport& r);
std::string plan_report_csv(const PlanReport& r);
std::string plotdata_csv(const ModelBundle& bundle, const SystemConfig& cfg,
                         const ScenarioSet& scen, const std::vector<double>& x);

// Canonical (deterministic) serialization: no timing fields.
std::string solve_report_json(const SolveReport& r);
std::string solution_values_text(const PlanningModel& model, const std::vector<double>& x);

struct SweepPoint {
  std::string label;
  bool solved = false;
  std::string error;
  double objective = 0;
  double gap = 0;
  PlanReport plan;
};

struct SweepTable {
  std::string axis;
  std::vector<SweepPoint> points;
};

struct SweepRequest {
  std::string axis;  // scenario_count | epsilon | re_price_path | transport_demand_path
  std::vector<std::string> grid;
  BuildOptions build;
  SolveOptions solve;
  uint64_t seed = 12345;
};

SweepTable sensitivity_sweep(const SystemConfig& cfg, const ScenarioSet& scen,
                             const MomentModel& mom, const SweepRequest& req);

std::string sweep_json(const SweepTable& t);
std::string sweep_csv(const SweepTable& t);

}  // namespace hyplan
