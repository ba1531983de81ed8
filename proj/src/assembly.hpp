#pragma once

#include "drcc.hpp"
#include "indices.hpp"

namespace hyplan {

// Assembles the full planning model: planning constraints, farm and cluster
// commitment, the operational/uncertainty constraint set, and the discounted
// objective. Deterministic: identical inputs give a bit-identical model.
ModelBundle build_model(const SystemConfig& cfg, const ScenarioSet& scen, const MomentModel& mom,
                        const BuildOptions& opt);

// Locks every response variable at zero and drops cones and response-only
// rows; nominal constraints are retained.
void deterministic_mode(ModelBundle& bundle);

// Closed-form variable/row/cone counts for an instance shape; nnz is not
// predicted.
ModelStats predict_stats(const SystemConfig& cfg, int scenario_count, const BuildOptions& opt);
bool stats_match(const ModelStats& predicted, const ModelStats& actual, std::string* diff);

// Chance-constraint coverage recovered from the assembled model.
CcAudit audit_cones(const ModelBundle& bundle);

double objective_value(const ModelBundle& bundle, const std::vector<double>& x);

struct BreakdownValues {
  double re_capex = 0, re_opex = 0;
  double hvdc_capex = 0, hvdc_opex = 0;
  double hp_capex = 0, hp_opex = 0;
  double p2g_capex = 0, p2g_fix_opex = 0, p2g_var_opex = 0;
  double revenue_e = 0, revenue_h = 0;
  double total_cost() const {
    return re_capex + re_opex + hvdc_capex + hvdc_opex + hp_capex + hp_opex + p2g_capex +
           p2g_fix_opex + p2g_var_opex;
  }
  double objective() const { return total_cost() - revenue_e - revenue_h; }
};

BreakdownValues evaluate_breakdown(const ModelBundle& bundle, const std::vector<double>& x);

}  // namespace hyplan
