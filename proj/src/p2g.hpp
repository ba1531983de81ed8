#pragma once

#include <vector>

#include "config.hpp"
#include "model.hpp"

namespace hyplan {

struct DispatchResult {
  double per_facility_mw = 0;      // equal-split power (oracle: mean allocation)
  double total_hydrogen_kg_h = 0;
  double achieved_total_mw = 0;    // oracle: requested total snapped to the grid
  std::vector<double> allocation;  // oracle only: per-facility powers
};

// Splits cluster ON-power equally across ON facilities. `p_total_on` must lie
// in [n*p_min, n*p_max].
DispatchResult equal_split_dispatch(double p_total_on_mw, int n_on, const ConversionCurve& curve,
                                    double p_min_mw, double p_max_mw);

// Exhaustive grid optimum over per-facility allocations whose sum hits
// p_total_on snapped to the grid (dynamic program over the shared grid;
// visits exactly the grid-feasible allocations an explicit enumeration
// would). Compare against the equal split evaluated at achieved_total_mw.
// Test oracle; n_on is capped at 5.
DispatchResult brute_force_dispatch_oracle(double p_total_on_mw, int n_on,
                                           const ConversionCurve& curve, double p_min_mw,
                                           double p_max_mw, double grid_step_mw);

// Column handles for one source region's farm-planning block.
struct FarmPlanCols {
  // delta[y][k]: build decision for farm slot k in epoch y; chi[y]: online farms
  std::vector<std::vector<int>> delta;
  std::vector<int> chi;
};

// Build-order chain, online-count definition over the lifetime window, and
// the online cap (the cap is carried by chi's upper bound).
void emit_farm_planning_constraints(PlanningModel& m, const FarmPlanCols& cols,
                                    const SourceRegion& region, const PlanningHorizon& horizon,
                                    const P2GTechnology& tech);

// Column handles for one (region, epoch, scenario) day of cluster operation.
struct ClusterDayCols {
  std::vector<int> x;       // ON facility count per hour
  std::vector<int> u;       // BOOTING facility count per hour
  std::vector<int> ponsum;  // aggregate ON power (MW)
  std::vector<int> pcl;     // cluster power (MW)
  std::vector<int> hm;      // hydrogen output (kg/h)
  int chi = -1;             // online farm count for this epoch
};

struct ClusterEmitOptions {
  bool quadratic_hydrogen = false;
  int envelope_pieces = 5;
};

// Hour-linked commitment rows: status cap, booting transition, ON-power band,
// cluster power definition, hydrogen conversion, ramp headroom. Hours wrap
// cyclically within the day.
void emit_cluster_operation_constraints(PlanningModel& m, const ClusterDayCols& cols,
                                        const P2GTechnology& tech, int hours,
                                        const ClusterEmitOptions& opt);

}  // namespace hyplan
