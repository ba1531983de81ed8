#pragma once

#include <Eigen/Dense>
#include <vector>

#include "config.hpp"
#include "model.hpp"
#include "scenario.hpp"

namespace hyplan {

template <typename T>
using Grid2 = std::vector<std::vector<T>>;
template <typename T>
using Grid3 = std::vector<Grid2<T>>;
template <typename T>
using Grid4 = std::vector<Grid3<T>>;
template <typename T>
using Grid5 = std::vector<Grid4<T>>;

// Column handles into the PlanningModel variable catalog. -1 where a variable
// does not exist in the current mode (e.g. response variables without drcc).
struct VarIndex {
  // planning
  Grid2<int> pwt, ppv;    // [i][y] new capacity (MW)
  Grid3<int> sigma;       // [c][y][l] line-build binaries
  Grid3<int> delta;       // [i][y][k] farm-build binaries
  Grid2<int> chi;         // [i][y] online farm count

  // source-region operation [i][y][s][t]
  Grid4<int> gwtE, gwtH, gpvE, gpvH;  // generation split (MW)
  Grid4<int> spw, spv;                // curtailment (MW)
  Grid4<int> pcl, ponsum, hm;         // cluster power, ON-power, hydrogen rate
  Grid4<int> x, u;                    // ON / BOOTING facility counts
  Grid4<int> b_gwtE, b_gwtH, b_gpvE, b_gpvH, b_pcl, b_ponsum, b_hm;
  Grid4<int> betaWT, betaPV;          // error-share split
  Grid5<int> msrc, b_msrc;            // [i][u][y][s][t] source-sector hydrogen

  // corridor operation [c][y][s][t] (hvdc entries for hvdc corridors, etc.)
  Grid4<int> f, b_f;        // hvdc flow (MW)
  Grid4<int> mhp, b_mhp;    // line pack (kg)
  Grid5<int> minj, b_minj;  // [c][u][y][s][t] pipeline injection (kg/h)
  Grid5<int> mout, b_mout;  // [c][u][y][s][t] pipeline delivery (kg/h)

  // demand regions [j][y][s]
  Grid3<int> pd, b_pd;  // load-shape multiplier
};

struct BuildOptions {
  bool drcc = true;
  double epsilon = 0.1;
  bool relax_integers = false;
  bool quadratic_hydrogen = false;
  int envelope_pieces = 5;
};

// Forecast-error second moments scaled from per-unit to MW by each source
// region's declared scale, with the cone factors cached.
struct RegionMoments {
  std::vector<Eigen::MatrixXd> sigma_day;           // [s] 2T x 2T, MW^2
  std::vector<std::vector<double>> w1;              // [s][t] sqrt(1' Sigma_{s,t} 1)
  std::vector<std::vector<Eigen::Matrix4d>> pair_sqrt;  // [s][t] factor of ((t+1), t) block
  std::vector<Eigen::MatrixXd> annual_sqrt;         // [s] T x T factor of 1-summed blocks
};

struct ScaledMoments {
  int scenario_count = 0;
  int hours_per_day = 0;
  std::vector<RegionMoments> regions;  // per source region
};

ScaledMoments scale_moments(const SystemConfig& cfg, const MomentModel& m);

struct ObjectiveBreakdown {
  LinExpr re_capex, re_opex;
  LinExpr hvdc_capex, hvdc_opex;
  LinExpr hp_capex, hp_opex;
  LinExpr p2g_capex, p2g_fix_opex, p2g_var_opex;
  LinExpr revenue_e, revenue_h;
  std::vector<const LinExpr*> cost_terms() const {
    return {&re_capex, &re_opex, &hvdc_capex, &hvdc_opex, &hp_capex,
            &hp_opex,  &p2g_capex, &p2g_fix_opex, &p2g_var_opex};
  }
  std::vector<const LinExpr*> revenue_terms() const { return {&revenue_e, &revenue_h}; }
};

struct ModelBundle {
  PlanningModel model;
  VarIndex idx;
  ObjectiveBreakdown breakdown;
  BuildOptions options;
  int scenario_count = 0;
  int hours_per_day = 0;
};

}  // namespace hyplan
