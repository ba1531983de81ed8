#include "p2g.hpp"

#include <algorithm>
#include <cmath>

#include "util.hpp"

namespace hyplan {

DispatchResult equal_split_dispatch(double p_total_on_mw, int n_on, const ConversionCurve& curve,
                                    double p_min_mw, double p_max_mw) {
  if (n_on < 1) fail_invalid("equal split: need at least one ON facility");
  const double tol = 1e-9 * std::max(1.0, std::abs(p_total_on_mw));
  if (p_total_on_mw < n_on * p_min_mw - tol || p_total_on_mw > n_on * p_max_mw + tol)
    fail_invalid("equal split: total power outside the feasible band [" +
                 format_double(n_on * p_min_mw) + ", " + format_double(n_on * p_max_mw) + "]");
  DispatchResult r;
  r.per_facility_mw = p_total_on_mw / n_on;
  r.total_hydrogen_kg_h = n_on * curve.value(r.per_facility_mw);
  return r;
}

DispatchResult brute_force_dispatch_oracle(double p_total_on_mw, int n_on,
                                           const ConversionCurve& curve, double p_min_mw,
                                           double p_max_mw, double grid_step_mw) {
  if (n_on < 1 || n_on > 5) fail_invalid("dispatch oracle: n_on must lie in [1, 5]");
  if (!(grid_step_mw > 0)) fail_invalid("dispatch oracle: grid step must be > 0");
  const double tol = 1e-9 * std::max(1.0, std::abs(p_total_on_mw));
  if (p_total_on_mw < n_on * p_min_mw - tol || p_total_on_mw > n_on * p_max_mw + tol)
    fail_invalid("dispatch oracle: total power outside the feasible band");

  // Per-facility grid p_min + k*step, k = 0..K. A feasible allocation picks
  // k_i per facility with sum(k_i) = K_target.
  const int K = std::max(1, int(std::floor((p_max_mw - p_min_mw) / grid_step_mw + 1e-9)));
  int k_target = int(std::lround((p_total_on_mw - n_on * p_min_mw) / grid_step_mw));
  k_target = std::clamp(k_target, 0, n_on * K);

  const double neg_inf = -1e300;
  std::vector<double> hydrogen((size_t(K + 1)));
  for (int k = 0; k <= K; ++k) hydrogen[size_t(k)] = curve.value(p_min_mw + k * grid_step_mw);

  // best[i][j]: max hydrogen using i facilities with offset sum j
  std::vector<std::vector<double>> best(size_t(n_on + 1),
                                        std::vector<double>(size_t(k_target + 1), neg_inf));
  std::vector<std::vector<int>> choice(size_t(n_on + 1),
                                       std::vector<int>(size_t(k_target + 1), -1));
  best[0][0] = 0;
  for (int i = 1; i <= n_on; ++i) {
    for (int j = 0; j <= k_target; ++j) {
      for (int k = 0; k <= std::min(K, j); ++k) {
        double prev = best[size_t(i - 1)][size_t(j - k)];
        if (prev == neg_inf) continue;
        double v = prev + hydrogen[size_t(k)];
        if (v > best[size_t(i)][size_t(j)]) {
          best[size_t(i)][size_t(j)] = v;
          choice[size_t(i)][size_t(j)] = k;
        }
      }
    }
  }
  if (best[size_t(n_on)][size_t(k_target)] == neg_inf)
    fail_invalid("dispatch oracle: no grid allocation reaches the target total");

  DispatchResult r;
  r.total_hydrogen_kg_h = best[size_t(n_on)][size_t(k_target)];
  r.achieved_total_mw = n_on * p_min_mw + k_target * grid_step_mw;
  int j = k_target;
  for (int i = n_on; i >= 1; --i) {
    int k = choice[size_t(i)][size_t(j)];
    r.allocation.push_back(p_min_mw + k * grid_step_mw);
    j -= k;
  }
  std::sort(r.allocation.begin(), r.allocation.end());
  r.per_facility_mw = r.achieved_total_mw / n_on;
  return r;
}

void emit_farm_planning_constraints(PlanningModel& m, const FarmPlanCols& cols,
                                    const SourceRegion& region, const PlanningHorizon& horizon,
                                    const P2GTechnology& tech) {
  if (tech.lifetime_epochs < 1) fail_invalid("farm planning: lifetime must cover >= 1 epoch");
  const int Y = horizon.epochs;
  for (int y = 1; y <= Y; ++y) {
    const auto& slots = cols.delta[size_t(y - 1)];
    for (size_t k = 0; k + 1 < slots.size(); ++k) {
      m.add_row("farm_chain", RowSense::LE, 0.0,
                {{slots[k + 1], 1.0}, {slots[k], -1.0}});
    }
    // online count = builds within the lifetime window ending at this epoch
    std::vector<LinTerm> terms{{cols.chi[size_t(y - 1)], 1.0}};
    int tau0 = std::max(1, y - tech.lifetime_epochs + 1);
    for (int tau = tau0; tau <= y; ++tau)
      for (int col : cols.delta[size_t(tau - 1)]) terms.push_back({col, -1.0});
    m.add_row("farm_online", RowSense::EQ, 0.0, std::move(terms));
    (void)region;
  }
}

void emit_cluster_operation_constraints(PlanningModel& m, const ClusterDayCols& cols,
                                        const P2GTechnology& tech, int hours,
                                        const ClusterEmitOptions& opt) {
  const double N = tech.facilities_per_farm;
  const ConversionCurve& cv = tech.conversion;
  for (int t = 0; t < hours; ++t) {
    const int tn = (t + 1) % hours;  // cyclic day
    m.add_row("p2g_status_cap", RowSense::LE, 0.0,
              {{cols.x[size_t(t)], 1.0}, {cols.u[size_t(t)], 1.0}, {cols.chi, -N}});
    m.add_row("p2g_transition", RowSense::LE, 0.0,
              {{cols.x[size_t(tn)], 1.0}, {cols.x[size_t(t)], -1.0}, {cols.u[size_t(t)], -1.0}});
    m.add_row("p2g_band_hi", RowSense::LE, 0.0,
              {{cols.ponsum[size_t(t)], 1.0}, {cols.x[size_t(t)], -tech.p_max_mw}});
    m.add_row("p2g_band_lo", RowSense::LE, 0.0,
              {{cols.ponsum[size_t(t)], -1.0}, {cols.x[size_t(t)], tech.p_min_mw}});
    m.add_row("p2g_power_def", RowSense::EQ, 0.0,
              {{cols.pcl[size_t(t)], 1.0},
               {cols.ponsum[size_t(t)], -1.0},
               {cols.u[size_t(t)], -tech.p_boot_mw}});
    if (!opt.quadratic_hydrogen) {
      m.add_row("p2g_h2_def", RowSense::EQ, 0.0,
                {{cols.hm[size_t(t)], 1.0},
                 {cols.ponsum[size_t(t)], -cv.b},
                 {cols.x[size_t(t)], -cv.c}});
    } else {
      // outer tangents of the concave per-facility curve, lifted by the
      // ON count: hm <= slope(rho)*ponsum + (c - a*rho^2)*x
      const int pieces = std::max(2, opt.envelope_pieces);
      for (int p = 0; p < pieces; ++p) {
        double rho = tech.p_min_mw +
                     (tech.p_max_mw - tech.p_min_mw) * double(p) / double(pieces - 1);
        m.add_row("p2g_h2_env", RowSense::LE, 0.0,
                  {{cols.hm[size_t(t)], 1.0},
                   {cols.ponsum[size_t(t)], -cv.slope(rho)},
                   {cols.x[size_t(t)], -(cv.c - cv.a * rho * rho)}});
      }
    }
    // ramp headroom: next-hour climb within ON ramp plus headroom for
    // facilities that can switch on
    m.add_row("p2g_ramp", RowSense::LE, 0.0,
              {{cols.pcl[size_t(tn)], 1.0},
               {cols.pcl[size_t(t)], -1.0},
               {cols.x[size_t(t)], tech.p_max_mw - tech.ramp_mw_per_h},
               {cols.chi, -N * tech.p_max_mw}});
  }
}

}  // namespace hyplan
