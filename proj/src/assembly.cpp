#include "assembly.hpp"

#include <algorithm>
#include <sstream>

#include "p2g.hpp"
#include "util.hpp"

namespace hyplan {

namespace {

std::string nm(const char* base, const std::string& a) { return std::string(base) + "[" + a + "]"; }

std::string idx4(const std::string& r, int y, int s, int t) {
  return r + "," + std::to_string(y + 1) + "," + std::to_string(s + 1) + "," + std::to_string(t + 1);
}

void validate_build_inputs(const SystemConfig& cfg, const ScenarioSet& scen,
                           const MomentModel& mom, const BuildOptions& opt) {
  if (scen.hours_per_day != cfg.horizon.hours_per_day)
    fail_validation("build: scenario hours (" + std::to_string(scen.hours_per_day) +
                    ") disagree with deck horizon (" + std::to_string(cfg.horizon.hours_per_day) + ")");
  if (mom.scenario_count != scen.count() || mom.hours_per_day != scen.hours_per_day)
    fail_validation("build: moment model shape does not match the scenario set");
  if (!(opt.epsilon > 0 && opt.epsilon < 1))
    fail_validation("build: epsilon must lie in (0, 1)");
  // the decision rule ties one demand region to one error source
  for (size_t j = 0; j < cfg.demands.size(); ++j) {
    int src = -1;
    for (const auto& c : cfg.corridors) {
      if (c.to_idx != int(j)) continue;
      if (src < 0) src = c.from_idx;
      if (src != c.from_idx)
        fail_validation("build: demand region '" + cfg.demands[j].id +
                        "' is fed from multiple source regions; one error source per demand "
                        "region is required");
    }
  }
}

}  // namespace

ModelBundle build_model(const SystemConfig& cfg, const ScenarioSet& scen, const MomentModel& mom,
                        const BuildOptions& opt) {
  validate_build_inputs(cfg, scen, mom, opt);

  ModelBundle bundle;
  bundle.options = opt;
  bundle.scenario_count = scen.count();
  bundle.hours_per_day = scen.hours_per_day;
  PlanningModel& m = bundle.model;
  VarIndex& ix = bundle.idx;

  const int Y = cfg.horizon.epochs;
  const int S = scen.count();
  const int T = scen.hours_per_day;
  const int nI = int(cfg.sources.size());
  const int nJ = int(cfg.demands.size());
  const int nC = int(cfg.corridors.size());
  const P2GTechnology& tech = cfg.p2g;
  const VarKind int_kind = opt.relax_integers ? VarKind::Continuous : VarKind::Integer;

  // ---- planning variables ----
  ix.pwt.assign(size_t(nI), std::vector<int>(size_t(Y), -1));
  ix.ppv = ix.pwt;
  ix.chi = ix.pwt;
  ix.delta.assign(size_t(nI), Grid2<int>(size_t(Y)));
  ix.sigma.assign(size_t(nC), Grid2<int>(size_t(Y)));
  for (int i = 0; i < nI; ++i) {
    const SourceRegion& r = cfg.sources[size_t(i)];
    for (int y = 0; y < Y; ++y) {
      std::string tag = r.id + "," + std::to_string(y + 1);
      ix.pwt[i][y] = m.add_var(nm("pwt", tag), 0.0, r.wt_cap_epoch_mw[size_t(y)],
                               VarKind::Continuous);
      ix.ppv[i][y] = m.add_var(nm("ppv", tag), 0.0, r.pv_cap_epoch_mw[size_t(y)],
                               VarKind::Continuous);
    }
    for (int y = 0; y < Y; ++y) {
      std::string tag = r.id + "," + std::to_string(y + 1);
      for (int k = 0; k < r.max_new_farms[size_t(y)]; ++k)
        ix.delta[i][y].push_back(
            m.add_var(nm("delta", tag + "," + std::to_string(k + 1)), 0, 1, VarKind::Binary));
      ix.chi[i][y] =
          m.add_var(nm("chi", tag), 0.0, double(r.max_online_farms[size_t(y)]), VarKind::Continuous);
    }
  }
  for (int c = 0; c < nC; ++c) {
    const Corridor& cor = cfg.corridors[size_t(c)];
    for (int y = 0; y < Y; ++y) {
      std::string tag = std::to_string(c + 1) + "," + std::to_string(y + 1);
      for (int l = 0; l < cor.lines_per_epoch[size_t(y)]; ++l)
        ix.sigma[c][y].push_back(
            m.add_var(nm("sigma", tag + "," + std::to_string(l + 1)), 0, 1, VarKind::Binary));
    }
  }

  // ---- operation variables ----
  auto grid4 = [&](int a) {
    return Grid4<int>(size_t(a),
                      Grid3<int>(size_t(Y), Grid2<int>(size_t(S), std::vector<int>(size_t(T), -1))));
  };
  ix.gwtE = grid4(nI); ix.gwtH = grid4(nI); ix.gpvE = grid4(nI); ix.gpvH = grid4(nI);
  ix.spw = grid4(nI); ix.spv = grid4(nI); ix.pcl = grid4(nI); ix.ponsum = grid4(nI);
  ix.hm = grid4(nI); ix.x = grid4(nI); ix.u = grid4(nI);
  ix.b_gwtE = grid4(nI); ix.b_gwtH = grid4(nI); ix.b_gpvE = grid4(nI); ix.b_gpvH = grid4(nI);
  ix.b_pcl = grid4(nI); ix.b_ponsum = grid4(nI); ix.b_hm = grid4(nI);
  ix.betaWT = grid4(nI); ix.betaPV = grid4(nI);
  ix.msrc.assign(size_t(nI), grid4(kNumSectors));
  ix.b_msrc.assign(size_t(nI), grid4(kNumSectors));
  ix.f = grid4(nC); ix.b_f = grid4(nC); ix.mhp = grid4(nC); ix.b_mhp = grid4(nC);
  ix.minj.assign(size_t(nC), grid4(kNumSectors));
  ix.b_minj.assign(size_t(nC), grid4(kNumSectors));
  ix.mout.assign(size_t(nC), grid4(kNumSectors));
  ix.b_mout.assign(size_t(nC), grid4(kNumSectors));
  ix.pd.assign(size_t(nJ), Grid2<int>(size_t(Y), std::vector<int>(size_t(S), -1)));
  ix.b_pd = ix.pd;

  PolicyCatalog policies;
  for (int i = 0; i < nI; ++i) {
    const SourceRegion& r = cfg.sources[size_t(i)];
    for (int y = 0; y < Y; ++y) {
      const double farm_cap = double(r.max_online_farms[size_t(y)]) * tech.facilities_per_farm;
      for (int s = 0; s < S; ++s) {
        for (int t = 0; t < T; ++t) {
          std::string tag = idx4(r.id, y, s, t);
          ix.gwtE[i][y][s][t] = m.add_var(nm("gwtE", tag), 0, kInf, VarKind::Continuous);
          ix.gwtH[i][y][s][t] = m.add_var(nm("gwtH", tag), 0, kInf, VarKind::Continuous);
          ix.gpvE[i][y][s][t] = m.add_var(nm("gpvE", tag), 0, kInf, VarKind::Continuous);
          ix.gpvH[i][y][s][t] = m.add_var(nm("gpvH", tag), 0, kInf, VarKind::Continuous);
          ix.spw[i][y][s][t] = m.add_var(nm("spw", tag), 0, kInf, VarKind::Continuous);
          ix.spv[i][y][s][t] = m.add_var(nm("spv", tag), 0, kInf, VarKind::Continuous);
          ix.pcl[i][y][s][t] = m.add_var(nm("pcl", tag), 0, kInf, VarKind::Continuous);
          ix.ponsum[i][y][s][t] = m.add_var(nm("pon", tag), 0, kInf, VarKind::Continuous);
          ix.hm[i][y][s][t] = m.add_var(nm("hm", tag), 0, kInf, VarKind::Continuous);
          for (int us = 0; us < kNumSectors; ++us)
            ix.msrc[i][us][y][s][t] =
                m.add_var(nm(us == 0 ? "msrcC" : us == 1 ? "msrcT" : "msrcH", tag), 0, kInf,
                          VarKind::Continuous);
          ix.x[i][y][s][t] = m.add_var(nm("x", tag), 0, farm_cap, int_kind);
          ix.u[i][y][s][t] = m.add_var(nm("u", tag), 0, farm_cap, int_kind);
          policies.mark_non_recourse(ix.x[i][y][s][t]);
          policies.mark_non_recourse(ix.u[i][y][s][t]);
          if (opt.drcc) {
            ix.b_gwtE[i][y][s][t] = policies.request_beta(m, ix.gwtE[i][y][s][t]);
            ix.b_gwtH[i][y][s][t] = policies.request_beta(m, ix.gwtH[i][y][s][t]);
            ix.b_gpvE[i][y][s][t] = policies.request_beta(m, ix.gpvE[i][y][s][t]);
            ix.b_gpvH[i][y][s][t] = policies.request_beta(m, ix.gpvH[i][y][s][t]);
            ix.b_pcl[i][y][s][t] = policies.request_beta(m, ix.pcl[i][y][s][t]);
            ix.b_ponsum[i][y][s][t] = policies.request_beta(m, ix.ponsum[i][y][s][t]);
            ix.b_hm[i][y][s][t] = policies.request_beta(m, ix.hm[i][y][s][t]);
            for (int us = 0; us < kNumSectors; ++us)
              ix.b_msrc[i][us][y][s][t] = policies.request_beta(m, ix.msrc[i][us][y][s][t]);
            ix.betaWT[i][y][s][t] = m.add_var(nm("betaWT", tag), -kInf, kInf, VarKind::Continuous);
            ix.betaPV[i][y][s][t] = m.add_var(nm("betaPV", tag), -kInf, kInf, VarKind::Continuous);
          }
        }
      }
    }
  }
  for (int c = 0; c < nC; ++c) {
    const Corridor& cor = cfg.corridors[size_t(c)];
    const std::string cid = std::to_string(c + 1);
    for (int y = 0; y < Y; ++y) {
      for (int s = 0; s < S; ++s) {
        for (int t = 0; t < T; ++t) {
          std::string tag = idx4(cid, y, s, t);
          if (cor.kind == CorridorKind::Hvdc) {
            ix.f[c][y][s][t] = m.add_var(nm("f", tag), 0, kInf, VarKind::Continuous);
            if (opt.drcc) ix.b_f[c][y][s][t] = policies.request_beta(m, ix.f[c][y][s][t]);
          } else {
            ix.mhp[c][y][s][t] = m.add_var(nm("mhp", tag), 0, kInf, VarKind::Continuous);
            if (opt.drcc) ix.b_mhp[c][y][s][t] = policies.request_beta(m, ix.mhp[c][y][s][t]);
            for (int us = 0; us < kNumSectors; ++us) {
              const char* base_in = us == 0 ? "minjC" : us == 1 ? "minjT" : "minjH";
              const char* base_out = us == 0 ? "moutC" : us == 1 ? "moutT" : "moutH";
              ix.minj[c][us][y][s][t] = m.add_var(nm(base_in, tag), 0, kInf, VarKind::Continuous);
              ix.mout[c][us][y][s][t] = m.add_var(nm(base_out, tag), 0, kInf, VarKind::Continuous);
              if (opt.drcc) {
                ix.b_minj[c][us][y][s][t] = policies.request_beta(m, ix.minj[c][us][y][s][t]);
                ix.b_mout[c][us][y][s][t] = policies.request_beta(m, ix.mout[c][us][y][s][t]);
              }
            }
          }
        }
      }
    }
  }
  for (int j = 0; j < nJ; ++j) {
    const DemandRegion& r = cfg.demands[size_t(j)];
    double cap = r.demand_multiplier_cap ? *r.demand_multiplier_cap : kInf;
    for (int y = 0; y < Y; ++y) {
      for (int s = 0; s < S; ++s) {
        std::string tag = r.id + "," + std::to_string(y + 1) + "," + std::to_string(s + 1);
        ix.pd[j][y][s] = m.add_var(nm("pd", tag), 0, cap, VarKind::Continuous);
        if (opt.drcc) ix.b_pd[j][y][s] = policies.request_beta(m, ix.pd[j][y][s]);
      }
    }
  }

  // ---- planning constraints ----
  for (int i = 0; i < nI; ++i) {
    const SourceRegion& r = cfg.sources[size_t(i)];
    {
      std::vector<LinTerm> wt, pv;
      for (int y = 0; y < Y; ++y) {
        wt.push_back({ix.pwt[i][y], 1.0});
        pv.push_back({ix.ppv[i][y], 1.0});
      }
      m.add_row("re_cap_wt_total", RowSense::LE, r.wt_cap_total_mw, std::move(wt));
      m.add_row("re_cap_pv_total", RowSense::LE, r.pv_cap_total_mw, std::move(pv));
    }
    for (int y = 0; y < Y; ++y)
      m.add_row("re_cap_joint", RowSense::LE, r.joint_cap_epoch_mw[size_t(y)],
                {{ix.pwt[i][y], 1.0}, {ix.ppv[i][y], 1.0}});
    {
      std::vector<LinTerm> terms;
      for (int y = 0; y < Y; ++y) {
        terms.push_back({ix.pwt[i][y], 1.0});
        terms.push_back({ix.ppv[i][y], 1.0});
      }
      m.add_row("re_cap_joint_total", RowSense::LE, r.joint_cap_total_mw, std::move(terms));
    }
    FarmPlanCols fc{ix.delta[size_t(i)], ix.chi[size_t(i)]};
    emit_farm_planning_constraints(m, fc, r, cfg.horizon, tech);
  }
  for (int c = 0; c < nC; ++c) {
    const Corridor& cor = cfg.corridors[size_t(c)];
    std::vector<LinTerm> total;
    for (int y = 0; y < Y; ++y) {
      const auto& slots = ix.sigma[c][y];
      for (size_t l = 0; l + 1 < slots.size(); ++l)
        m.add_row("line_chain", RowSense::LE, 0.0, {{slots[l + 1], 1.0}, {slots[l], -1.0}});
      for (int col : slots) total.push_back({col, 1.0});
    }
    m.add_row("line_total", RowSense::LE, double(cor.lines_total), std::move(total));
  }

  // ---- cluster commitment ----
  ClusterEmitOptions cop;
  cop.quadratic_hydrogen = opt.quadratic_hydrogen;
  cop.envelope_pieces = opt.envelope_pieces;
  for (int i = 0; i < nI; ++i) {
    for (int y = 0; y < Y; ++y) {
      for (int s = 0; s < S; ++s) {
        ClusterDayCols cols;
        cols.chi = ix.chi[i][y];
        for (int t = 0; t < T; ++t) {
          cols.x.push_back(ix.x[i][y][s][t]);
          cols.u.push_back(ix.u[i][y][s][t]);
          cols.ponsum.push_back(ix.ponsum[i][y][s][t]);
          cols.pcl.push_back(ix.pcl[i][y][s][t]);
          cols.hm.push_back(ix.hm[i][y][s][t]);
        }
        emit_cluster_operation_constraints(m, cols, tech, T, cop);
      }
    }
  }

  // ---- operational / uncertainty constraints ----
  ScaledMoments sm = scale_moments(cfg, mom);
  emit_operational_constraints(m, cfg, scen, sm, ix, opt, nullptr);

  // ---- objective ----
  DiscountModel dm = discount_factors(cfg.discount_rate, cfg.horizon);
  std::vector<double> beta_suffix(size_t(Y) + 1, 0.0);
  for (int y = Y - 1; y >= 0; --y) beta_suffix[size_t(y)] = beta_suffix[size_t(y) + 1] + dm.beta[size_t(y)];
  auto alpha_start = [&](int y) { return dm.alpha[size_t(y * cfg.horizon.years_per_epoch)]; };
  auto beta_window = [&](int y_from) {
    int y_to = std::min(Y, y_from + tech.lifetime_epochs);  // exclusive
    double s = 0;
    for (int y = y_from; y < y_to; ++y) s += dm.beta[size_t(y)];
    return s;
  };

  std::vector<double> obj(size_t(m.num_vars()), 0.0);
  ObjectiveBreakdown& bd = bundle.breakdown;
  auto add_term = [&](LinExpr& expr, int col, double coef, double sign_in_obj) {
    if (coef == 0.0) return;
    expr.add(col, coef);
    obj[size_t(col)] += sign_in_obj * coef;
  };

  const double kw_per_mw = 1000.0;
  for (int i = 0; i < nI; ++i) {
    for (int y = 0; y < Y; ++y) {
      double cwt = interpolate_cost(cfg.costs, CostItem::WtCapexPerKw, y + 1, Y) * kw_per_mw;
      double cpv = interpolate_cost(cfg.costs, CostItem::PvCapexPerKw, y + 1, Y) * kw_per_mw;
      add_term(bd.re_capex, ix.pwt[i][y], alpha_start(y) * cwt, +1);
      add_term(bd.re_capex, ix.ppv[i][y], alpha_start(y) * cpv, +1);
      add_term(bd.re_opex, ix.pwt[i][y], cfg.costs.wt_fixed_opex_ratio * cwt * beta_suffix[size_t(y)], +1);
      add_term(bd.re_opex, ix.ppv[i][y], cfg.costs.pv_fixed_opex_ratio * cpv * beta_suffix[size_t(y)], +1);

      double cm = interpolate_cost(cfg.costs, CostItem::P2gCapexPerKw, y + 1, Y) * kw_per_mw *
                  tech.farm_capacity_mw();
      for (int col : ix.delta[i][y]) {
        add_term(bd.p2g_capex, col, alpha_start(y) * cm, +1);
        add_term(bd.p2g_fix_opex, col, tech.fixed_opex_ratio * cm * beta_window(y), +1);
      }
    }
  }
  for (int c = 0; c < nC; ++c) {
    const Corridor& cor = cfg.corridors[size_t(c)];
    LinExpr& capex = cor.kind == CorridorKind::Hvdc ? bd.hvdc_capex : bd.hp_capex;
    LinExpr& opex = cor.kind == CorridorKind::Hvdc ? bd.hvdc_opex : bd.hp_opex;
    for (int y = 0; y < Y; ++y) {
      for (int col : ix.sigma[c][y]) {
        add_term(capex, col, alpha_start(y) * cor.capex_rmb_per_line, +1);
        add_term(opex, col, cor.fixed_opex_ratio * cor.capex_rmb_per_line * beta_suffix[size_t(y)], +1);
      }
    }
  }
  for (int i = 0; i < nI; ++i)
    for (int y = 0; y < Y; ++y)
      for (int s = 0; s < S; ++s)
        for (int t = 0; t < T; ++t)
          add_term(bd.p2g_var_opex, ix.u[i][y][s][t],
                   dm.beta[size_t(y)] * scen.weights[size_t(s)] * tech.boot_cost_rmb, +1);

  for (int j = 0; j < nJ; ++j) {
    for (int y = 0; y < Y; ++y) {
      double ce = interpolate_cost(cfg.costs, CostItem::ElectricityPerKwh, y + 1, Y) * kw_per_mw;
      for (int s = 0; s < S; ++s) {
        double shape_sum = 0;
        for (int t = 0; t < T; ++t) shape_sum += scen.scenarios[size_t(s)].load[size_t(t)];
        add_term(bd.revenue_e, ix.pd[j][y][s],
                 ce * dm.beta[size_t(y)] * scen.weights[size_t(s)] * shape_sum, -1);
      }
    }
  }
  for (int i = 0; i < nI; ++i) {
    for (int y = 0; y < Y; ++y) {
      for (int us = 0; us < kNumSectors; ++us) {
        double cs = interpolate_cost(cfg.costs, CostItem(int(CostItem::H2SourceChemical) + us),
                                     y + 1, Y);
        for (int s = 0; s < S; ++s) {
          double w = dm.beta[size_t(y)] * scen.weights[size_t(s)];
          for (int t = 0; t < T; ++t)
            add_term(bd.revenue_h, ix.msrc[i][us][y][s][t], cs * w, -1);
        }
      }
    }
  }
  for (int c : cfg.hp_corridors()) {
    for (int y = 0; y < Y; ++y) {
      for (int us = 0; us < kNumSectors; ++us) {
        double cd = interpolate_cost(cfg.costs, CostItem(int(CostItem::H2DemandChemical) + us),
                                     y + 1, Y);
        for (int s = 0; s < S; ++s) {
          double w = dm.beta[size_t(y)] * scen.weights[size_t(s)];
          for (int t = 0; t < T; ++t)
            add_term(bd.revenue_h, ix.minj[c][us][y][s][t], cd * w, -1);
        }
      }
    }
  }

  for (int col = 0; col < m.num_vars(); ++col) m.vars[size_t(col)].obj = obj[size_t(col)];
  return bundle;
}

void deterministic_mode(ModelBundle& bundle) {
  PlanningModel& m = bundle.model;
  for (auto& v : m.vars) {
    if (v.beta_of >= 0) {
      v.lb = 0;
      v.ub = 0;
    }
  }
  auto zero_grid = [&](const Grid4<int>& g) {
    for (const auto& a : g)
      for (const auto& b : a)
        for (const auto& c : b)
          for (int col : c)
            if (col >= 0) {
              m.vars[size_t(col)].lb = 0;
              m.vars[size_t(col)].ub = 0;
            }
  };
  zero_grid(bundle.idx.betaWT);
  zero_grid(bundle.idx.betaPV);
  std::vector<RowDef> keep;
  keep.reserve(m.rows.size());
  for (auto& r : m.rows) {
    bool beta_row = r.tag.size() > 2 && r.tag.compare(r.tag.size() - 2, 2, "_b") == 0;
    if (beta_row || r.tag == "re_beta_budget") continue;
    keep.push_back(std::move(r));
  }
  m.rows = std::move(keep);
  m.cones.clear();
  bundle.options.drcc = false;
}

namespace {

void bump(ModelStats& st, const std::string& tag, RowSense sense, int count) {
  if (count <= 0) return;
  st.rows_by_tag[tag] += count;
  st.rows += count;
  if (sense == RowSense::EQ) st.eq_rows += count;
  else st.ineq_rows += count;
}

}  // namespace

ModelStats predict_stats(const SystemConfig& cfg, int S, const BuildOptions& opt) {
  ModelStats st;
  const int Y = cfg.horizon.epochs;
  const int T = cfg.horizon.hours_per_day;
  const int nI = int(cfg.sources.size());
  const int nJ = int(cfg.demands.size());
  const int nH = int(cfg.hvdc_corridors().size());
  const int nP = int(cfg.hp_corridors().size());
  const long long iyst = (long long)nI * Y * S * T;

  int n_sigma = 0, n_delta = 0, line_chain = 0, farm_chain = 0;
  for (const auto& c : cfg.corridors)
    for (int y = 0; y < Y; ++y) {
      n_sigma += c.lines_per_epoch[size_t(y)];
      line_chain += std::max(0, c.lines_per_epoch[size_t(y)] - 1);
    }
  for (const auto& r : cfg.sources)
    for (int y = 0; y < Y; ++y) {
      n_delta += r.max_new_farms[size_t(y)];
      farm_chain += std::max(0, r.max_new_farms[size_t(y)] - 1);
    }

  // variables
  long long vars = 0;
  vars += 2LL * nI * Y;                 // pwt, ppv
  vars += n_sigma + n_delta;            // binaries
  vars += (long long)nI * Y;            // chi
  vars += iyst * (12 + 2);              // nominal source ops + x,u
  if (opt.drcc) vars += iyst * 12;      // responses + splits
  vars += (long long)nH * Y * S * T * (opt.drcc ? 2 : 1);          // f (+b)
  vars += (long long)nP * Y * S * T * (opt.drcc ? 14 : 7);         // mhp,minj,mout (+b)
  vars += (long long)nJ * Y * S * (opt.drcc ? 2 : 1);              // pd (+b)
  st.vars = int(vars);
  st.binary = n_sigma + n_delta;
  st.integer = opt.relax_integers ? 0 : int(2 * iyst);
  st.continuous = st.vars - st.binary - st.integer;

  // planning rows
  bump(st, "re_cap_wt_total", RowSense::LE, nI);
  bump(st, "re_cap_pv_total", RowSense::LE, nI);
  bump(st, "re_cap_joint", RowSense::LE, nI * Y);
  bump(st, "re_cap_joint_total", RowSense::LE, nI);
  bump(st, "line_chain", RowSense::LE, line_chain);
  bump(st, "line_total", RowSense::LE, nH + nP);
  bump(st, "farm_chain", RowSense::LE, farm_chain);
  bump(st, "farm_online", RowSense::EQ, nI * Y);

  // commitment rows
  bump(st, "p2g_status_cap", RowSense::LE, int(iyst));
  bump(st, "p2g_transition", RowSense::LE, int(iyst));
  bump(st, "p2g_band_hi", RowSense::LE, int(iyst));
  bump(st, "p2g_band_lo", RowSense::LE, int(iyst));
  bump(st, "p2g_power_def", RowSense::EQ, int(iyst));
  if (opt.quadratic_hydrogen)
    bump(st, "p2g_h2_env", RowSense::LE, int(iyst) * std::max(2, opt.envelope_pieces));
  else
    bump(st, "p2g_h2_def", RowSense::EQ, int(iyst));
  bump(st, "p2g_ramp", RowSense::LE, int(iyst));

  // operational rows
  bump(st, "re_split_wt", RowSense::EQ, int(iyst));
  bump(st, "re_split_pv", RowSense::EQ, int(iyst));
  bump(st, "hvdc_flow_def", RowSense::EQ, int(iyst));
  bump(st, "p2g_couple", RowSense::EQ, int(iyst));
  bump(st, "h2_balance", RowSense::EQ, int(iyst));
  bump(st, "hp_linepack", RowSense::EQ, nP * Y * S * T);
  bump(st, "load_follow", RowSense::EQ, nJ * Y * S * T);
  bump(st, "sector_cap_src", RowSense::LE, nI * kNumSectors * Y);
  bump(st, "sector_cap_dem", RowSense::LE, nJ * kNumSectors * Y);
  bump(st, "hvdc_cap", RowSense::LE, nH * Y * S * T * (opt.drcc ? 2 : 1));
  bump(st, "hp_inflow", RowSense::LE, nP * Y * S * T * (opt.drcc ? 2 : 1));
  bump(st, "hp_storage", RowSense::LE, nP * Y * S * T * (opt.drcc ? 2 : 1));
  if (opt.drcc) {
    bump(st, "re_split_wt_b", RowSense::EQ, int(iyst));
    bump(st, "re_split_pv_b", RowSense::EQ, int(iyst));
    bump(st, "re_beta_budget", RowSense::EQ, int(iyst));
    bump(st, "hvdc_flow_def_b", RowSense::EQ, int(iyst));
    bump(st, "p2g_couple_b", RowSense::EQ, int(iyst));
    bump(st, "p2g_power_b", RowSense::EQ, int(iyst));
    bump(st, "p2g_h2_b", RowSense::EQ, int(iyst));
    bump(st, "h2_balance_b", RowSense::EQ, int(iyst));
    bump(st, "hp_linepack_b", RowSense::EQ, nP * Y * S * T);
    bump(st, "load_follow_b", RowSense::EQ, nJ * Y * S * T);
    bump(st, "p2g_band_hi_cc", RowSense::LE, int(2 * iyst));
    bump(st, "p2g_band_lo_cc", RowSense::LE, int(2 * iyst));

    CcAudit cc = expected_cc_counts(cfg, S);
    st.cones_by_tag["p2g_ramp_cc"] = cc.cones["p2g_ramp_cc"];
    st.cones_by_tag["sector_cap_src_cc"] = cc.cones["sector_cap_src_cc"];
    if (cc.cones["sector_cap_dem_cc"] > 0)
      st.cones_by_tag["sector_cap_dem_cc"] = cc.cones["sector_cap_dem_cc"];
    st.cones = cc.cones["p2g_ramp_cc"] + cc.cones["sector_cap_src_cc"] + cc.cones["sector_cap_dem_cc"];
  }
  st.nnz = -1;  // not predicted
  return st;
}

bool stats_match(const ModelStats& predicted, const ModelStats& actual, std::string* diff) {
  std::ostringstream out;
  auto chk = [&](const char* what, long long a, long long b) {
    if (a != b) out << what << ": predicted " << a << ", actual " << b << "\n";
  };
  chk("vars", predicted.vars, actual.vars);
  chk("continuous", predicted.continuous, actual.continuous);
  chk("binary", predicted.binary, actual.binary);
  chk("integer", predicted.integer, actual.integer);
  chk("rows", predicted.rows, actual.rows);
  chk("eq_rows", predicted.eq_rows, actual.eq_rows);
  chk("ineq_rows", predicted.ineq_rows, actual.ineq_rows);
  chk("cones", predicted.cones, actual.cones);
  for (const auto& [tag, n] : predicted.rows_by_tag) {
    auto it = actual.rows_by_tag.find(tag);
    chk(("rows[" + tag + "]").c_str(), n, it == actual.rows_by_tag.end() ? 0 : it->second);
  }
  for (const auto& [tag, n] : actual.rows_by_tag)
    if (!predicted.rows_by_tag.count(tag)) out << "unpredicted row tag " << tag << " x" << n << "\n";
  for (const auto& [tag, n] : predicted.cones_by_tag) {
    auto it = actual.cones_by_tag.find(tag);
    chk(("cones[" + tag + "]").c_str(), n, it == actual.cones_by_tag.end() ? 0 : it->second);
  }
  for (const auto& [tag, n] : actual.cones_by_tag)
    if (!predicted.cones_by_tag.count(tag)) out << "unpredicted cone tag " << tag << " x" << n << "\n";
  std::string s = out.str();
  if (diff) *diff = s;
  return s.empty();
}

CcAudit audit_cones(const ModelBundle& bundle) {
  CcAudit a;
  ModelStats st = bundle.model.stats();
  for (const char* tag : {"hvdc_cap", "hp_inflow", "hp_storage", "p2g_band_hi_cc", "p2g_band_lo_cc"}) {
    auto it = st.rows_by_tag.find(tag);
    if (it != st.rows_by_tag.end()) a.rank1[tag] = it->second / 2;
  }
  for (const auto& [tag, n] : st.cones_by_tag) a.cones[tag] = n;
  return a;
}

double objective_value(const ModelBundle& bundle, const std::vector<double>& x) {
  double v = bundle.model.obj_constant;
  for (int c = 0; c < bundle.model.num_vars(); ++c)
    v += bundle.model.vars[size_t(c)].obj * x[size_t(c)];
  return v;
}

BreakdownValues evaluate_breakdown(const ModelBundle& bundle, const std::vector<double>& x) {
  const PlanningModel& m = bundle.model;
  const ObjectiveBreakdown& bd = bundle.breakdown;
  BreakdownValues v;
  v.re_capex = m.eval(bd.re_capex, x);
  v.re_opex = m.eval(bd.re_opex, x);
  v.hvdc_capex = m.eval(bd.hvdc_capex, x);
  v.hvdc_opex = m.eval(bd.hvdc_opex, x);
  v.hp_capex = m.eval(bd.hp_capex, x);
  v.hp_opex = m.eval(bd.hp_opex, x);
  v.p2g_capex = m.eval(bd.p2g_capex, x);
  v.p2g_fix_opex = m.eval(bd.p2g_fix_opex, x);
  v.p2g_var_opex = m.eval(bd.p2g_var_opex, x);
  v.revenue_e = m.eval(bd.revenue_e, x);
  v.revenue_h = m.eval(bd.revenue_h, x);
  return v;
}

}  // namespace hyplan
