#include "econ.hpp"

#include <cmath>
#include <sstream>

#include "json.hpp"
#include "util.hpp"

namespace hyplan {

using nlohmann::json;

PlanReport compute_plan_report(const ModelBundle& bundle, const SystemConfig& cfg,
                               const ScenarioSet& scen, const std::vector<double>& x) {
  const VarIndex& ix = bundle.idx;
  const int Y = cfg.horizon.epochs;
  const int S = scen.count();
  const int T = scen.hours_per_day;
  const int nI = int(cfg.sources.size());
  auto hvdc = cfg.hvdc_corridors();
  auto hp = cfg.hp_corridors();
  DiscountModel dm = discount_factors(cfg.discount_rate, cfg.horizon);

  PlanReport rep;
  rep.breakdown = evaluate_breakdown(bundle, x);
  rep.objective = objective_value(bundle, x);
  rep.profit_npv_rmb = rep.breakdown.revenue_e + rep.breakdown.revenue_h -
                       rep.breakdown.total_cost();

  double npv_e = 0, npv_h = 0, npv_h2_kg = 0, npv_src_kg = 0, npv_pipe_kg = 0;

  for (int y = 0; y < Y; ++y) {
    EpochReport er;
    er.epoch = y + 1;
    for (int i = 0; i < nI; ++i) {
      er.new_wt_mw += x[size_t(ix.pwt[i][y])];
      er.new_pv_mw += x[size_t(ix.ppv[i][y])];
      for (int tau = 0; tau <= y; ++tau) {
        er.online_wt_mw += x[size_t(ix.pwt[i][tau])];
        er.online_pv_mw += x[size_t(ix.ppv[i][tau])];
      }
      for (int col : ix.delta[i][y]) er.new_farms += int(std::lround(x[size_t(col)]));
      er.online_farms += int(std::lround(x[size_t(ix.chi[i][y])]));
    }
    for (int c : hvdc) {
      for (int col : ix.sigma[c][y]) er.new_hvdc_lines += int(std::lround(x[size_t(col)]));
      for (int tau = 0; tau <= y; ++tau)
        for (int col : ix.sigma[c][tau]) er.online_hvdc_lines += int(std::lround(x[size_t(col)]));
    }
    for (int c : hp) {
      for (int col : ix.sigma[c][y]) er.new_hp_lines += int(std::lround(x[size_t(col)]));
      for (int tau = 0; tau <= y; ++tau)
        for (int col : ix.sigma[c][tau]) er.online_hp_lines += int(std::lround(x[size_t(col)]));
    }

    double hvdc_energy = 0, hp_kg_in = 0, p2g_energy = 0;
    for (int s = 0; s < S; ++s) {
      const double Ds = scen.weights[size_t(s)];
      for (int t = 0; t < T; ++t) {
        for (int i = 0; i < nI; ++i) {
          er.energy_e_mwh += Ds * (x[size_t(ix.gwtE[i][y][s][t])] + x[size_t(ix.gpvE[i][y][s][t])]);
          er.energy_h_mwh += Ds * (x[size_t(ix.gwtH[i][y][s][t])] + x[size_t(ix.gpvH[i][y][s][t])]);
          er.spill_mwh += Ds * (x[size_t(ix.spw[i][y][s][t])] + x[size_t(ix.spv[i][y][s][t])]);
          er.hydrogen_kg += Ds * x[size_t(ix.hm[i][y][s][t])];
          p2g_energy += Ds * x[size_t(ix.pcl[i][y][s][t])];
          for (int u = 0; u < kNumSectors; ++u)
            er.h2_source_kg += Ds * x[size_t(ix.msrc[i][u][y][s][t])];
        }
        for (int c : hvdc) hvdc_energy += Ds * x[size_t(ix.f[c][y][s][t])];
        for (int c : hp)
          for (int u = 0; u < kNumSectors; ++u) {
            er.h2_pipeline_kg += Ds * x[size_t(ix.minj[c][u][y][s][t])];
            hp_kg_in += Ds * x[size_t(ix.minj[c][u][y][s][t])];
          }
      }
    }
    double eh = er.energy_e_mwh + er.energy_h_mwh;
    er.e_share = eh > 0 ? er.energy_e_mwh / eh : 0;
    er.mass_balance_residual =
        std::abs(er.hydrogen_kg - er.h2_source_kg - er.h2_pipeline_kg) /
        std::max(1.0, er.hydrogen_kg);

    // utilization hours
    double re_cap = er.online_wt_mw + er.online_pv_mw;
    er.auh_re_zero_cap = re_cap <= 0;
    er.auh_re = re_cap > 0 ? eh / re_cap : 0;
    double hvdc_cap = 0;
    for (int c : hvdc) {
      double lines = 0;
      for (int tau = 0; tau <= y; ++tau)
        for (int col : ix.sigma[c][tau]) lines += x[size_t(col)];
      hvdc_cap += lines * cfg.corridors[size_t(c)].capacity_mw_per_line;
    }
    er.auh_hvdc_zero_cap = hvdc_cap <= 0;
    er.auh_hvdc = hvdc_cap > 0 ? hvdc_energy / hvdc_cap : 0;
    double hp_cap = 0;
    for (int c : hp) {
      double lines = 0;
      for (int tau = 0; tau <= y; ++tau)
        for (int col : ix.sigma[c][tau]) lines += x[size_t(col)];
      hp_cap += lines * cfg.corridors[size_t(c)].inflow_cap_kg_h_per_line;
    }
    er.auh_hp_zero_cap = hp_cap <= 0;
    er.auh_hp = hp_cap > 0 ? hp_kg_in / hp_cap : 0;
    double p2g_cap = 0;
    for (int i = 0; i < nI; ++i)
      p2g_cap += x[size_t(ix.chi[i][y])] * cfg.p2g.facilities_per_farm * cfg.p2g.p_max_mw;
    er.auh_p2g_zero_cap = p2g_cap <= 0;
    er.auh_p2g = p2g_cap > 0 ? p2g_energy / p2g_cap : 0;

    npv_e += dm.beta[size_t(y)] * er.energy_e_mwh;
    npv_h += dm.beta[size_t(y)] * er.energy_h_mwh;
    npv_h2_kg += dm.beta[size_t(y)] * er.hydrogen_kg;
    npv_src_kg += dm.beta[size_t(y)] * er.h2_source_kg;
    npv_pipe_kg += dm.beta[size_t(y)] * er.h2_pipeline_kg;

    rep.epochs.push_back(er);
  }

  rep.npv_e_mwh = npv_e;
  rep.npv_h_mwh = npv_h;
  rep.npv_h2_kg = npv_h2_kg;
  double total_kg = npv_src_kg + npv_pipe_kg;
  rep.h2_source_share = total_kg > 0 ? npv_src_kg / total_kg : 0;

  // levelized metrics: renewable cost split over both streams pro rata,
  // HVDC wholly on electricity, P2G and HP wholly on hydrogen
  LevelizedMetrics& lv = rep.levelized;
  const BreakdownValues& bd = rep.breakdown;
  const double kwh_per_mwh = 1000.0;
  double npv_total = npv_e + npv_h;
  lv.zero_e_energy = npv_e <= 0;
  lv.zero_h_energy = npv_h <= 0;
  double re_cost = bd.re_capex + bd.re_opex;
  double hvdc_cost = bd.hvdc_capex + bd.hvdc_opex;
  double p2g_cost = bd.p2g_capex + bd.p2g_fix_opex + bd.p2g_var_opex;
  double hp_cost = bd.hp_capex + bd.hp_opex;
  if (npv_total > 0) lv.lcoe_re = re_cost / (npv_total * kwh_per_mwh);
  if (npv_e > 0) {
    lv.lco_hvdc_add = hvdc_cost / (npv_e * kwh_per_mwh);
    double re_to_e = npv_total > 0 ? re_cost * (npv_e / npv_total) : 0;
    lv.lpoe_rmb_per_kwh = (bd.revenue_e - re_to_e - hvdc_cost) / (npv_e * kwh_per_mwh);
  }
  if (npv_h > 0) {
    lv.lco_p2g_add = p2g_cost / (npv_h * kwh_per_mwh);
    lv.lco_hp_add = hp_cost / (npv_h * kwh_per_mwh);
  }
  if (npv_h2_kg > 0) {
    double re_to_h = npv_total > 0 ? re_cost * (npv_h / npv_total) : 0;
    lv.lcoh_rmb_per_kg = (re_to_h + p2g_cost + hp_cost) / npv_h2_kg;
    lv.lcoh_rmb_per_kwh = lv.lcoh_rmb_per_kg / cfg.uncertainty.lhv_kwh_per_kg;
    lv.lpoh_rmb_per_kg = (bd.revenue_h - re_to_h - p2g_cost - hp_cost) / npv_h2_kg;
  }
  return rep;
}

namespace {

json epoch_json(const EpochReport& e) {
  return json{{"epoch", e.epoch},
              {"new_wt_mw", e.new_wt_mw},
              {"new_pv_mw", e.new_pv_mw},
              {"online_wt_mw", e.online_wt_mw},
              {"online_pv_mw", e.online_pv_mw},
              {"new_hvdc_lines", e.new_hvdc_lines},
              {"online_hvdc_lines", e.online_hvdc_lines},
              {"new_hp_lines", e.new_hp_lines},
              {"online_hp_lines", e.online_hp_lines},
              {"new_farms", e.new_farms},
              {"online_farms", e.online_farms},
              {"energy_e_mwh", e.energy_e_mwh},
              {"energy_h_mwh", e.energy_h_mwh},
              {"spill_mwh", e.spill_mwh},
              {"e_share", e.e_share},
              {"hydrogen_kg", e.hydrogen_kg},
              {"h2_source_kg", e.h2_source_kg},
              {"h2_pipeline_kg", e.h2_pipeline_kg},
              {"auh_re", e.auh_re},
              {"auh_hvdc", e.auh_hvdc},
              {"auh_hp", e.auh_hp},
              {"auh_p2g", e.auh_p2g},
              {"auh_zero_capacity",
               json{{"re", e.auh_re_zero_cap},
                    {"hvdc", e.auh_hvdc_zero_cap},
                    {"hp", e.auh_hp_zero_cap},
                    {"p2g", e.auh_p2g_zero_cap}}},
              {"mass_balance_residual", e.mass_balance_residual}};
}

}  // namespace

std::string plan_report_json(const PlanReport& r) {
  json j;
  j["format"] = "hyplan-plan-report/1";
  j["objective_rmb"] = r.objective;
  j["profit_npv_rmb"] = r.profit_npv_rmb;
  j["breakdown"] = {{"re_capex", r.breakdown.re_capex},
                    {"re_opex", r.breakdown.re_opex},
                    {"hvdc_capex", r.breakdown.hvdc_capex},
                    {"hvdc_opex", r.breakdown.hvdc_opex},
                    {"hp_capex", r.breakdown.hp_capex},
                    {"hp_opex", r.breakdown.hp_opex},
                    {"p2g_capex", r.breakdown.p2g_capex},
                    {"p2g_fix_opex", r.breakdown.p2g_fix_opex},
                    {"p2g_var_opex", r.breakdown.p2g_var_opex},
                    {"revenue_e", r.breakdown.revenue_e},
                    {"revenue_h", r.breakdown.revenue_h}};
  j["levelized"] = {{"lcoe_re_rmb_per_kwh", r.levelized.lcoe_re},
                    {"lco_hvdc_add_rmb_per_kwh", r.levelized.lco_hvdc_add},
                    {"lco_p2g_add_rmb_per_kwh", r.levelized.lco_p2g_add},
                    {"lco_hp_add_rmb_per_kwh", r.levelized.lco_hp_add},
                    {"lcoh_rmb_per_kg", r.levelized.lcoh_rmb_per_kg},
                    {"lcoh_rmb_per_kwh", r.levelized.lcoh_rmb_per_kwh},
                    {"lpoe_rmb_per_kwh", r.levelized.lpoe_rmb_per_kwh},
                    {"lpoh_rmb_per_kg", r.levelized.lpoh_rmb_per_kg},
                    {"zero_e_energy", r.levelized.zero_e_energy},
                    {"zero_h_energy", r.levelized.zero_h_energy}};
  j["h2_source_share"] = r.h2_source_share;
  j["npv_energy"] = {{"e_mwh", r.npv_e_mwh}, {"h_mwh", r.npv_h_mwh}, {"h2_kg", r.npv_h2_kg}};
  j["epochs"] = json::array();
  for (const auto& e : r.epochs) j["epochs"].push_back(epoch_json(e));
  return j.dump(2) + "\n";
}

std::string plan_report_csv(const PlanReport& r) {
  std::ostringstream out;
  out << "epoch,new_wt_mw,new_pv_mw,online_wt_mw,online_pv_mw,new_hvdc_lines,online_hvdc_lines,"
         "new_hp_lines,online_hp_lines,new_farms,online_farms,energy_e_mwh,energy_h_mwh,"
         "spill_mwh,e_share,hydrogen_kg,h2_source_kg,h2_pipeline_kg,auh_re,auh_hvdc,auh_hp,"
         "auh_p2g,mass_balance_residual\n";
  for (const auto& e : r.epochs) {
    out << e.epoch << ',' << format_double(e.new_wt_mw) << ',' << format_double(e.new_pv_mw) << ','
        << format_double(e.online_wt_mw) << ',' << format_double(e.online_pv_mw) << ','
        << e.new_hvdc_lines << ',' << e.online_hvdc_lines << ',' << e.new_hp_lines << ','
        << e.online_hp_lines << ',' << e.new_farms << ',' << e.online_farms << ','
        << format_double(e.energy_e_mwh) << ',' << format_double(e.energy_h_mwh) << ','
        << format_double(e.spill_mwh) << ',' << format_double(e.e_share) << ','
        << format_double(e.hydrogen_kg) << ',' << format_double(e.h2_source_kg) << ','
        << format_double(e.h2_pipeline_kg) << ',' << format_double(e.auh_re) << ','
        << format_double(e.auh_hvdc) << ',' << format_double(e.auh_hp) << ','
        << format_double(e.auh_p2g) << ',' << format_double(e.mass_balance_residual) << '\n';
  }
  return out.str();
}

std::string plotdata_csv(const ModelBundle& bundle, const SystemConfig& cfg,
                         const ScenarioSet& scen, const std::vector<double>& x) {
  const VarIndex& ix = bundle.idx;
  const int Y = cfg.horizon.epochs;
  const int S = scen.count();
  const int T = scen.hours_per_day;
  const int nI = int(cfg.sources.size());
  auto hvdc = cfg.hvdc_corridors();
  auto hp = cfg.hp_corridors();
  std::ostringstream out;
  out << "epoch,scenario,hour,series,value\n";
  auto emit = [&](int y, int s, int t, const char* series, double v) {
    out << (y + 1) << ',' << (s + 1) << ',' << (t + 1) << ',' << series << ','
        << format_double(v) << '\n';
  };
  for (int y = 0; y < Y; ++y) {
    for (int s = 0; s < S; ++s) {
      for (int t = 0; t < T; ++t) {
        double e = 0, h = 0, sp = 0, pw = 0, hr = 0, fl = 0, pk = 0;
        for (int i = 0; i < nI; ++i) {
          e += x[size_t(ix.gwtE[i][y][s][t])] + x[size_t(ix.gpvE[i][y][s][t])];
          h += x[size_t(ix.gwtH[i][y][s][t])] + x[size_t(ix.gpvH[i][y][s][t])];
          sp += x[size_t(ix.spw[i][y][s][t])] + x[size_t(ix.spv[i][y][s][t])];
          pw += x[size_t(ix.pcl[i][y][s][t])];
          hr += x[size_t(ix.hm[i][y][s][t])];
        }
        for (int c : hvdc) fl += x[size_t(ix.f[c][y][s][t])];
        for (int c : hp) pk += x[size_t(ix.mhp[c][y][s][t])];
        emit(y, s, t, "re_to_hvdc_mw", e);
        emit(y, s, t, "re_to_p2g_mw", h);
        emit(y, s, t, "spill_mw", sp);
        emit(y, s, t, "p2g_power_mw", pw);
        emit(y, s, t, "hydrogen_kg_per_h", hr);
        emit(y, s, t, "hvdc_flow_mw", fl);
        emit(y, s, t, "line_pack_kg", pk);
      }
    }
  }
  return out.str();
}

std::string solve_report_json(const SolveReport& r) {
  json j;
  j["format"] = "hyplan-solve-report/1";
  j["termination"] = term_reason_name(r.reason);
  j["has_incumbent"] = r.has_incumbent;
  if (r.has_incumbent) j["objective_rmb"] = r.incumbent_obj;
  j["best_bound_rmb"] = std::isfinite(r.best_bound) ? json(r.best_bound) : json();
  j["relative_gap"] = std::isfinite(r.gap) ? json(r.gap) : json();
  j["nodes"] = r.nodes;
  j["cuts"] = r.cuts;
  j["lp_iterations"] = r.lp_iterations;
  return j.dump(2) + "\n";
}

std::string solution_values_text(const PlanningModel& model, const std::vector<double>& x) {
  std::ostringstream out;
  for (size_t j = 0; j < model.vars.size(); ++j)
    out << model.vars[j].name << ' ' << format_double(x[j]) << '\n';
  return out.str();
}

namespace {

SystemConfig apply_axis(const SystemConfig& base, const std::string& axis,
                        const std::string& label, BuildOptions& build) {
  SystemConfig cfg = base;
  if (axis == "epsilon") {
    if (label == "off") {
      build.drcc = false;
    } else {
      build.drcc = true;
      build.epsilon = std::stod(label);
      cfg.uncertainty.epsilon = build.epsilon;
    }
  } else if (axis == "re_price_path") {
    if (label == "flat") {
      cfg.costs.wt.last = cfg.costs.wt.first;
      cfg.costs.pv.last = cfg.costs.pv.first;
    } else if (label != "declining") {
      fail_invalid("sweep: re_price_path grid accepts 'declining' or 'flat'");
    }
  } else if (axis == "transport_demand_path") {
    double g = std::stod(label);
    auto scale_caps = [&](std::array<std::vector<double>, kNumSectors>& caps) {
      auto& tr = caps[size_t(Sector::Transport)];
      for (size_t y = 1; y < tr.size(); ++y) tr[y] = tr[0] + g * (tr[y] - tr[0]);
    };
    for (auto& r : cfg.sources) scale_caps(r.sector_caps_kg);
    for (auto& r : cfg.demands) scale_caps(r.sector_caps_kg);
  } else if (axis != "scenario_count") {
    fail_invalid("sweep: unknown axis '" + axis + "'");
  }
  return cfg;
}

}  // namespace

SweepTable sensitivity_sweep(const SystemConfig& cfg, const ScenarioSet& scen,
                             const MomentModel& mom, const SweepRequest& req) {
  SweepTable table;
  table.axis = req.axis;
  std::vector<DailyProfile> days;
  if (req.axis == "scenario_count") days = load_profile_days(cfg);

  std::vector<uint8_t> carry_basis;
  for (const auto& label : req.grid) {
    SweepPoint pt;
    pt.label = label;
    try {
      BuildOptions build = req.build;
      SystemConfig point_cfg = apply_axis(cfg, req.axis, label, build);
      const ScenarioSet* use_scen = &scen;
      const MomentModel* use_mom = &mom;
      ScenarioSet local_scen;
      MomentModel local_mom;
      if (req.axis == "scenario_count") {
        int S = std::stoi(label);
        local_scen = cluster_typical_days(days, S, req.seed);
        local_mom = estimate_moments(days, local_scen);
        use_scen = &local_scen;
        use_mom = &local_mom;
      }
      ModelBundle bundle = build_model(point_cfg, *use_scen, *use_mom, build);
      MisocpSolver solver(bundle.model);
      SolveOptions sopt = req.solve;
      // objective-only changes admit a warm-started basis
      if (req.axis == "re_price_path" && !carry_basis.empty()) sopt.warm_basis = carry_basis;
      SolveReport sr = solver.branch_and_bound(sopt);
      if (!sr.has_incumbent) {
        pt.error = std::string("solve terminated: ") + term_reason_name(sr.reason);
      } else {
        pt.solved = true;
        pt.objective = sr.incumbent_obj;
        pt.gap = sr.gap;
        pt.plan = compute_plan_report(bundle, point_cfg, *use_scen, sr.incumbent);
        if (req.axis == "re_price_path") carry_basis = sr.final_basis;
      }
    } catch (const std::exception& e) {
      pt.error = e.what();
    }
    table.points.push_back(std::move(pt));
  }
  return table;
}

namespace {

json sweep_point_json(const SweepPoint& p) {
  json j;
  j["label"] = p.label;
  j["solved"] = p.solved;
  if (!p.error.empty()) j["error"] = p.error;
  if (p.solved) {
    j["objective_rmb"] = p.objective;
    j["gap"] = p.gap;
    const auto& last = p.plan.epochs.back();
    double wt = 0, pv = 0, farms_new = 0;
    for (const auto& e : p.plan.epochs) {
      wt += e.new_wt_mw;
      pv += e.new_pv_mw;
      farms_new += e.new_farms;
    }
    double esum = 0, hsum = 0;
    for (const auto& e : p.plan.epochs) {
      esum += e.energy_e_mwh;
      hsum += e.energy_h_mwh;
    }
    j["wt_total_mw"] = wt;
    j["pv_total_mw"] = pv;
    j["hvdc_lines"] = last.online_hvdc_lines;
    j["hp_lines"] = last.online_hp_lines;
    j["p2g_new_farms"] = farms_new;
    j["p2g_online_farms_max"] = [&] {
      int mx = 0;
      for (const auto& e : p.plan.epochs) mx = std::max(mx, e.online_farms);
      return mx;
    }();
    j["e_share_sum"] = esum + hsum > 0 ? esum / (esum + hsum) : 0;
  }
  return j;
}

}  // namespace

std::string sweep_json(const SweepTable& t) {
  json j;
  j["format"] = "hyplan-sweep/1";
  j["axis"] = t.axis;
  j["points"] = json::array();
  for (const auto& p : t.points) j["points"].push_back(sweep_point_json(p));
  return j.dump(2) + "\n";
}

std::string sweep_csv(const SweepTable& t) {
  std::ostringstream out;
  out << "label,solved,objective_rmb,gap,wt_total_mw,pv_total_mw,hvdc_lines,hp_lines,"
         "p2g_new_farms,p2g_online_farms_max,e_share_sum,error\n";
  for (const auto& p : t.points) {
    json pj = sweep_point_json(p);
    out << p.label << ',' << (p.solved ? 1 : 0) << ',';
    if (p.solved) {
      out << format_double(p.objective) << ',' << format_double(p.gap) << ','
          << format_double(pj["wt_total_mw"].get<double>()) << ','
          << format_double(pj["pv_total_mw"].get<double>()) << ','
          << pj["hvdc_lines"].get<int>() << ',' << pj["hp_lines"].get<int>() << ','
          << format_double(pj["p2g_new_farms"].get<double>()) << ','
          << pj["p2g_online_farms_max"].get<int>() << ','
          << format_double(pj["e_share_sum"].get<double>()) << ',';
    } else {
      out << ",,,,,,,,,";
    }
    out << p.error << '\n';
  }
  return out.str();
}

}  // namespace hyplan
