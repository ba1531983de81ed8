#include "config.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <set>

#include "json.hpp"
#include "util.hpp"

namespace hyplan {

using nlohmann::json;

const char* sector_name(int u) {
  static const char* names[kNumSectors] = {"chemical", "transport", "heating"};
  return names[u];
}

const CostPair& CostSchedule::item(CostItem it) const {
  switch (it) {
    case CostItem::WtCapexPerKw: return wt;
    case CostItem::PvCapexPerKw: return pv;
    case CostItem::P2gCapexPerKw: return p2g;
    case CostItem::ElectricityPerKwh: return electricity;
    case CostItem::H2SourceChemical: return h2_source[0];
    case CostItem::H2SourceTransport: return h2_source[1];
    case CostItem::H2SourceHeating: return h2_source[2];
    case CostItem::H2DemandChemical: return h2_demand[0];
    case CostItem::H2DemandTransport: return h2_demand[1];
    case CostItem::H2DemandHeating: return h2_demand[2];
  }
  fail_invalid("unknown cost item");
}

std::string SystemConfig::profile_path(const std::string& rel) const {
  std::filesystem::path p(rel);
  if (p.is_absolute() || base_dir.empty()) return rel;
  return (std::filesystem::path(base_dir) / p).string();
}

std::vector<int> SystemConfig::hvdc_corridors() const {
  std::vector<int> out;
  for (size_t c = 0; c < corridors.size(); ++c)
    if (corridors[c].kind == CorridorKind::Hvdc) out.push_back(int(c));
  return out;
}

std::vector<int> SystemConfig::hp_corridors() const {
  std::vector<int> out;
  for (size_t c = 0; c < corridors.size(); ++c)
    if (corridors[c].kind == CorridorKind::Hp) out.push_back(int(c));
  return out;
}

namespace {

[[noreturn]] void bad(const std::string& path, const std::string& what) {
  fail_validation("config: " + path + ": " + what);
}

const json& need(const json& j, const std::string& key, const std::string& path) {
  auto it = j.find(key);
  if (it == j.end()) bad(path + "." + key, "missing required field");
  return *it;
}

double need_num(const json& j, const std::string& key, const std::string& path) {
  const json& v = need(j, key, path);
  if (!v.is_number()) bad(path + "." + key, "expected a number");
  return v.get<double>();
}

int need_int(const json& j, const std::string& key, const std::string& path) {
  const json& v = need(j, key, path);
  if (!v.is_number_integer()) bad(path + "." + key, "expected an integer");
  return v.get<int>();
}

std::string need_str(const json& j, const std::string& key, const std::string& path) {
  const json& v = need(j, key, path);
  if (!v.is_string()) bad(path + "." + key, "expected a string");
  return v.get<std::string>();
}

// Per-epoch values accept a scalar (broadcast to all epochs) or an array of
// length Y.
std::vector<double> need_per_epoch(const json& j, const std::string& key,
                                   const std::string& path, int epochs) {
  const json& v = need(j, key, path);
  std::vector<double> out;
  if (v.is_number()) {
    out.assign(size_t(epochs), v.get<double>());
  } else if (v.is_array()) {
    if (int(v.size()) != epochs)
      bad(path + "." + key, "expected " + std::to_string(epochs) + " per-epoch values");
    for (const auto& e : v) {
      if (!e.is_number()) bad(path + "." + key, "expected numbers");
      out.push_back(e.get<double>());
    }
  } else {
    bad(path + "." + key, "expected a number or per-epoch array");
  }
  for (double x : out)
    if (!(x >= 0) || !std::isfinite(x)) bad(path + "." + key, "values must be >= 0");
  return out;
}

std::vector<int> need_per_epoch_int(const json& j, const std::string& key,
                                    const std::string& path, int epochs) {
  auto vals = need_per_epoch(j, key, path, epochs);
  std::vector<int> out;
  for (double v : vals) {
    if (v != std::floor(v)) bad(path + "." + key, "expected integer counts");
    out.push_back(int(v));
  }
  return out;
}

CostPair parse_cost_pair(const json& j, const std::string& path) {
  CostPair p;
  p.first = need_num(j, "first", path);
  p.last = need_num(j, "last", path);
  if (p.first < 0 || p.last < 0) bad(path, "cost values must be >= 0");
  return p;
}

std::array<std::vector<double>, kNumSectors> parse_sector_caps(const json& j,
                                                               const std::string& path,
                                                               int epochs) {
  std::array<std::vector<double>, kNumSectors> caps;
  for (int u = 0; u < kNumSectors; ++u)
    caps[u] = need_per_epoch(j, sector_name(u), path, epochs);
  return caps;
}

}  // namespace

SystemConfig parse_config_json(const std::string& text, const std::string& base_dir) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    fail_validation(std::string("config: not valid json: ") + e.what());
  }

  SystemConfig cfg;
  cfg.base_dir = base_dir;

  const json& jh = need(j, "horizon", "");
  cfg.horizon.epochs = need_int(jh, "epochs", "horizon");
  cfg.horizon.years_per_epoch = need_int(jh, "years_per_epoch", "horizon");
  cfg.horizon.hours_per_day = need_int(jh, "hours_per_day", "horizon");
  if (cfg.horizon.epochs < 1) bad("horizon.epochs", "must be >= 1");
  if (cfg.horizon.years_per_epoch < 1) bad("horizon.years_per_epoch", "must be >= 1");
  if (cfg.horizon.hours_per_day < 2) bad("horizon.hours_per_day", "must be >= 2");
  const int Y = cfg.horizon.epochs;

  cfg.discount_rate = need_num(need(j, "discount", ""), "rate", "discount");
  if (cfg.discount_rate < 0) bad("discount.rate", "must be >= 0");

  const json& jsrc = need(j, "source_regions", "");
  if (!jsrc.is_array() || jsrc.empty()) bad("source_regions", "expected a non-empty array");
  std::set<std::string> region_ids;
  for (size_t i = 0; i < jsrc.size(); ++i) {
    const json& js = jsrc[i];
    std::string path = "source_regions[" + std::to_string(i) + "]";
    SourceRegion r;
    r.id = need_str(js, "id", path);
    if (!region_ids.insert(r.id).second) bad(path + ".id", "duplicate region id");
    r.wt_cap_epoch_mw = need_per_epoch(js, "wt_cap_per_epoch_mw", path, Y);
    r.pv_cap_epoch_mw = need_per_epoch(js, "pv_cap_per_epoch_mw", path, Y);
    r.joint_cap_epoch_mw = need_per_epoch(js, "joint_cap_per_epoch_mw", path, Y);
    r.wt_cap_total_mw = need_num(js, "wt_cap_total_mw", path);
    r.pv_cap_total_mw = need_num(js, "pv_cap_total_mw", path);
    r.joint_cap_total_mw = need_num(js, "joint_cap_total_mw", path);
    if (r.wt_cap_total_mw < 0 || r.pv_cap_total_mw < 0 || r.joint_cap_total_mw < 0)
      bad(path, "total capacity caps must be >= 0");
    if (r.joint_cap_total_mw > r.wt_cap_total_mw + r.pv_cap_total_mw)
      bad(path + ".joint_cap_total_mw", "joint total cap exceeds wt total + pv total");
    const json& jp = need(js, "p2g", path);
    r.max_new_farms = need_per_epoch_int(jp, "max_new_farms_per_epoch", path + ".p2g", Y);
    r.max_online_farms = need_per_epoch_int(jp, "max_online_farms", path + ".p2g", Y);
    r.sector_caps_kg =
        parse_sector_caps(need(js, "sector_caps_kg_per_year", path), path + ".sector_caps_kg_per_year", Y);
    const json& ju = need(js, "uncertainty_scale_mw", path);
    r.err_scale_wt_mw = need_num(ju, "wt", path + ".uncertainty_scale_mw");
    r.err_scale_pv_mw = need_num(ju, "pv", path + ".uncertainty_scale_mw");
    if (r.err_scale_wt_mw < 0 || r.err_scale_pv_mw < 0)
      bad(path + ".uncertainty_scale_mw", "must be >= 0");
    cfg.sources.push_back(std::move(r));
  }

  const json& jdem = need(j, "demand_regions", "");
  if (!jdem.is_array() || jdem.empty()) bad("demand_regions", "expected a non-empty array");
  for (size_t i = 0; i < jdem.size(); ++i) {
    const json& jd = jdem[i];
    std::string path = "demand_regions[" + std::to_string(i) + "]";
    DemandRegion r;
    r.id = need_str(jd, "id", path);
    if (!region_ids.insert(r.id).second) bad(path + ".id", "duplicate region id");
    r.load_profile_ref = need_str(jd, "load_profile_ref", path);
    if (r.load_profile_ref != "load")
      bad(path + ".load_profile_ref", "unknown profile reference (deck provides 'load')");
    r.sector_caps_kg =
        parse_sector_caps(need(jd, "sector_caps_kg_per_year", path), path + ".sector_caps_kg_per_year", Y);
    if (jd.contains("demand_multiplier_cap") && !jd["demand_multiplier_cap"].is_null()) {
      double cap = jd["demand_multiplier_cap"].get<double>();
      if (cap < 0) bad(path + ".demand_multiplier_cap", "must be >= 0");
      r.demand_multiplier_cap = cap;
    }
    cfg.demands.push_back(std::move(r));
  }

  auto source_index = [&](const std::string& id) {
    for (size_t k = 0; k < cfg.sources.size(); ++k)
      if (cfg.sources[k].id == id) return int(k);
    return -1;
  };
  auto demand_index = [&](const std::string& id) {
    for (size_t k = 0; k < cfg.demands.size(); ++k)
      if (cfg.demands[k].id == id) return int(k);
    return -1;
  };

  const json& jcor = need(j, "corridors", "");
  if (!jcor.is_array()) bad("corridors", "expected an array");
  for (size_t i = 0; i < jcor.size(); ++i) {
    const json& jc = jcor[i];
    std::string path = "corridors[" + std::to_string(i) + "]";
    Corridor c;
    std::string kind = need_str(jc, "kind", path);
    if (kind == "hvdc") c.kind = CorridorKind::Hvdc;
    else if (kind == "hp") c.kind = CorridorKind::Hp;
    else bad(path + ".kind", "expected 'hvdc' or 'hp'");
    c.from = need_str(jc, "from", path);
    c.to = need_str(jc, "to", path);
    c.from_idx = source_index(c.from);
    c.to_idx = demand_index(c.to);
    if (c.from_idx < 0) bad(path + ".from", "unknown source region '" + c.from + "'");
    if (c.to_idx < 0) bad(path + ".to", "unknown demand region '" + c.to + "'");
    c.lines_per_epoch = need_per_epoch_int(jc, "lines_per_epoch", path, Y);
    c.lines_total = need_int(jc, "lines_total", path);
    if (c.lines_total < 0) bad(path + ".lines_total", "must be >= 0");
    c.capex_rmb_per_line = need_num(jc, "capex_rmb_per_line", path);
    c.fixed_opex_ratio = need_num(jc, "fixed_opex_ratio", path);
    if (c.fixed_opex_ratio < 0) bad(path + ".fixed_opex_ratio", "must be >= 0");
    if (c.kind == CorridorKind::Hvdc) {
      c.capacity_mw_per_line = need_num(jc, "capacity_mw_per_line", path);
      if (c.capacity_mw_per_line < 0) bad(path + ".capacity_mw_per_line", "must be >= 0");
      if (jc.contains("inflow_cap_kg_per_h_per_line") || jc.contains("storage_cap_kg_per_line"))
        bad(path, "hvdc corridor carries hp-only fields");
    } else {
      c.inflow_cap_kg_h_per_line = need_num(jc, "inflow_cap_kg_per_h_per_line", path);
      c.storage_cap_kg_per_line = need_num(jc, "storage_cap_kg_per_line", path);
      if (c.inflow_cap_kg_h_per_line < 0 || c.storage_cap_kg_per_line < 0)
        bad(path, "hp caps must be >= 0");
      if (jc.contains("capacity_mw_per_line"))
        bad(path, "hp corridor carries hvdc-only fields");
    }
    cfg.corridors.push_back(std::move(c));
  }

  const json& jt = need(j, "p2g_technology", "");
  {
    const std::string path = "p2g_technology";
    P2GTechnology& t = cfg.p2g;
    t.facilities_per_farm = need_int(jt, "facilities_per_farm", path);
    if (t.facilities_per_farm < 1) bad(path + ".facilities_per_farm", "must be >= 1");
    t.p_min_mw = need_num(jt, "p_min_mw", path);
    t.p_max_mw = need_num(jt, "p_max_mw", path);
    if (!(t.p_min_mw >= 0)) bad(path + ".p_min_mw", "must be >= 0");
    if (t.p_min_mw > t.p_max_mw) bad(path + ".p_min_mw", "p_min_mw exceeds p_max_mw");
    t.ramp_mw_per_h = need_num(jt, "ramp_mw_per_h", path);
    if (!(t.ramp_mw_per_h > 0)) bad(path + ".ramp_mw_per_h", "must be > 0");
    t.p_boot_mw = need_num(jt, "p_boot_mw", path);
    if (t.p_boot_mw < 0) bad(path + ".p_boot_mw", "must be >= 0");
    t.boot_cost_rmb = need_num(jt, "boot_cost_rmb", path);
    t.lifetime_years = need_int(jt, "lifetime_years", path);
    if (t.lifetime_years < 1) bad(path + ".lifetime_years", "must be >= 1");
    t.lifetime_epochs =
        (t.lifetime_years + cfg.horizon.years_per_epoch - 1) / cfg.horizon.years_per_epoch;
    t.fixed_opex_ratio = need_num(jt, "fixed_opex_ratio", path);
    const json& jc = need(jt, "conversion", path);
    t.conversion.a = need_num(jc, "a", path + ".conversion");
    t.conversion.b = need_num(jc, "b", path + ".conversion");
    t.conversion.c = need_num(jc, "c", path + ".conversion");
    if (t.conversion.a > 0)
      bad(path + ".conversion.a", "curve must be concave (a <= 0)");
    // Concave on [p_min, p_max]: nonnegativity holds iff it holds at the ends.
    if (t.conversion.value(t.p_min_mw) < 0 || t.conversion.value(t.p_max_mw) < 0)
      bad(path + ".conversion", "hydrogen rate negative inside the operating band");
  }

  const json& jcost = need(j, "costs", "");
  {
    const std::string path = "costs";
    CostSchedule& cs = cfg.costs;
    cs.wt = parse_cost_pair(need(jcost, "wt_rmb_per_kw", path), path + ".wt_rmb_per_kw");
    cs.pv = parse_cost_pair(need(jcost, "pv_rmb_per_kw", path), path + ".pv_rmb_per_kw");
    cs.p2g = parse_cost_pair(need(jcost, "p2g_rmb_per_kw", path), path + ".p2g_rmb_per_kw");
    cs.electricity = parse_cost_pair(need(jcost, "electricity_rmb_per_kwh", path),
                                     path + ".electricity_rmb_per_kwh");
    const json& jsrc_h2 = need(jcost, "h2_source_rmb_per_kg", path);
    const json& jdem_h2 = need(jcost, "h2_demand_rmb_per_kg", path);
    for (int u = 0; u < kNumSectors; ++u) {
      cs.h2_source[u] = parse_cost_pair(need(jsrc_h2, sector_name(u), path + ".h2_source_rmb_per_kg"),
                                        path + ".h2_source_rmb_per_kg." + sector_name(u));
      cs.h2_demand[u] = parse_cost_pair(need(jdem_h2, sector_name(u), path + ".h2_demand_rmb_per_kg"),
                                        path + ".h2_demand_rmb_per_kg." + sector_name(u));
    }
    cs.wt_fixed_opex_ratio = need_num(jcost, "wt_fixed_opex_ratio", path);
    cs.pv_fixed_opex_ratio = need_num(jcost, "pv_fixed_opex_ratio", path);
    if (cs.wt_fixed_opex_ratio < 0 || cs.pv_fixed_opex_ratio < 0)
      bad(path, "fixed opex ratios must be >= 0");
  }

  const json& ju = need(j, "uncertainty", "");
  cfg.uncertainty.epsilon = need_num(ju, "epsilon", "uncertainty");
  if (!(cfg.uncertainty.epsilon > 0 && cfg.uncertainty.epsilon < 1))
    bad("uncertainty.epsilon", "must lie in (0, 1)");
  cfg.uncertainty.lhv_kwh_per_kg = need_num(ju, "hydrogen_lhv_kwh_per_kg", "uncertainty");
  if (!(cfg.uncertainty.lhv_kwh_per_kg > 0))
    bad("uncertainty.hydrogen_lhv_kwh_per_kg", "must be > 0");

  const json& jp = need(j, "profiles", "");
  cfg.profiles.wt = need_str(jp, "wt", "profiles");
  cfg.profiles.pv = need_str(jp, "pv", "profiles");
  cfg.profiles.load = need_str(jp, "load", "profiles");

  return cfg;
}

SystemConfig load_config(const std::string& path) {
  std::string text = read_file(path);
  std::string base = std::filesystem::path(path).parent_path().string();
  return parse_config_json(text, base);
}

namespace {

json per_epoch_json(const std::vector<double>& v) {
  return json(v);
}
json per_epoch_json(const std::vector<int>& v) {
  return json(v);
}
json cost_pair_json(const CostPair& p) {
  return json{{"first", p.first}, {"last", p.last}};
}
json sector_caps_json(const std::array<std::vector<double>, kNumSectors>& caps) {
  json out;
  for (int u = 0; u < kNumSectors; ++u) out[sector_name(u)] = caps[u];
  return out;
}

}  // namespace

std::string config_to_json(const SystemConfig& cfg) {
  json j;
  j["horizon"] = {{"epochs", cfg.horizon.epochs},
                  {"years_per_epoch", cfg.horizon.years_per_epoch},
                  {"hours_per_day", cfg.horizon.hours_per_day}};
  j["discount"] = {{"rate", cfg.discount_rate}};
  for (const auto& r : cfg.sources) {
    json js;
    js["id"] = r.id;
    js["wt_cap_per_epoch_mw"] = per_epoch_json(r.wt_cap_epoch_mw);
    js["pv_cap_per_epoch_mw"] = per_epoch_json(r.pv_cap_epoch_mw);
    js["joint_cap_per_epoch_mw"] = per_epoch_json(r.joint_cap_epoch_mw);
    js["wt_cap_total_mw"] = r.wt_cap_total_mw;
    js["pv_cap_total_mw"] = r.pv_cap_total_mw;
    js["joint_cap_total_mw"] = r.joint_cap_total_mw;
    js["p2g"] = {{"max_new_farms_per_epoch", per_epoch_json(r.max_new_farms)},
                 {"max_online_farms", per_epoch_json(r.max_online_farms)}};
    js["sector_caps_kg_per_year"] = sector_caps_json(r.sector_caps_kg);
    js["uncertainty_scale_mw"] = {{"wt", r.err_scale_wt_mw}, {"pv", r.err_scale_pv_mw}};
    j["source_regions"].push_back(js);
  }
  for (const auto& r : cfg.demands) {
    json jd;
    jd["id"] = r.id;
    jd["load_profile_ref"] = r.load_profile_ref;
    jd["sector_caps_kg_per_year"] = sector_caps_json(r.sector_caps_kg);
    if (r.demand_multiplier_cap) jd["demand_multiplier_cap"] = *r.demand_multiplier_cap;
    j["demand_regions"].push_back(jd);
  }
  j["corridors"] = json::array();
  for (const auto& c : cfg.corridors) {
    json jc;
    jc["kind"] = c.kind == CorridorKind::Hvdc ? "hvdc" : "hp";
    jc["from"] = c.from;
    jc["to"] = c.to;
    jc["lines_per_epoch"] = per_epoch_json(c.lines_per_epoch);
    jc["lines_total"] = c.lines_total;
    jc["capex_rmb_per_line"] = c.capex_rmb_per_line;
    jc["fixed_opex_ratio"] = c.fixed_opex_ratio;
    if (c.kind == CorridorKind::Hvdc) {
      jc["capacity_mw_per_line"] = c.capacity_mw_per_line;
    } else {
      jc["inflow_cap_kg_per_h_per_line"] = c.inflow_cap_kg_h_per_line;
      jc["storage_cap_kg_per_line"] = c.storage_cap_kg_per_line;
    }
    j["corridors"].push_back(jc);
  }
  j["p2g_technology"] = {{"facilities_per_farm", cfg.p2g.facilities_per_farm},
                         {"p_min_mw", cfg.p2g.p_min_mw},
                         {"p_max_mw", cfg.p2g.p_max_mw},
                         {"ramp_mw_per_h", cfg.p2g.ramp_mw_per_h},
                         {"p_boot_mw", cfg.p2g.p_boot_mw},
                         {"boot_cost_rmb", cfg.p2g.boot_cost_rmb},
                         {"lifetime_years", cfg.p2g.lifetime_years},
                         {"fixed_opex_ratio", cfg.p2g.fixed_opex_ratio},
                         {"conversion",
                          {{"a", cfg.p2g.conversion.a},
                           {"b", cfg.p2g.conversion.b},
                           {"c", cfg.p2g.conversion.c}}}};
  json jcost;
  jcost["wt_rmb_per_kw"] = cost_pair_json(cfg.costs.wt);
  jcost["pv_rmb_per_kw"] = cost_pair_json(cfg.costs.pv);
  jcost["p2g_rmb_per_kw"] = cost_pair_json(cfg.costs.p2g);
  jcost["electricity_rmb_per_kwh"] = cost_pair_json(cfg.costs.electricity);
  for (int u = 0; u < kNumSectors; ++u) {
    jcost["h2_source_rmb_per_kg"][sector_name(u)] = cost_pair_json(cfg.costs.h2_source[u]);
    jcost["h2_demand_rmb_per_kg"][sector_name(u)] = cost_pair_json(cfg.costs.h2_demand[u]);
  }
  jcost["wt_fixed_opex_ratio"] = cfg.costs.wt_fixed_opex_ratio;
  jcost["pv_fixed_opex_ratio"] = cfg.costs.pv_fixed_opex_ratio;
  j["costs"] = jcost;
  j["uncertainty"] = {{"epsilon", cfg.uncertainty.epsilon},
                      {"hydrogen_lhv_kwh_per_kg", cfg.uncertainty.lhv_kwh_per_kg}};
  j["profiles"] = {{"wt", cfg.profiles.wt}, {"pv", cfg.profiles.pv}, {"load", cfg.profiles.load}};
  return j.dump(2) + "\n";
}

double interpolate_cost(const CostSchedule& costs, CostItem item, double epoch, int epochs) {
  if (epoch < 1 || epoch > epochs)
    fail_invalid("cost interpolation epoch out of range [1, " + std::to_string(epochs) + "]");
  const CostPair& p = costs.item(item);
  if (epochs == 1) return p.first;
  double f = (epoch - 1.0) / (epochs - 1.0);
  return p.first + (p.last - p.first) * f;
}

DiscountModel discount_factors(double rate, const PlanningHorizon& horizon) {
  if (rate < 0) fail_invalid("discount rate must be >= 0");
  DiscountModel m;
  m.rate = rate;
  int total = horizon.total_years();
  m.alpha.resize(size_t(total));
  double base = 1.0 / (1.0 + rate);
  double cur = 1.0;
  for (int y = 1; y <= total; ++y) {
    cur *= base;
    m.alpha[size_t(y - 1)] = cur;
  }
  m.beta.resize(size_t(horizon.epochs));
  for (int e = 1; e <= horizon.epochs; ++e) {
    double sum = 0;
    for (int k = 0; k < horizon.years_per_epoch; ++k)
      sum += m.alpha[size_t((e - 1) * horizon.years_per_epoch + k)];
    m.beta[size_t(e - 1)] = sum;
  }
  return m;
}

}  // namespace hyplan
