#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

namespace hyplan {

// Canonical units throughout the core: MW for power, kg/h for hydrogen rate,
// kg for stored hydrogen, RMB for money, hours for time. Prices quoted per kWh
// or per kW in the input deck are converted on use (x1000 to per-MWh / per-MW).

struct PlanningHorizon {
  int epochs = 0;          // Y
  int years_per_epoch = 0; // years per epoch
  int hours_per_day = 0;   // T
  int total_years() const { return epochs * years_per_epoch; }
};

enum class Sector { Chemical = 0, Transport = 1, Heating = 2 };
inline constexpr int kNumSectors = 3;
const char* sector_name(int u);

// Hydrogen rate of one facility as a function of its power draw,
// m = a*P^2 + b*P + c  [kg/h, P in MW]. Concave (a <= 0).
struct ConversionCurve {
  double a = 0, b = 0, c = 0;
  double value(double p_mw) const { return (a * p_mw + b) * p_mw + c; }
  double slope(double p_mw) const { return 2 * a * p_mw + b; }
};

struct P2GTechnology {
  int facilities_per_farm = 0;   // N per farm
  double p_min_mw = 0;           // min power, ON status
  double p_max_mw = 0;           // max power, ON status
  double ramp_mw_per_h = 0;      // per-facility ramp limit
  double p_boot_mw = 0;          // constant draw while booting
  double boot_cost_rmb = 0;      // per boot event
  int lifetime_years = 0;
  int lifetime_epochs = 0;       // derived: ceil(lifetime_years / years_per_epoch)
  double fixed_opex_ratio = 0;
  ConversionCurve conversion;
  double farm_capacity_mw() const { return facilities_per_farm * p_max_mw; }
};

struct SourceRegion {
  std::string id;
  std::vector<double> wt_cap_epoch_mw;     // per-epoch new-build cap
  std::vector<double> pv_cap_epoch_mw;
  std::vector<double> joint_cap_epoch_mw;
  double wt_cap_total_mw = 0;
  double pv_cap_total_mw = 0;
  double joint_cap_total_mw = 0;
  std::vector<int> max_new_farms;          // per epoch
  std::vector<int> max_online_farms;       // per epoch
  std::array<std::vector<double>, kNumSectors> sector_caps_kg;  // per-epoch annual caps
  double err_scale_wt_mw = 0;  // converts per-unit forecast-error stats to MW
  double err_scale_pv_mw = 0;
};

struct DemandRegion {
  std::string id;
  std::string load_profile_ref;
  std::array<std::vector<double>, kNumSectors> sector_caps_kg;
  std::optional<double> demand_multiplier_cap;
};

enum class CorridorKind { Hvdc, Hp };

struct Corridor {
  CorridorKind kind = CorridorKind::Hvdc;
  std::string from, to;
  int from_idx = -1, to_idx = -1;      // resolved region indices
  std::vector<int> lines_per_epoch;
  int lines_total = 0;
  double capex_rmb_per_line = 0;
  double capacity_mw_per_line = 0;     // HVDC only
  double inflow_cap_kg_h_per_line = 0; // HP only
  double storage_cap_kg_per_line = 0;  // HP only
  double fixed_opex_ratio = 0;
};

struct CostPair {
  double first = 0, last = 0;  // epoch-1 and epoch-Y values; linear in between
};

enum class CostItem {
  WtCapexPerKw,
  PvCapexPerKw,
  P2gCapexPerKw,
  ElectricityPerKwh,
  H2SourceChemical,
  H2SourceTransport,
  H2SourceHeating,
  H2DemandChemical,
  H2DemandTransport,
  H2DemandHeating,
};

struct CostSchedule {
  CostPair wt, pv, p2g, electricity;
  std::array<CostPair, kNumSectors> h2_source;
  std::array<CostPair, kNumSectors> h2_demand;
  double wt_fixed_opex_ratio = 0;
  double pv_fixed_opex_ratio = 0;
  const CostPair& item(CostItem it) const;
};

struct UncertaintySettings {
  double epsilon = 0.1;             // chance-constraint violation budget
  double lhv_kwh_per_kg = 33.33;    // hydrogen energy equivalent for reporting
};

struct ProfileRefs {
  std::string wt, pv, load;  // csv paths relative to the deck
};

struct SystemConfig {
  PlanningHorizon horizon;
  double discount_rate = 0;
  std::vector<SourceRegion> sources;
  std::vector<DemandRegion> demands;
  std::vector<Corridor> corridors;
  P2GTechnology p2g;
  CostSchedule costs;
  UncertaintySettings uncertainty;
  ProfileRefs profiles;
  std::string base_dir;  // directory of the deck; profile paths resolve against it

  std::string profile_path(const std::string& rel) const;
  std::vector<int> hvdc_corridors() const;
  std::vector<int> hp_corridors() const;
};

// Present-value factors. alpha[y-1] = 1/(1+r)^y for years 1..total;
// beta[e-1] sums alpha over epoch e's years.
struct DiscountModel {
  double rate = 0;
  std::vector<double> alpha;
  std::vector<double> beta;
  // alpha index (0-based into `alpha`) of the first year of epoch e (1-based).
  int epoch_start_year_index(int e, const PlanningHorizon& h) const {
    return (e - 1) * h.years_per_epoch;
  }
};

SystemConfig load_config(const std::string& path);
SystemConfig parse_config_json(const std::string& json_text, const std::string& base_dir);
std::string config_to_json(const SystemConfig& cfg);

// Linear interpolation of a cost item over the epoch axis [1, Y].
// `epoch` may be fractional (used by consistency checks).
double interpolate_cost(const CostSchedule& costs, CostItem item, double epoch, int epochs);

DiscountModel discount_factors(double rate, const PlanningHorizon& horizon);

}  // namespace hyplan
