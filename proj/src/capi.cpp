#include "hyplan.h"

#include <algorithm>
#include <cstdlib>
#include <cstring>
#include <sstream>
#include <string>

#include "assembly.hpp"
#include "config.hpp"
#include "econ.hpp"
#include "scenario.hpp"
#include "solver.hpp"
#include "util.hpp"

using namespace hyplan;

struct hyp_config {
  SystemConfig cfg;
};
struct hyp_scenarios {
  ScenarioSet scen;
};
struct hyp_moments {
  MomentModel mom;
};
struct hyp_model {
  ModelBundle bundle;
  SystemConfig cfg;      // snapshot used at build time
  ScenarioSet scen;
};
struct hyp_solution {
  SolveReport report;
  PlanReport plan;
  // kept for value/trace exports
  const hyp_model* model = nullptr;
};

namespace {

thread_local std::string g_last_error;

hyp_status to_status(const HypError& e) {
  g_last_error = e.what();
  switch (e.code()) {
    case ErrorCode::Validation: return HYP_ERR_VALIDATION;
    case ErrorCode::Solve: return HYP_ERR_SOLVE;
    case ErrorCode::Io: return HYP_ERR_IO;
    case ErrorCode::Invalid: return HYP_ERR_INVALID;
  }
  return HYP_ERR_INVALID;
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

template <typename F>
hyp_status guarded(F&& f) {
  try {
    f();
    return HYP_OK;
  } catch (const HypError& e) {
    return to_status(e);
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return HYP_ERR_INVALID;
  }
}

BuildOptions build_options(const SystemConfig& cfg, const hyp_options* opt) {
  BuildOptions b;
  if (opt) {
    b.drcc = opt->use_drcc != 0;
    b.epsilon = opt->epsilon > 0 ? opt->epsilon : cfg.uncertainty.epsilon;
    b.relax_integers = opt->relax_integers != 0;
    b.quadratic_hydrogen = opt->quadratic_hydrogen != 0;
    if (opt->envelope_pieces > 1) b.envelope_pieces = opt->envelope_pieces;
  } else {
    b.epsilon = cfg.uncertainty.epsilon;
  }
  return b;
}

SolveOptions solve_options(const hyp_options* opt) {
  SolveOptions s;
  if (opt) {
    if (opt->gap_tol > 0) s.gap_tol = opt->gap_tol;
    if (opt->int_tol > 0) s.int_tol = opt->int_tol;
    if (opt->time_limit_s > 0) s.time_limit_s = opt->time_limit_s;
    if (opt->node_limit > 0) s.node_limit = opt->node_limit;
    s.planning_priority = opt->planning_priority != 0;
  }
  return s;
}

}  // namespace

extern "C" {

const char* hyp_version(void) { return "1.0.0"; }

const char* hyp_last_error(void) { return g_last_error.c_str(); }

void hyp_string_free(char* s) { std::free(s); }

void hyp_options_init(hyp_options* opt) {
  if (!opt) return;
  opt->use_drcc = 1;
  opt->epsilon = 0;  // deck default
  opt->relax_integers = 0;
  opt->quadratic_hydrogen = 0;
  opt->envelope_pieces = 5;
  opt->gap_tol = 1e-4;
  opt->int_tol = 1e-6;
  opt->time_limit_s = 0;
  opt->node_limit = 0;
  opt->planning_priority = 0;
  opt->seed = 20240501;
}

hyp_status hyp_config_load(const char* path, hyp_config** out) {
  return guarded([&] {
    auto* h = new hyp_config{load_config(path)};
    *out = h;
  });
}

hyp_status hyp_config_parse(const char* json_text, const char* base_dir, hyp_config** out) {
  return guarded([&] {
    auto* h = new hyp_config{parse_config_json(json_text, base_dir ? base_dir : "")};
    *out = h;
  });
}

hyp_status hyp_config_to_json(const hyp_config* cfg, char** out_json) {
  return guarded([&] { *out_json = dup_string(config_to_json(cfg->cfg)); });
}

void hyp_config_free(hyp_config* cfg) { delete cfg; }

hyp_status hyp_audit_json(const hyp_config* cfg, int scenario_count, uint64_t seed,
                          char** out_json) {
  return guarded([&] {
    auto days = load_profile_days(cfg->cfg);
    int S = std::min<int>(scenario_count, int(days.size()));
    ScenarioSet scen = cluster_typical_days(days, S, seed);
    MomentModel mom = estimate_moments(days, scen);
    BuildOptions b;
    b.epsilon = cfg->cfg.uncertainty.epsilon;
    ModelBundle bundle = build_model(cfg->cfg, scen, mom, b);
    ModelStats actual = bundle.model.stats();
    ModelStats predicted = predict_stats(cfg->cfg, S, b);
    std::string diff;
    bool ok = stats_match(predicted, actual, &diff);
    std::ostringstream out;
    out << "{\n  \"profile_days\": " << days.size() << ",\n  \"scenario_count\": " << S
        << ",\n  \"vars\": " << actual.vars << ",\n  \"rows\": " << actual.rows
        << ",\n  \"cones\": " << actual.cones << ",\n  \"counts_match\": "
        << (ok ? "true" : "false") << "\n}\n";
    *out_json = dup_string(out.str());
    if (!ok) fail_validation("count audit mismatch:\n" + diff);
  });
}

hyp_status hyp_cluster(const hyp_config* cfg, int scenario_count, uint64_t seed,
                       hyp_scenarios** out_scen, hyp_moments** out_mom) {
  return guarded([&] {
    auto days = load_profile_days(cfg->cfg);
    ScenarioSet scen = cluster_typical_days(days, scenario_count, seed);
    MomentModel mom = estimate_moments(days, scen);
    *out_scen = new hyp_scenarios{std::move(scen)};
    *out_mom = new hyp_moments{std::move(mom)};
  });
}

hyp_status hyp_scenarios_save(const hyp_scenarios* s, const char* path) {
  return guarded([&] { write_file(path, scenarios_to_json(s->scen)); });
}

hyp_status hyp_scenarios_load(const char* path, hyp_scenarios** out) {
  return guarded([&] { *out = new hyp_scenarios{scenarios_from_json(read_file(path))}; });
}

hyp_status hyp_moments_save(const hyp_moments* m, const char* path) {
  return guarded([&] { write_file(path, moments_to_json(m->mom)); });
}

hyp_status hyp_moments_load(const char* path, hyp_moments** out) {
  return guarded([&] { *out = new hyp_moments{moments_from_json(read_file(path))}; });
}

void hyp_scenarios_free(hyp_scenarios* s) { delete s; }
void hyp_moments_free(hyp_moments* m) { delete m; }

hyp_status hyp_build(const hyp_config* cfg, const hyp_scenarios* scen, const hyp_moments* mom,
                     const hyp_options* opt, hyp_model** out) {
  return guarded([&] {
    BuildOptions b = build_options(cfg->cfg, opt);
    auto* h = new hyp_model{build_model(cfg->cfg, scen->scen, mom->mom, b), cfg->cfg, scen->scen};
    *out = h;
  });
}

hyp_status hyp_model_stats_json(const hyp_model* model, char** out_json) {
  return guarded([&] {
    ModelStats st = model->bundle.model.stats();
    std::ostringstream out;
    out << "{\n  \"vars\": " << st.vars << ",\n  \"continuous\": " << st.continuous
        << ",\n  \"binary\": " << st.binary << ",\n  \"integer\": " << st.integer
        << ",\n  \"rows\": " << st.rows << ",\n  \"eq_rows\": " << st.eq_rows
        << ",\n  \"ineq_rows\": " << st.ineq_rows << ",\n  \"cones\": " << st.cones
        << ",\n  \"nnz\": " << st.nnz << "\n}\n";
    *out_json = dup_string(out.str());
  });
}

hyp_status hyp_model_export_text(const hyp_model* model, char** out_text) {
  return guarded([&] { *out_text = dup_string(model->bundle.model.export_text()); });
}

void hyp_model_free(hyp_model* model) { delete model; }

hyp_status hyp_solve(hyp_model* model, const hyp_options* opt, hyp_solution** out) {
  return guarded([&] {
    MisocpSolver solver(model->bundle.model);
    SolveReport rep = solver.branch_and_bound(solve_options(opt));
    if (rep.reason == TermReason::Error)
      fail_solve("solver failed: numerical breakdown in the relaxation");
    auto* sol = new hyp_solution;
    sol->report = std::move(rep);
    sol->model = model;
    if (sol->report.has_incumbent)
      sol->plan = compute_plan_report(model->bundle, model->cfg, model->scen,
                                      sol->report.incumbent);
    *out = sol;
  });
}

hyp_status hyp_solution_solve_report_json(const hyp_solution* sol, char** out_json) {
  return guarded([&] { *out_json = dup_string(solve_report_json(sol->report)); });
}

hyp_status hyp_solution_plan_report_json(const hyp_solution* sol, char** out_json) {
  return guarded([&] {
    if (!sol->report.has_incumbent) fail_solve("no incumbent: plan report unavailable");
    *out_json = dup_string(plan_report_json(sol->plan));
  });
}

hyp_status hyp_solution_plan_report_csv(const hyp_solution* sol, char** out_csv) {
  return guarded([&] {
    if (!sol->report.has_incumbent) fail_solve("no incumbent: plan report unavailable");
    *out_csv = dup_string(plan_report_csv(sol->plan));
  });
}

hyp_status hyp_solution_plotdata_csv(const hyp_solution* sol, char** out_csv) {
  return guarded([&] {
    if (!sol->report.has_incumbent) fail_solve("no incumbent: dispatch traces unavailable");
    *out_csv = dup_string(plotdata_csv(sol->model->bundle, sol->model->cfg, sol->model->scen,
                                       sol->report.incumbent));
  });
}

hyp_status hyp_solution_values_text(const hyp_solution* sol, char** out_text) {
  return guarded([&] {
    if (!sol->report.has_incumbent) fail_solve("no incumbent: solution values unavailable");
    *out_text = dup_string(solution_values_text(sol->model->bundle.model, sol->report.incumbent));
  });
}

double hyp_solution_wall_time_s(const hyp_solution* sol) { return sol->report.wall_time_s; }

void hyp_solution_free(hyp_solution* sol) { delete sol; }

hyp_status hyp_sweep_json(const hyp_config* cfg, const hyp_scenarios* scen,
                          const hyp_moments* mom, const char* axis, const char* grid,
                          const hyp_options* opt, char** out_json, char** out_csv) {
  return guarded([&] {
    SweepRequest req;
    req.axis = axis ? axis : "";
    std::string g = grid ? grid : "";
    size_t pos = 0;
    while (pos <= g.size()) {
      size_t comma = g.find(',', pos);
      if (comma == std::string::npos) comma = g.size();
      std::string label = g.substr(pos, comma - pos);
      if (!label.empty()) req.grid.push_back(label);
      pos = comma + 1;
    }
    if (req.grid.empty()) fail_invalid("sweep: empty grid");
    req.build = build_options(cfg->cfg, opt);
    req.solve = solve_options(opt);
    req.seed = opt ? opt->seed : 20240501;
    SweepTable table = sensitivity_sweep(cfg->cfg, scen->scen, mom->mom, req);
    if (out_json) *out_json = dup_string(sweep_json(table));
    if (out_csv) *out_csv = dup_string(sweep_csv(table));
  });
}

hyp_status hyp_sha256_file(const char* path, char out_hex[65]) {
  return guarded([&] {
    std::string h = sha256_file(path);
    std::memcpy(out_hex, h.c_str(), 65);
  });
}

}  // extern "C"
