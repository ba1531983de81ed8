// hyplan command-line front end. Links only the C API.

#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "hyplan.h"

namespace {

struct Freer {
  char* p = nullptr;
  ~Freer() { hyp_string_free(p); }
};

int fail(hyp_status st) {
  std::cerr << "error: " << hyp_last_error() << "\n";
  switch (st) {
    case HYP_ERR_VALIDATION: return 2;
    case HYP_ERR_SOLVE: return 3;
    case HYP_ERR_IO: return 4;
    default: return 2;
  }
}

std::string utc_now() {
  char buf[32];
  std::time_t t = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string json_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out;
}

class Manifest {
public:
  Manifest(std::string command, uint64_t seed) : command_(std::move(command)), seed_(seed) {}
  void add_input(const std::string& path) { inputs_.push_back(path); }
  void add_option(const std::string& k, const std::string& v) { options_.push_back({k, v}); }
  void add_output(const std::string& path) { outputs_.push_back(path); }

  bool write(const std::string& path) const {
    std::ostringstream j;
    j << "{\n";
    j << "  \"format\": \"hyplan-manifest/1\",\n";
    j << "  \"tool_version\": \"" << hyp_version() << "\",\n";
    j << "  \"command\": \"" << json_escape(command_) << "\",\n";
    j << "  \"created_utc\": \"" << utc_now() << "\",\n";
    j << "  \"seed\": " << seed_ << ",\n";
    j << "  \"options\": {";
    for (size_t i = 0; i < options_.size(); ++i) {
      if (i) j << ", ";
      j << "\"" << options_[i].first << "\": \"" << json_escape(options_[i].second) << "\"";
    }
    j << "},\n";
    auto file_list = [&](const std::vector<std::string>& files) {
      std::ostringstream o;
      for (size_t i = 0; i < files.size(); ++i) {
        char hex[65] = {0};
        if (hyp_sha256_file(files[i].c_str(), hex) != HYP_OK) return std::string();
        if (i) o << ",\n";
        o << "    {\"path\": \"" << json_escape(files[i]) << "\", \"sha256\": \"" << hex << "\"}";
      }
      return o.str();
    };
    j << "  \"inputs\": [\n" << file_list(inputs_) << "\n  ],\n";
    j << "  \"outputs\": [\n" << file_list(outputs_) << "\n  ]\n";
    j << "}\n";
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) return false;
    out << j.str();
    return bool(out);
  }

private:
  std::string command_;
  uint64_t seed_;
  std::vector<std::string> inputs_;
  std::vector<std::pair<std::string, std::string>> options_;
  std::vector<std::string> outputs_;
};

bool write_text(const std::string& path, const char* text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) return false;
  out << text;
  return bool(out);
}

std::string default_out_dir() {
  const char* env = std::getenv("HYPLAN_OUT_DIR");
  return env && *env ? env : ".";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Coordinated renewable / HVDC / P2G / hydrogen-pipeline planning"};
  app.require_subcommand(1);

  std::string deck, out_dir = default_out_dir();
  std::string scen_file, mom_file;
  int scenario_count = 4;
  hyp_options opt;
  hyp_options_init(&opt);
  bool no_drcc = false, relax = false, quad = false, write_solution = false, export_model = false;
  double epsilon = 0, gap = 1e-4, time_limit = 0;
  long node_limit = 0;
  uint64_t seed = opt.seed;
  std::string formats = "json,csv";
  std::string axis, grid;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("deck", deck, "input deck (json)")->required();
    cmd->add_option("--out-dir", out_dir, "output directory (env HYPLAN_OUT_DIR overrides the default)");
    cmd->add_option("--seed", seed, "seed for clustering and validation draws");
  };
  auto add_solve_flags = [&](CLI::App* cmd) {
    cmd->add_option("--scenarios", scen_file, "scenario file from 'cluster'");
    cmd->add_option("--moments", mom_file, "moment file from 'cluster'");
    cmd->add_option("-S,--scenario-count", scenario_count, "cluster inline with this many typical days");
    cmd->add_flag("--no-drcc", no_drcc, "drop chance constraints; nominal model");
    cmd->add_option("--epsilon", epsilon, "chance-constraint budget (default: deck value)");
    cmd->add_option("--gap", gap, "relative MIP gap tolerance");
    cmd->add_option("--time-limit", time_limit, "wall seconds per solve (0: none)");
    cmd->add_option("--node-limit", node_limit, "node cap (0: none)");
    cmd->add_flag("--relax-integers", relax, "relax per-hour ON/BOOTING counts");
    cmd->add_flag("--quadratic-h2", quad, "tangent-envelope hydrogen curve");
    cmd->add_flag("--planning-priority", opt.planning_priority, "branch build binaries first");
  };

  CLI::App* c_validate = app.add_subcommand("validate", "check a deck and audit model counts");
  add_common(c_validate);
  c_validate->add_option("-S,--scenario-count", scenario_count, "scenario count for the audit build");

  CLI::App* c_cluster = app.add_subcommand("cluster", "build typical days and error moments");
  add_common(c_cluster);
  c_cluster->add_option("-S,--scenario-count", scenario_count, "number of typical days")->required();

  CLI::App* c_solve = app.add_subcommand("solve", "assemble and optimize the plan");
  add_common(c_solve);
  add_solve_flags(c_solve);
  c_solve->add_option("--formats", formats, "comma list: json,csv,plotdata");
  c_solve->add_flag("--write-solution", write_solution, "dump variable values");
  c_solve->add_flag("--export-model", export_model, "dump the model exchange text");

  CLI::App* c_sweep = app.add_subcommand("sweep", "solve across a sensitivity axis");
  add_common(c_sweep);
  add_solve_flags(c_sweep);
  c_sweep->add_option("--axis", axis,
                      "scenario_count | epsilon | re_price_path | transport_demand_path")
      ->required();
  c_sweep->add_option("--grid", grid, "comma-separated grid labels")->required();

  CLI11_PARSE(app, argc, argv);

  opt.use_drcc = no_drcc ? 0 : 1;
  opt.epsilon = epsilon;
  opt.relax_integers = relax ? 1 : 0;
  opt.quadratic_hydrogen = quad ? 1 : 0;
  opt.gap_tol = gap;
  opt.time_limit_s = time_limit;
  opt.node_limit = node_limit;
  opt.seed = seed;

  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);

  hyp_config* cfg = nullptr;
  hyp_status st = hyp_config_load(deck.c_str(), &cfg);
  if (st != HYP_OK) return fail(st);

  std::string cmd_line;
  for (int i = 0; i < argc; ++i) {
    if (i) cmd_line += ' ';
    cmd_line += argv[i];
  }

  int rc = 0;
  if (c_validate->parsed()) {
    Freer diag;
    st = hyp_audit_json(cfg, scenario_count, seed, &diag.p);
    if (diag.p) std::cout << diag.p;
    if (st != HYP_OK) rc = fail(st);
    else std::cout << "deck ok\n";
  } else if (c_cluster->parsed()) {
    hyp_scenarios* scen = nullptr;
    hyp_moments* mom = nullptr;
    st = hyp_cluster(cfg, scenario_count, seed, &scen, &mom);
    if (st != HYP_OK) rc = fail(st);
    else {
      std::string sp = out_dir + "/scenarios.json";
      std::string mp = out_dir + "/moments.json";
      if ((st = hyp_scenarios_save(scen, sp.c_str())) != HYP_OK ||
          (st = hyp_moments_save(mom, mp.c_str())) != HYP_OK) {
        rc = fail(st);
      } else {
        Manifest man(cmd_line, seed);
        man.add_input(deck);
        man.add_option("scenario_count", std::to_string(scenario_count));
        man.add_output(sp);
        man.add_output(mp);
        if (!man.write(out_dir + "/manifest.json")) rc = 4;
        else std::cout << "wrote " << sp << ", " << mp << "\n";
      }
      hyp_scenarios_free(scen);
      hyp_moments_free(mom);
    }
  } else if (c_solve->parsed() || c_sweep->parsed()) {
    hyp_scenarios* scen = nullptr;
    hyp_moments* mom = nullptr;
    Manifest man(cmd_line, seed);
    man.add_input(deck);
    if (!scen_file.empty() && !mom_file.empty()) {
      if ((st = hyp_scenarios_load(scen_file.c_str(), &scen)) != HYP_OK ||
          (st = hyp_moments_load(mom_file.c_str(), &mom)) != HYP_OK)
        rc = fail(st);
      man.add_input(scen_file);
      man.add_input(mom_file);
    } else {
      if ((st = hyp_cluster(cfg, scenario_count, seed, &scen, &mom)) != HYP_OK) rc = fail(st);
      man.add_option("scenario_count", std::to_string(scenario_count));
    }
    if (rc == 0 && c_solve->parsed()) {
      hyp_model* model = nullptr;
      hyp_solution* sol = nullptr;
      if ((st = hyp_build(cfg, scen, mom, &opt, &model)) != HYP_OK) rc = fail(st);
      else if ((st = hyp_solve(model, &opt, &sol)) != HYP_OK) rc = fail(st);
      else {
        Freer rep;
        hyp_solution_solve_report_json(sol, &rep.p);
        std::cout << rep.p;
        std::cout << "wall_time_s " << hyp_solution_wall_time_s(sol) << "\n";
        auto want = [&](const char* f) { return formats.find(f) != std::string::npos; };
        auto emit = [&](const char* name, hyp_status (*fn)(const hyp_solution*, char**)) {
          Freer s;
          if ((st = fn(sol, &s.p)) != HYP_OK) return false;
          std::string path = out_dir + "/" + name;
          if (!write_text(path, s.p)) {
            st = HYP_ERR_IO;
            return false;
          }
          man.add_output(path);
          return true;
        };
        bool ok = emit("solve_report.json", hyp_solution_solve_report_json);
        if (ok && want("json")) ok = emit("plan_report.json", hyp_solution_plan_report_json);
        if (ok && want("csv")) ok = emit("plan_report.csv", hyp_solution_plan_report_csv);
        if (ok && want("plotdata")) ok = emit("plotdata.csv", hyp_solution_plotdata_csv);
        if (ok && write_solution) ok = emit("solution.txt", hyp_solution_values_text);
        if (ok && export_model) {
          Freer s;
          if ((st = hyp_model_export_text(model, &s.p)) == HYP_OK &&
              write_text(out_dir + "/model.txt", s.p)) {
            man.add_output(out_dir + "/model.txt");
          } else {
            ok = false;
          }
        }
        if (!ok) rc = fail(st == HYP_OK ? HYP_ERR_IO : st);
        else if (!man.write(out_dir + "/manifest.json")) rc = 4;
      }
      if (sol) hyp_solution_free(sol);
      if (model) hyp_model_free(model);
    } else if (rc == 0 && c_sweep->parsed()) {
      Freer js, cs;
      st = hyp_sweep_json(cfg, scen, mom, axis.c_str(), grid.c_str(), &opt, &js.p, &cs.p);
      if (st != HYP_OK) rc = fail(st);
      else {
        std::string jp = out_dir + "/sweep.json", cp = out_dir + "/sweep.csv";
        if (!write_text(jp, js.p) || !write_text(cp, cs.p)) rc = 4;
        else {
          man.add_option("axis", axis);
          man.add_option("grid", grid);
          man.add_output(jp);
          man.add_output(cp);
          if (!man.write(out_dir + "/manifest.json")) rc = 4;
          else std::cout << cs.p;
        }
      }
    }
    if (scen) hyp_scenarios_free(scen);
    if (mom) hyp_moments_free(mom);
  }

  hyp_config_free(cfg);
  return rc;
}
