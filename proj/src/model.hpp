#pragma once

#include <map>
#include <string>
#include <unordered_map>
#include <vector>

namespace hyplan {

enum class VarKind { Continuous, Binary, Integer };
enum class RowSense { LE, GE, EQ };

constexpr double kInf = 1e30;  // bound sentinel; anything >= this is "no bound"

struct LinTerm {
  int col = -1;
  double coef = 0;
};

struct LinExpr {
  std::vector<LinTerm> terms;
  double constant = 0;
  LinExpr& add(int col, double coef) {
    if (coef != 0.0) terms.push_back({col, coef});
    return *this;
  }
};

struct VarDef {
  std::string name;
  double lb = 0, ub = kInf;
  VarKind kind = VarKind::Continuous;
  double obj = 0;
  int beta_of = -1;  // column whose uncertainty response this variable is
};

struct RowDef {
  std::string tag;  // constraint family, e.g. "hvdc_cap"
  RowSense sense = RowSense::LE;
  double rhs = 0;
  std::vector<LinTerm> terms;
};

// ||vec|| <= scale * bound, bound >= 0 implied (and emitted as a linear row
// at build time so the relaxation carries it).
struct ConeDef {
  std::string tag;
  double scale = 1;
  std::vector<LinExpr> vec;
  LinExpr bound;
};

struct ModelStats {
  int vars = 0, continuous = 0, binary = 0, integer = 0;
  int rows = 0, eq_rows = 0, ineq_rows = 0;
  int cones = 0;
  long long nnz = 0;
  std::map<std::string, int> rows_by_tag;
  std::map<std::string, int> cones_by_tag;
  bool operator==(const ModelStats&) const = default;
};

struct PlanningModel {
  std::vector<VarDef> vars;
  std::vector<RowDef> rows;
  std::vector<ConeDef> cones;
  double obj_constant = 0;

  int add_var(std::string name, double lb, double ub, VarKind kind, double obj = 0);
  int add_beta_var(std::string name, int of_col);  // free response twin
  void add_row(std::string tag, RowSense sense, double rhs, std::vector<LinTerm> terms);
  void add_cone(ConeDef cone);

  int num_vars() const { return int(vars.size()); }
  int find_var(const std::string& name) const;  // -1 if absent

  double eval(const LinExpr& e, const std::vector<double>& x) const;
  double row_activity(const RowDef& r, const std::vector<double>& x) const;

  ModelStats stats() const;

  std::string export_text() const;
  static PlanningModel import_text(const std::string& text);

private:
  mutable std::unordered_map<std::string, int> name_index_;  // lazy
};

}  // namespace hyplan
