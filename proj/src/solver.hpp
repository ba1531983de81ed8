#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "lp.hpp"
#include "model.hpp"

namespace hyplan {

struct SolveOptions {
  double gap_tol = 1e-4;
  double int_tol = 1e-6;
  double cut_tol = 1e-6;
  double feas_tol = 1e-6;
  double time_limit_s = 0;  // 0: no limit
  long node_limit = 0;      // 0: no limit
  long max_cut_rounds = 200;
  bool planning_priority = false;  // branch build binaries before commitment counts
  std::vector<uint8_t> warm_basis;
};

enum class TermReason { Optimal, GapReached, TimeLimit, NodeLimit, Infeasible, Unbounded, Error };

const char* term_reason_name(TermReason r);

struct SolveReport {
  TermReason reason = TermReason::Error;
  bool has_incumbent = false;
  std::vector<double> incumbent;
  double incumbent_obj = std::numeric_limits<double>::infinity();
  double best_bound = -std::numeric_limits<double>::infinity();
  double gap = std::numeric_limits<double>::infinity();
  long nodes = 0;
  long cuts = 0;
  long lp_iterations = 0;
  double wall_time_s = 0;  // reporting only; never serialized canonically
  std::vector<double> bound_history;  // global bound after each processed node
  std::vector<uint8_t> final_basis;
};

struct RelaxationSolution {
  LpStatus status = LpStatus::NumericalFailure;
  double objective = 0;
  std::vector<double> x;  // structural variable values
  double max_cone_violation = 0;
  double max_linear_residual = 0;
  long iterations = 0;
};

struct ResidualReport {
  double linear = 0;
  double cone = 0;
  double integrality = 0;
  double bounds = 0;
  double worst() const { return std::max(std::max(linear, cone), std::max(integrality, bounds)); }
  bool pass(double tol) const { return worst() <= tol; }
};

// Residuals of a candidate solution against the full model (relative to
// 1 + |rhs| per row, absolute for integrality).
ResidualReport check_feasibility(const PlanningModel& model, const std::vector<double>& x,
                                 double int_tol = 1e-6);

class MisocpSolver {
public:
  explicit MisocpSolver(const PlanningModel& model);

  // Linear relaxation under the current cut set.
  RelaxationSolution solve_relaxation();
  // Tangent cuts for cones violated at x; returns the number added.
  int separate_soc_cuts(const std::vector<double>& x, double tol);
  // Relaxation + separation until cone-clean (or round limit).
  RelaxationSolution solve_relaxation_with_cuts(const SolveOptions& opt);

  SolveReport branch_and_bound(const SolveOptions& opt);

  long cut_count() const { return cuts_added_; }
  std::vector<uint8_t> basis_snapshot() const { return lp_.basis_snapshot(); }

private:
  const PlanningModel& model_;
  LpSolver lp_;
  LpLimits lp_limits_;
  std::vector<int> int_cols_;
  std::vector<std::pair<double, double>> root_bounds_;  // per int col
  std::vector<bool> is_planning_;                       // per int col: binary build decision
  long cuts_added_ = 0;

  std::vector<double> extract_x() const;
  int pick_branch_var(const std::vector<double>& x, const SolveOptions& opt) const;
};

}  // namespace hyplan
