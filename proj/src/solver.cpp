#include "solver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>
#include <queue>

#include "util.hpp"

namespace hyplan {

const char* term_reason_name(TermReason r) {
  switch (r) {
    case TermReason::Optimal: return "optimal";
    case TermReason::GapReached: return "gap_reached";
    case TermReason::TimeLimit: return "time_limit";
    case TermReason::NodeLimit: return "node_limit";
    case TermReason::Infeasible: return "infeasible";
    case TermReason::Unbounded: return "unbounded";
    case TermReason::Error: return "error";
  }
  return "?";
}

ResidualReport check_feasibility(const PlanningModel& model, const std::vector<double>& x,
                                 double int_tol) {
  if (x.size() != model.vars.size())
    fail_invalid("feasibility check: value vector does not cover every variable");
  ResidualReport rep;
  for (const auto& r : model.rows) {
    double act = model.row_activity(r, x);
    double rel = 1.0 + std::abs(r.rhs);
    double v = 0;
    switch (r.sense) {
      case RowSense::LE: v = (act - r.rhs) / rel; break;
      case RowSense::GE: v = (r.rhs - act) / rel; break;
      case RowSense::EQ: v = std::abs(act - r.rhs) / rel; break;
    }
    rep.linear = std::max(rep.linear, v);
  }
  for (const auto& c : model.cones) {
    double nrm = 0;
    for (const auto& e : c.vec) {
      double v = model.eval(e, x);
      nrm += v * v;
    }
    nrm = std::sqrt(nrm);
    double b = c.scale * model.eval(c.bound, x);
    rep.cone = std::max(rep.cone, (nrm - b) / (1.0 + std::abs(b)));
  }
  for (size_t j = 0; j < model.vars.size(); ++j) {
    const VarDef& v = model.vars[j];
    double rel = 1.0 + std::abs(x[j]);
    if (v.lb > -kInf) rep.bounds = std::max(rep.bounds, (v.lb - x[j]) / rel);
    if (v.ub < kInf) rep.bounds = std::max(rep.bounds, (x[j] - v.ub) / rel);
    if (v.kind != VarKind::Continuous)
      rep.integrality = std::max(rep.integrality, std::abs(x[j] - std::round(x[j])));
  }
  rep.linear = std::max(rep.linear, 0.0);
  rep.cone = std::max(rep.cone, 0.0);
  rep.bounds = std::max(rep.bounds, 0.0);
  return rep;
}

MisocpSolver::MisocpSolver(const PlanningModel& model) : model_(model) {
  for (int j = 0; j < model.num_vars(); ++j) {
    const VarDef& v = model.vars[size_t(j)];
    lp_.add_col(v.lb <= -kInf ? -1e30 : v.lb, v.ub >= kInf ? 1e30 : v.ub, v.obj);
    if (v.kind != VarKind::Continuous) {
      int_cols_.push_back(j);
      root_bounds_.push_back({v.lb, v.ub});
      is_planning_.push_back(v.kind == VarKind::Binary);
    }
  }
  for (const auto& r : model.rows) {
    std::vector<std::pair<int, double>> terms;
    terms.reserve(r.terms.size());
    for (const auto& t : r.terms) terms.push_back({t.col, t.coef});
    double lo = -1e30, hi = 1e30;
    switch (r.sense) {
      case RowSense::LE: hi = r.rhs; break;
      case RowSense::GE: lo = r.rhs; break;
      case RowSense::EQ: lo = hi = r.rhs; break;
    }
    lp_.add_row(lo, hi, terms);
  }
  lp_limits_.max_iters = 4000000;
}

std::vector<double> MisocpSolver::extract_x() const {
  std::vector<double> x(size_t(model_.num_vars()));
  for (int j = 0; j < model_.num_vars(); ++j) x[size_t(j)] = lp_.col_value(j);
  return x;
}

RelaxationSolution MisocpSolver::solve_relaxation() {
  RelaxationSolution sol;
  LpResult r = lp_.solve(lp_limits_);
  sol.status = r.status;
  sol.iterations = r.iterations;
  if (r.status != LpStatus::Optimal) return sol;
  sol.objective = r.objective + model_.obj_constant;
  sol.x = extract_x();
  for (const auto& row : model_.rows) {
    double act = model_.row_activity(row, sol.x);
    double rel = 1.0 + std::abs(row.rhs);
    double v = row.sense == RowSense::LE   ? (act - row.rhs) / rel
               : row.sense == RowSense::GE ? (row.rhs - act) / rel
                                           : std::abs(act - row.rhs) / rel;
    sol.max_linear_residual = std::max(sol.max_linear_residual, v);
  }
  for (const auto& c : model_.cones) {
    double nrm = 0;
    for (const auto& e : c.vec) {
      double v = model_.eval(e, sol.x);
      nrm += v * v;
    }
    nrm = std::sqrt(nrm);
    double b = c.scale * model_.eval(c.bound, sol.x);
    sol.max_cone_violation = std::max(sol.max_cone_violation, (nrm - b) / (1.0 + std::abs(b)));
  }
  return sol;
}

int MisocpSolver::separate_soc_cuts(const std::vector<double>& x, double tol) {
  int added = 0;
  for (const auto& c : model_.cones) {
    std::vector<double> v(c.vec.size());
    double nrm = 0;
    for (size_t d = 0; d < c.vec.size(); ++d) {
      v[d] = model_.eval(c.vec[d], x);
      nrm += v[d] * v[d];
    }
    nrm = std::sqrt(nrm);
    double b = c.scale * model_.eval(c.bound, x);
    if (nrm - b <= tol * (1.0 + std::abs(b)) || nrm <= 1e-14) continue;
    // tangent at v: (v/||v||)' vec(x) <= scale * bound(x)
    std::map<int, double> terms;
    double rhs = c.scale * c.bound.constant;
    for (size_t d = 0; d < c.vec.size(); ++d) {
      double u = v[d] / nrm;
      if (u == 0.0) continue;
      for (const auto& t : c.vec[d].terms) terms[t.col] += u * t.coef;
      rhs -= u * c.vec[d].constant;
    }
    for (const auto& t : c.bound.terms) terms[t.col] -= c.scale * t.coef;
    std::vector<std::pair<int, double>> row;
    row.reserve(terms.size());
    for (const auto& [col, coef] : terms)
      if (coef != 0.0) row.push_back({col, coef});
    lp_.add_row(-1e30, rhs, row);
    ++added;
  }
  cuts_added_ += added;
  return added;
}

RelaxationSolution MisocpSolver::solve_relaxation_with_cuts(const SolveOptions& opt) {
  RelaxationSolution sol;
  for (long round = 0; round <= opt.max_cut_rounds; ++round) {
    sol = solve_relaxation();
    if (sol.status != LpStatus::Optimal) return sol;
    if (model_.cones.empty()) return sol;
    int added = separate_soc_cuts(sol.x, opt.cut_tol);
    if (added == 0) return sol;
  }
  return sol;  // round limit: return last relaxation (still a valid bound)
}

int MisocpSolver::pick_branch_var(const std::vector<double>& x, const SolveOptions& opt) const {
  int best = -1;
  double best_dist = 0;
  double best_obj = 0;
  bool best_planning = false;
  for (size_t k = 0; k < int_cols_.size(); ++k) {
    int j = int_cols_[k];
    double frac = x[size_t(j)] - std::floor(x[size_t(j)]);
    double dist = std::min(frac, 1.0 - frac);
    if (dist <= opt.int_tol) continue;
    double oc = std::abs(model_.vars[size_t(j)].obj);
    bool planning = is_planning_[k];
    bool better;
    if (best < 0) {
      better = true;
    } else if (opt.planning_priority && planning != best_planning) {
      better = planning;
    } else if (std::abs(dist - best_dist) > 1e-9) {
      better = dist > best_dist;
    } else if (oc != best_obj) {
      better = oc > best_obj;
    } else {
      better = false;  // lowest index wins (scan order)
    }
    if (better) {
      best = j;
      best_dist = dist;
      best_obj = oc;
      best_planning = planning;
    }
  }
  return best;
}

namespace {

struct BnbNode {
  long id = 0;
  double bound = -std::numeric_limits<double>::infinity();
  int depth = 0;
  std::vector<std::pair<int, std::pair<double, double>>> changes;  // col -> (lb, ub)
  std::vector<uint8_t> basis;
};

struct NodeOrder {
  bool operator()(const BnbNode& a, const BnbNode& b) const {
    if (a.bound != b.bound) return a.bound > b.bound;  // min-heap on bound
    return a.id > b.id;
  }
};

}  // namespace

SolveReport MisocpSolver::branch_and_bound(const SolveOptions& opt) {
  SolveReport rep;
  const auto t0 = std::chrono::steady_clock::now();
  auto elapsed = [&] {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  };
  const double inf = std::numeric_limits<double>::infinity();

  if (!opt.warm_basis.empty()) lp_.restore_basis(opt.warm_basis);

  std::priority_queue<BnbNode, std::vector<BnbNode>, NodeOrder> open;
  long next_id = 0;
  open.push(BnbNode{next_id++, -inf, 0, {}, {}});

  auto apply_node = [&](const BnbNode& node) {
    for (size_t k = 0; k < int_cols_.size(); ++k)
      lp_.set_col_bounds(int_cols_[k], root_bounds_[k].first, root_bounds_[k].second);
    for (const auto& [col, bb] : node.changes) lp_.set_col_bounds(col, bb.first, bb.second);
    if (!node.basis.empty()) lp_.restore_basis(node.basis);
  };

  double incumbent_obj = inf;
  std::vector<double> incumbent;
  double global_bound = -inf;
  bool done = false;

  auto gap_of = [&](double bound) {
    if (!std::isfinite(incumbent_obj)) return inf;
    return (incumbent_obj - bound) / std::max(1.0, std::abs(incumbent_obj));
  };
  auto prune_cutoff = [&] {
    return incumbent_obj - opt.gap_tol * std::max(1.0, std::abs(incumbent_obj));
  };

  while (!open.empty() && !done) {
    if (opt.time_limit_s > 0 && elapsed() > opt.time_limit_s) {
      rep.reason = TermReason::TimeLimit;
      done = true;
      break;
    }
    if (opt.node_limit > 0 && rep.nodes >= opt.node_limit) {
      rep.reason = TermReason::NodeLimit;
      done = true;
      break;
    }

    BnbNode node = open.top();
    open.pop();

    // the heap is ordered by bound, so the popped node carries the weakest bound
    global_bound = std::max(global_bound, std::min(node.bound, incumbent_obj));

    if (node.bound >= prune_cutoff()) {
      // best-first order: every remaining node is fathomed too
      global_bound = std::max(global_bound, std::min(node.bound, incumbent_obj));
      rep.reason = TermReason::GapReached;
      ++rep.nodes;
      rep.bound_history.push_back(global_bound);
      done = true;
      break;
    }

    apply_node(node);
    RelaxationSolution sol = solve_relaxation_with_cuts(opt);
    ++rep.nodes;
    rep.lp_iterations += sol.iterations;

    if (sol.status == LpStatus::Unbounded) {
      rep.reason = rep.nodes == 1 ? TermReason::Unbounded : TermReason::Error;
      rep.bound_history.push_back(global_bound);
      done = true;
      break;
    }
    if (sol.status == LpStatus::Infeasible) {
      rep.bound_history.push_back(global_bound);
      continue;
    }
    if (sol.status != LpStatus::Optimal) {
      rep.reason = TermReason::Error;
      rep.bound_history.push_back(global_bound);
      done = true;
      break;
    }

    const double node_bound = std::max(sol.objective, node.bound);
    rep.bound_history.push_back(global_bound);

    if (node_bound >= prune_cutoff()) continue;

    int branch_col = pick_branch_var(sol.x, opt);
    if (branch_col < 0) {
      // integral and cone-clean: candidate incumbent
      ResidualReport rr = check_feasibility(model_, sol.x, opt.int_tol);
      if (rr.pass(std::max(opt.feas_tol, opt.cut_tol) * 10) &&
          sol.objective < incumbent_obj - 1e-12) {
        incumbent_obj = sol.objective;
        incumbent = sol.x;
        rep.final_basis = lp_.basis_snapshot();
      }
      continue;
    }

    std::vector<uint8_t> basis = lp_.basis_snapshot();
    const double xv = sol.x[size_t(branch_col)];
    const double fl = std::floor(xv), ce = std::ceil(xv);
    for (int side = 0; side < 2; ++side) {
      BnbNode child;
      child.id = next_id++;
      child.depth = node.depth + 1;
      child.bound = node_bound;
      child.changes = node.changes;
      child.basis = basis;
      double lo = model_.vars[size_t(branch_col)].lb, hi = model_.vars[size_t(branch_col)].ub;
      bool found = false;
      for (auto& [col, bb] : child.changes) {
        if (col != branch_col) continue;
        lo = bb.first;
        hi = bb.second;
        if (side == 0) bb.second = fl;
        else bb.first = ce;
        found = true;
        break;
      }
      if (!found)
        child.changes.push_back(
            {branch_col, side == 0 ? std::make_pair(lo, fl) : std::make_pair(ce, hi)});
      const double clo = side == 0 ? lo : ce;
      const double chi = side == 0 ? fl : hi;
      if (clo <= chi + 1e-9) open.push(std::move(child));
    }
  }

  if (!done) {
    // queue exhausted
    if (std::isfinite(incumbent_obj)) {
      global_bound = incumbent_obj;
      rep.reason = TermReason::Optimal;
    } else {
      rep.reason = TermReason::Infeasible;
    }
  }

  rep.has_incumbent = std::isfinite(incumbent_obj);
  if (rep.has_incumbent) {
    rep.incumbent = std::move(incumbent);
    rep.incumbent_obj = incumbent_obj;
  }
  rep.best_bound = global_bound;
  rep.gap = gap_of(global_bound);
  rep.cuts = cuts_added_;
  rep.wall_time_s = elapsed();
  double run = -inf;
  for (double& b : rep.bound_history) {
    run = std::max(run, b);
    b = run;
  }
  return rep;
}

}  // namespace hyplan
