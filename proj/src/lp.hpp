#pragma once

#include <cstdint>
#include <utility>
#include <vector>

namespace hyplan {

enum class LpStatus { Optimal, Infeasible, Unbounded, IterLimit, NumericalFailure };

// Nonbasic-at-zero for free columns is VStat::Free.
enum class VStat : uint8_t { Basic = 0, AtLower = 1, AtUpper = 2, Free = 3 };

struct LpLimits {
  long max_iters = 2000000;
  double feas_tol = 1e-7;
  double opt_tol = 1e-8;
};

struct LpResult {
  LpStatus status = LpStatus::NumericalFailure;
  double objective = 0;
  long iterations = 0;
};

// Bounded-variable LP in row-activity form:
//   min c'x   s.t.   lo_i <= a_i'x <= hi_i,   lb <= x <= ub.
// Columns [0, n) are structural, [n, n+m) are row activities. Bounded primal
// simplex (composite phase 1, Devex pricing) for cold starts; dual simplex
// for re-solves after bound changes and row additions. Basis factorizations
// are sparse LU with product-form eta updates in between.
class LpSolver {
public:
  int add_col(double lb, double ub, double obj);
  int add_row(double lo, double hi, const std::vector<std::pair<int, double>>& terms);
  void set_col_bounds(int j, double lb, double ub);  // structural or activity
  void set_obj(int j, double obj);

  int num_cols() const { return n_; }
  int num_rows() const { return m_; }
  int total() const { return n_ + m_; }

  LpResult solve(const LpLimits& lim);  // dual when warm + dual feasible, else primal

  double col_value(int j) const;   // structural or activity, unscaled
  double objective() const;
  double reduced_cost(int j) const;
  double row_dual(int i) const;

  std::vector<uint8_t> basis_snapshot() const;
  // Restores a snapshot; snapshots taken before rows were added are extended
  // with basic activities. Returns false if the snapshot cannot be applied.
  bool restore_basis(const std::vector<uint8_t>& snap);
  void reset_basis();

  long total_pivots() const { return pivots_; }

private:
  // problem data (scaled)
  int n_ = 0, m_ = 0;
  std::vector<std::vector<std::pair<int, double>>> cols_;  // structural columns, scaled
  std::vector<double> lb_, ub_, obj_;                      // over n_ + m_ (activities appended)
  std::vector<double> col_scale_, row_scale_;
  double obj_scale_ = 1.0;
  bool scaled_ = false;

  // basis state
  std::vector<VStat> stat_;
  std::vector<int> basic_;       // slot -> column
  std::vector<int> slot_of_;     // column -> slot or -1
  std::vector<double> xval_;     // over n_ + m_ (scaled)
  std::vector<double> dj_;       // reduced costs (scaled), valid for nonbasic
  std::vector<double> devex_;
  std::vector<double> ylast_;    // duals from last refresh

  // factorization
  struct Eta {
    int slot;
    std::vector<std::pair<int, double>> w;  // sparse column, includes slot entry
  };
  void* lu_ = nullptr;  // Eigen::SparseLU, opaque here
  std::vector<Eta> etas_;
  bool fact_valid_ = false;
  long pivots_ = 0;

  void ensure_scaling();
  void scale_new_row(int i);
  double lower(int j) const { return lb_[size_t(j)]; }
  double upper(int j) const { return ub_[size_t(j)]; }

  bool factorize();
  void ftran(std::vector<double>& v) const;
  void btran(std::vector<double>& v) const;
  void column_into(int j, std::vector<double>& dense) const;  // scaled column of j
  double col_dot(int j, const std::vector<double>& dense) const;

  void compute_basic_values();
  void compute_duals_and_dj(bool phase1);
  double nonbasic_value(int j) const;
  double infeas_of(int k) const;  // basic slot k: signed violation

  LpResult primal(const LpLimits& lim);
  LpResult dual(const LpLimits& lim);
  bool dual_feasible_after_flips(double tol);

  void set_nonbasic_at(int j, VStat s);
  bool refactor_and_refresh(bool phase1);

public:
  ~LpSolver();
  LpSolver() = default;
  LpSolver(const LpSolver&) = delete;
  LpSolver& operator=(const LpSolver&) = delete;
};

}  // namespace hyplan
