#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <map>
#include <string>

#include "indices.hpp"

namespace hyplan {

// sqrt(eps / (1 - eps)): the Cantelli factor on the slack side of the cone.
double cantelli_scale(double epsilon);

// Tracks which operation variables carry an uncertainty response and which
// are locked to zero response (commitment and planning variables).
class PolicyCatalog {
public:
  // Creates (or returns) the response twin of `col`.
  int request_beta(PlanningModel& m, int col);
  // Declares `col` uncertainty-independent; requesting a response afterwards
  // is an error.
  void mark_non_recourse(int col);
  int beta_of(int col) const;  // -1 when the response is identically zero

private:
  std::map<int, int> beta_;
  std::map<int, bool> non_recourse_;
};

enum class CovLevel { Single, Pair, Full };

// Numeric form of one chance constraint, used by the reformulation identity
// tests and the Monte Carlo validator.
struct ChanceConstraintSpec {
  Eigen::VectorXd response;  // coefficient of the stacked error vector
  double slack = 0;          // right-hand side minus nominal left-hand side
  double epsilon = 0.1;
  CovLevel level = CovLevel::Single;
};

struct SocNumeric {
  double lhs_norm = 0;  // ||L * response||
  double scale = 0;     // sqrt(eps/(1-eps))
  double bound = 0;     // slack
  bool rank1 = false;
  bool satisfied(double tol = 1e-9) const { return lhs_norm <= scale * bound + tol; }
};

SocNumeric cantelli_reformulate(const ChanceConstraintSpec& spec, const Eigen::MatrixXd& sigma);

enum class ErrorFamily { Gaussian, TwoPoint };

// Empirical violation rate of response' * err > slack over n draws from a
// zero-mean distribution with covariance `sigma`.
double monte_carlo_violation(const ChanceConstraintSpec& spec, const Eigen::MatrixXd& sigma,
                             ErrorFamily family, int n, uint64_t seed);

// Per-family counts of emitted chance constraints; rank-1 families are
// lowered to linear row pairs at emission, the rest stay second-order cones.
struct CcAudit {
  std::map<std::string, int> rank1;
  std::map<std::string, int> cones;
};

// Emits the uncertainty-coupled operation constraints: generation split and
// response budget, flow definitions, corridor capacity and storage bounds,
// line-pack balance, P2G power coupling and response bands, ramp cones,
// hydrogen conversion response, load following, hydrogen balance, and the
// annual sector caps. Nominal-only rows are emitted when drcc is off.
void emit_operational_constraints(PlanningModel& m, const SystemConfig& cfg,
                                  const ScenarioSet& scen, const ScaledMoments& mom,
                                  const VarIndex& idx, const BuildOptions& opt, CcAudit* audit);

// Closed-form expected chance-constraint counts for the audit.
CcAudit expected_cc_counts(const SystemConfig& cfg, int scenario_count);

}  // namespace hyplan
