#include "lp.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseLU>
#include <algorithm>
#include <cmath>
#include <limits>

#include "util.hpp"

#include <cstdio>
#include <cstdlib>

namespace hyplan {

namespace {
bool lp_trace() {
  static bool t = std::getenv("HYPLAN_LP_TRACE") != nullptr;
  return t;
}
}  // namespace

namespace {
constexpr double kLpInf = 1e30;
constexpr double kPivotTol = 1e-7;
constexpr double kRatioZero = 1e-9;
constexpr double kEtaDrop = 1e-12;
constexpr int kRefactorEvery = 100;
const double kInfinity = std::numeric_limits<double>::infinity();

using SpMat = Eigen::SparseMatrix<double>;
using Lu = Eigen::SparseLU<SpMat, Eigen::COLAMDOrdering<int>>;

double pow2_round(double v) {
  if (!(v > 0) || !std::isfinite(v)) return 1.0;
  int e = 0;
  std::frexp(v, &e);
  return std::ldexp(1.0, e - 1);
}
}  // namespace

struct LuHolder {
  Lu lu;
  bool ok = false;
};

LpSolver::~LpSolver() { delete static_cast<LuHolder*>(lu_); }

int LpSolver::add_col(double lb, double ub, double obj) {
  if (m_ > 0) fail_invalid("lp: columns must be added before rows");
  cols_.emplace_back();
  lb_.push_back(lb);
  ub_.push_back(ub);
  obj_.push_back(obj);
  ++n_;
  return n_ - 1;
}

int LpSolver::add_row(double lo, double hi, const std::vector<std::pair<int, double>>& terms) {
  const int i = m_;
  ++m_;
  for (auto [j, a] : terms) {
    if (j < 0 || j >= n_) fail_invalid("lp: row references unknown structural column");
    if (a != 0.0) cols_[size_t(j)].push_back({i, a});
  }
  lb_.push_back(lo);
  ub_.push_back(hi);
  obj_.push_back(0.0);
  if (scaled_) scale_new_row(i);
  if (!stat_.empty()) {
    stat_.push_back(VStat::Basic);
    xval_.push_back(0.0);
    dj_.push_back(0.0);
    devex_.push_back(1.0);
    slot_of_.push_back(int(basic_.size()));
    basic_.push_back(n_ + i);
    fact_valid_ = false;
  }
  return i;
}

void LpSolver::set_col_bounds(int j, double lb, double ub) {
  double cs = 1.0;
  if (scaled_) cs = j < n_ ? 1.0 / col_scale_[size_t(j)] : row_scale_[size_t(j - n_)];
  lb_[size_t(j)] = lb <= -kLpInf ? -kLpInf : lb * cs;
  ub_[size_t(j)] = ub >= kLpInf ? kLpInf : ub * cs;
}

void LpSolver::set_obj(int j, double obj) {
  if (j >= n_) fail_invalid("lp: activities carry no cost");
  obj_[size_t(j)] = scaled_ ? obj * col_scale_[size_t(j)] / obj_scale_ : obj;
}

void LpSolver::ensure_scaling() {
  if (scaled_) return;
  col_scale_.assign(size_t(n_), 1.0);
  row_scale_.assign(size_t(m_), 1.0);
  for (int pass = 0; pass < 2; ++pass) {
    std::vector<double> rmin(size_t(m_), kLpInf), rmax(size_t(m_), 0.0);
    for (int j = 0; j < n_; ++j) {
      for (auto [i, a] : cols_[size_t(j)]) {
        double v = std::abs(a) * col_scale_[size_t(j)] * row_scale_[size_t(i)];
        if (v <= 0) continue;
        rmin[size_t(i)] = std::min(rmin[size_t(i)], v);
        rmax[size_t(i)] = std::max(rmax[size_t(i)], v);
      }
    }
    for (int i = 0; i < m_; ++i)
      if (rmax[size_t(i)] > 0)
        row_scale_[size_t(i)] /= pow2_round(std::sqrt(rmin[size_t(i)] * rmax[size_t(i)]));
    for (int j = 0; j < n_; ++j) {
      double cmin = kLpInf, cmax = 0.0;
      for (auto [i, a] : cols_[size_t(j)]) {
        double v = std::abs(a) * col_scale_[size_t(j)] * row_scale_[size_t(i)];
        if (v <= 0) continue;
        cmin = std::min(cmin, v);
        cmax = std::max(cmax, v);
      }
      if (cmax > 0) col_scale_[size_t(j)] /= pow2_round(std::sqrt(cmin * cmax));
    }
  }
  double cobj = 0.0;
  for (int j = 0; j < n_; ++j)
    cobj = std::max(cobj, std::abs(obj_[size_t(j)]) * col_scale_[size_t(j)]);
  obj_scale_ = cobj > 0 ? pow2_round(cobj) : 1.0;

  for (int j = 0; j < n_; ++j) {
    for (auto& [i, a] : cols_[size_t(j)]) a *= row_scale_[size_t(i)] * col_scale_[size_t(j)];
    obj_[size_t(j)] *= col_scale_[size_t(j)] / obj_scale_;
    if (lb_[size_t(j)] > -kLpInf) lb_[size_t(j)] /= col_scale_[size_t(j)];
    if (ub_[size_t(j)] < kLpInf) ub_[size_t(j)] /= col_scale_[size_t(j)];
  }
  for (int i = 0; i < m_; ++i) {
    if (lb_[size_t(n_ + i)] > -kLpInf) lb_[size_t(n_ + i)] *= row_scale_[size_t(i)];
    if (ub_[size_t(n_ + i)] < kLpInf) ub_[size_t(n_ + i)] *= row_scale_[size_t(i)];
  }
  scaled_ = true;
}

void LpSolver::scale_new_row(int i) {
  double rmin = kLpInf, rmax = 0.0;
  for (int j = 0; j < n_; ++j) {
    auto& col = cols_[size_t(j)];
    if (!col.empty() && col.back().first == i) {
      double v = std::abs(col.back().second) * col_scale_[size_t(j)];
      if (v > 0) {
        rmin = std::min(rmin, v);
        rmax = std::max(rmax, v);
      }
    }
  }
  double rs = rmax > 0 ? 1.0 / pow2_round(std::sqrt(rmin * rmax)) : 1.0;
  row_scale_.push_back(rs);
  for (int j = 0; j < n_; ++j) {
    auto& col = cols_[size_t(j)];
    if (!col.empty() && col.back().first == i) col.back().second *= rs * col_scale_[size_t(j)];
  }
  if (lb_[size_t(n_ + i)] > -kLpInf) lb_[size_t(n_ + i)] *= rs;
  if (ub_[size_t(n_ + i)] < kLpInf) ub_[size_t(n_ + i)] *= rs;
}

void LpSolver::reset_basis() {
  ensure_scaling();
  stat_.assign(size_t(n_ + m_), VStat::AtLower);
  for (int j = 0; j < n_ + m_; ++j) {
    if (lb_[size_t(j)] <= -kLpInf && ub_[size_t(j)] >= kLpInf) stat_[size_t(j)] = VStat::Free;
    else if (lb_[size_t(j)] <= -kLpInf) stat_[size_t(j)] = VStat::AtUpper;
  }
  basic_.clear();
  slot_of_.assign(size_t(n_ + m_), -1);
  for (int i = 0; i < m_; ++i) {
    stat_[size_t(n_ + i)] = VStat::Basic;
    slot_of_[size_t(n_ + i)] = i;
    basic_.push_back(n_ + i);
  }
  xval_.assign(size_t(n_ + m_), 0.0);
  dj_.assign(size_t(n_ + m_), 0.0);
  devex_.assign(size_t(n_ + m_), 1.0);
  fact_valid_ = false;
}

std::vector<uint8_t> LpSolver::basis_snapshot() const {
  std::vector<uint8_t> out(stat_.size());
  for (size_t k = 0; k < stat_.size(); ++k) out[k] = uint8_t(stat_[k]);
  return out;
}

bool LpSolver::restore_basis(const std::vector<uint8_t>& snap) {
  ensure_scaling();
  if (snap.size() > size_t(n_ + m_)) return false;
  stat_.assign(size_t(n_ + m_), VStat::Basic);
  for (size_t k = 0; k < snap.size(); ++k) stat_[k] = VStat(snap[k]);
  basic_.clear();
  slot_of_.assign(size_t(n_ + m_), -1);
  for (int j = 0; j < n_ + m_; ++j) {
    if (stat_[size_t(j)] == VStat::Basic) {
      slot_of_[size_t(j)] = int(basic_.size());
      basic_.push_back(j);
      continue;
    }
    if (stat_[size_t(j)] == VStat::AtLower && lb_[size_t(j)] <= -kLpInf)
      stat_[size_t(j)] = ub_[size_t(j)] < kLpInf ? VStat::AtUpper : VStat::Free;
    else if (stat_[size_t(j)] == VStat::AtUpper && ub_[size_t(j)] >= kLpInf)
      stat_[size_t(j)] = lb_[size_t(j)] > -kLpInf ? VStat::AtLower : VStat::Free;
  }
  if (int(basic_.size()) != m_) return false;
  xval_.assign(size_t(n_ + m_), 0.0);
  dj_.assign(size_t(n_ + m_), 0.0);
  devex_.assign(size_t(n_ + m_), 1.0);
  fact_valid_ = false;
  return true;
}

bool LpSolver::factorize() {
  if (!lu_) lu_ = new LuHolder;
  LuHolder* h = static_cast<LuHolder*>(lu_);
  SpMat B(m_, m_);
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(size_t(m_) * 4);
  for (int k = 0; k < m_; ++k) {
    int j = basic_[size_t(k)];
    if (j >= n_) {
      trip.emplace_back(j - n_, k, -1.0);
    } else {
      for (auto [i, a] : cols_[size_t(j)]) trip.emplace_back(i, k, a);
    }
  }
  B.setFromTriplets(trip.begin(), trip.end());
  B.makeCompressed();
  h->lu.isSymmetric(false);
  h->lu.compute(B);
  h->ok = h->lu.info() == Eigen::Success;
  etas_.clear();
  fact_valid_ = h->ok;
  return h->ok;
}

void LpSolver::ftran(std::vector<double>& v) const {
  LuHolder* h = const_cast<LuHolder*>(static_cast<const LuHolder*>(lu_));
  Eigen::Map<Eigen::VectorXd> mv(v.data(), m_);
  mv = h->lu.solve(mv.eval());
  for (const Eta& e : etas_) {
    // first entry of w is the pivot (slot, w_slot)
    double t = v[size_t(e.slot)] / e.w.front().second;
    v[size_t(e.slot)] = t;
    for (size_t k = 1; k < e.w.size(); ++k) v[size_t(e.w[k].first)] -= e.w[k].second * t;
  }
}

void LpSolver::btran(std::vector<double>& v) const {
  for (auto it = etas_.rbegin(); it != etas_.rend(); ++it) {
    const Eta& e = *it;
    double dot = 0;
    for (size_t k = 1; k < e.w.size(); ++k) dot += e.w[k].second * v[size_t(e.w[k].first)];
    v[size_t(e.slot)] = (v[size_t(e.slot)] - dot) / e.w.front().second;
  }
  LuHolder* h = const_cast<LuHolder*>(static_cast<const LuHolder*>(lu_));
  Eigen::Map<Eigen::VectorXd> mv(v.data(), m_);
  mv = h->lu.adjoint().solve(mv.eval());
}

void LpSolver::column_into(int j, std::vector<double>& dense) const {
  std::fill(dense.begin(), dense.end(), 0.0);
  if (j >= n_) dense[size_t(j - n_)] = -1.0;
  else
    for (auto [i, a] : cols_[size_t(j)]) dense[size_t(i)] = a;
}

double LpSolver::col_dot(int j, const std::vector<double>& dense) const {
  if (j >= n_) return -dense[size_t(j - n_)];
  double s = 0;
  for (auto [i, a] : cols_[size_t(j)]) s += a * dense[size_t(i)];
  return s;
}

double LpSolver::nonbasic_value(int j) const {
  switch (stat_[size_t(j)]) {
    case VStat::AtLower: return lb_[size_t(j)];
    case VStat::AtUpper: return ub_[size_t(j)];
    case VStat::Free: return 0.0;
    case VStat::Basic: return xval_[size_t(j)];
  }
  return 0.0;
}

void LpSolver::compute_basic_values() {
  std::vector<double> rhs(size_t(m_), 0.0);
  for (int j = 0; j < n_ + m_; ++j) {
    if (stat_[size_t(j)] == VStat::Basic) continue;
    double v = nonbasic_value(j);
    xval_[size_t(j)] = v;
    if (v == 0.0) continue;
    if (j >= n_) rhs[size_t(j - n_)] += v;
    else
      for (auto [i, a] : cols_[size_t(j)]) rhs[size_t(i)] -= a * v;
  }
  ftran(rhs);
  for (int k = 0; k < m_; ++k) xval_[size_t(basic_[size_t(k)])] = rhs[size_t(k)];
}

void LpSolver::compute_duals_and_dj(bool phase1) {
  std::vector<double> y(size_t(m_), 0.0);
  for (int k = 0; k < m_; ++k) {
    int j = basic_[size_t(k)];
    double c;
    if (phase1) {
      double x = xval_[size_t(j)];
      c = x < lb_[size_t(j)] - 1e-9 ? -1.0 : (x > ub_[size_t(j)] + 1e-9 ? 1.0 : 0.0);
    } else {
      c = obj_[size_t(j)];
    }
    y[size_t(k)] = c;
  }
  btran(y);
  ylast_ = y;
  for (int j = 0; j < n_ + m_; ++j) {
    if (stat_[size_t(j)] == VStat::Basic) {
      dj_[size_t(j)] = 0;
      continue;
    }
    double c = phase1 ? 0.0 : obj_[size_t(j)];
    dj_[size_t(j)] = c - col_dot(j, y);
  }
}

bool LpSolver::refactor_and_refresh(bool phase1) {
  if (!factorize()) {
    reset_basis();
    if (!factorize()) return false;
  }
  compute_basic_values();
  compute_duals_and_dj(phase1);
  devex_.assign(size_t(n_ + m_), 1.0);
  return true;
}

double LpSolver::infeas_of(int k) const {
  int j = basic_[size_t(k)];
  double x = xval_[size_t(j)];
  double rel = 1.0 + std::abs(x);
  if (x < lb_[size_t(j)]) return (x - lb_[size_t(j)]) / rel;
  if (x > ub_[size_t(j)]) return (x - ub_[size_t(j)]) / rel;
  return 0.0;
}

namespace {
struct PivotChoice {
  double theta = kInfinity;
  int slot = -1;
  double target = 0;
  VStat leave_stat = VStat::AtLower;
};
}  // namespace

LpResult LpSolver::primal(const LpLimits& lim) {
  LpResult res;
  const double ftol = lim.feas_tol;
  const double dtol = lim.opt_tol;
  std::vector<double> alpha(static_cast<size_t>(m_), 0.0);
  std::vector<double> rho(static_cast<size_t>(m_), 0.0);
  std::vector<int> blockers;
  long degen_run = 0;
  bool bland = false;

  if (!fact_valid_ && !refactor_and_refresh(false)) return res;

  int phase = 1;
  int restarts = 0;
  while (phase <= 2) {
    const bool phase1 = phase == 1;
    compute_basic_values();
    if (phase1) {
      double worst = 0;
      for (int k = 0; k < m_; ++k) worst = std::max(worst, std::abs(infeas_of(k)));
      if (worst <= ftol) {
        phase = 2;
        continue;
      }
    } else {
      compute_duals_and_dj(false);
      devex_.assign(size_t(n_ + m_), 1.0);
    }

    for (;; ++res.iterations) {
      if (res.iterations > lim.max_iters) {
        res.status = LpStatus::IterLimit;
        return res;
      }
      if (alpha.size() != size_t(m_)) {
        alpha.resize(size_t(m_));
        rho.resize(size_t(m_));
      }
      if (phase1) compute_duals_and_dj(true);
      if (lp_trace() && res.iterations % 500 == 0) {
        double tot = 0; int cnt = 0;
        for (int k = 0; k < m_; ++k) { double v = std::abs(infeas_of(k)); if (v > ftol) { tot += v; ++cnt; } }
        std::fprintf(stderr, "[primal p%d] it=%ld infeas_cnt=%d infeas_sum=%.3g obj=%.8g\n",
                     phase, res.iterations, cnt, tot, objective());
      }

      // ---- entering variable ----
      int q = -1, dir = +1;
      double best = 0;
      for (int j = 0; j < n_ + m_; ++j) {
        VStat s = stat_[size_t(j)];
        if (s == VStat::Basic || lb_[size_t(j)] == ub_[size_t(j)]) continue;
        double d = dj_[size_t(j)];
        int cd = 0;
        if (s == VStat::AtLower && d < -dtol) cd = +1;
        else if (s == VStat::AtUpper && d > dtol) cd = -1;
        else if (s == VStat::Free && std::abs(d) > dtol) cd = d < 0 ? +1 : -1;
        if (!cd) continue;
        if (bland) {
          q = j;
          dir = cd;
          break;
        }
        double score = d * d / devex_[size_t(j)];
        if (score > best) {
          best = score;
          q = j;
          dir = cd;
        }
      }

      if (q < 0) {
        if (!refactor_and_refresh(phase1)) {
          res.status = LpStatus::NumericalFailure;
          return res;
        }
        bool price_again = false;
        for (int j = 0; j < n_ + m_ && !price_again; ++j) {
          VStat s = stat_[size_t(j)];
          if (s == VStat::Basic || lb_[size_t(j)] == ub_[size_t(j)]) continue;
          double d = dj_[size_t(j)];
          price_again = (s == VStat::AtLower && d < -dtol) || (s == VStat::AtUpper && d > dtol) ||
                        (s == VStat::Free && std::abs(d) > dtol);
        }
        if (price_again) continue;
        double worst = 0;
        for (int k = 0; k < m_; ++k) worst = std::max(worst, std::abs(infeas_of(k)));
        if (phase1) {
          if (worst > ftol * 10) {
            res.status = LpStatus::Infeasible;
            return res;
          }
          phase = 2;
          break;
        }
        if (worst > ftol * 10) {
          if (restarts < 3) {
            ++restarts;
            phase = 1;
            break;
          }
          res.status = LpStatus::NumericalFailure;
          return res;
        }
        res.status = LpStatus::Optimal;
        res.objective = objective();
        return res;
      }

      column_into(q, alpha);
      ftran(alpha);

      // ---- ratio test (two-pass) ----
      double theta_relaxed = kInfinity;
      for (int k = 0; k < m_; ++k) {
        double rate = dir * alpha[size_t(k)];
        if (std::abs(rate) <= kRatioZero) continue;
        int bj = basic_[size_t(k)];
        double x = xval_[size_t(bj)];
        double lo = lb_[size_t(bj)], hi = ub_[size_t(bj)];
        double bound;
        if (rate > 0) {
          if (phase1 && x > hi + ftol * (1 + std::abs(hi))) bound = hi;
          else if (lo > -kLpInf) bound = lo;
          else continue;
          double slackt = (x - bound + ftol * (1 + std::abs(bound))) / rate;
          theta_relaxed = std::min(theta_relaxed, std::max(slackt, 0.0));
        } else {
          if (phase1 && x < lo - ftol * (1 + std::abs(lo))) bound = lo;
          else if (hi < kLpInf) bound = hi;
          else continue;
          double slackt = (x - bound - ftol * (1 + std::abs(bound))) / rate;
          theta_relaxed = std::min(theta_relaxed, std::max(slackt, 0.0));
        }
      }
      double range = (lb_[size_t(q)] > -kLpInf && ub_[size_t(q)] < kLpInf)
                         ? ub_[size_t(q)] - lb_[size_t(q)]
                         : kInfinity;
      if (!std::isfinite(theta_relaxed) && !std::isfinite(range)) {
        if (phase1) {
          res.status = LpStatus::NumericalFailure;
          return res;
        }
        res.status = LpStatus::Unbounded;
        return res;
      }

      PivotChoice pc;
      if (std::isfinite(theta_relaxed)) {
        double best_piv = 0;
        for (int k = 0; k < m_; ++k) {
          double rate = dir * alpha[size_t(k)];
          if (std::abs(rate) <= kRatioZero) continue;
          int bj = basic_[size_t(k)];
          double x = xval_[size_t(bj)];
          double lo = lb_[size_t(bj)], hi = ub_[size_t(bj)];
          double bound;
          VStat ls;
          if (rate > 0) {
            if (phase1 && x > hi + ftol * (1 + std::abs(hi))) {
              bound = hi;
              ls = VStat::AtUpper;
            } else if (lo > -kLpInf) {
              bound = lo;
              ls = VStat::AtLower;
            } else
              continue;
          } else {
            if (phase1 && x < lo - ftol * (1 + std::abs(lo))) {
              bound = lo;
              ls = VStat::AtLower;
            } else if (hi < kLpInf) {
              bound = hi;
              ls = VStat::AtUpper;
            } else
              continue;
          }
          double theta = std::max((x - bound) / rate, 0.0);
          if (theta <= theta_relaxed && std::abs(alpha[size_t(k)]) > best_piv) {
            best_piv = std::abs(alpha[size_t(k)]);
            pc.theta = theta;
            pc.slot = k;
            pc.target = bound;
            pc.leave_stat = ls;
          }
        }
      }
      bool flip = range <= (pc.slot >= 0 ? pc.theta : theta_relaxed);
      if (pc.slot < 0 && !flip) {
        // blockers exist (theta_relaxed finite) but all pivots were rejected:
        // refresh and retry
        if (!refactor_and_refresh(phase1)) {
          res.status = LpStatus::NumericalFailure;
          return res;
        }
        continue;
      }
      double theta = flip ? range : pc.theta;

      degen_run = theta <= 1e-10 ? degen_run + 1 : 0;
      if (degen_run > 2000) bland = true;
      else if (theta > 1e-8) bland = false;

      double step = dir * theta;
      if (theta != 0) {
        for (int k = 0; k < m_; ++k) {
          double a = alpha[size_t(k)];
          if (a != 0.0) xval_[size_t(basic_[size_t(k)])] -= step * a;
        }
      }
      if (flip) {
        stat_[size_t(q)] = stat_[size_t(q)] == VStat::AtLower ? VStat::AtUpper : VStat::AtLower;
        xval_[size_t(q)] = nonbasic_value(q);
        continue;
      }

      const int rslot = pc.slot;
      const int leave = basic_[size_t(rslot)];
      const double apiv = alpha[size_t(rslot)];

      if (!phase1) {
        std::fill(rho.begin(), rho.end(), 0.0);
        rho[size_t(rslot)] = 1.0;
        btran(rho);
        double t = dj_[size_t(q)] / apiv;
        double gq = std::max(devex_[size_t(q)], 1.0);
        for (int j = 0; j < n_ + m_; ++j) {
          if (stat_[size_t(j)] == VStat::Basic || j == q) continue;
          double arj = col_dot(j, rho);
          if (arj == 0.0) continue;
          dj_[size_t(j)] -= t * arj;
          double w = arj / apiv;
          double cand = w * w * gq;
          if (cand > devex_[size_t(j)]) devex_[size_t(j)] = cand;
        }
        dj_[size_t(leave)] = -t;
        dj_[size_t(q)] = 0;
        devex_[size_t(leave)] = std::max(gq / (apiv * apiv), 1.0);
      }

      xval_[size_t(q)] = nonbasic_value(q) + step;
      xval_[size_t(leave)] = pc.target;
      stat_[size_t(q)] = VStat::Basic;
      stat_[size_t(leave)] =
          lb_[size_t(leave)] == ub_[size_t(leave)] ? VStat::AtLower : pc.leave_stat;
      basic_[size_t(rslot)] = q;
      slot_of_[size_t(q)] = rslot;
      slot_of_[size_t(leave)] = -1;

      Eta eta;
      eta.slot = rslot;
      eta.w.push_back({rslot, apiv});
      for (int k = 0; k < m_; ++k)
        if (k != rslot && std::abs(alpha[size_t(k)]) > kEtaDrop)
          eta.w.push_back({k, alpha[size_t(k)]});
      etas_.push_back(std::move(eta));
      ++pivots_;
      if (int(etas_.size()) >= kRefactorEvery && !refactor_and_refresh(phase1)) {
        res.status = LpStatus::NumericalFailure;
        return res;
      }
    }
  }
  res.status = LpStatus::NumericalFailure;
  return res;
}

bool LpSolver::dual_feasible_after_flips(double tol) {
  bool flipped = false;
  for (int j = 0; j < n_ + m_; ++j) {
    VStat s = stat_[size_t(j)];
    if (s == VStat::Basic || lb_[size_t(j)] == ub_[size_t(j)]) continue;
    double d = dj_[size_t(j)];
    if (s == VStat::AtLower && d < -tol) {
      if (ub_[size_t(j)] >= kLpInf) return false;
      stat_[size_t(j)] = VStat::AtUpper;
      flipped = true;
    } else if (s == VStat::AtUpper && d > tol) {
      if (lb_[size_t(j)] <= -kLpInf) return false;
      stat_[size_t(j)] = VStat::AtLower;
      flipped = true;
    } else if (s == VStat::Free && std::abs(d) > tol) {
      return false;
    }
  }
  if (flipped) compute_basic_values();
  return true;
}

LpResult LpSolver::dual(const LpLimits& lim) {
  LpResult res;
  const double ftol = lim.feas_tol;
  std::vector<double> alpha(static_cast<size_t>(m_), 0.0);
  std::vector<double> rho(static_cast<size_t>(m_), 0.0);
  long degen_run = 0;
  bool bland = false;

  for (;; ++res.iterations) {
    if (res.iterations > lim.max_iters) {
      res.status = LpStatus::IterLimit;
      return res;
    }
    if (alpha.size() != size_t(m_)) {
      alpha.resize(size_t(m_));
      rho.resize(size_t(m_));
    }

    int rslot = -1;
    double worst = ftol;
    for (int k = 0; k < m_; ++k) {
      double v = std::abs(infeas_of(k));
      if (v > worst) {
        worst = v;
        rslot = k;
      }
    }
    if (rslot < 0) {
      if (!refactor_and_refresh(false)) {
        res.status = LpStatus::NumericalFailure;
        return res;
      }
      bool again = false;
      for (int k = 0; k < m_ && !again; ++k)
        if (std::abs(infeas_of(k)) > ftol) again = true;
      if (again) continue;
      res.status = LpStatus::Optimal;
      res.objective = objective();
      return res;
    }
    if (lp_trace() && res.iterations % 500 == 0) {
      double tot = 0; int cnt = 0;
      for (int k = 0; k < m_; ++k) { double v = std::abs(infeas_of(k)); if (v > ftol) { tot += v; ++cnt; } }
      std::fprintf(stderr, "[dual] it=%ld infeas_cnt=%d infeas_sum=%.3g obj=%.8g etas=%zu\n",
                   res.iterations, cnt, tot, objective(), etas_.size());
    }

    const int leave = basic_[size_t(rslot)];
    const double xr = xval_[size_t(leave)];
    const bool below = xr < lb_[size_t(leave)];
    const double target = below ? lb_[size_t(leave)] : ub_[size_t(leave)];

    std::fill(rho.begin(), rho.end(), 0.0);
    rho[size_t(rslot)] = 1.0;
    btran(rho);

    int q = -1;
    double best_ratio = kInfinity, best_alpha = 0;
    for (int j = 0; j < n_ + m_; ++j) {
      VStat s = stat_[size_t(j)];
      if (s == VStat::Basic) continue;
      // fixed columns have no range and never block the dual ray
      if (lb_[size_t(j)] == ub_[size_t(j)]) continue;
      double a = col_dot(j, rho);
      if (std::abs(a) <= kPivotTol) continue;
      bool ok;
      if (below)
        ok = (s == VStat::AtLower && a < 0) || (s == VStat::AtUpper && a > 0) ||
             (s == VStat::Free);
      else
        ok = (s == VStat::AtLower && a > 0) || (s == VStat::AtUpper && a < 0) ||
             (s == VStat::Free);
      if (!ok) continue;
      double d = dj_[size_t(j)];
      if (s == VStat::AtLower && d < 0) d = 0;
      if (s == VStat::AtUpper && d > 0) d = 0;
      if (s == VStat::Free) d = 0;
      double ratio = std::abs(d) / std::abs(a);
      if (ratio < best_ratio - 1e-12 ||
          (ratio < best_ratio + 1e-12 && std::abs(a) > std::abs(best_alpha))) {
        best_ratio = ratio;
        q = j;
        best_alpha = a;
        if (bland) break;
      }
    }
    if (q < 0) {
      res.status = LpStatus::Infeasible;
      return res;
    }

    column_into(q, alpha);
    ftran(alpha);
    const double aq = alpha[size_t(rslot)];
    if (std::abs(aq) < kPivotTol ||
        std::abs(aq - best_alpha) > 1e-5 * std::max(1.0, std::abs(aq))) {
      if (lp_trace())
        std::fprintf(stderr, "[dual] drift it=%ld q=%d rslot=%d aq=%.12g row=%.12g ratio=%.3g\n",
                     res.iterations, q, rslot, aq, best_alpha, best_ratio);
      if (!refactor_and_refresh(false)) {
        res.status = LpStatus::NumericalFailure;
        return res;
      }
      continue;
    }

    double delta = (xr - target) / aq;
    degen_run = std::abs(delta) <= 1e-12 ? degen_run + 1 : 0;
    bland = degen_run > 2000;

    double t = dj_[size_t(q)] / aq;
    for (int j = 0; j < n_ + m_; ++j) {
      if (stat_[size_t(j)] == VStat::Basic || j == q) continue;
      double arj = col_dot(j, rho);
      if (arj != 0.0) dj_[size_t(j)] -= t * arj;
    }
    dj_[size_t(leave)] = -t;
    dj_[size_t(q)] = 0;

    double xq0 = nonbasic_value(q);
    for (int k = 0; k < m_; ++k) {
      double a = alpha[size_t(k)];
      if (a != 0.0) xval_[size_t(basic_[size_t(k)])] -= delta * a;
    }
    xval_[size_t(q)] = xq0 + delta;
    xval_[size_t(leave)] = target;
    stat_[size_t(q)] = VStat::Basic;
    stat_[size_t(leave)] = below ? VStat::AtLower : VStat::AtUpper;
    if (lb_[size_t(leave)] == ub_[size_t(leave)]) stat_[size_t(leave)] = VStat::AtLower;
    basic_[size_t(rslot)] = q;
    slot_of_[size_t(q)] = rslot;
    slot_of_[size_t(leave)] = -1;

    Eta eta;
    eta.slot = rslot;
    eta.w.push_back({rslot, aq});
    for (int k = 0; k < m_; ++k)
      if (k != rslot && std::abs(alpha[size_t(k)]) > kEtaDrop)
        eta.w.push_back({k, alpha[size_t(k)]});
    etas_.push_back(std::move(eta));
    ++pivots_;
    if (int(etas_.size()) >= kRefactorEvery && !refactor_and_refresh(false)) {
      res.status = LpStatus::NumericalFailure;
      return res;
    }
  }
}

LpResult LpSolver::solve(const LpLimits& lim) {
  ensure_scaling();
  if (stat_.empty()) reset_basis();
  if (!fact_valid_) {
    if (!refactor_and_refresh(false)) {
      reset_basis();
      if (!refactor_and_refresh(false)) return {};
    }
  } else {
    compute_basic_values();
    compute_duals_and_dj(false);
  }

  if (dual_feasible_after_flips(lim.opt_tol * 10)) {
    LpResult r = dual(lim);
    if (r.status == LpStatus::Optimal) {
      // confirm dual feasibility at the claimed optimum
      compute_duals_and_dj(false);
      if (dual_feasible_after_flips(lim.opt_tol * 100)) return r;
    } else if (r.status == LpStatus::Infeasible || r.status == LpStatus::IterLimit) {
      return r;
    }
  }
  LpResult r = primal(lim);
  if (r.status == LpStatus::NumericalFailure) {
    reset_basis();
    if (refactor_and_refresh(false)) r = primal(lim);
  }
  return r;
}

double LpSolver::col_value(int j) const {
  double v = xval_[size_t(j)];
  if (!scaled_) return v;
  return j < n_ ? v * col_scale_[size_t(j)] : v / row_scale_[size_t(j - n_)];
}

double LpSolver::objective() const {
  double s = 0;
  for (int j = 0; j < n_; ++j) s += obj_[size_t(j)] * xval_[size_t(j)];
  return s * obj_scale_;
}

double LpSolver::reduced_cost(int j) const {
  double d = dj_[size_t(j)];
  if (!scaled_) return d;
  return j < n_ ? d * obj_scale_ / col_scale_[size_t(j)]
                : d * obj_scale_ * row_scale_[size_t(j - n_)];
}

double LpSolver::row_dual(int i) const {
  if (ylast_.empty()) return 0;
  return ylast_[size_t(i)] * row_scale_[size_t(i)] * obj_scale_;
}

}  // namespace hyplan
