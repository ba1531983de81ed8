#include "drcc.hpp"

#include <cmath>
#include <random>

#include "util.hpp"

namespace hyplan {

double cantelli_scale(double epsilon) {
  if (!(epsilon > 0 && epsilon < 1))
    fail_invalid("chance-constraint budget must lie in (0, 1)");
  return std::sqrt(epsilon / (1.0 - epsilon));
}

int PolicyCatalog::request_beta(PlanningModel& m, int col) {
  auto nr = non_recourse_.find(col);
  if (nr != non_recourse_.end())
    fail_invalid("decision rule: variable '" + m.vars[size_t(col)].name +
                 "' is uncertainty-independent; it cannot carry a response");
  auto it = beta_.find(col);
  if (it != beta_.end()) return it->second;
  int b = m.add_beta_var("b:" + m.vars[size_t(col)].name, col);
  beta_[col] = b;
  return b;
}

void PolicyCatalog::mark_non_recourse(int col) { non_recourse_[col] = true; }

int PolicyCatalog::beta_of(int col) const {
  auto it = beta_.find(col);
  return it == beta_.end() ? -1 : it->second;
}

SocNumeric cantelli_reformulate(const ChanceConstraintSpec& spec, const Eigen::MatrixXd& sigma) {
  SocNumeric out;
  out.scale = cantelli_scale(spec.epsilon);
  if (sigma.rows() != sigma.cols() || spec.response.size() != sigma.rows())
    fail_invalid("chance constraint: covariance level dimension mismatch");
  Eigen::MatrixXd sym = 0.5 * (sigma + sigma.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sym);
  double scale_ref = std::max(1.0, std::abs(es.eigenvalues().maxCoeff()));
  if (es.eigenvalues().minCoeff() < -1e-8 * scale_ref)
    fail_invalid("chance constraint: covariance block is not PSD");
  double q = spec.response.dot(sym * spec.response);
  out.lhs_norm = std::sqrt(std::max(0.0, q));
  out.bound = spec.slack;
  out.rank1 = spec.level == CovLevel::Single;
  return out;
}

double monte_carlo_violation(const ChanceConstraintSpec& spec, const Eigen::MatrixXd& sigma,
                             ErrorFamily family, int n, uint64_t seed) {
  if (n < 1) fail_invalid("monte carlo: need at least one draw");
  Eigen::MatrixXd L = psd_sqrt(sigma);
  double ref = std::max(1.0, sigma.cwiseAbs().maxCoeff());
  if (((L.transpose() * L) - 0.5 * (sigma + sigma.transpose())).cwiseAbs().maxCoeff() >
      1e-9 * ref)
    fail_invalid("monte carlo: distribution family cannot match the requested moments");
  const int dim = int(sigma.rows());
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Eigen::VectorXd z(dim);
  // response' * (L' z) = (L * response)' z
  Eigen::VectorXd w = L * spec.response;
  long violations = 0;
  for (int k = 0; k < n; ++k) {
    double val = 0;
    if (family == ErrorFamily::Gaussian) {
      for (int i = 0; i < dim; ++i) val += w[i] * gauss(rng);
    } else {
      for (int i = 0; i < dim; ++i) val += (rng() & 1u) ? w[i] : -w[i];
    }
    if (val > spec.slack) ++violations;
  }
  return double(violations) / double(n);
}

ScaledMoments scale_moments(const SystemConfig& cfg, const MomentModel& m) {
  ScaledMoments out;
  out.scenario_count = m.scenario_count;
  out.hours_per_day = m.hours_per_day;
  const int S = m.scenario_count;
  const int T = m.hours_per_day;
  for (const auto& region : cfg.sources) {
    RegionMoments rm;
    Eigen::VectorXd d(2 * T);
    for (int t = 0; t < T; ++t) {
      d[2 * t] = region.err_scale_wt_mw;
      d[2 * t + 1] = region.err_scale_pv_mw;
    }
    for (int s = 0; s < S; ++s)
      rm.sigma_day.push_back(d.asDiagonal() * m.sigma_day[size_t(s)] * d.asDiagonal());

    rm.w1.assign(size_t(S), std::vector<double>(size_t(T), 0.0));
    rm.pair_sqrt.assign(size_t(S), std::vector<Eigen::Matrix4d>(size_t(T)));
    for (int s = 0; s < S; ++s) {
      const Eigen::MatrixXd& day = rm.sigma_day[size_t(s)];
      for (int t = 0; t < T; ++t) {
        double q = day.block<2, 2>(2 * t, 2 * t).sum();
        rm.w1[size_t(s)][size_t(t)] = std::sqrt(std::max(0.0, q));
        const int tn = (t + 1) % T;
        Eigen::Matrix4d pair;
        pair.block<2, 2>(0, 0) = day.block<2, 2>(2 * tn, 2 * tn);
        pair.block<2, 2>(0, 2) = day.block<2, 2>(2 * tn, 2 * t);
        pair.block<2, 2>(2, 0) = day.block<2, 2>(2 * t, 2 * tn);
        pair.block<2, 2>(2, 2) = day.block<2, 2>(2 * t, 2 * t);
        rm.pair_sqrt[size_t(s)][size_t(t)] = psd_sqrt(pair);
      }
      // hour-by-hour covariance of the summed (wt+pv) error over the day
      Eigen::MatrixXd annual(T, T);
      for (int t1 = 0; t1 < T; ++t1)
        for (int t2 = 0; t2 < T; ++t2)
          annual(t1, t2) = day.block<2, 2>(2 * t1, 2 * t2).sum();
      rm.annual_sqrt.push_back(psd_sqrt(annual));
    }
    out.regions.push_back(std::move(rm));
  }
  return out;
}

namespace {

// row:  w * response - kappa * slack <= 0   and the mirrored row, which
// together encode |w * response| <= kappa * slack (and imply slack >= 0).
void emit_rank1(PlanningModel& m, const std::string& tag, double w, const LinExpr& response,
                double kappa, const LinExpr& slack, CcAudit* audit) {
  for (int sign = 0; sign < 2; ++sign) {
    double rs = sign == 0 ? w : -w;
    std::vector<LinTerm> terms;
    for (const auto& t : response.terms) terms.push_back({t.col, rs * t.coef});
    for (const auto& t : slack.terms) terms.push_back({t.col, -kappa * t.coef});
    m.add_row(tag, RowSense::LE, kappa * slack.constant - rs * response.constant,
              std::move(terms));
  }
  if (audit) ++audit->rank1[tag];
}

// nominal capacity row: slack >= 0
void emit_nominal_cap(PlanningModel& m, const std::string& tag, const LinExpr& slack) {
  std::vector<LinTerm> terms;
  for (const auto& t : slack.terms) terms.push_back({t.col, -t.coef});
  m.add_row(tag, RowSense::LE, slack.constant, std::move(terms));
}

}  // namespace

void emit_operational_constraints(PlanningModel& m, const SystemConfig& cfg,
                                  const ScenarioSet& scen, const ScaledMoments& mom,
                                  const VarIndex& idx, const BuildOptions& opt, CcAudit* audit) {
  const int Y = cfg.horizon.epochs;
  const int S = scen.count();
  const int T = scen.hours_per_day;
  const int nI = int(cfg.sources.size());
  const int nJ = int(cfg.demands.size());
  const double kappa = opt.drcc ? cantelli_scale(opt.epsilon) : 0.0;
  const P2GTechnology& tech = cfg.p2g;

  auto hvdc = cfg.hvdc_corridors();
  auto hp = cfg.hp_corridors();

  // ---- source regions ----
  for (int i = 0; i < nI; ++i) {
    const RegionMoments& rmom = mom.regions[size_t(i)];
    std::vector<int> hvdc_out, hp_out;
    for (int c : hvdc)
      if (cfg.corridors[size_t(c)].from_idx == i) hvdc_out.push_back(c);
    for (int c : hp)
      if (cfg.corridors[size_t(c)].from_idx == i) hp_out.push_back(c);

    for (int y = 0; y < Y; ++y) {
      for (int s = 0; s < S; ++s) {
        for (int t = 0; t < T; ++t) {
          const double pw = scen.scenarios[size_t(s)].wt[size_t(t)];
          const double pp = scen.scenarios[size_t(s)].pv[size_t(t)];

          // generation split: E + H + spill = cumulative capacity * profile
          {
            std::vector<LinTerm> terms{{idx.gwtE[i][y][s][t], 1.0},
                                       {idx.gwtH[i][y][s][t], 1.0},
                                       {idx.spw[i][y][s][t], 1.0}};
            for (int tau = 0; tau <= y; ++tau) terms.push_back({idx.pwt[i][tau], -pw});
            m.add_row("re_split_wt", RowSense::EQ, 0.0, std::move(terms));
          }
          {
            std::vector<LinTerm> terms{{idx.gpvE[i][y][s][t], 1.0},
                                       {idx.gpvH[i][y][s][t], 1.0},
                                       {idx.spv[i][y][s][t], 1.0}};
            for (int tau = 0; tau <= y; ++tau) terms.push_back({idx.ppv[i][tau], -pp});
            m.add_row("re_split_pv", RowSense::EQ, 0.0, std::move(terms));
          }
          if (opt.drcc) {
            // responses: the wt/pv shares of the realized error; the shares
            // sum to the built fleet normalized by the reference scale, so a
            // fleet at reference size absorbs exactly the unit error
            m.add_row("re_split_wt_b", RowSense::EQ, 0.0,
                      {{idx.b_gwtE[i][y][s][t], 1.0},
                       {idx.b_gwtH[i][y][s][t], 1.0},
                       {idx.betaWT[i][y][s][t], -1.0}});
            m.add_row("re_split_pv_b", RowSense::EQ, 0.0,
                      {{idx.b_gpvE[i][y][s][t], 1.0},
                       {idx.b_gpvH[i][y][s][t], 1.0},
                       {idx.betaPV[i][y][s][t], -1.0}});
            const SourceRegion& reg = cfg.sources[size_t(i)];
            double ref = reg.err_scale_wt_mw + reg.err_scale_pv_mw;
            std::vector<LinTerm> budget{{idx.betaWT[i][y][s][t], 1.0},
                                        {idx.betaPV[i][y][s][t], 1.0}};
            if (ref > 0) {
              for (int tau = 0; tau <= y; ++tau) {
                budget.push_back({idx.pwt[i][tau], -1.0 / ref});
                budget.push_back({idx.ppv[i][tau], -1.0 / ref});
              }
            }
            m.add_row("re_beta_budget", RowSense::EQ, 0.0, std::move(budget));
          }

          // hvdc flow definition: all E-power leaves on this region's corridors
          {
            std::vector<LinTerm> terms;
            for (int c : hvdc_out) terms.push_back({idx.f[c][y][s][t], 1.0});
            terms.push_back({idx.gwtE[i][y][s][t], -1.0});
            terms.push_back({idx.gpvE[i][y][s][t], -1.0});
            m.add_row("hvdc_flow_def", RowSense::EQ, 0.0, std::move(terms));
            if (opt.drcc) {
              std::vector<LinTerm> bterms;
              for (int c : hvdc_out) bterms.push_back({idx.b_f[c][y][s][t], 1.0});
              bterms.push_back({idx.b_gwtE[i][y][s][t], -1.0});
              bterms.push_back({idx.b_gpvE[i][y][s][t], -1.0});
              m.add_row("hvdc_flow_def_b", RowSense::EQ, 0.0, std::move(bterms));
            }
          }

          // P2G power coupling
          m.add_row("p2g_couple", RowSense::EQ, 0.0,
                    {{idx.gwtH[i][y][s][t], 1.0},
                     {idx.gpvH[i][y][s][t], 1.0},
                     {idx.pcl[i][y][s][t], -1.0}});
          if (opt.drcc) {
            m.add_row("p2g_couple_b", RowSense::EQ, 0.0,
                      {{idx.b_gwtH[i][y][s][t], 1.0},
                       {idx.b_gpvH[i][y][s][t], 1.0},
                       {idx.b_pcl[i][y][s][t], -1.0}});
            // booting draw is deterministic, so the cluster response is the
            // ON-power response
            m.add_row("p2g_power_b", RowSense::EQ, 0.0,
                      {{idx.b_pcl[i][y][s][t], 1.0}, {idx.b_ponsum[i][y][s][t], -1.0}});
            m.add_row("p2g_h2_b", RowSense::EQ, 0.0,
                      {{idx.b_hm[i][y][s][t], 1.0},
                       {idx.b_ponsum[i][y][s][t], -tech.conversion.b}});
          }

          // hydrogen balance: sector offtake + pipeline injection = production
          {
            std::vector<LinTerm> terms;
            for (int u = 0; u < kNumSectors; ++u) terms.push_back({idx.msrc[i][u][y][s][t], 1.0});
            for (int c : hp_out)
              for (int u = 0; u < kNumSectors; ++u) terms.push_back({idx.minj[c][u][y][s][t], 1.0});
            terms.push_back({idx.hm[i][y][s][t], -1.0});
            m.add_row("h2_balance", RowSense::EQ, 0.0, std::move(terms));
            if (opt.drcc) {
              std::vector<LinTerm> bterms;
              for (int u = 0; u < kNumSectors; ++u)
                bterms.push_back({idx.b_msrc[i][u][y][s][t], 1.0});
              for (int c : hp_out)
                for (int u = 0; u < kNumSectors; ++u)
                  bterms.push_back({idx.b_minj[c][u][y][s][t], 1.0});
              bterms.push_back({idx.b_hm[i][y][s][t], -1.0});
              m.add_row("h2_balance_b", RowSense::EQ, 0.0, std::move(bterms));
            }
          }

          if (opt.drcc) {
            const double w = rmom.w1[size_t(s)][size_t(t)];
            // ON-power band under response
            LinExpr resp;
            resp.add(idx.b_ponsum[i][y][s][t], 1.0);
            LinExpr hi;
            hi.add(idx.x[i][y][s][t], tech.p_max_mw).add(idx.ponsum[i][y][s][t], -1.0);
            emit_rank1(m, "p2g_band_hi_cc", w, resp, kappa, hi, audit);
            LinExpr lo;
            lo.add(idx.ponsum[i][y][s][t], 1.0).add(idx.x[i][y][s][t], -tech.p_min_mw);
            emit_rank1(m, "p2g_band_lo_cc", w, resp, kappa, lo, audit);

            // ramp cone over the two-hour covariance
            const int tn = (t + 1) % T;
            const Eigen::Matrix4d& L = rmom.pair_sqrt[size_t(s)][size_t(t)];
            ConeDef cone;
            cone.tag = "p2g_ramp_cc";
            cone.scale = kappa;
            for (int r = 0; r < 4; ++r) {
              LinExpr e;
              e.add(idx.b_pcl[i][y][s][tn], L(r, 0) + L(r, 1));
              e.add(idx.b_pcl[i][y][s][t], -(L(r, 2) + L(r, 3)));
              cone.vec.push_back(std::move(e));
            }
            cone.bound.add(idx.chi[i][y], tech.facilities_per_farm * tech.p_max_mw)
                .add(idx.x[i][y][s][t], tech.ramp_mw_per_h - tech.p_max_mw)
                .add(idx.pcl[i][y][s][t], 1.0)
                .add(idx.pcl[i][y][s][tn], -1.0);
            m.add_cone(std::move(cone));
            if (audit) ++audit->cones["p2g_ramp_cc"];
          }
        }
      }

      // annual sector caps, source side
      for (int u = 0; u < kNumSectors; ++u) {
        LinExpr slack;
        slack.constant = cfg.sources[size_t(i)].sector_caps_kg[size_t(u)][size_t(y)];
        for (int s = 0; s < S; ++s) {
          double Ds = scen.weights[size_t(s)];
          for (int t = 0; t < T; ++t) slack.add(idx.msrc[i][u][y][s][t], -Ds);
        }
        emit_nominal_cap(m, "sector_cap_src", slack);
        if (opt.drcc) {
          ConeDef cone;
          cone.tag = "sector_cap_src_cc";
          cone.scale = kappa;
          cone.bound = slack;
          for (int s = 0; s < S; ++s) {
            double Ds = scen.weights[size_t(s)];
            const Eigen::MatrixXd& L = rmom.annual_sqrt[size_t(s)];
            for (int r = 0; r < T; ++r) {
              LinExpr e;
              for (int t = 0; t < T; ++t) {
                double coef = L(r, t) * Ds;
                if (std::abs(coef) > 1e-12) e.add(idx.b_msrc[i][u][y][s][t], coef);
              }
              cone.vec.push_back(std::move(e));
            }
          }
          m.add_cone(std::move(cone));
          if (audit) ++audit->cones["sector_cap_src_cc"];
        }
      }
    }
  }

  // ---- hvdc corridors ----
  for (int c : hvdc) {
    const Corridor& cor = cfg.corridors[size_t(c)];
    const RegionMoments& rmom = mom.regions[size_t(cor.from_idx)];
    for (int y = 0; y < Y; ++y) {
      for (int s = 0; s < S; ++s) {
        for (int t = 0; t < T; ++t) {
          LinExpr slack;
          for (int tau = 0; tau <= y; ++tau)
            for (int col : idx.sigma[c][tau]) slack.add(col, cor.capacity_mw_per_line);
          slack.add(idx.f[c][y][s][t], -1.0);
          if (opt.drcc) {
            LinExpr resp;
            resp.add(idx.b_f[c][y][s][t], 1.0);
            emit_rank1(m, "hvdc_cap", rmom.w1[size_t(s)][size_t(t)], resp, kappa, slack, audit);
          } else {
            emit_nominal_cap(m, "hvdc_cap", slack);
          }
        }
      }
    }
  }

  // ---- hydrogen pipelines ----
  for (int c : hp) {
    const Corridor& cor = cfg.corridors[size_t(c)];
    const RegionMoments& rmom = mom.regions[size_t(cor.from_idx)];
    for (int y = 0; y < Y; ++y) {
      for (int s = 0; s < S; ++s) {
        for (int t = 0; t < T; ++t) {
          const int tn = (t + 1) % T;
          // line pack balance over the cyclic day
          {
            std::vector<LinTerm> terms{{idx.mhp[c][y][s][tn], 1.0}, {idx.mhp[c][y][s][t], -1.0}};
            for (int u = 0; u < kNumSectors; ++u) {
              terms.push_back({idx.minj[c][u][y][s][t], -1.0});
              terms.push_back({idx.mout[c][u][y][s][t], 1.0});
            }
            m.add_row("hp_linepack", RowSense::EQ, 0.0, std::move(terms));
            if (opt.drcc) {
              std::vector<LinTerm> bterms{{idx.b_mhp[c][y][s][tn], 1.0},
                                          {idx.b_mhp[c][y][s][t], -1.0}};
              for (int u = 0; u < kNumSectors; ++u) {
                bterms.push_back({idx.b_minj[c][u][y][s][t], -1.0});
                bterms.push_back({idx.b_mout[c][u][y][s][t], 1.0});
              }
              m.add_row("hp_linepack_b", RowSense::EQ, 0.0, std::move(bterms));
            }
          }
          // inflow cap (compressor limit)
          {
            LinExpr slack;
            for (int tau = 0; tau <= y; ++tau)
              for (int col : idx.sigma[c][tau]) slack.add(col, cor.inflow_cap_kg_h_per_line);
            for (int u = 0; u < kNumSectors; ++u) slack.add(idx.minj[c][u][y][s][t], -1.0);
            if (opt.drcc) {
              LinExpr resp;
              for (int u = 0; u < kNumSectors; ++u) resp.add(idx.b_minj[c][u][y][s][t], 1.0);
              emit_rank1(m, "hp_inflow", rmom.w1[size_t(s)][size_t(t)], resp, kappa, slack, audit);
            } else {
              emit_nominal_cap(m, "hp_inflow", slack);
            }
          }
          // stored hydrogen within pipeline capacity
          {
            LinExpr slack;
            for (int tau = 0; tau <= y; ++tau)
              for (int col : idx.sigma[c][tau]) slack.add(col, cor.storage_cap_kg_per_line);
            slack.add(idx.mhp[c][y][s][t], -1.0);
            if (opt.drcc) {
              LinExpr resp;
              resp.add(idx.b_mhp[c][y][s][t], 1.0);
              emit_rank1(m, "hp_storage", rmom.w1[size_t(s)][size_t(t)], resp, kappa, slack, audit);
            } else {
              emit_nominal_cap(m, "hp_storage", slack);
            }
          }
        }
      }
    }
  }

  // ---- demand regions ----
  for (int j = 0; j < nJ; ++j) {
    std::vector<int> hvdc_in, hp_in;
    for (int c : hvdc)
      if (cfg.corridors[size_t(c)].to_idx == j) hvdc_in.push_back(c);
    for (int c : hp)
      if (cfg.corridors[size_t(c)].to_idx == j) hp_in.push_back(c);

    for (int y = 0; y < Y; ++y) {
      for (int s = 0; s < S; ++s) {
        for (int t = 0; t < T; ++t) {
          const double shape = scen.scenarios[size_t(s)].load[size_t(t)];
          std::vector<LinTerm> terms;
          for (int c : hvdc_in) terms.push_back({idx.f[c][y][s][t], 1.0});
          terms.push_back({idx.pd[j][y][s], -shape});
          m.add_row("load_follow", RowSense::EQ, 0.0, std::move(terms));
          if (opt.drcc) {
            std::vector<LinTerm> bterms;
            for (int c : hvdc_in) bterms.push_back({idx.b_f[c][y][s][t], 1.0});
            bterms.push_back({idx.b_pd[j][y][s], -shape});
            m.add_row("load_follow_b", RowSense::EQ, 0.0, std::move(bterms));
          }
        }
      }

      // annual sector caps, demand side (on pipeline deliveries)
      for (int u = 0; u < kNumSectors; ++u) {
        LinExpr slack;
        slack.constant = cfg.demands[size_t(j)].sector_caps_kg[size_t(u)][size_t(y)];
        for (int s = 0; s < S; ++s) {
          double Ds = scen.weights[size_t(s)];
          for (int t = 0; t < T; ++t)
            for (int c : hp_in) slack.add(idx.mout[c][u][y][s][t], -Ds);
        }
        emit_nominal_cap(m, "sector_cap_dem", slack);
        if (opt.drcc && !hp_in.empty()) {
          const RegionMoments& rmom =
              mom.regions[size_t(cfg.corridors[size_t(hp_in.front())].from_idx)];
          ConeDef cone;
          cone.tag = "sector_cap_dem_cc";
          cone.scale = kappa;
          cone.bound = slack;
          for (int s = 0; s < S; ++s) {
            double Ds = scen.weights[size_t(s)];
            const Eigen::MatrixXd& L = rmom.annual_sqrt[size_t(s)];
            for (int r = 0; r < T; ++r) {
              LinExpr e;
              for (int t = 0; t < T; ++t) {
                double coef = L(r, t) * Ds;
                if (std::abs(coef) <= 1e-12) continue;
                for (int c : hp_in) e.add(idx.b_mout[c][u][y][s][t], coef);
              }
              cone.vec.push_back(std::move(e));
            }
          }
          m.add_cone(std::move(cone));
          if (audit) ++audit->cones["sector_cap_dem_cc"];
        }
      }
    }
  }
}

CcAudit expected_cc_counts(const SystemConfig& cfg, int scenario_count) {
  CcAudit a;
  const int Y = cfg.horizon.epochs;
  const int T = cfg.horizon.hours_per_day;
  const int S = scenario_count;
  const int nI = int(cfg.sources.size());
  const int nJ = int(cfg.demands.size());
  const int nH = int(cfg.hvdc_corridors().size());
  const int nP = int(cfg.hp_corridors().size());
  a.rank1["hvdc_cap"] = nH * Y * S * T;
  a.rank1["hp_inflow"] = nP * Y * S * T;
  a.rank1["hp_storage"] = nP * Y * S * T;
  a.rank1["p2g_band_hi_cc"] = nI * Y * S * T;
  a.rank1["p2g_band_lo_cc"] = nI * Y * S * T;
  a.cones["p2g_ramp_cc"] = nI * Y * S * T;
  a.cones["sector_cap_src_cc"] = nI * kNumSectors * Y;
  // demand-side cones exist only where a pipeline terminates
  int dem_cones = 0;
  for (int j = 0; j < nJ; ++j) {
    bool has_hp = false;
    for (int c : cfg.hp_corridors())
      if (cfg.corridors[size_t(c)].to_idx == j) has_hp = true;
    if (has_hp) dem_cones += kNumSectors * Y;
  }
  a.cones["sector_cap_dem_cc"] = dem_cones;
  return a;
}

}  // namespace hyplan
