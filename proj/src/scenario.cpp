#include "scenario.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "json.hpp"
#include "util.hpp"

namespace hyplan {

using nlohmann::json;

int ScenarioSet::total_days() const {
  return std::accumulate(weights.begin(), weights.end(), 0);
}

Eigen::Matrix2d MomentModel::sigma(int s, int t) const {
  return sigma_day[size_t(s)].block<2, 2>(2 * t, 2 * t);
}

Eigen::Matrix4d MomentModel::sigma_pair(int s, int t1, int t2) const {
  const Eigen::MatrixXd& M = sigma_day[size_t(s)];
  Eigen::Matrix4d out;
  out.block<2, 2>(0, 0) = M.block<2, 2>(2 * t1, 2 * t1);
  out.block<2, 2>(0, 2) = M.block<2, 2>(2 * t1, 2 * t2);
  out.block<2, 2>(2, 0) = M.block<2, 2>(2 * t2, 2 * t1);
  out.block<2, 2>(2, 2) = M.block<2, 2>(2 * t2, 2 * t2);
  return out;
}

Eigen::MatrixXd MomentModel::full() const {
  const int n = 2 * scenario_count * hours_per_day;
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(n, n);
  for (int s = 0; s < scenario_count; ++s) {
    int off = 2 * s * hours_per_day;
    out.block(off, off, 2 * hours_per_day, 2 * hours_per_day) = sigma_day[size_t(s)];
  }
  return out;
}

std::vector<DailyProfile> load_profile_days(const SystemConfig& cfg) {
  auto wt = read_csv(cfg.profile_path(cfg.profiles.wt));
  auto pv = read_csv(cfg.profile_path(cfg.profiles.pv));
  auto load = read_csv(cfg.profile_path(cfg.profiles.load));
  const size_t T = size_t(cfg.horizon.hours_per_day);
  if (wt.size() != pv.size() || wt.size() != load.size())
    fail_validation("profiles: wt/pv/load csv files disagree on day count");
  auto check = [&](const std::vector<std::vector<double>>& rows, const char* which) {
    for (size_t d = 0; d < rows.size(); ++d) {
      if (rows[d].size() != T)
        fail_validation(std::string("profiles: ") + which + " day " + std::to_string(d + 1) +
                        " has " + std::to_string(rows[d].size()) + " hours, deck horizon says " +
                        std::to_string(T));
      for (double v : rows[d])
        if (!(v >= 0.0 && v <= 1.5))
          fail_validation(std::string("profiles: ") + which + " day " + std::to_string(d + 1) +
                          ": per-unit value " + format_double(v) + " outside [0, 1.5]");
    }
  };
  check(wt, "wt");
  check(pv, "pv");
  check(load, "load");
  std::vector<DailyProfile> days(wt.size());
  for (size_t d = 0; d < wt.size(); ++d) {
    days[d].wt = wt[d];
    days[d].pv = pv[d];
    days[d].load = load[d];
  }
  return days;
}

namespace {

std::vector<double> concat_day(const DailyProfile& d) {
  std::vector<double> v;
  v.reserve(d.wt.size() * 3);
  v.insert(v.end(), d.wt.begin(), d.wt.end());
  v.insert(v.end(), d.pv.begin(), d.pv.end());
  v.insert(v.end(), d.load.begin(), d.load.end());
  return v;
}

double sq_dist(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0;
  for (size_t i = 0; i < a.size(); ++i) {
    double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

}  // namespace

double kmeans_once(const std::vector<std::vector<double>>& points, int S, uint64_t seed,
                   std::vector<int>& assign, std::vector<std::vector<double>>& centroids,
                   std::vector<double>* wcss_trace) {
  const int n = int(points.size());
  const size_t dim = points[0].size();
  std::mt19937_64 rng(seed);

  // k-means++ seeding
  centroids.clear();
  std::uniform_int_distribution<int> uni(0, n - 1);
  centroids.push_back(points[size_t(uni(rng))]);
  std::vector<double> d2((size_t(n)));
  while (int(centroids.size()) < S) {
    double total = 0;
    for (int i = 0; i < n; ++i) {
      double best = std::numeric_limits<double>::max();
      for (const auto& c : centroids) best = std::min(best, sq_dist(points[size_t(i)], c));
      d2[size_t(i)] = best;
      total += best;
    }
    int pick;
    if (total <= 0) {
      pick = uni(rng);  // all remaining points coincide with a centroid
    } else {
      std::uniform_real_distribution<double> ur(0.0, total);
      double r = ur(rng);
      pick = n - 1;
      double acc = 0;
      for (int i = 0; i < n; ++i) {
        acc += d2[size_t(i)];
        if (acc >= r) {
          pick = i;
          break;
        }
      }
    }
    centroids.push_back(points[size_t(pick)]);
  }

  assign.assign(size_t(n), -1);
  double wcss = 0;
  for (int iter = 0; iter < 100; ++iter) {
    bool changed = false;
    wcss = 0;
    for (int i = 0; i < n; ++i) {
      int best = 0;
      double bestd = sq_dist(points[size_t(i)], centroids[0]);
      for (int s = 1; s < S; ++s) {
        double d = sq_dist(points[size_t(i)], centroids[size_t(s)]);
        if (d < bestd) {
          bestd = d;
          best = s;
        }
      }
      if (assign[size_t(i)] != best) {
        assign[size_t(i)] = best;
        changed = true;
      }
      wcss += bestd;
    }
    if (wcss_trace) wcss_trace->push_back(wcss);
    if (!changed && iter > 0) break;

    std::vector<int> counts(size_t(S), 0);
    std::vector<std::vector<double>> sums(size_t(S), std::vector<double>(dim, 0.0));
    for (int i = 0; i < n; ++i) {
      int s = assign[size_t(i)];
      ++counts[size_t(s)];
      for (size_t k = 0; k < dim; ++k) sums[size_t(s)][k] += points[size_t(i)][k];
    }
    for (int s = 0; s < S; ++s) {
      if (counts[size_t(s)] == 0) {
        // re-seed an empty cluster on the point farthest from its centroid
        int far = 0;
        double fard = -1;
        for (int i = 0; i < n; ++i) {
          double d = sq_dist(points[size_t(i)], centroids[size_t(assign[size_t(i)])]);
          if (d > fard) {
            fard = d;
            far = i;
          }
        }
        centroids[size_t(s)] = points[size_t(far)];
        assign[size_t(far)] = s;
      } else {
        for (size_t k = 0; k < dim; ++k)
          centroids[size_t(s)][k] = sums[size_t(s)][k] / counts[size_t(s)];
      }
    }
  }

  // final pass so the reported wcss matches the returned assignment
  wcss = 0;
  for (int i = 0; i < n; ++i) {
    int best = 0;
    double bestd = sq_dist(points[size_t(i)], centroids[0]);
    for (int s = 1; s < S; ++s) {
      double d = sq_dist(points[size_t(i)], centroids[size_t(s)]);
      if (d < bestd) {
        bestd = d;
        best = s;
      }
    }
    assign[size_t(i)] = best;
    wcss += bestd;
  }
  if (wcss_trace) wcss_trace->push_back(wcss);
  return wcss;
}

ScenarioSet cluster_typical_days(const std::vector<DailyProfile>& days, int S, uint64_t seed) {
  if (days.empty()) fail_validation("clustering: no input days");
  if (S < 1 || S > int(days.size()))
    fail_validation("clustering: scenario count must lie in [1, day count]");
  const int T = int(days[0].wt.size());

  std::vector<std::vector<double>> points;
  points.reserve(days.size());
  for (const auto& d : days) points.push_back(concat_day(d));

  const int restarts = 50;
  double best_wcss = std::numeric_limits<double>::max();
  std::vector<int> best_assign;
  std::vector<std::vector<double>> best_cent;
  for (int r = 0; r < restarts; ++r) {
    std::vector<int> assign;
    std::vector<std::vector<double>> cent;
    double wcss = kmeans_once(points, S, mix_seed(seed, uint64_t(r)), assign, cent, nullptr);
    if (wcss < best_wcss) {
      best_wcss = wcss;
      best_assign = std::move(assign);
      best_cent = std::move(cent);
    }
    if (best_wcss == 0.0) break;
  }

  std::vector<int> counts(size_t(S), 0);
  for (int a : best_assign) ++counts[size_t(a)];

  // canonical scenario order: heaviest first, ties by centroid lexicographic
  std::vector<int> order((size_t(S)));
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    if (counts[size_t(a)] != counts[size_t(b)]) return counts[size_t(a)] > counts[size_t(b)];
    return best_cent[size_t(a)] < best_cent[size_t(b)];
  });

  ScenarioSet out;
  out.hours_per_day = T;
  for (int rank = 0; rank < S; ++rank) {
    int s = order[size_t(rank)];
    DailyProfile p;
    const auto& c = best_cent[size_t(s)];
    p.wt.assign(c.begin(), c.begin() + T);
    p.pv.assign(c.begin() + T, c.begin() + 2 * T);
    p.load.assign(c.begin() + 2 * T, c.begin() + 3 * T);
    out.scenarios.push_back(std::move(p));
    out.weights.push_back(counts[size_t(s)]);
  }
  return out;
}

MomentModel estimate_moments(const std::vector<DailyProfile>& samples, const ScenarioSet& scen) {
  const int S = scen.count();
  const int T = scen.hours_per_day;
  if (samples.empty()) fail_validation("moment estimation: no sample days");

  std::vector<std::vector<double>> cent;
  for (const auto& p : scen.scenarios) cent.push_back(concat_day(p));

  std::vector<std::vector<int>> members((size_t(S)));
  for (size_t d = 0; d < samples.size(); ++d) {
    auto v = concat_day(samples[d]);
    if (int(samples[d].wt.size()) != T)
      fail_validation("moment estimation: sample day length mismatch");
    int best = 0;
    double bestd = sq_dist(v, cent[0]);
    for (int s = 1; s < S; ++s) {
      double dd = sq_dist(v, cent[size_t(s)]);
      if (dd < bestd) {
        bestd = dd;
        best = s;
      }
    }
    members[size_t(best)].push_back(int(d));
  }

  MomentModel m;
  m.scenario_count = S;
  m.hours_per_day = T;
  for (int s = 0; s < S; ++s) {
    if (members[size_t(s)].size() < 2)
      fail_validation("moment estimation: scenario " + std::to_string(s + 1) + " has " +
                      std::to_string(members[size_t(s)].size()) +
                      " assigned sample days, need at least 2");
    Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(2 * T, 2 * T);
    Eigen::VectorXd err(2 * T);
    for (int d : members[size_t(s)]) {
      const DailyProfile& day = samples[size_t(d)];
      const DailyProfile& c = scen.scenarios[size_t(s)];
      for (int t = 0; t < T; ++t) {
        err[2 * t] = day.wt[size_t(t)] - c.wt[size_t(t)];
        err[2 * t + 1] = day.pv[size_t(t)] - c.pv[size_t(t)];
      }
      acc.noalias() += err * err.transpose();
    }
    acc /= double(members[size_t(s)].size());
    m.sigma_day.push_back(ensure_psd(acc));
  }
  return m;
}

Eigen::MatrixXd assemble_block_covariance(const MomentModel& m) {
  if (int(m.sigma_day.size()) != m.scenario_count)
    fail_invalid("block covariance: missing scenario blocks");
  for (const auto& b : m.sigma_day)
    if (b.rows() != 2 * m.hours_per_day || b.cols() != 2 * m.hours_per_day)
      fail_invalid("block covariance: block dimension mismatch");
  return ensure_psd(m.full());
}

Eigen::MatrixXd ensure_psd(const Eigen::MatrixXd& m) {
  if (m.rows() != m.cols()) fail_invalid("ensure_psd: matrix not square");
  Eigen::MatrixXd sym = 0.5 * (m + m.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sym);
  Eigen::VectorXd ev = es.eigenvalues();
  bool clipped = false;
  for (int i = 0; i < ev.size(); ++i) {
    if (ev[i] < 0) {
      ev[i] = 0;
      clipped = true;
    }
  }
  if (!clipped) return sym;
  return es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().transpose();
}

Eigen::MatrixXd psd_sqrt(const Eigen::MatrixXd& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (m + m.transpose()));
  Eigen::VectorXd ev = es.eigenvalues();
  for (int i = 0; i < ev.size(); ++i) ev[i] = ev[i] > 0 ? std::sqrt(ev[i]) : 0.0;
  return ev.asDiagonal() * es.eigenvectors().transpose();
}

std::string scenarios_to_json(const ScenarioSet& s) {
  json j;
  j["format"] = "hyplan-scenarios/1";
  j["hours_per_day"] = s.hours_per_day;
  j["scenarios"] = json::array();
  for (int k = 0; k < s.count(); ++k) {
    j["scenarios"].push_back({{"weight", s.weights[size_t(k)]},
                              {"wt", s.scenarios[size_t(k)].wt},
                              {"pv", s.scenarios[size_t(k)].pv},
                              {"load", s.scenarios[size_t(k)].load}});
  }
  return j.dump(2) + "\n";
}

ScenarioSet scenarios_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    fail_io(std::string("scenario file: not valid json: ") + e.what());
  }
  if (!j.contains("format") || j["format"] != "hyplan-scenarios/1")
    fail_io("scenario file: unknown format tag");
  ScenarioSet s;
  s.hours_per_day = j.at("hours_per_day").get<int>();
  for (const auto& e : j.at("scenarios")) {
    DailyProfile p;
    p.wt = e.at("wt").get<std::vector<double>>();
    p.pv = e.at("pv").get<std::vector<double>>();
    p.load = e.at("load").get<std::vector<double>>();
    if (int(p.wt.size()) != s.hours_per_day || int(p.pv.size()) != s.hours_per_day ||
        int(p.load.size()) != s.hours_per_day)
      fail_io("scenario file: profile length mismatch");
    s.scenarios.push_back(std::move(p));
    s.weights.push_back(e.at("weight").get<int>());
    if (s.weights.back() < 1) fail_io("scenario file: weights must be >= 1");
  }
  if (s.scenarios.empty()) fail_io("scenario file: no scenarios");
  return s;
}

std::string moments_to_json(const MomentModel& m) {
  json j;
  j["format"] = "hyplan-moments/1";
  j["scenario_count"] = m.scenario_count;
  j["hours_per_day"] = m.hours_per_day;
  j["sigma_day"] = json::array();
  for (const auto& block : m.sigma_day) {
    json rows = json::array();
    for (int r = 0; r < block.rows(); ++r) {
      json row = json::array();
      for (int c = 0; c < block.cols(); ++c) row.push_back(block(r, c));
      rows.push_back(std::move(row));
    }
    j["sigma_day"].push_back(std::move(rows));
  }
  return j.dump() + "\n";
}

MomentModel moments_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    fail_io(std::string("moment file: not valid json: ") + e.what());
  }
  if (!j.contains("format") || j["format"] != "hyplan-moments/1")
    fail_io("moment file: unknown format tag");
  MomentModel m;
  m.scenario_count = j.at("scenario_count").get<int>();
  m.hours_per_day = j.at("hours_per_day").get<int>();
  const int n = 2 * m.hours_per_day;
  for (const auto& rows : j.at("sigma_day")) {
    Eigen::MatrixXd block(n, n);
    if (int(rows.size()) != n) fail_io("moment file: block dimension mismatch");
    for (int r = 0; r < n; ++r) {
      if (int(rows[size_t(r)].size()) != n) fail_io("moment file: block dimension mismatch");
      for (int c = 0; c < n; ++c) block(r, c) = rows[size_t(r)][size_t(c)].get<double>();
    }
    m.sigma_day.push_back(std::move(block));
  }
  if (int(m.sigma_day.size()) != m.scenario_count)
    fail_io("moment file: scenario count mismatch");
  return m;
}

}  // namespace hyplan
