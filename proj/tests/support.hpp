#pragma once
// Shared test helpers: brute-force oracles and instance generators used to
// cross-check the solver and the program formulations by independent routes.
#include <esskit/ess.hpp>
#include <esskit/lp.hpp>

#include <algorithm>
#include <bitset>
#include <cmath>
#include <cstddef>
#include <limits>
#include <random>
#include <vector>

namespace testsup {

using esskit::lp::kInf;
using esskit::lp::LpProblem;
using esskit::lp::LpStatus;
using esskit::lp::Rel;
using esskit::lp::SparseRow;

struct Oracle {
  LpStatus status;
  double obj;
};

// Dense Gauss-Jordan solve; returns false on a singular system.
inline bool gauss_solve(std::vector<std::vector<double>> A, std::vector<double> b,
                        std::vector<double>& x) {
  const int n = int(b.size());
  for (int c = 0; c < n; ++c) {
    int p = -1;
    double best = 1e-10;
    for (int r = c; r < n; ++r)
      if (std::fabs(A[r][c]) > best) { best = std::fabs(A[r][c]); p = r; }
    if (p < 0) return false;
    std::swap(A[c], A[p]);
    std::swap(b[c], b[p]);
    for (int r = 0; r < n; ++r)
      if (r != c && A[r][c] != 0.0) {
        double f = A[r][c] / A[c][c];
        for (int cc = c; cc < n; ++cc) A[r][cc] -= f * A[c][cc];
        b[r] -= f * b[c];
      }
  }
  x.resize(b.size());
  for (int i = 0; i < n; ++i) x[i] = b[i] / A[i][i];
  return true;
}

// Enumerates every candidate vertex of the polyhedron (constraint subsets
// active + variables fixed at bounds), keeping the best feasible objective.
// Unbounded directions are handled by the caller via box escalation.
inline Oracle vertex_oracle(const LpProblem& p, double box) {
  const int n = int(p.num_vars), m = int(p.constraints.size());
  std::vector<std::vector<double>> rows(m, std::vector<double>(n, 0.0));
  for (int i = 0; i < m; ++i)
    for (const auto& [j, v] : p.constraints[i].row) rows[i][j] += v;
  auto lo = [&](int j) { double l = p.var_bounds[j].lower; return l == -kInf ? -box : l; };
  auto hi = [&](int j) { double h = p.var_bounds[j].upper; return h == kInf ? box : h; };
  double best = -1e300;
  bool any = false;
  for (int smask = 0; smask < (1 << m); ++smask) {
    int scount = __builtin_popcount(unsigned(smask));
    if (scount > n) continue;
    int need = n - scount;
    for (int fmask = 0; fmask < (1 << n); ++fmask) {
      if (__builtin_popcount(unsigned(fmask)) != need) continue;
      std::vector<int> free_vars, fixed_vars;
      for (int j = 0; j < n; ++j)
        (fmask >> j & 1) ? fixed_vars.push_back(j) : free_vars.push_back(j);
      for (int sides = 0; sides < (1 << need); ++sides) {
        std::vector<double> xfull(n, 0.0);
        for (int idx = 0; idx < need; ++idx) {
          int j = fixed_vars[idx];
          xfull[j] = (sides >> idx & 1) ? hi(j) : lo(j);
        }
        const int k = int(free_vars.size());
        std::vector<std::vector<double>> A;
        std::vector<double> rhs;
        for (int i = 0; i < m; ++i)
          if (smask >> i & 1) {
            std::vector<double> ar(free_vars.size());
            double rr = p.constraints[i].rhs;
            for (int idx = 0; idx < k; ++idx) ar[idx] = rows[i][free_vars[idx]];
            for (int j : fixed_vars) rr -= rows[i][j] * xfull[j];
            A.push_back(std::move(ar));
            rhs.push_back(rr);
          }
        if (int(A.size()) != k) continue;
        std::vector<double> xf;
        if (k > 0 && !gauss_solve(A, rhs, xf)) continue;
        for (int idx = 0; idx < k; ++idx) xfull[free_vars[idx]] = xf[idx];
        bool ok = true;
        for (int j = 0; j < n && ok; ++j)
          ok = xfull[j] >= lo(j) - 1e-7 && xfull[j] <= hi(j) + 1e-7;
        for (int i = 0; i < m && ok; ++i) {
          double s = 0;
          for (int j = 0; j < n; ++j) s += rows[i][j] * xfull[j];
          auto rel = p.constraints[i].rel;
          if (rel == Rel::le) ok = s <= p.constraints[i].rhs + 1e-7;
          else if (rel == Rel::ge) ok = s >= p.constraints[i].rhs - 1e-7;
          else ok = std::fabs(s - p.constraints[i].rhs) <= 1e-7;
        }
        if (!ok) continue;
        any = true;
        double obj = 0;
        for (int j = 0; j < n; ++j) obj += p.objective[j] * xfull[j];
        if (obj > best) best = obj;
      }
    }
  }
  if (!any) return {LpStatus::Infeasible, 0.0};
  return {LpStatus::Optimal, best};
}

// Status-aware wrapper: if enlarging the artificial box keeps improving the
// objective the instance is unbounded.
inline Oracle vertex_oracle_status(const LpProblem& p) {
  Oracle a = vertex_oracle(p, 1e4);
  if (a.status == LpStatus::Infeasible) return a;
  Oracle b = vertex_oracle(p, 1e5);
  if (b.obj > a.obj + 1e-5 * (1.0 + std::fabs(a.obj))) return {LpStatus::Unbounded, 0.0};
  return a;
}

inline double uniform(std::mt19937_64& rng, double a, double b) {
  return a + (b - a) * double(rng() >> 11) * 0x1.0p-53;
}

// Random small instance exercising every bound kind, duplicate row indices,
// equalities, and degenerate zero rhs values.
inline LpProblem gen_random_lp(std::mt19937_64& rng) {
  const int n = 2 + int(rng() % 7);  // 2..8 vars
  const int m = 1 + int(rng() % 6);  // 1..6 rows
  LpProblem p;
  for (int j = 0; j < n; ++j) {
    double lo = 0, hi = kInf;
    int kind = int(rng() % 6);
    if (kind <= 1) { lo = uniform(rng, -5, 0); hi = lo + uniform(rng, 0.5, 8); }
    else if (kind <= 3) { lo = 0; hi = uniform(rng, 1, 10); }
    else if (kind == 4) { lo = uniform(rng, -3, 3); hi = kInf; }
    else { lo = -kInf; hi = kInf; }
    p.add_var("", lo, hi, rng() % 5 == 0 ? 0.0 : uniform(rng, -3, 3));
  }
  for (int i = 0; i < m; ++i) {
    SparseRow row;
    for (int j = 0; j < n; ++j)
      if (rng() % 3 != 0) row.emplace_back(j, rng() % 6 == 0 ? 1.0 : uniform(rng, -4, 4));
    if (row.empty()) row.emplace_back(rng() % n, 1.0);
    if (rng() % 7 == 0) row.emplace_back(row[0].first, uniform(rng, -1, 1));
    Rel rel = rng() % 3 == 0 ? Rel::eq : (rng() % 2 ? Rel::le : Rel::ge);
    double rhs = rng() % 5 == 0 ? 0.0 : uniform(rng, -6, 6);
    p.add_constraint(std::move(row), rel, rhs);
  }
  return p;
}

// A technology with free equipment and no self-discharge so tiny instances
// have closed-form economics.
inline esskit::EssTechnology simple_tech(double eta, double gamma = 1.0, double dod = 1.0) {
  esskit::EssTechnology t;
  t.power_price = 0.0;
  t.energy_price = 0.0;
  t.float_life_days = 3650.0;
  t.cycle_life = 1e9;
  t.self_discharge_per_hour = 0.0;
  t.charge_efficiency = eta;
  t.charge_rate_ratio = gamma;
  t.depth_of_discharge = dod;
  t.ramp_time_seconds = 0.0;
  return t;
}

constexpr double kGridInf = std::numeric_limits<double>::infinity();

// Grid-search oracle for a tiny reserve-tracking instance with fixed caps and
// every slot tracked. Outer 1% grid over the reserve range; inner DP over a 1%
// stored-energy grid with battery-side transition rates. Requires zero
// self-discharge so transitions stay on the grid. Returns the best profit.
inline double rsr_grid_oracle(const esskit::EssTechnology& tech, const esskit::Capacities& caps,
                              const std::vector<double>& beta, double slot_hours,
                              double price, double theta, double rho1, double hours_per_day,
                              double cycles_per_day, double r_max,
                              int r_steps = 100, int e_steps = 100) {
  const int T = int(beta.size());
  const double life = cycles_per_day > 0.0
                          ? std::min(tech.float_life_days, tech.cycle_life / cycles_per_day)
                          : tech.float_life_days;
  const double cost = (tech.power_price * caps.p_cap + tech.energy_price * caps.e_cap) / life;
  const double e_lo = (1.0 - tech.depth_of_discharge) * caps.e_cap;
  const double g = (caps.e_cap - e_lo) / e_steps;
  double best = -kGridInf;
  for (int ri = 0; ri <= r_steps; ++ri) {
    const double R = r_max * ri / r_steps;
    std::vector<double> dp(e_steps + 1, 0.0), nxt;
    for (int t = 0; t < T; ++t) {
      nxt.assign(e_steps + 1, kGridInf);
      const double target = R * beta[t];
      const double band = rho1 * R * std::fabs(beta[t]);
      for (int a = 0; a <= e_steps; ++a) {
        if (dp[a] == kGridInf) continue;
        for (int b = 0; b <= e_steps; ++b) {
          const double x = (b - a) * g / slot_hours;  // battery-side kW
          if (x > caps.p_cap / tech.charge_rate_ratio + 1e-9) continue;
          if (x < -caps.p_cap - 1e-9) continue;
          const double u = x >= 0.0 ? x / tech.charge_efficiency : x;
          if (std::fabs(u - target) > band + 1e-9) continue;
          const double c = dp[a] + std::fabs(u - target);
          if (c < nxt[b]) nxt[b] = c;
        }
      }
      dp.swap(nxt);
    }
    const double dev = *std::min_element(dp.begin(), dp.end());
    if (dev == kGridInf) continue;
    const double profit = hours_per_day * price * R - theta * hours_per_day * price * dev / T - cost;
    best = std::max(best, profit);
  }
  return best;
}

// Grid-search oracle for a tiny peak-shaving instance with fixed caps: 1% grid
// over the shaved power, stored-energy reachability DP with the periodic
// endpoint, profit maximized over feasible grid points.
inline double ps_grid_oracle(const esskit::EssTechnology& tech, const esskit::Capacities& caps,
                             const std::vector<double>& load, double slot_hours,
                             double daily_peak_price, double cycles_per_day,
                             int r_steps = 100, int e_steps = 100) {
  const int T = int(load.size());
  const double peak = *std::max_element(load.begin(), load.end());
  const double life = cycles_per_day > 0.0
                          ? std::min(tech.float_life_days, tech.cycle_life / cycles_per_day)
                          : tech.float_life_days;
  const double cost = (tech.power_price * caps.p_cap + tech.energy_price * caps.e_cap) / life;
  const double e_lo = (1.0 - tech.depth_of_discharge) * caps.e_cap;
  const double g = (caps.e_cap - e_lo) / e_steps;
  constexpr int kMaxNodes = 128;
  double best = -kGridInf;
  for (int ri = 0; ri <= r_steps; ++ri) {
    const double R = peak * ri / r_steps;
    // allowed[t][a] = reachable next-energy nodes from node a during slot t
    std::vector<std::vector<std::bitset<kMaxNodes>>> allowed(
        T, std::vector<std::bitset<kMaxNodes>>(e_steps + 1));
    for (int t = 0; t < T; ++t)
      for (int a = 0; a <= e_steps; ++a)
        for (int b = 0; b <= e_steps; ++b) {
          const double x = (b - a) * g / slot_hours;
          if (x > caps.p_cap / tech.charge_rate_ratio + 1e-9) continue;
          if (x < -caps.p_cap - 1e-9) continue;
          const double u = x >= 0.0 ? x / tech.charge_efficiency : x;
          if (u > peak - R - load[t] + 1e-9) continue;  // shaved ceiling
          if (u < -load[t] - 1e-9) continue;            // no export
          allowed[t][a].set(b);
        }
    bool feasible = false;
    for (int start = 0; start <= e_steps && !feasible; ++start) {
      std::bitset<kMaxNodes> reach;
      reach.set(start);
      for (int t = 0; t < T; ++t) {
        std::bitset<kMaxNodes> next;
        for (int a = 0; a <= e_steps; ++a)
          if (reach.test(a)) next |= allowed[t][a];
        reach = next;
        if (reach.none()) break;
      }
      feasible = reach.test(start);  // periodic stored energy
    }
    if (feasible) best = std::max(best, daily_peak_price * R - cost);
  }
  return best;
}

}  // namespace testsup
