#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdio>
#include <fstream>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace esskit::lp {

constexpr double kInf = std::numeric_limits<double>::infinity();

using SparseRow = std::vector<std::pair<std::size_t, double>>;

enum class Rel { le, eq, ge };

struct Constraint {
  SparseRow row;
  Rel rel = Rel::le;
  double rhs = 0.0;
};

struct VarBounds {
  double lower = 0.0;
  double upper = kInf;
};

// Maximization LP over individually bounded variables.
struct LpProblem {
  std::size_t num_vars = 0;
  std::vector<double> objective;
  std::vector<VarBounds> var_bounds;
  std::vector<Constraint> constraints;
  std::vector<std::string> names;

  std::size_t add_var(std::string name, double lower, double upper, double obj_coef) {
    names.push_back(std::move(name));
    var_bounds.push_back({lower, upper});
    objective.push_back(obj_coef);
    return num_vars++;
  }
  std::size_t add_constraint(SparseRow row, Rel rel, double rhs) {
    constraints.push_back({std::move(row), rel, rhs});
    return constraints.size() - 1;
  }
};

enum class LpStatus { Optimal, Infeasible, Unbounded };

inline const char* to_string(LpStatus s) {
  switch (s) {
    case LpStatus::Optimal: return "optimal";
    case LpStatus::Infeasible: return "infeasible";
    case LpStatus::Unbounded: return "unbounded";
  }
  return "?";
}

struct LpSolution {
  LpStatus status = LpStatus::Optimal;
  std::vector<double> primal; // per variable; empty unless Optimal
  std::vector<double> duals;  // per constraint; empty unless Optimal
  double objective_value = 0.0;
};

// Appends s >= 0 with s >= expr and s >= -expr and objective term -weight*s.
inline std::size_t add_abs_penalty(LpProblem& p, const SparseRow& expr, double weight) {
  if (!(weight >= 0.0)) throw std::invalid_argument("abs penalty weight must be >= 0");
  const std::size_t s = p.add_var("abs_aux", 0.0, kInf, -weight);
  SparseRow pos = expr;
  pos.emplace_back(s, -1.0);
  p.add_constraint(std::move(pos), Rel::le, 0.0);
  SparseRow neg;
  neg.reserve(expr.size() + 1);
  for (const auto& [j, v] : expr) neg.emplace_back(j, -v);
  neg.emplace_back(s, -1.0);
  p.add_constraint(std::move(neg), Rel::le, 0.0);
  return s;
}

inline void dump_problem(const LpProblem& p, std::ostream& out) {
  char buf[64];
  auto num = [&](double v) -> const char* {
    if (v == kInf) return "inf";
    if (v == -kInf) return "-inf";
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
  };
  out << "# vars=" << p.num_vars << "\n# maximize";
  for (std::size_t j = 0; j < p.objective.size(); ++j)
    if (p.objective[j] != 0.0) out << ' ' << j << ':' << num(p.objective[j]);
  out << "\n# bounds";
  for (std::size_t j = 0; j < p.var_bounds.size(); ++j) {
    out << ' ' << j << ':' << num(p.var_bounds[j].lower);
    out << ':' << num(p.var_bounds[j].upper);
  }
  out << "\n";
  for (const auto& c : p.constraints) {
    for (const auto& [j, v] : c.row) out << j << ':' << num(v) << ' ';
    out << (c.rel == Rel::le ? "<=" : c.rel == Rel::eq ? "=" : ">=") << ' ' << num(c.rhs)
        << "\n";
  }
}

inline void dump_problem(const LpProblem& p, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  dump_problem(p, out);
}

namespace detail {

constexpr double kPivotTol = 1e-9;
constexpr double kFeasTol = 1e-7;
constexpr double kOptTol = 1e-7;
constexpr double kDegenStep = 1e-9;
constexpr double kEtaDiagTol = 1e-7;
constexpr std::size_t kRefactorEvery = 64;

using Col = std::vector<std::pair<int, double>>;

// LU factors of the basis via Gilbert-Peierls column elimination with partial
// pivoting. Positions are elimination steps; prow maps position -> original
// row, cols maps position -> basis slot. L columns live in original row ids,
// U columns in position ids.
class BasisLu {
public:
  void factor(const std::vector<Col>& acols, const std::vector<int>& basic) {
    m_ = basic.size();
    lcols_.assign(m_, {});
    ucols_.assign(m_, {});
    udiag_.assign(m_, 0.0);
    prow_.assign(m_, -1);
    cols_.assign(m_, -1);
    pinv_.assign(m_, -1);
    w_.assign(m_, 0.0);
    mark_.assign(m_, 0);
    gen_ = 0;

    // Process thin columns first; a stable sort keeps the order reproducible.
    std::vector<int> order(m_);
    for (std::size_t k = 0; k < m_; ++k) order[k] = int(k);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
      return acols[std::size_t(basic[std::size_t(a)])].size() <
             acols[std::size_t(basic[std::size_t(b)])].size();
    });

    std::vector<std::pair<int, std::size_t>> stack;
    std::vector<int> topo;
    for (std::size_t k = 0; k < m_; ++k) {
      const int slot = order[k];
      const Col& a = acols[std::size_t(basic[std::size_t(slot)])];
      ++gen_;
      topo.clear();
      for (const auto& [r, v] : a) {
        (void)v;
        if (mark_[std::size_t(r)] == gen_) continue;
        // Iterative DFS over the L dependency graph; edges run from a pivoted
        // row to the rows of its L column, so the graph is acyclic.
        stack.emplace_back(r, 0);
        mark_[std::size_t(r)] = gen_;
        while (!stack.empty()) {
          const int node = stack.back().first;
          const int j = pinv_[std::size_t(node)];
          if (j < 0) {
            topo.push_back(node);
            stack.pop_back();
            continue;
          }
          const Col& lc = lcols_[std::size_t(j)];
          bool descended = false;
          while (stack.back().second < lc.size()) {
            const int child = lc[stack.back().second].first;
            ++stack.back().second;
            if (mark_[std::size_t(child)] != gen_) {
              mark_[std::size_t(child)] = gen_;
              stack.emplace_back(child, 0);
              descended = true;
              break;
            }
          }
          if (!descended) {
            topo.push_back(node);
            stack.pop_back();
          }
        }
      }
      for (const auto& [r, v] : a) w_[std::size_t(r)] = v;
      for (std::size_t i = topo.size(); i-- > 0;) {
        const int node = topo[i];
        const int j = pinv_[std::size_t(node)];
        if (j < 0) continue;
        const double val = w_[std::size_t(node)];
        if (val != 0.0)
          for (const auto& [r, lv] : lcols_[std::size_t(j)]) w_[std::size_t(r)] -= val * lv;
      }
      int piv = -1;
      double piv_abs = 0.0;
      for (const int node : topo) {
        if (pinv_[std::size_t(node)] >= 0) continue;
        const double a_abs = std::fabs(w_[std::size_t(node)]);
        if (a_abs > piv_abs || (a_abs == piv_abs && piv >= 0 && a_abs > 0.0 && node < piv)) {
          piv_abs = a_abs;
          piv = node;
        }
      }
      if (piv < 0 || piv_abs <= kPivotTol) throw std::runtime_error("singular basis matrix");
      const double pv = w_[std::size_t(piv)];
      auto& uc = ucols_[k];
      auto& lc = lcols_[k];
      for (const int node : topo) {
        const double val = w_[std::size_t(node)];
        w_[std::size_t(node)] = 0.0;
        if (val == 0.0) continue;
        const int j = pinv_[std::size_t(node)];
        if (j >= 0) uc.emplace_back(j, val);
        else if (node != piv) lc.emplace_back(node, val / pv);
      }
      udiag_[k] = pv;
      prow_[k] = piv;
      cols_[k] = slot;
      pinv_[std::size_t(piv)] = int(k);
    }
  }

  // Solves B z = rhs; rhs indexed by original row, z by basis slot.
  void ftran(std::vector<double>& work_rows, std::vector<double>& z) const {
    for (std::size_t k = 0; k < m_; ++k) {
      const double val = work_rows[std::size_t(prow_[k])];
      if (val != 0.0)
        for (const auto& [r, lv] : lcols_[k]) work_rows[std::size_t(r)] -= val * lv;
    }
    upos_.resize(m_);
    for (std::size_t k = 0; k < m_; ++k) upos_[k] = work_rows[std::size_t(prow_[k])];
    for (std::size_t k = m_; k-- > 0;) {
      const double vk = upos_[k] / udiag_[k];
      upos_[k] = vk;
      if (vk != 0.0)
        for (const auto& [j, uv] : ucols_[k]) upos_[std::size_t(j)] -= vk * uv;
    }
    for (std::size_t k = 0; k < m_; ++k) z[std::size_t(cols_[k])] = upos_[k];
  }

  // Solves B^T y = cb; cb indexed by basis slot, y by original row.
  void btran(const std::vector<double>& cb, std::vector<double>& y) const {
    upos_.resize(m_);
    for (std::size_t k = 0; k < m_; ++k) {
      double g = cb[std::size_t(cols_[k])];
      for (const auto& [j, uv] : ucols_[k]) g -= uv * upos_[std::size_t(j)];
      upos_[k] = g / udiag_[k];
    }
    for (std::size_t k = m_; k-- > 0;) {
      double val = upos_[k];
      for (const auto& [r, lv] : lcols_[k]) val -= lv * y[std::size_t(r)];
      y[std::size_t(prow_[k])] = val;
    }
  }

private:
  std::size_t m_ = 0;
  std::vector<Col> lcols_, ucols_;
  std::vector<double> udiag_;
  std::vector<int> prow_, cols_, pinv_;
  std::vector<double> w_;
  std::vector<int> mark_;
  int gen_ = 0;
  mutable std::vector<double> upos_;
};

struct Eta {
  int slot = 0;
  double diag = 1.0;
  Col off;
};

enum class VarState : unsigned char { AtLower, AtUpper, Free, Basic };

class Simplex {
public:
  explicit Simplex(const LpProblem& p) : p_(p) { build(); }

  LpSolution run() {
    LpSolution sol;
    if (has_artificials_) {
      phase2_ = false;
      if (!run_phase()) throw std::runtime_error("phase-1 subproblem reported unbounded");
      for (const auto& [art, row] : artificials_) {
        if (std::fabs(x_[art]) > kFeasTol * (1.0 + std::fabs(b_[row]))) {
          sol.status = LpStatus::Infeasible;
          return sol;
        }
      }
      for (const auto& [art, row] : artificials_) {
        (void)row;
        lo_[art] = hi_[art] = 0.0;
        if (state_[art] != VarState::Basic) {
          x_[art] = 0.0;
          state_[art] = VarState::AtLower;
        }
      }
    }
    phase2_ = true;
    bland_ = false;
    degen_count_ = 0;
    if (!run_phase()) {
      sol.status = LpStatus::Unbounded;
      return sol;
    }
    // Polish: fresh factorization, exact basic values, then duals.
    refactor();
    sol.status = LpStatus::Optimal;
    sol.primal.assign(x_.begin(), x_.begin() + std::ptrdiff_t(p_.num_vars));
    sol.duals = dual_values();
    double obj = 0.0;
    for (std::size_t j = 0; j < ncols_; ++j) obj += cost_[j] * x_[j];
    sol.objective_value = obj;
    return sol;
  }

private:
  const LpProblem& p_;
  std::size_t nrows_ = 0, ncols_ = 0;
  std::vector<Col> acols_;
  std::vector<double> b_, cost_, phase1_cost_, lo_, hi_, x_;
  std::vector<VarState> state_;
  std::vector<int> basic_;
  std::vector<std::pair<std::size_t, std::size_t>> artificials_; // (column, row)
  bool has_artificials_ = false;
  bool phase2_ = true;
  bool bland_ = false;
  std::size_t degen_count_ = 0;
  std::size_t bland_after_ = 0;
  std::size_t price_start_ = 0;
  double dtol_ = kOptTol;

  BasisLu lu_;
  std::vector<Eta> etas_;
  std::vector<double> work_rows_, wslot_, y_, cb_;

  void build() {
    const std::size_t n = p_.num_vars;
    nrows_ = p_.constraints.size();
    if (p_.objective.size() != n || p_.var_bounds.size() != n)
      throw std::invalid_argument("objective/bounds size must equal num_vars");
    for (std::size_t j = 0; j < n; ++j) {
      if (std::isnan(p_.var_bounds[j].lower) || std::isnan(p_.var_bounds[j].upper) ||
          p_.var_bounds[j].lower > p_.var_bounds[j].upper)
        throw std::invalid_argument("variable " + std::to_string(j) + " has empty bound range");
    }

    ncols_ = n + nrows_;
    acols_.assign(ncols_, {});
    cost_.assign(ncols_, 0.0);
    lo_.assign(ncols_, 0.0);
    hi_.assign(ncols_, 0.0);
    b_.assign(nrows_, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
      cost_[j] = p_.objective[j];
      lo_[j] = p_.var_bounds[j].lower;
      hi_[j] = p_.var_bounds[j].upper;
    }
    for (std::size_t i = 0; i < nrows_; ++i) {
      const auto& c = p_.constraints[i];
      // Merge duplicate indices so each column entry is unique.
      std::vector<std::pair<std::size_t, double>> merged(c.row);
      std::stable_sort(merged.begin(), merged.end(),
                       [](const auto& a, const auto& bb) { return a.first < bb.first; });
      std::size_t w = 0;
      for (std::size_t rdx = 0; rdx < merged.size(); ++rdx) {
        if (merged[rdx].first >= n)
          throw std::invalid_argument("constraint " + std::to_string(i) +
                                      " references variable out of range");
        if (w > 0 && merged[w - 1].first == merged[rdx].first)
          merged[w - 1].second += merged[rdx].second;
        else
          merged[w++] = merged[rdx];
      }
      merged.resize(w);
      for (const auto& [j, v] : merged)
        if (v != 0.0) acols_[j].emplace_back(int(i), v);
      b_[i] = c.rhs;
      const std::size_t s = n + i;
      acols_[s].emplace_back(int(i), 1.0);
      switch (c.rel) {
        case Rel::le: lo_[s] = 0.0; hi_[s] = kInf; break;
        case Rel::ge: lo_[s] = -kInf; hi_[s] = 0.0; break;
        case Rel::eq: lo_[s] = 0.0; hi_[s] = 0.0; break;
      }
    }

    // Start structural variables on a finite bound (or 0 when free).
    x_.assign(ncols_, 0.0);
    state_.assign(ncols_, VarState::AtLower);
    for (std::size_t j = 0; j < n; ++j) {
      if (lo_[j] > -kInf) {
        x_[j] = lo_[j];
        state_[j] = VarState::AtLower;
      } else if (hi_[j] < kInf) {
        x_[j] = hi_[j];
        state_[j] = VarState::AtUpper;
      } else {
        x_[j] = 0.0;
        state_[j] = VarState::Free;
      }
    }
    std::vector<double> partial(nrows_, 0.0);
    for (std::size_t j = 0; j < n; ++j)
      if (x_[j] != 0.0)
        for (const auto& [r, v] : acols_[j]) partial[std::size_t(r)] += v * x_[j];

    // Slacks form the identity start basis; rows whose required slack value
    // falls outside the slack range get a basic artificial instead.
    basic_.assign(nrows_, -1);
    for (std::size_t i = 0; i < nrows_; ++i) {
      const std::size_t s = n + i;
      const double want = b_[i] - partial[i];
      if (want >= lo_[s] && want <= hi_[s]) {
        basic_[i] = int(s);
        state_[s] = VarState::Basic;
        x_[s] = want;
        continue;
      }
      const double pinned = want < lo_[s] ? lo_[s] : hi_[s];
      x_[s] = pinned;
      state_[s] = want < lo_[s] ? VarState::AtLower : VarState::AtUpper;
      const double resid = want - pinned;
      const std::size_t a = ncols_++;
      acols_.emplace_back(Col{{int(i), 1.0}});
      cost_.push_back(0.0);
      if (resid > 0.0) {
        lo_.push_back(0.0);
        hi_.push_back(kInf);
      } else {
        lo_.push_back(-kInf);
        hi_.push_back(0.0);
      }
      x_.push_back(resid);
      state_.push_back(VarState::Basic);
      basic_[i] = int(a);
      artificials_.emplace_back(a, i);
    }
    has_artificials_ = !artificials_.empty();
    phase1_cost_.assign(ncols_, 0.0);
    for (const auto& [a, row] : artificials_) {
      (void)row;
      phase1_cost_[a] = hi_[a] == kInf ? -1.0 : 1.0;
    }

    bland_after_ = 5 * std::max<std::size_t>(p_.num_vars, 4);
    work_rows_.assign(nrows_, 0.0);
    wslot_.assign(nrows_, 0.0);
    y_.assign(nrows_, 0.0);
    cb_.assign(nrows_, 0.0);
    refactor();
  }

  double cost_of(std::size_t j) const {
    return phase2_ ? cost_[j] : (j < phase1_cost_.size() ? phase1_cost_[j] : 0.0);
  }

  void refactor() {
    etas_.clear();
    if (nrows_ == 0) return;
    lu_.factor(acols_, basic_);
    recompute_basics();
  }

  void recompute_basics() {
    if (nrows_ == 0) return;
    std::fill(work_rows_.begin(), work_rows_.end(), 0.0);
    for (std::size_t i = 0; i < nrows_; ++i) work_rows_[i] = b_[i];
    for (std::size_t j = 0; j < ncols_; ++j)
      if (state_[j] != VarState::Basic && x_[j] != 0.0)
        for (const auto& [r, v] : acols_[j]) work_rows_[std::size_t(r)] -= v * x_[j];
    lu_.ftran(work_rows_, wslot_);
    for (std::size_t k = 0; k < nrows_; ++k) x_[std::size_t(basic_[k])] = wslot_[k];
  }

  // z = B^{-1} a_col, in slot space.
  void ftran_col(std::size_t col, std::vector<double>& z) {
    std::fill(work_rows_.begin(), work_rows_.end(), 0.0);
    for (const auto& [r, v] : acols_[col]) work_rows_[std::size_t(r)] = v;
    lu_.ftran(work_rows_, z);
    for (const auto& e : etas_) {
      const double zr = z[std::size_t(e.slot)] / e.diag;
      if (zr != 0.0 || z[std::size_t(e.slot)] != 0.0)
        for (const auto& [r, v] : e.off) z[std::size_t(r)] -= v * zr;
      z[std::size_t(e.slot)] = zr;
    }
  }

  // y solving B^T y = cost of basics, in row space.
  void compute_y() {
    if (nrows_ == 0) return;
    for (std::size_t k = 0; k < nrows_; ++k) cb_[k] = cost_of(std::size_t(basic_[k]));
    for (std::size_t e = etas_.size(); e-- > 0;) {
      const Eta& et = etas_[e];
      double acc = cb_[std::size_t(et.slot)];
      for (const auto& [r, v] : et.off) acc -= v * cb_[std::size_t(r)];
      cb_[std::size_t(et.slot)] = acc / et.diag;
    }
    lu_.btran(cb_, y_);
  }

  double reduced_cost(std::size_t j) const {
    double d = cost_of(j);
    for (const auto& [r, v] : acols_[j]) d -= y_[std::size_t(r)] * v;
    return d;
  }

  bool improves(std::size_t j, double d) const {
    switch (state_[j]) {
      case VarState::AtLower: return d > dtol_;
      case VarState::AtUpper: return d < -dtol_;
      case VarState::Free: return std::fabs(d) > dtol_;
      case VarState::Basic: return false;
    }
    return false;
  }

  // Entering choice: Bland takes the lowest improving index; otherwise a
  // rotating window is scanned and the best |reduced cost| in the first
  // window containing any improving column wins.
  long pick_entering() {
    if (bland_) {
      for (std::size_t j = 0; j < ncols_; ++j) {
        if (state_[j] == VarState::Basic || lo_[j] == hi_[j]) continue;
        if (improves(j, reduced_cost(j))) return long(j);
      }
      return -1;
    }
    const std::size_t window = std::max<std::size_t>(256, ncols_ / 16);
    std::size_t scanned = 0;
    std::size_t pos = price_start_ % std::max<std::size_t>(ncols_, 1);
    while (scanned < ncols_) {
      long best = -1;
      double best_abs = 0.0;
      const std::size_t count = std::min(window, ncols_ - scanned);
      for (std::size_t step = 0; step < count; ++step) {
        const std::size_t j = (pos + step) % ncols_;
        if (state_[j] == VarState::Basic || lo_[j] == hi_[j]) continue;
        const double d = reduced_cost(j);
        if (!improves(j, d)) continue;
        const double a_abs = std::fabs(d);
        if (a_abs > best_abs || (a_abs == best_abs && best >= 0 && long(j) < best)) {
          best_abs = a_abs;
          best = long(j);
        }
      }
      scanned += count;
      pos = (pos + count) % ncols_;
      if (best >= 0) {
        price_start_ = pos;
        return best;
      }
    }
    return -1;
  }

  // Returns true on optimal, false on unbounded (phase 2 only).
  bool run_phase() {
    dtol_ = kOptTol;
    double cmax = 0.0;
    for (std::size_t j = 0; j < ncols_; ++j) cmax = std::max(cmax, std::fabs(cost_of(j)));
    dtol_ = kOptTol * (1.0 + cmax);
    const std::size_t max_iter = 20 * (ncols_ + nrows_) + 10000;
    for (std::size_t iter = 0; iter < max_iter; ++iter) {
      if (etas_.size() >= kRefactorEvery) {
        lu_.factor(acols_, basic_);
        etas_.clear();
        recompute_basics();
      }
      compute_y();
      const long qq = pick_entering();
      if (qq < 0) return true;
      const std::size_t q = std::size_t(qq);
      const double dq = reduced_cost(q);
      const int dir = state_[q] == VarState::AtUpper ? -1 : (state_[q] == VarState::Free && dq < 0.0 ? -1 : 1);

      ftran_col(q, wslot_);

      double own_limit = kInf;
      if (lo_[q] > -kInf && hi_[q] < kInf) own_limit = hi_[q] - lo_[q];

      double theta = own_limit;
      long leave = -1;
      bool leave_low = true;
      for (std::size_t k = 0; k < nrows_; ++k) {
        const double wk = wslot_[k];
        if (std::fabs(wk) <= kPivotTol) continue;
        const std::size_t bj = std::size_t(basic_[k]);
        const double move = double(dir) * wk;
        double lim;
        bool tolow;
        if (move > 0.0) {
          if (lo_[bj] == -kInf) continue;
          lim = (x_[bj] - lo_[bj]) / move;
          tolow = true;
        } else {
          if (hi_[bj] == kInf) continue;
          lim = (x_[bj] - hi_[bj]) / move;
          tolow = false;
        }
        if (lim < 0.0) lim = 0.0;
        if (lim < theta - 1e-12) {
          theta = lim;
          leave = long(k);
          leave_low = tolow;
        } else if (leave >= 0 && lim <= theta + 1e-12) {
          // Tie: prefer the larger pivot magnitude for stability; under
          // Bland, the smallest basic variable index.
          const std::size_t cur = std::size_t(basic_[std::size_t(leave)]);
          if (bland_ ? bj < cur
                     : std::fabs(wk) > std::fabs(wslot_[std::size_t(leave)])) {
            theta = std::min(theta, lim);
            leave = long(k);
            leave_low = tolow;
          }
        }
      }

      if (theta == kInf) {
        if (!phase2_) throw std::runtime_error("phase-1 subproblem reported unbounded");
        return false;
      }
      if (theta <= kDegenStep) {
        if (++degen_count_ > bland_after_) bland_ = true;
      }

      if (leave < 0) {
        // Bound flip: the entering variable crosses to its other bound.
        for (std::size_t k = 0; k < nrows_; ++k) {
          const double wk = wslot_[k];
          if (wk != 0.0) x_[std::size_t(basic_[k])] -= double(dir) * theta * wk;
        }
        x_[q] = dir > 0 ? hi_[q] : lo_[q];
        state_[q] = dir > 0 ? VarState::AtUpper : VarState::AtLower;
        continue;
      }

      const std::size_t kslot = std::size_t(leave);
      if (std::fabs(wslot_[kslot]) < kEtaDiagTol && !etas_.empty()) {
        // The eta chain has degraded this pivot; rebuild and retry.
        lu_.factor(acols_, basic_);
        etas_.clear();
        recompute_basics();
        continue;
      }
      if (std::fabs(wslot_[kslot]) <= kPivotTol)
        throw std::runtime_error("numerically singular pivot");

      for (std::size_t k = 0; k < nrows_; ++k) {
        const double wk = wslot_[k];
        if (wk != 0.0) x_[std::size_t(basic_[k])] -= double(dir) * theta * wk;
      }
      const double start =
          state_[q] == VarState::AtLower ? lo_[q] : (state_[q] == VarState::AtUpper ? hi_[q] : 0.0);
      x_[q] = start + double(dir) * theta;

      const std::size_t lv = std::size_t(basic_[kslot]);
      x_[lv] = leave_low ? lo_[lv] : hi_[lv];
      state_[lv] = leave_low ? VarState::AtLower : VarState::AtUpper;
      if (!phase2_ && phase1_cost_[lv] != 0.0) {
        // An artificial that leaves the basis is finished; pin it at zero.
        lo_[lv] = hi_[lv] = 0.0;
        x_[lv] = 0.0;
        state_[lv] = VarState::AtLower;
      }

      basic_[kslot] = int(q);
      state_[q] = VarState::Basic;

      Eta e;
      e.slot = int(kslot);
      e.diag = wslot_[kslot];
      for (std::size_t k = 0; k < nrows_; ++k)
        if (k != kslot && wslot_[k] != 0.0) e.off.emplace_back(int(k), wslot_[k]);
      etas_.push_back(std::move(e));
    }
    throw std::runtime_error("iteration limit exceeded");
  }

  std::vector<double> dual_values() {
    if (nrows_ == 0) return {};
    compute_y();
    return y_;
  }
};

} // namespace detail

inline LpSolution solve(const LpProblem& p) {
  detail::Simplex s(p);
  return s.run();
}

} // namespace esskit::lp
