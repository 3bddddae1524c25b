#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <variant>
#include <vector>

#include <esskit/ess.hpp>
#include <esskit/lp.hpp>
#include <esskit/trace.hpp>

namespace esskit {

// Regulation service reserves: track the signal beta within a relative band
// rho1 on at least a rho2 fraction of slots, earn reserve_price on R, pay the
// per-deviation penalty and the amortized equipment cost.
struct RsrSpec {
  double reserve_price = 0.0; // currency per kWh
  double penalty_coeff = 1.0; // deviation penalty weight
  double rho1 = 0.2;          // tracking band, relative
  double rho2 = 1.0;          // required tracked fraction
  Trace signal;
  double cycles_per_day = 0.0;
  double hours_per_day = 24.0; // converts the per-kWh price to a daily figure
  std::optional<Capacities> cap_bounds;
  std::optional<Capacities> fixed_caps;
  bool periodic_storage = false; // adds e_0 = e_T
};

// Contingency reserves: hold d = R over the response window, start the window
// fully charged, idle otherwise.
struct CrSpec {
  double reserve_price = 0.0;   // currency per kW per day
  std::size_t window_start = 0; // last idle slot before the response, 0 = respond at once
  std::size_t window_end = 0;   // final response slot (1-based, inclusive)
  double slot_seconds = 60.0;
  std::size_t horizon_slots = 0; // 0 = window_end
  double cycles_per_day = 0.0;
  std::optional<Capacities> cap_bounds;
  std::optional<Capacities> fixed_caps;
};

// Peak shaving: cap the facility draw at max(p) - R; the store must end the
// day where it started.
struct PsSpec {
  double opex_peak_price = 0.0;     // currency per kW per month
  double capex_peak_price = 0.0;    // currency per W
  double capex_horizon_days = 3650.0;
  Trace power_trace;
  double cycles_per_day = 0.0;
  std::optional<Capacities> cap_bounds;
  std::optional<Capacities> fixed_caps;
};

struct ProgramPlan {
  Capacities caps;
  double reserve = 0.0; // R, kW
  Schedule schedule;
  double revenue_per_day = 0.0;
  double cost_per_day = 0.0;
  double profit_per_day = 0.0;
  lp::LpStatus lp_status = lp::LpStatus::Optimal;
};

inline double ps_daily_peak_price(const PsSpec& s) {
  return s.opex_peak_price / 30.4 + s.capex_peak_price * 1000.0 / s.capex_horizon_days;
}

namespace detail {

inline void check_cap_options(const std::optional<Capacities>& bounds,
                              const std::optional<Capacities>& fixed) {
  if (bounds && fixed)
    throw std::invalid_argument("provide either cap_bounds or fixed_caps, not both");
  for (const auto* c : {bounds ? &*bounds : nullptr, fixed ? &*fixed : nullptr})
    if (c && (!(c->p_cap >= 0.0) || !(c->e_cap >= 0.0)))
      throw std::invalid_argument("capacities must be >= 0");
}

// Shared scaffolding for the three formulations: capacity variables, per-slot
// charge/discharge variables, the energy chain, and every physical limit.
// When caps are fixed the rate and energy limits collapse into plain variable
// bounds instead of constraint rows.
struct EssLpCore {
  lp::LpProblem prob;
  std::size_t T = 0;
  double slot_hours = 0.0;
  double mu = 0.0;
  std::size_t p_cap = 0, e_cap = 0, reserve = 0;
  std::size_t r0 = 0, d0 = 0, e0 = 0; // r_t = r0+t, d_t = d0+t, e_k = e0+k
  bool fixed = false;
  Capacities fixed_caps;

  std::size_t r(std::size_t t) const { return r0 + t; }
  std::size_t d(std::size_t t) const { return d0 + t; }
  std::size_t e(std::size_t k) const { return e0 + k; }

  EssLpCore(const EssTechnology& tech, const DailyPrices& prices, std::size_t slots,
            double slot_hours_, const std::optional<Capacities>& cap_bounds,
            const std::optional<Capacities>& fixed_caps_opt) {
    validate(tech);
    check_cap_options(cap_bounds, fixed_caps_opt);
    if (slots < 1) throw std::invalid_argument("need at least one slot");
    if (!(slot_hours_ > 0.0)) throw std::invalid_argument("slot duration must be > 0");
    T = slots;
    slot_hours = slot_hours_;
    mu = per_slot_self_discharge(tech, slot_hours);
    fixed = fixed_caps_opt.has_value();
    if (fixed) fixed_caps = *fixed_caps_opt;

    const double pb = cap_bounds ? cap_bounds->p_cap : lp::kInf;
    const double eb = cap_bounds ? cap_bounds->e_cap : lp::kInf;
    if (fixed) {
      p_cap = prob.add_var("p_cap", fixed_caps.p_cap, fixed_caps.p_cap,
                           -prices.power_price_per_day);
      e_cap = prob.add_var("e_cap", fixed_caps.e_cap, fixed_caps.e_cap,
                           -prices.energy_price_per_day);
    } else {
      p_cap = prob.add_var("p_cap", 0.0, pb, -prices.power_price_per_day);
      e_cap = prob.add_var("e_cap", 0.0, eb, -prices.energy_price_per_day);
    }
    reserve = prob.add_var("reserve", 0.0, lp::kInf, 0.0);

    const double rmax = fixed ? fixed_caps.p_cap / tech.charge_rate_ratio : lp::kInf;
    const double dmax = fixed ? fixed_caps.p_cap : lp::kInf;
    r0 = prob.num_vars;
    for (std::size_t t = 0; t < T; ++t) prob.add_var("r" + std::to_string(t + 1), 0.0, rmax, 0.0);
    d0 = prob.num_vars;
    for (std::size_t t = 0; t < T; ++t) prob.add_var("d" + std::to_string(t + 1), 0.0, dmax, 0.0);
    const double elo = fixed ? (1.0 - tech.depth_of_discharge) * fixed_caps.e_cap : 0.0;
    const double ehi = fixed ? fixed_caps.e_cap : lp::kInf;
    e0 = prob.num_vars;
    for (std::size_t k = 0; k <= T; ++k) prob.add_var("e" + std::to_string(k), elo, ehi, 0.0);

    for (std::size_t t = 1; t <= T; ++t)
      prob.add_constraint({{e(t), 1.0}, {e(t - 1), mu - 1.0}, {r(t - 1), -slot_hours},
                           {d(t - 1), slot_hours}},
                          lp::Rel::eq, 0.0);
    if (!fixed) {
      const double inv_gamma = 1.0 / tech.charge_rate_ratio;
      for (std::size_t t = 0; t < T; ++t)
        prob.add_constraint({{r(t), 1.0}, {p_cap, -inv_gamma}}, lp::Rel::le, 0.0);
      for (std::size_t t = 0; t < T; ++t)
        prob.add_constraint({{d(t), 1.0}, {p_cap, -1.0}}, lp::Rel::le, 0.0);
      for (std::size_t k = 0; k <= T; ++k)
        prob.add_constraint({{e(k), 1.0}, {e_cap, -1.0}}, lp::Rel::le, 0.0);
      if (tech.depth_of_discharge < 1.0)
        for (std::size_t k = 0; k <= T; ++k)
          prob.add_constraint({{e(k), 1.0}, {e_cap, -(1.0 - tech.depth_of_discharge)}},
                              lp::Rel::ge, 0.0);
    }
    // Discharge may step up by at most p_cap*slot_seconds/ramp_time between
    // consecutive slots; a step budget of p_cap or more can never bind.
    if (tech.ramp_time_seconds > 0.0) {
      const double factor = slot_hours * 3600.0 / tech.ramp_time_seconds;
      if (factor < 1.0) {
        for (std::size_t t = 0; t + 1 < T; ++t) {
          if (fixed)
            prob.add_constraint({{d(t + 1), 1.0}, {d(t), -1.0}}, lp::Rel::le,
                                factor * fixed_caps.p_cap);
          else
            prob.add_constraint({{d(t + 1), 1.0}, {d(t), -1.0}, {p_cap, -factor}},
                                lp::Rel::le, 0.0);
        }
      }
    }
  }
};

inline void validate_rsr(const RsrSpec& s) {
  if (!(s.rho1 > 0.0 && s.rho1 < 1.0)) throw std::invalid_argument("rho1 must be in (0,1)");
  if (!(s.rho2 > 0.0 && s.rho2 <= 1.0)) throw std::invalid_argument("rho2 must be in (0,1]");
  if (!(s.reserve_price >= 0.0)) throw std::invalid_argument("reserve_price must be >= 0");
  if (!(s.penalty_coeff >= 0.0)) throw std::invalid_argument("penalty_coeff must be >= 0");
  if (!(s.hours_per_day > 0.0)) throw std::invalid_argument("hours_per_day must be > 0");
  if (!(s.cycles_per_day >= 0.0)) throw std::invalid_argument("cycles_per_day must be >= 0");
  if (s.signal.kind != TraceKind::rsr_signal)
    throw std::invalid_argument("rsr needs an rsr_signal trace");
  if (s.signal.values.empty()) throw std::invalid_argument("signal trace is empty");
  for (double b : s.signal.values)
    if (!(b >= -1.0 && b <= 1.0)) throw std::invalid_argument("signal value out of [-1,1]");
}

} // namespace detail

// The RSR program as one LP. Variable order: p_cap, e_cap, reserve, r_t, d_t,
// u_t, e_0..e_T, then one deviation variable per slot.
inline lp::LpProblem build_rsr_lp(const EssTechnology& tech, const RsrSpec& spec,
                                  const std::vector<std::size_t>& tracked) {
  detail::validate_rsr(spec);
  const std::size_t T = spec.signal.values.size();
  for (std::size_t s : tracked)
    if (s < 1 || s > T) throw std::invalid_argument("tracked slot out of range");
  if (spec.rho2 == 1.0 && tracked.size() != T)
    throw std::invalid_argument("rho2 = 1 requires every slot tracked");

  const DailyPrices prices = amortized_prices(tech, spec.cycles_per_day);
  detail::EssLpCore core(tech, prices, T, spec.signal.slot_seconds / 3600.0, spec.cap_bounds,
                         spec.fixed_caps);
  lp::LpProblem& p = core.prob;
  const double H = spec.hours_per_day;
  p.objective[core.reserve] = H * spec.reserve_price;

  const std::size_t u0 = p.num_vars;
  for (std::size_t t = 0; t < T; ++t)
    p.add_var("u" + std::to_string(t + 1), -lp::kInf, lp::kInf, 0.0);
  const double inv_eta = 1.0 / tech.charge_efficiency;
  for (std::size_t t = 0; t < T; ++t)
    p.add_constraint({{u0 + t, 1.0}, {core.r(t), -inv_eta}, {core.d(t), 1.0}}, lp::Rel::eq,
                     0.0);

  // Band constraints on tracked slots, in the multiplied-out form
  // (beta - rho1*|beta|)*R <= u <= (beta + rho1*|beta|)*R.
  for (std::size_t s : tracked) {
    const double beta = spec.signal.values[s - 1];
    const double hi = beta + spec.rho1 * std::fabs(beta);
    const double lo = beta - spec.rho1 * std::fabs(beta);
    lp::SparseRow up{{u0 + s - 1, 1.0}};
    if (hi != 0.0) up.emplace_back(core.reserve, -hi);
    p.add_constraint(std::move(up), lp::Rel::le, 0.0);
    lp::SparseRow dn{{u0 + s - 1, 1.0}};
    if (lo != 0.0) dn.emplace_back(core.reserve, -lo);
    p.add_constraint(std::move(dn), lp::Rel::ge, 0.0);
  }

  // Deviation penalty applies on every slot, tracked or not.
  const double weight = spec.penalty_coeff * H * spec.reserve_price / double(T);
  for (std::size_t t = 0; t < T; ++t) {
    lp::SparseRow expr{{u0 + t, 1.0}};
    const double beta = spec.signal.values[t];
    if (beta != 0.0) expr.emplace_back(core.reserve, -beta);
    lp::add_abs_penalty(p, expr, weight);
  }

  if (spec.periodic_storage)
    p.add_constraint({{core.e(0), 1.0}, {core.e(T), -1.0}}, lp::Rel::eq, 0.0);
  return p;
}

inline lp::LpProblem build_cr_lp(const EssTechnology& tech, const CrSpec& spec,
                                 std::size_t horizon_slots) {
  if (!(spec.reserve_price >= 0.0)) throw std::invalid_argument("reserve_price must be >= 0");
  if (!(spec.cycles_per_day >= 0.0)) throw std::invalid_argument("cycles_per_day must be >= 0");
  if (!(spec.window_start < spec.window_end))
    throw std::invalid_argument("response window is empty");
  if (!(spec.window_end <= horizon_slots))
    throw std::invalid_argument("response window exceeds the horizon");

  const DailyPrices prices = amortized_prices(tech, spec.cycles_per_day);
  detail::EssLpCore core(tech, prices, horizon_slots, spec.slot_seconds / 3600.0,
                         spec.cap_bounds, spec.fixed_caps);
  lp::LpProblem& p = core.prob;
  p.objective[core.reserve] = spec.reserve_price;

  // One-directional response: no charging at all, full discharge d = R on
  // window slots, idle outside, store full when the window opens.
  for (std::size_t t = 0; t < horizon_slots; ++t) {
    p.var_bounds[core.r(t)] = {0.0, 0.0};
    const bool in_window = t >= spec.window_start && t < spec.window_end;
    if (in_window)
      p.add_constraint({{core.d(t), 1.0}, {core.reserve, -1.0}}, lp::Rel::eq, 0.0);
    else
      p.var_bounds[core.d(t)] = {0.0, 0.0};
  }
  p.add_constraint({{core.e(spec.window_start), 1.0}, {core.e_cap, -1.0}}, lp::Rel::eq, 0.0);
  return p;
}

inline lp::LpProblem build_ps_lp(const EssTechnology& tech, const PsSpec& spec) {
  if (!(spec.opex_peak_price >= 0.0 && spec.capex_peak_price >= 0.0))
    throw std::invalid_argument("peak prices must be >= 0");
  if (!(spec.capex_horizon_days > 0.0))
    throw std::invalid_argument("capex_horizon_days must be > 0");
  if (!(spec.cycles_per_day >= 0.0)) throw std::invalid_argument("cycles_per_day must be >= 0");
  if (spec.power_trace.kind != TraceKind::power_kw)
    throw std::invalid_argument("peak shaving needs a power_kw trace");
  if (spec.power_trace.values.empty()) throw std::invalid_argument("power trace is empty");
  for (double v : spec.power_trace.values)
    if (!(v >= 0.0)) throw std::invalid_argument("power trace must be non-negative");

  const std::size_t T = spec.power_trace.values.size();
  const double peak = *std::max_element(spec.power_trace.values.begin(),
                                        spec.power_trace.values.end());
  const DailyPrices prices = amortized_prices(tech, spec.cycles_per_day);
  detail::EssLpCore core(tech, prices, T, spec.power_trace.slot_seconds / 3600.0,
                         spec.cap_bounds, spec.fixed_caps);
  lp::LpProblem& p = core.prob;
  p.objective[core.reserve] = ps_daily_peak_price(spec);
  p.var_bounds[core.reserve] = {0.0, peak};

  // 0 <= p_t + u_t <= peak - R with u_t = r_t/eta - d_t inlined.
  const double inv_eta = 1.0 / tech.charge_efficiency;
  for (std::size_t t = 0; t < T; ++t) {
    const double pt = spec.power_trace.values[t];
    p.add_constraint({{core.r(t), inv_eta}, {core.d(t), -1.0}, {core.reserve, 1.0}},
                     lp::Rel::le, peak - pt);
    p.add_constraint({{core.r(t), inv_eta}, {core.d(t), -1.0}}, lp::Rel::ge, -pt);
  }
  p.add_constraint({{core.e(0), 1.0}, {core.e(T), -1.0}}, lp::Rel::eq, 0.0);
  return p;
}

namespace detail {

// Index map shared by every formulation: p_cap, e_cap, reserve, then the r,
// d, and e blocks, matching the construction order in EssLpCore.
struct CoreLayout {
  std::size_t T = 0;
  double slot_hours = 0.0;
  static constexpr std::size_t p_cap = 0, e_cap = 1, reserve = 2;
  std::size_t r(std::size_t t) const { return 3 + t; }
  std::size_t d(std::size_t t) const { return 3 + T + t; }
  std::size_t e(std::size_t k) const { return 3 + 2 * T + k; }
};

// Pulls r, d, e_0 out of an optimal LP, snaps stray solver noise into the
// physical box, and rebuilds the schedule through the exact recursion.
inline ProgramPlan extract_plan(const EssTechnology& tech, const lp::LpSolution& sol,
                                const CoreLayout& lay) {
  ProgramPlan plan;
  plan.lp_status = sol.status;
  if (sol.status != lp::LpStatus::Optimal) return plan;
  const std::size_t T = lay.T;
  plan.caps = {sol.primal[lay.p_cap], sol.primal[lay.e_cap]};
  plan.reserve = std::max(0.0, sol.primal[lay.reserve]);
  const double rmax = plan.caps.p_cap / tech.charge_rate_ratio;
  const double elo = (1.0 - tech.depth_of_discharge) * plan.caps.e_cap;
  std::vector<double> r(T), d(T);
  for (std::size_t t = 0; t < T; ++t) {
    r[t] = std::clamp(sol.primal[lay.r(t)], 0.0, rmax);
    d[t] = std::clamp(sol.primal[lay.d(t)], 0.0, plan.caps.p_cap);
  }
  const double e_start = std::clamp(sol.primal[lay.e(0)], elo, plan.caps.e_cap);
  plan.schedule = simulate_schedule(tech, e_start, r, d, lay.slot_hours);
  return plan;
}

} // namespace detail

inline ProgramPlan optimize(const EssTechnology& tech, const RsrSpec& spec,
                            const std::vector<std::size_t>& tracked) {
  lp::LpProblem p = build_rsr_lp(tech, spec, tracked);
  const std::size_t T = spec.signal.values.size();
  const DailyPrices prices = amortized_prices(tech, spec.cycles_per_day);
  const detail::CoreLayout lay{T, spec.signal.slot_seconds / 3600.0};
  const lp::LpSolution sol = lp::solve(p);
  ProgramPlan plan = detail::extract_plan(tech, sol, lay);
  if (plan.lp_status != lp::LpStatus::Optimal) return plan;
  plan.cost_per_day = daily_cost(prices, plan.caps);
  double dev = 0.0;
  for (std::size_t t = 0; t < T; ++t)
    dev += std::fabs(plan.schedule.net_power[t] - plan.reserve * spec.signal.values[t]);
  const double H = spec.hours_per_day;
  plan.revenue_per_day =
      H * spec.reserve_price * (plan.reserve - spec.penalty_coeff * dev / double(T));
  plan.profit_per_day = plan.revenue_per_day - plan.cost_per_day;
  return plan;
}

inline ProgramPlan optimize(const EssTechnology& tech, const RsrSpec& spec) {
  const std::size_t T = spec.signal.values.size();
  if (spec.rho2 < 1.0)
    throw std::invalid_argument("rho2 < 1 needs an explicit tracked set from a heuristic");
  std::vector<std::size_t> all(T);
  for (std::size_t t = 0; t < T; ++t) all[t] = t + 1;
  return optimize(tech, spec, all);
}

inline ProgramPlan optimize(const EssTechnology& tech, const CrSpec& spec) {
  const std::size_t horizon = spec.horizon_slots == 0 ? spec.window_end : spec.horizon_slots;
  lp::LpProblem p = build_cr_lp(tech, spec, horizon);
  const DailyPrices prices = amortized_prices(tech, spec.cycles_per_day);
  const detail::CoreLayout lay{horizon, spec.slot_seconds / 3600.0};
  const lp::LpSolution sol = lp::solve(p);
  ProgramPlan plan = detail::extract_plan(tech, sol, lay);
  if (plan.lp_status != lp::LpStatus::Optimal) return plan;
  plan.cost_per_day = daily_cost(prices, plan.caps);
  plan.revenue_per_day = spec.reserve_price * plan.reserve;
  plan.profit_per_day = plan.revenue_per_day - plan.cost_per_day;
  return plan;
}

inline ProgramPlan optimize(const EssTechnology& tech, const PsSpec& spec) {
  lp::LpProblem p = build_ps_lp(tech, spec);
  const std::size_t T = spec.power_trace.values.size();
  const DailyPrices prices = amortized_prices(tech, spec.cycles_per_day);
  const detail::CoreLayout lay{T, spec.power_trace.slot_seconds / 3600.0};
  const lp::LpSolution sol = lp::solve(p);
  ProgramPlan plan = detail::extract_plan(tech, sol, lay);
  if (plan.lp_status != lp::LpStatus::Optimal) return plan;
  plan.cost_per_day = daily_cost(prices, plan.caps);
  plan.revenue_per_day = ps_daily_peak_price(spec) * plan.reserve;
  plan.profit_per_day = plan.revenue_per_day - plan.cost_per_day;
  return plan;
}

using ProgramSpec = std::variant<RsrSpec, CrSpec, PsSpec>;

struct SweepAxis {
  std::string param; // p_cap | e_cap | reserve_price | opex_price | capex_price
  std::vector<double> values;
};

struct SweepCell {
  lp::LpStatus status = lp::LpStatus::Optimal;
  bool error = false;
  double profit = 0.0;
};

struct SweepResult {
  SweepAxis axis1;
  std::optional<SweepAxis> axis2;
  std::vector<std::vector<SweepCell>> cells; // cells[i][j]: axis1 value i, axis2 value j
};

namespace detail {

inline void apply_axis(ProgramSpec& spec, const std::string& param, double value) {
  auto set_cap = [&](auto& s, bool power) {
    if (!s.fixed_caps) s.fixed_caps = Capacities{};
    (power ? s.fixed_caps->p_cap : s.fixed_caps->e_cap) = value;
    s.cap_bounds.reset();
  };
  std::visit(
      [&](auto& s) {
        using S = std::decay_t<decltype(s)>;
        if (param == "p_cap") return set_cap(s, true);
        if (param == "e_cap") return set_cap(s, false);
        if constexpr (std::is_same_v<S, RsrSpec> || std::is_same_v<S, CrSpec>) {
          if (param == "reserve_price") {
            s.reserve_price = value;
            return;
          }
        } else {
          if (param == "opex_price") {
            s.opex_peak_price = value;
            return;
          }
          if (param == "capex_price") {
            s.capex_peak_price = value;
            return;
          }
        }
        throw std::invalid_argument("axis '" + param + "' does not apply to this program");
      },
      spec);
}

inline ProgramPlan run_spec(const EssTechnology& tech, const ProgramSpec& spec,
                            const std::vector<std::size_t>* tracked) {
  return std::visit(
      [&](const auto& s) {
        using S = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<S, RsrSpec>) {
          if (tracked) return optimize(tech, s, *tracked);
          return optimize(tech, s);
        } else {
          (void)tracked;
          return optimize(tech, s);
        }
      },
      spec);
}

} // namespace detail

// Grid of independent optimizations; a failed point is recorded in its cell
// and never aborts the rest. 1D sweeps are a single axis2 column.
inline SweepResult sweep(const EssTechnology& tech, const ProgramSpec& base,
                         const SweepAxis& axis1, const std::optional<SweepAxis>& axis2,
                         const std::vector<std::size_t>* tracked = nullptr,
                         unsigned workers = 1) {
  if (axis1.values.empty() || (axis2 && axis2->values.empty()))
    throw std::invalid_argument("sweep axis has no values");
  SweepResult res;
  res.axis1 = axis1;
  res.axis2 = axis2;
  const std::size_t n1 = axis1.values.size();
  const std::size_t n2 = axis2 ? axis2->values.size() : 1;
  res.cells.assign(n1, std::vector<SweepCell>(n2));

  // Validate axis names up front so a typo fails fast, not per-cell.
  {
    ProgramSpec probe = base;
    detail::apply_axis(probe, axis1.param, axis1.values.front());
    if (axis2) detail::apply_axis(probe, axis2->param, axis2->values.front());
  }

  std::atomic<std::size_t> next{0};
  const std::size_t total = n1 * n2;
  auto worker = [&]() {
    for (;;) {
      const std::size_t idx = next.fetch_add(1);
      if (idx >= total) return;
      const std::size_t i = idx / n2, j = idx % n2;
      ProgramSpec spec = base;
      detail::apply_axis(spec, axis1.param, axis1.values[i]);
      if (axis2) detail::apply_axis(spec, axis2->param, axis2->values[j]);
      SweepCell& cell = res.cells[i][j];
      try {
        const ProgramPlan plan = detail::run_spec(tech, spec, tracked);
        cell.status = plan.lp_status;
        cell.profit = plan.lp_status == lp::LpStatus::Optimal ? plan.profit_per_day : 0.0;
      } catch (const std::exception&) {
        cell.error = true;
      }
    }
  };
  if (workers <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  return res;
}

} // namespace esskit
