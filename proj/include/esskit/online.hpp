#pragma once

#include <esskit/ess.hpp>
#include <esskit/heuristics.hpp>
#include <esskit/trace.hpp>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <stdexcept>
#include <type_traits>
#include <vector>

namespace esskit {

// Market terms a real-time run settles against.
struct RsrTerms {
  double reserve_price = 0.0;  // $/kW per hour of service
  double penalty_coeff = 1.0;
  double rho1 = 0.2;
  double rho2 = 1.0;
  double hours_per_day = 24.0;
};

// Threshold policy for techs that can hold energy across many slots.
struct BatteryPolicy {
  double theta0 = 0.0;         // signal magnitude above which we re-center
  double theta1 = 0.0;         // tracking cap, (1 - rho1) * theta0
  double reserve = 0.0;        // kW
  double target_energy = 0.0;  // kWh, the re-centering level
};

// Fixed-interval policy for techs that drift off target quickly.
struct UcFwPolicy {
  std::size_t adjust_interval = 0;  // slots between re-centerings, 0 = never
  double theta1 = 0.0;              // tracking cap, 1 - rho1
  double reserve = 0.0;             // kW
  double target_energy = 0.0;       // kWh
};

struct SlotRates {
  double charge = 0.0;     // kW into storage
  double discharge = 0.0;  // kW out of storage
  double net = 0.0;        // kW at the grid side
};

struct OnlineResult {
  Schedule schedule;
  double revenue_per_day = 0.0;
  std::size_t tracked_ok_count = 0;
  std::size_t violations = 0;
  bool feasible = false;
};

namespace detail {

inline double middle_energy(const EssTechnology& tech, const Capacities& caps) {
  const double lo = (1.0 - tech.depth_of_discharge) * caps.e_cap;
  const double mid = tech.depth_of_discharge * caps.e_cap /
                     (2.0 * (1.0 - tech.self_discharge_per_hour));
  return std::clamp(mid, lo, caps.e_cap);
}

// Clamps a desired grid-side rate so rates stay within capacity and the next
// stored energy stays within the usable window. Never co-charges.
inline SlotRates clamp_step(double u_desired, double e_prev,
                            const EssTechnology& tech, const Capacities& caps,
                            double slot_hours) {
  const double mu = per_slot_self_discharge(tech, slot_hours);
  const double carried = (1.0 - mu) * e_prev;
  const double e_lo = (1.0 - tech.depth_of_discharge) * caps.e_cap;
  // Net internal flow x = r - d in kW.
  double x = u_desired >= 0.0 ? u_desired * tech.charge_efficiency : u_desired;
  const double x_hi =
      std::min(caps.p_cap / tech.charge_rate_ratio, (caps.e_cap - carried) / slot_hours);
  const double x_lo = std::max(-caps.p_cap, (e_lo - carried) / slot_hours);
  x = std::clamp(x, std::min(x_lo, x_hi), x_hi);
  SlotRates out;
  out.charge = std::max(x, 0.0);
  out.discharge = std::max(-x, 0.0);
  out.net = out.charge / tech.charge_efficiency - out.discharge;
  return out;
}

// Largest feasible move of the stored energy toward the target level.
inline double recenter_rate(double target, double e_prev,
                            const EssTechnology& tech, double slot_hours) {
  const double mu = per_slot_self_discharge(tech, slot_hours);
  const double need = (target - (1.0 - mu) * e_prev) / slot_hours;
  // Convert the internal flow back to a grid-side desire; clamp_step redoes
  // the conversion, so divide out the efficiency on the charge side.
  return need >= 0.0 ? need / tech.charge_efficiency : need;
}

}  // namespace detail

// Thresholds from historical signal data: theta0 is the rho2 empirical
// quantile of the magnitudes, theta1 shrinks it by the allowed band.
inline BatteryPolicy init_battery_policy(const std::vector<double>& hist_signal,
                                         double rho1, double rho2,
                                         const EssTechnology& tech,
                                         const Capacities& caps,
                                         double reserve) {
  if (hist_signal.empty())
    throw std::invalid_argument("history must be nonempty");
  detail::check_rho2(rho2);
  std::vector<double> mags(hist_signal.size());
  for (std::size_t i = 0; i < mags.size(); ++i)
    mags[i] = std::fabs(hist_signal[i]);
  std::sort(mags.begin(), mags.end());
  const std::size_t k =
      ceil_count(rho2 * static_cast<double>(mags.size()));
  BatteryPolicy pol;
  pol.theta0 = mags[k - 1];
  pol.theta1 = (1.0 - rho1) * pol.theta0;
  pol.reserve = reserve;
  pol.target_energy = detail::middle_energy(tech, caps);
  return pol;
}

inline UcFwPolicy init_ucfw_policy(double rho1, double rho2,
                                   const EssTechnology& tech,
                                   const Capacities& caps, double reserve) {
  detail::check_rho2(rho2);
  UcFwPolicy pol;
  pol.adjust_interval = rho2 < 1.0 ? ceil_count(1.0 / (1.0 - rho2)) : 0;
  pol.theta1 = 1.0 - rho1;
  pol.reserve = reserve;
  pol.target_energy = detail::middle_energy(tech, caps);
  return pol;
}

// One slot of the battery threshold policy: track small signals exactly, cap
// moderate ones at theta1, use large ones to re-center the stored energy.
inline SlotRates battery_step(const BatteryPolicy& policy, double e_prev,
                              double beta_rt, const EssTechnology& tech,
                              const Capacities& caps, double slot_hours) {
  if (policy.reserve == 0.0) return {};  // nothing committed, nothing to track
  const double mag = std::fabs(beta_rt);
  double u;
  if (mag < policy.theta1) {
    u = policy.reserve * beta_rt;
  } else if (mag <= policy.theta0) {
    u = policy.theta1 * policy.reserve * (beta_rt < 0.0 ? -1.0 : 1.0);
  } else {
    u = detail::recenter_rate(policy.target_energy, e_prev, tech, slot_hours);
  }
  return detail::clamp_step(u, e_prev, tech, caps, slot_hours);
}

// One slot of the fixed-interval policy: re-center every adjust_interval
// slots, otherwise track with the theta1 cap. Slot indices are 1-based.
inline SlotRates ucfw_step(const UcFwPolicy& policy, std::size_t t,
                           double e_prev, double beta_rt,
                           const EssTechnology& tech, const Capacities& caps,
                           double slot_hours) {
  if (policy.reserve == 0.0) return {};  // nothing committed, nothing to track
  double u;
  if (policy.adjust_interval > 0 && t % policy.adjust_interval == 0) {
    u = detail::recenter_rate(policy.target_energy, e_prev, tech, slot_hours);
  } else if (std::fabs(beta_rt) < policy.theta1) {
    u = policy.reserve * beta_rt;
  } else {
    u = policy.theta1 * policy.reserve * (beta_rt < 0.0 ? -1.0 : 1.0);
  }
  return detail::clamp_step(u, e_prev, tech, caps, slot_hours);
}

// Reserve to commit for the next hour: a safety fraction of the worst
// offline optimum seen over the lookback window.
inline double estimate_reserve(const std::vector<double>& hourly_offline_r,
                               double lambda) {
  if (hourly_offline_r.empty())
    throw std::invalid_argument("history must be nonempty");
  if (!(lambda > 0.0) || lambda > 1.0)
    throw std::invalid_argument("lambda must be in (0, 1]");
  return lambda * *std::min_element(hourly_offline_r.begin(),
                                    hourly_offline_r.end());
}

// Steps a policy over a whole signal from the re-centering level, then scores
// the run the same way the planner's objective does. The optional hook may
// retune the policy before each slot.
template <class Policy>
OnlineResult run_online(
    Policy policy, const Trace& signal, const EssTechnology& tech,
    const Capacities& caps, const RsrTerms& terms,
    const std::function<void(Policy&, std::size_t, double)>& hook = {}) {
  static_assert(std::is_same_v<Policy, BatteryPolicy> ||
                std::is_same_v<Policy, UcFwPolicy>);
  const std::size_t total = signal.values.size();
  const double slot_hours = signal.slot_seconds / 3600.0;

  OnlineResult res;
  res.schedule.slot_hours = slot_hours;
  res.schedule.charge.resize(total);
  res.schedule.discharge.resize(total);
  res.schedule.net_power.resize(total);
  res.schedule.stored_energy.assign(total + 1, policy.target_energy);

  const double mu = per_slot_self_discharge(tech, slot_hours);
  double deviation_sum = 0.0;
  for (std::size_t t = 1; t <= total; ++t) {
    const double beta = signal.values[t - 1];
    if (hook) hook(policy, t, beta);
    const double e_prev = res.schedule.stored_energy[t - 1];
    SlotRates step;
    if constexpr (std::is_same_v<Policy, BatteryPolicy>) {
      step = battery_step(policy, e_prev, beta, tech, caps, slot_hours);
    } else {
      step = ucfw_step(policy, t, e_prev, beta, tech, caps, slot_hours);
    }
    res.schedule.charge[t - 1] = step.charge;
    res.schedule.discharge[t - 1] = step.discharge;
    res.schedule.net_power[t - 1] = step.net;
    res.schedule.stored_energy[t] =
        (1.0 - mu) * e_prev + (step.charge - step.discharge) * slot_hours;

    const double dev = std::fabs(step.net - policy.reserve * beta);
    deviation_sum += dev;
    if (dev <= terms.rho1 * policy.reserve * std::fabs(beta) + 1e-9)
      ++res.tracked_ok_count;
  }

  const FeasibilityReport rep = check_feasibility(res.schedule, tech, caps);
  for (const Violation& v : rep.violations)
    if (v.constraint != "ramp") ++res.violations;

  res.revenue_per_day =
      terms.hours_per_day * terms.reserve_price *
      (policy.reserve - terms.penalty_coeff * deviation_sum /
                            static_cast<double>(std::max<std::size_t>(total, 1)));
  res.feasible =
      res.violations == 0 &&
      res.tracked_ok_count >=
          ceil_count(terms.rho2 * static_cast<double>(total));
  return res;
}

}  // namespace esskit
