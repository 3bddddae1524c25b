#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace esskit {

// Parameter record for one storage technology. Prices are per unit of
// installed capacity, lifetimes in days and in full cycles, rates as fractions.
struct EssTechnology {
  std::string name;
  double power_price = 0.0;             // currency per kW
  double energy_price = 0.0;            // currency per kWh
  double float_life_days = 1.0;         // shelf life
  double cycle_life = 1.0;              // usable charge/discharge cycles
  double self_discharge_per_hour = 0.0; // fraction of stored energy lost per hour
  double charge_efficiency = 1.0;       // stored kWh per grid kWh while charging
  double charge_rate_ratio = 1.0;       // max discharge rate / max charge rate
  double depth_of_discharge = 1.0;      // usable fraction of energy capacity
  double ramp_time_seconds = 0.0;       // time to swing discharge 0 -> p_cap; 0 = unconstrained
};

inline void validate(const EssTechnology& t) {
  auto fail = [&](const char* what) {
    throw std::invalid_argument("technology '" + t.name + "': " + what);
  };
  if (!(t.charge_efficiency > 0.0 && t.charge_efficiency <= 1.0))
    fail("charge_efficiency must be in (0,1]");
  if (!(t.charge_rate_ratio >= 1.0)) fail("charge_rate_ratio must be >= 1");
  if (!(t.depth_of_discharge > 0.0 && t.depth_of_discharge <= 1.0))
    fail("depth_of_discharge must be in (0,1]");
  if (!(t.self_discharge_per_hour >= 0.0 && t.self_discharge_per_hour < 1.0))
    fail("self_discharge_per_hour must be in [0,1)");
  if (!(t.float_life_days > 0.0)) fail("float_life_days must be > 0");
  if (!(t.cycle_life > 0.0)) fail("cycle_life must be > 0");
  if (!(t.ramp_time_seconds >= 0.0)) fail("ramp_time_seconds must be >= 0");
  if (!(t.power_price >= 0.0 && t.energy_price >= 0.0)) fail("prices must be >= 0");
}

struct Capacities {
  double p_cap = 0.0; // kW
  double e_cap = 0.0; // kWh
};

struct DailyPrices {
  double power_price_per_day = 0.0;  // currency per kW per day
  double energy_price_per_day = 0.0; // currency per kWh per day
};

// One operating plan over T uniform slots. net_power is grid-side
// (u_t = r_t/eta - d_t); stored_energy holds e_0..e_T.
struct Schedule {
  double slot_hours = 0.0;
  std::vector<double> charge;
  std::vector<double> discharge;
  std::vector<double> net_power;
  std::vector<double> stored_energy;
};

inline double per_slot_self_discharge(const EssTechnology& tech, double slot_hours) {
  if (!(slot_hours > 0.0)) throw std::invalid_argument("slot_hours must be > 0");
  return 1.0 - std::pow(1.0 - tech.self_discharge_per_hour, slot_hours);
}

// Effective life: the float life, or the cycle budget at the given usage rate,
// whichever runs out first. Zero usage means the float life alone applies.
inline double effective_life_days(const EssTechnology& tech, double cycles_per_day) {
  if (!(cycles_per_day >= 0.0)) throw std::invalid_argument("cycles_per_day must be >= 0");
  if (cycles_per_day == 0.0) return tech.float_life_days;
  return std::min(tech.float_life_days, tech.cycle_life / cycles_per_day);
}

inline DailyPrices amortized_prices(const EssTechnology& tech, double cycles_per_day) {
  double life = effective_life_days(tech, cycles_per_day);
  return {tech.power_price / life, tech.energy_price / life};
}

inline double daily_cost(const DailyPrices& prices, const Capacities& caps) {
  return prices.power_price_per_day * caps.p_cap + prices.energy_price_per_day * caps.e_cap;
}

// Runs the stored-energy recursion e_t = (1-mu)e_{t-1} + (r_t - d_t)*dt and the
// grid-power identity. Does not enforce capacity bounds; see check_feasibility.
inline Schedule simulate_schedule(const EssTechnology& tech, double e0,
                                  const std::vector<double>& charge,
                                  const std::vector<double>& discharge,
                                  double slot_hours) {
  if (charge.size() != discharge.size())
    throw std::invalid_argument("charge and discharge length mismatch");
  const double mu = per_slot_self_discharge(tech, slot_hours);
  Schedule s;
  s.slot_hours = slot_hours;
  s.charge = charge;
  s.discharge = discharge;
  s.net_power.resize(charge.size());
  s.stored_energy.resize(charge.size() + 1);
  s.stored_energy[0] = e0;
  for (std::size_t t = 0; t < charge.size(); ++t) {
    s.net_power[t] = charge[t] / tech.charge_efficiency - discharge[t];
    s.stored_energy[t + 1] =
        (1.0 - mu) * s.stored_energy[t] + (charge[t] - discharge[t]) * slot_hours;
  }
  return s;
}

// One broken bound. slot is 1-based for rates; for stored energy it is the
// index into e_0..e_T, so 0 names the initial level.
struct Violation {
  std::size_t slot = 0;
  std::string constraint; // charge_rate | discharge_rate | energy_upper | energy_lower | ramp
  double amount = 0.0;
};

struct FeasibilityReport {
  std::vector<Violation> violations;
  // Slots that charge and discharge at once. Permitted, so not a violation,
  // but worth surfacing: it burns grid energy through the efficiency loss.
  std::vector<std::size_t> co_charge_slots;
  bool feasible() const { return violations.empty(); }
};

inline FeasibilityReport check_feasibility(const Schedule& sched, const EssTechnology& tech,
                                           const Capacities& caps, double tol = 1e-6) {
  FeasibilityReport rep;
  auto flag = [&](std::size_t slot, const char* name, double amount) {
    rep.violations.push_back({slot, name, amount});
  };
  const double max_charge = caps.p_cap / tech.charge_rate_ratio;
  const double e_floor = (1.0 - tech.depth_of_discharge) * caps.e_cap;
  const std::size_t T = sched.charge.size();
  for (std::size_t t = 0; t < T; ++t) {
    const double r = sched.charge[t];
    const double d = sched.discharge[t];
    if (r < -tol) flag(t + 1, "charge_rate", -r);
    if (r > max_charge + tol) flag(t + 1, "charge_rate", r - max_charge);
    if (d < -tol) flag(t + 1, "discharge_rate", -d);
    if (d > caps.p_cap + tol) flag(t + 1, "discharge_rate", d - caps.p_cap);
    if (r > tol && d > tol) rep.co_charge_slots.push_back(t + 1);
  }
  for (std::size_t t = 0; t < sched.stored_energy.size(); ++t) {
    const double e = sched.stored_energy[t];
    if (e > caps.e_cap + tol) flag(t, "energy_upper", e - caps.e_cap);
    if (e < e_floor - tol) flag(t, "energy_lower", e_floor - e);
  }
  if (tech.ramp_time_seconds > 0.0) {
    const double step = caps.p_cap * (sched.slot_hours * 3600.0) / tech.ramp_time_seconds;
    for (std::size_t t = 0; t + 1 < T; ++t) {
      const double inc = sched.discharge[t + 1] - sched.discharge[t];
      if (inc > step + tol) flag(t + 2, "ramp", inc - step);
    }
  }
  return rep;
}

} // namespace esskit
