#pragma once

#include <esskit/ess.hpp>
#include <esskit/heuristics.hpp>
#include <esskit/online.hpp>
#include <esskit/programs.hpp>
#include <esskit/trace.hpp>

#include <json.hpp>

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <map>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

namespace esskit {

using json = nlohmann::ordered_json;

// Parameters for regenerating the default synthetic traces.
struct RsrTraceConfig {
  std::size_t slots = 21600;
  double slot_seconds = 4.0;
  double tau = 200.0;
  double mean_reversion = 0.005;
  std::uint64_t seed = 7;
  std::size_t downsample = 75;
};

struct PowerTraceConfig {
  std::size_t slots = 96;
  double slot_seconds = 900.0;
  double peak_kw = 1000.0;
  double base_fraction = 0.3;
  double noise_fraction = 0.05;
  std::uint64_t seed = 7;
};

struct OnlineConfig {
  double lambda_battery = 0.9;
  double lambda_ucfw = 0.75;
  double rho1 = 0.2;
  double rho2 = 0.9;
  double window_hours = 12.0;
  std::vector<std::string> ucfw_techs{"uc", "fw"};
};

struct RunConfig {
  std::map<std::string, EssTechnology> technologies;
  std::map<std::string, Capacities> typical_capacities;
  RsrSpec rsr;    // signal filled in per run
  CrSpec cr;
  PsSpec ps;      // power_trace filled in per run
  OnlineConfig online;
  RsrTraceConfig rsr_trace;
  PowerTraceConfig power_trace;
  std::string output_dir = "out";
};

namespace detail {

inline double need_num(const json& j, const std::string& key,
                       const std::string& where) {
  if (!j.contains(key) || !j[key].is_number())
    throw std::runtime_error("config: missing number '" + key + "' in " + where);
  return j[key].get<double>();
}

inline double opt_num(const json& j, const std::string& key, double fallback) {
  return j.contains(key) ? j[key].get<double>() : fallback;
}

inline EssTechnology tech_from_json(const std::string& name, const json& j) {
  EssTechnology t;
  t.name = name;
  const std::string where = "technologies." + name;
  t.power_price = need_num(j, "power_price", where);
  t.energy_price = need_num(j, "energy_price", where);
  t.float_life_days = need_num(j, "float_life_days", where);
  t.cycle_life = need_num(j, "cycle_life", where);
  t.self_discharge_per_hour = need_num(j, "self_discharge_per_hour", where);
  t.charge_efficiency = need_num(j, "charge_efficiency", where);
  t.charge_rate_ratio = need_num(j, "charge_rate_ratio", where);
  t.depth_of_discharge = need_num(j, "depth_of_discharge", where);
  t.ramp_time_seconds = need_num(j, "ramp_time_seconds", where);
  validate(t);
  return t;
}

inline std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace detail

inline RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("config: cannot open " + path);
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw std::runtime_error("config: " + std::string(e.what()));
  }
  RunConfig cfg;
  if (!j.contains("technologies") || !j["technologies"].is_object())
    throw std::runtime_error("config: missing 'technologies' object");
  for (auto& [name, body] : j["technologies"].items())
    cfg.technologies[name] = detail::tech_from_json(name, body);
  if (j.contains("typical_capacities"))
    for (auto& [name, body] : j["typical_capacities"].items())
      cfg.typical_capacities[name] =
          Capacities{detail::need_num(body, "p_cap", name),
                     detail::need_num(body, "e_cap", name)};

  const json progs = j.value("programs", json::object());
  if (progs.contains("rsr")) {
    const json& r = progs["rsr"];
    cfg.rsr.reserve_price = detail::need_num(r, "reserve_price", "programs.rsr");
    cfg.rsr.penalty_coeff = detail::opt_num(r, "penalty_coeff", 1.0);
    cfg.rsr.rho1 = detail::opt_num(r, "rho1", 0.2);
    cfg.rsr.rho2 = detail::opt_num(r, "rho2", 1.0);
    cfg.rsr.cycles_per_day = detail::opt_num(r, "cycles_per_day", 0.0);
    cfg.rsr.hours_per_day = detail::opt_num(r, "hours_per_day", 24.0);
  }
  if (progs.contains("cr")) {
    const json& c = progs["cr"];
    cfg.cr.reserve_price = detail::need_num(c, "reserve_price", "programs.cr");
    cfg.cr.window_start =
        static_cast<std::size_t>(detail::opt_num(c, "window_start", 0.0));
    cfg.cr.window_end =
        static_cast<std::size_t>(detail::need_num(c, "window_end", "programs.cr"));
    cfg.cr.slot_seconds = detail::opt_num(c, "slot_seconds", 60.0);
    cfg.cr.horizon_slots =
        static_cast<std::size_t>(detail::opt_num(c, "horizon_slots", 0.0));
    cfg.cr.cycles_per_day = detail::opt_num(c, "cycles_per_day", 0.0);
  }
  if (progs.contains("ps")) {
    const json& p = progs["ps"];
    cfg.ps.opex_peak_price = detail::need_num(p, "opex_peak_price", "programs.ps");
    cfg.ps.capex_peak_price = detail::need_num(p, "capex_peak_price", "programs.ps");
    cfg.ps.capex_horizon_days = detail::opt_num(p, "capex_horizon_days", 3650.0);
    cfg.ps.cycles_per_day = detail::opt_num(p, "cycles_per_day", 0.0);
  }
  if (j.contains("online")) {
    const json& o = j["online"];
    cfg.online.lambda_battery = detail::opt_num(o, "lambda_battery", 0.9);
    cfg.online.lambda_ucfw = detail::opt_num(o, "lambda_ucfw", 0.75);
    cfg.online.rho1 = detail::opt_num(o, "rho1", 0.2);
    cfg.online.rho2 = detail::opt_num(o, "rho2", 0.9);
    cfg.online.window_hours = detail::opt_num(o, "window_hours", 12.0);
    if (o.contains("ucfw_techs"))
      cfg.online.ucfw_techs = o["ucfw_techs"].get<std::vector<std::string>>();
  }
  if (j.contains("traces")) {
    const json& t = j["traces"];
    if (t.contains("rsr")) {
      const json& r = t["rsr"];
      cfg.rsr_trace.slots =
          static_cast<std::size_t>(detail::opt_num(r, "slots", 21600.0));
      cfg.rsr_trace.slot_seconds = detail::opt_num(r, "slot_seconds", 4.0);
      cfg.rsr_trace.tau = detail::opt_num(r, "tau", 200.0);
      cfg.rsr_trace.mean_reversion = detail::opt_num(r, "mean_reversion", 0.005);
      cfg.rsr_trace.seed =
          static_cast<std::uint64_t>(detail::opt_num(r, "seed", 7.0));
      cfg.rsr_trace.downsample =
          static_cast<std::size_t>(detail::opt_num(r, "downsample", 75.0));
    }
    if (t.contains("power")) {
      const json& p = t["power"];
      cfg.power_trace.slots =
          static_cast<std::size_t>(detail::opt_num(p, "slots", 96.0));
      cfg.power_trace.slot_seconds = detail::opt_num(p, "slot_seconds", 900.0);
      cfg.power_trace.peak_kw = detail::opt_num(p, "peak_kw", 1000.0);
      cfg.power_trace.base_fraction = detail::opt_num(p, "base_fraction", 0.3);
      cfg.power_trace.noise_fraction = detail::opt_num(p, "noise_fraction", 0.05);
      cfg.power_trace.seed =
          static_cast<std::uint64_t>(detail::opt_num(p, "seed", 7.0));
    }
  }
  if (j.contains("output_dir")) cfg.output_dir = j["output_dir"].get<std::string>();
  return cfg;
}

inline json tracked_to_json(const TrackedSet& set) {
  return json(set.slots);
}

inline json plan_to_json(const ProgramPlan& plan, const std::string& program,
                         const std::string& tech,
                         const TrackedSet* tracked = nullptr) {
  json j;
  j["program"] = program;
  j["tech"] = tech;
  j["status"] = lp::to_string(plan.lp_status);
  j["p_cap_kw"] = plan.caps.p_cap;
  j["e_cap_kwh"] = plan.caps.e_cap;
  j["reserve_kw"] = plan.reserve;
  j["revenue_per_day"] = plan.revenue_per_day;
  j["cost_per_day"] = plan.cost_per_day;
  j["profit_per_day"] = plan.profit_per_day;
  if (tracked) j["tracked"] = tracked_to_json(*tracked);
  return j;
}

inline json online_to_json(const OnlineResult& res, double reserve) {
  const std::size_t total = res.schedule.net_power.size();
  json j;
  j["reserve_kw"] = reserve;
  j["revenue"] = res.revenue_per_day;
  j["tracked_ok_fraction"] =
      total == 0 ? 1.0
                 : static_cast<double>(res.tracked_ok_count) /
                       static_cast<double>(total);
  j["violations"] = res.violations;
  j["feasible"] = res.feasible;
  return j;
}

// Per-slot schedule rows; the t = 0 row carries the initial stored energy.
inline void write_schedule_csv(std::ostream& out, const Schedule& sched,
                               const std::vector<double>* beta = nullptr) {
  out << "t,r_kw,d_kw,u_kw,e_kwh";
  if (beta) out << ",beta";
  out << "\n0,0,0,0," << detail::fmt17(sched.stored_energy.empty() ? 0.0 : sched.stored_energy[0]);
  if (beta) out << ",0";
  out << "\n";
  for (std::size_t t = 0; t < sched.charge.size(); ++t) {
    out << (t + 1) << ',' << detail::fmt17(sched.charge[t]) << ','
        << detail::fmt17(sched.discharge[t]) << ','
        << detail::fmt17(sched.net_power[t]) << ','
        << detail::fmt17(sched.stored_energy[t + 1]);
    if (beta) out << ',' << detail::fmt17((*beta)[t]);
    out << "\n";
  }
}

// Grid results; failed cells carry their status text instead of a number.
inline void write_sweep_csv(std::ostream& out, const SweepResult& res) {
  auto cell_text = [](const SweepCell& c) -> std::string {
    if (c.error) return "error";
    if (c.status != lp::LpStatus::Optimal) return lp::to_string(c.status);
    return detail::fmt17(c.profit);
  };
  if (res.axis2) {
    out << res.axis1.param << '\\' << res.axis2->param;
    for (double v : res.axis2->values) out << ',' << detail::fmt17(v);
    out << "\n";
    for (std::size_t i = 0; i < res.axis1.values.size(); ++i) {
      out << detail::fmt17(res.axis1.values[i]);
      for (std::size_t k = 0; k < res.axis2->values.size(); ++k)
        out << ',' << cell_text(res.cells[i][k]);
      out << "\n";
    }
  } else {
    out << res.axis1.param << ",profit_per_day\n";
    for (std::size_t i = 0; i < res.axis1.values.size(); ++i)
      out << detail::fmt17(res.axis1.values[i]) << ','
          << cell_text(res.cells[i][0]) << "\n";
  }
}

}  // namespace esskit
