#include <esskit/io.hpp>

#include <CLI11.hpp>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <thread>
#include <utility>
#include <vector>

namespace {

constexpr int kOk = 0;
constexpr int kUsage = 2;
constexpr int kInfeasible = 3;
constexpr int kUnbounded = 4;
constexpr int kInternal = 5;

struct CommonOpts {
  std::string config_path = "./defaults.json";
  std::string out_dir;
  std::string trace_path;
  std::string fix_caps;
  std::string heuristic;
  double rho2 = -1.0;  // negative = use config value
  std::uint64_t seed = 1;
};

std::string resolve_out_dir(const CommonOpts& opt, const esskit::RunConfig* cfg) {
  if (const char* env = std::getenv("ESSKIT_OUT"); env && *env) return env;
  if (!opt.out_dir.empty()) return opt.out_dir;
  if (cfg) return cfg->output_dir;
  return "out";
}

std::ofstream open_out(const std::string& dir, const std::string& name) {
  std::filesystem::create_directories(dir);
  const std::string path = dir + "/" + name;
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  return out;
}

esskit::Capacities parse_caps(const std::string& text) {
  double p = 0, e = 0;
  char tail = 0;
  if (std::sscanf(text.c_str(), "%lf,%lf%c", &p, &e, &tail) != 2 || p < 0 || e < 0)
    throw std::invalid_argument("--fix-caps expects P,E with nonnegative numbers");
  return esskit::Capacities{p, e};
}

esskit::Trace rsr_trace_for(const esskit::RunConfig& cfg, const CommonOpts& opt) {
  if (!opt.trace_path.empty()) {
    esskit::Trace tr = esskit::load_csv(opt.trace_path);
    if (tr.kind != esskit::TraceKind::rsr_signal)
      throw std::invalid_argument("trace is not an rsr signal: " + opt.trace_path);
    return tr;
  }
  const esskit::RsrTraceConfig& g = cfg.rsr_trace;
  esskit::Trace raw = esskit::gen_rsr_signal(g.slots, g.slot_seconds, g.tau,
                                             g.mean_reversion, g.seed);
  return g.downsample > 1 ? esskit::downsample(raw, g.downsample) : raw;
}

esskit::Trace power_trace_for(const esskit::RunConfig& cfg, const CommonOpts& opt) {
  if (!opt.trace_path.empty()) {
    esskit::Trace tr = esskit::load_csv(opt.trace_path);
    if (tr.kind != esskit::TraceKind::power_kw)
      throw std::invalid_argument("trace is not a power trace: " + opt.trace_path);
    return tr;
  }
  const esskit::PowerTraceConfig& g = cfg.power_trace;
  return esskit::gen_power_trace(g.slots, g.slot_seconds, g.peak_kw,
                                 g.base_fraction, g.noise_fraction, g.seed);
}

// Builds the program spec plus, for a partially tracked regulation run, the
// tracked-slot set chosen by the named heuristic.
std::pair<esskit::ProgramSpec, std::optional<esskit::TrackedSet>> build_spec(
    const std::string& program, const esskit::RunConfig& cfg,
    const CommonOpts& opt) {
  std::optional<esskit::Capacities> fixed;
  if (!opt.fix_caps.empty()) fixed = parse_caps(opt.fix_caps);
  if (program == "rsr") {
    esskit::RsrSpec s = cfg.rsr;
    s.signal = rsr_trace_for(cfg, opt);
    if (opt.rho2 > 0) s.rho2 = opt.rho2;
    if (fixed) {
      s.fixed_caps = fixed;
      s.cap_bounds.reset();
    }
    std::optional<esskit::TrackedSet> tracked;
    if (s.rho2 < 1.0) {
      const std::size_t total = s.signal.values.size();
      if (opt.heuristic == "rand")
        tracked = esskit::rand_select(total, s.rho2, opt.seed);
      else if (opt.heuristic == "mincap")
        tracked = esskit::min_cap_select(s.signal.values, s.rho2);
      else if (opt.heuristic == "fixint")
        tracked = esskit::fix_int_select(total, s.rho2);
      else
        throw std::invalid_argument(
            "rho2 < 1 requires --heuristic rand|mincap|fixint");
    }
    return {esskit::ProgramSpec{s}, tracked};
  }
  if (opt.rho2 > 0 || !opt.heuristic.empty())
    throw std::invalid_argument("--rho2/--heuristic apply to --program rsr only");
  if (program == "cr") {
    esskit::CrSpec s = cfg.cr;
    if (fixed) {
      s.fixed_caps = fixed;
      s.cap_bounds.reset();
    }
    return {esskit::ProgramSpec{s}, std::nullopt};
  }
  esskit::PsSpec s = cfg.ps;
  s.power_trace = power_trace_for(cfg, opt);
  if (fixed) {
    s.fixed_caps = fixed;
    s.cap_bounds.reset();
  }
  return {esskit::ProgramSpec{s}, std::nullopt};
}

int status_exit(esskit::lp::LpStatus status) {
  switch (status) {
    case esskit::lp::LpStatus::Optimal: return kOk;
    case esskit::lp::LpStatus::Infeasible: return kInfeasible;
    case esskit::lp::LpStatus::Unbounded: return kUnbounded;
  }
  return kInternal;
}

int cmd_gen_trace(const std::string& kind, std::size_t slots, double slot_seconds,
                  double tau, double mean_reversion, double peak_kw,
                  double base_fraction, double noise_fraction, std::uint64_t seed,
                  std::size_t ds, const std::string& out_path,
                  const CommonOpts& opt) {
  esskit::Trace tr;
  if (kind == "rsr") {
    tr = esskit::gen_rsr_signal(slots, slot_seconds, tau, mean_reversion, seed);
    if (ds > 1) tr = esskit::downsample(tr, ds);
  } else {
    tr = esskit::gen_power_trace(slots, slot_seconds, peak_kw, base_fraction,
                                 noise_fraction, seed);
  }
  std::string path = out_path;
  if (path.empty()) {
    const std::string dir = resolve_out_dir(opt, nullptr);
    std::filesystem::create_directories(dir);
    path = dir + "/trace_" + kind + ".csv";
  } else if (const auto parent = std::filesystem::path(path).parent_path();
             !parent.empty()) {
    std::filesystem::create_directories(parent);
  }
  esskit::save_csv(tr, path);
  std::printf("%s\n", path.c_str());
  return kOk;
}

int cmd_optimize(const std::string& program, const std::string& tech_name,
                 const CommonOpts& opt) {
  const esskit::RunConfig cfg = esskit::load_config(opt.config_path);
  auto tech_it = cfg.technologies.find(tech_name);
  if (tech_it == cfg.technologies.end())
    throw std::invalid_argument("unknown technology: " + tech_name);
  auto [spec, tracked] = build_spec(program, cfg, opt);

  esskit::ProgramPlan plan = std::visit(
      [&](const auto& s) {
        using S = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<S, esskit::RsrSpec>) {
          if (tracked) return esskit::optimize(tech_it->second, s, tracked->slots);
          return esskit::optimize(tech_it->second, s);
        } else {
          return esskit::optimize(tech_it->second, s);
        }
      },
      spec);

  const std::string dir = resolve_out_dir(opt, &cfg);
  const esskit::json report = esskit::plan_to_json(
      plan, program, tech_name, tracked ? &*tracked : nullptr);
  open_out(dir, "plan_" + program + "_" + tech_name + ".json")
      << report.dump(2) << "\n";
  if (plan.lp_status == esskit::lp::LpStatus::Optimal) {
    auto sched = open_out(dir, "schedule_" + program + "_" + tech_name + ".csv");
    esskit::write_schedule_csv(sched, plan.schedule);
  }
  std::printf("%s\n", report.dump(2).c_str());
  return status_exit(plan.lp_status);
}

int cmd_online(const std::string& tech_name, double lambda, double window_hours,
               const CommonOpts& opt) {
  const esskit::RunConfig cfg = esskit::load_config(opt.config_path);
  auto tech_it = cfg.technologies.find(tech_name);
  if (tech_it == cfg.technologies.end())
    throw std::invalid_argument("unknown technology: " + tech_name);
  const esskit::EssTechnology& tech = tech_it->second;
  const bool ucfw_policy =
      std::find(cfg.online.ucfw_techs.begin(), cfg.online.ucfw_techs.end(),
                tech_name) != cfg.online.ucfw_techs.end();
  if (lambda < 0.0)
    lambda = ucfw_policy ? cfg.online.lambda_ucfw : cfg.online.lambda_battery;
  if (lambda > 1.0 || lambda < 0.0)
    throw std::invalid_argument("--lambda must be in [0, 1]");
  if (window_hours <= 0) window_hours = cfg.online.window_hours;

  esskit::Capacities caps;
  if (!opt.fix_caps.empty()) {
    caps = parse_caps(opt.fix_caps);
  } else {
    auto cap_it = cfg.typical_capacities.find(tech_name);
    if (cap_it == cfg.typical_capacities.end())
      throw std::invalid_argument("no typical capacities for " + tech_name +
                                  "; pass --fix-caps");
    caps = cap_it->second;
  }

  // Per-minute slots make the per-hour LPs desk-scale.
  esskit::Trace sig;
  if (!opt.trace_path.empty()) {
    sig = esskit::load_csv(opt.trace_path);
    if (sig.kind != esskit::TraceKind::rsr_signal)
      throw std::invalid_argument("trace is not an rsr signal");
  } else {
    const esskit::RsrTraceConfig& g = cfg.rsr_trace;
    esskit::Trace raw = esskit::gen_rsr_signal(g.slots, g.slot_seconds, g.tau,
                                               g.mean_reversion, g.seed);
    const double factor = 60.0 / g.slot_seconds;
    if (factor > 1.0) raw = esskit::downsample(raw, static_cast<std::size_t>(factor));
    sig = raw;
  }
  if (std::fmod(3600.0, sig.slot_seconds) != 0.0)
    throw std::invalid_argument("trace slots must divide one hour evenly");
  const std::size_t per_hour = static_cast<std::size_t>(3600.0 / sig.slot_seconds);
  const std::size_t hours = sig.values.size() / per_hour;
  const std::size_t window = static_cast<std::size_t>(window_hours);
  if (hours < 2 * window)
    throw std::invalid_argument("trace must cover at least twice the window");

  const double rho1 = cfg.online.rho1;
  const double rho2 = opt.rho2 > 0 ? opt.rho2 : cfg.online.rho2;
  const esskit::RsrTerms terms{cfg.rsr.reserve_price, cfg.rsr.penalty_coeff,
                               rho1, rho2, cfg.rsr.hours_per_day};

  std::vector<double> hourly_r(hours), hourly_rev(hours);
  for (std::size_t h = 0; h < hours; ++h) {
    esskit::RsrSpec s = cfg.rsr;
    s.signal = esskit::slice(sig, h * per_hour, per_hour);
    s.fixed_caps = caps;
    const esskit::ProgramPlan plan = esskit::optimize(tech, s);
    hourly_r[h] = plan.reserve;
    hourly_rev[h] = plan.revenue_per_day;
  }

  const std::string dir = resolve_out_dir(opt, &cfg);
  esskit::json hours_json = esskit::json::array();
  std::size_t zero_violation = 0, feasible_hours = 0;
  for (std::size_t h = window; h < hours; ++h) {
    double r_onl = 0.0;
    if (lambda > 0.0) {
      const std::vector<double> past(hourly_r.begin() + (h - window),
                                     hourly_r.begin() + h);
      r_onl = esskit::estimate_reserve(past, lambda);
    }
    const esskit::Trace hour = esskit::slice(sig, h * per_hour, per_hour);
    esskit::OnlineResult res;
    if (ucfw_policy) {
      auto pol = esskit::init_ucfw_policy(rho1, rho2, tech, caps, r_onl);
      res = esskit::run_online(pol, hour, tech, caps, terms);
    } else {
      const std::vector<double> hist(sig.values.begin() + (h - window) * per_hour,
                                     sig.values.begin() + h * per_hour);
      auto pol = esskit::init_battery_policy(hist, rho1, rho2, tech, caps, r_onl);
      res = esskit::run_online(pol, hour, tech, caps, terms);
    }
    esskit::json row = esskit::online_to_json(res, r_onl);
    row["hour"] = h;
    row["offline_revenue"] = hourly_rev[h];
    hours_json.push_back(std::move(row));
    if (res.violations == 0) ++zero_violation;
    if (res.feasible) ++feasible_hours;
    auto log = open_out(dir, "online_" + tech_name + "_hour" + std::to_string(h) + ".csv");
    esskit::write_schedule_csv(log, res.schedule, &hour.values);
  }

  esskit::json report;
  report["tech"] = tech_name;
  report["policy"] = ucfw_policy ? "ucfw" : "battery";
  report["lambda"] = lambda;
  report["rho2"] = rho2;
  report["window_hours"] = window;
  report["test_hours"] = hours - window;
  report["zero_violation_hours"] = zero_violation;
  report["feasible_hours"] = feasible_hours;
  report["hours"] = std::move(hours_json);
  open_out(dir, "online_" + tech_name + ".json") << report.dump(2) << "\n";
  std::printf("%s\n", report.dump(2).c_str());
  return kOk;
}

esskit::SweepAxis parse_axis(const std::string& text) {
  const std::size_t eq = text.find('=');
  if (eq == std::string::npos || eq == 0)
    throw std::invalid_argument("axis must look like name=v1,v2 or name=lo:hi:n");
  esskit::SweepAxis axis;
  axis.param = text.substr(0, eq);
  const std::string body = text.substr(eq + 1);
  if (body.find(':') != std::string::npos) {
    double lo = 0, hi = 0;
    long n = 0;
    char tail = 0;
    if (std::sscanf(body.c_str(), "%lf:%lf:%ld%c", &lo, &hi, &n, &tail) != 3 || n < 1)
      throw std::invalid_argument("range axis must be lo:hi:n with n >= 1");
    for (long i = 0; i < n; ++i)
      axis.values.push_back(
          n == 1 ? lo : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1));
  } else {
    std::size_t pos = 0;
    while (pos <= body.size()) {
      const std::size_t comma = std::min(body.find(',', pos), body.size());
      double v = 0;
      char tail = 0;
      const std::string item = body.substr(pos, comma - pos);
      if (std::sscanf(item.c_str(), "%lf%c", &v, &tail) != 1)
        throw std::invalid_argument("bad axis value: " + item);
      axis.values.push_back(v);
      pos = comma + 1;
      if (comma == body.size()) break;
    }
  }
  if (axis.values.empty()) throw std::invalid_argument("axis has no values");
  return axis;
}

int cmd_sweep(const std::string& program, const std::string& tech_name,
              const std::string& axis1_text, const std::string& axis2_text,
              std::size_t workers, const CommonOpts& opt) {
  const esskit::RunConfig cfg = esskit::load_config(opt.config_path);
  auto tech_it = cfg.technologies.find(tech_name);
  if (tech_it == cfg.technologies.end())
    throw std::invalid_argument("unknown technology: " + tech_name);
  auto [spec, tracked] = build_spec(program, cfg, opt);
  const esskit::SweepAxis axis1 = parse_axis(axis1_text);
  std::optional<esskit::SweepAxis> axis2;
  if (!axis2_text.empty()) axis2 = parse_axis(axis2_text);
  if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());

  const esskit::SweepResult res =
      esskit::sweep(tech_it->second, spec, axis1, axis2,
                    tracked ? &tracked->slots : nullptr, workers);
  const std::string dir = resolve_out_dir(opt, &cfg);
  auto out = open_out(dir, "sweep_" + program + "_" + tech_name + ".csv");
  esskit::write_sweep_csv(out, res);
  std::printf("%s/sweep_%s_%s.csv\n", dir.c_str(), program.c_str(), tech_name.c_str());
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Energy-storage market participation toolkit"};
  app.require_subcommand(1);
  CommonOpts opt;

  // gen-trace
  auto* gen = app.add_subcommand("gen-trace", "Write a synthetic trace CSV");
  std::string kind, gen_out;
  std::size_t slots = 21600, ds = 1;
  double slot_seconds = 4.0, tau = 200.0, mean_reversion = 0.005;
  double peak_kw = 1000.0, base_fraction = 0.3, noise_fraction = 0.05;
  std::uint64_t gen_seed = 7;
  gen->add_option("--kind", kind, "rsr or power")
      ->required()
      ->check(CLI::IsMember({"rsr", "power"}));
  auto* slots_opt = gen->add_option("--slots", slots, "number of slots");
  auto* slotsec_opt = gen->add_option("--slot-seconds", slot_seconds, "slot length");
  gen->add_option("--tau", tau, "signal time constant, seconds");
  gen->add_option("--mean-reversion", mean_reversion, "per-slot pull toward zero");
  gen->add_option("--peak-kw", peak_kw, "power trace peak");
  gen->add_option("--base-fraction", base_fraction, "power trace base level");
  gen->add_option("--noise-fraction", noise_fraction, "power trace noise");
  gen->add_option("--seed", gen_seed, "generator seed");
  gen->add_option("--downsample", ds, "post-generation block-mean factor");
  gen->add_option("--out", gen_out, "output CSV path");
  gen->add_option("--out-dir", opt.out_dir, "output directory");

  // optimize
  auto* opti = app.add_subcommand("optimize", "Solve one market program");
  std::string program, tech;
  opti->add_option("--program", program, "rsr, cr, or ps")
      ->required()
      ->check(CLI::IsMember({"rsr", "cr", "ps"}));
  opti->add_option("--tech", tech, "technology name from the config")->required();
  opti->add_option("--config", opt.config_path, "config JSON path");
  opti->add_option("--trace", opt.trace_path, "input trace CSV");
  opti->add_option("--fix-caps", opt.fix_caps, "fix capacities to P,E");
  opti->add_option("--rho2", opt.rho2, "required tracked fraction");
  opti->add_option("--heuristic", opt.heuristic, "rand, mincap, or fixint");
  opti->add_option("--seed", opt.seed, "seed for --heuristic rand");
  opti->add_option("--out-dir", opt.out_dir, "output directory");

  // online
  auto* onl = app.add_subcommand("online", "Run the real-time hold-out protocol");
  double lambda = -1.0, window_hours = 0.0;
  onl->add_option("--tech", tech, "technology name from the config")->required();
  onl->add_option("--lambda", lambda, "reserve safety fraction");
  onl->add_option("--window-hours", window_hours, "lookback window");
  onl->add_option("--config", opt.config_path, "config JSON path");
  onl->add_option("--trace", opt.trace_path, "input signal CSV");
  onl->add_option("--fix-caps", opt.fix_caps, "capacities as P,E");
  onl->add_option("--rho2", opt.rho2, "required tracked fraction");
  onl->add_option("--out-dir", opt.out_dir, "output directory");

  // sweep
  auto* swp = app.add_subcommand("sweep", "Grid a program over parameter axes");
  std::string axis1_text, axis2_text;
  std::size_t workers = 0;
  swp->add_option("--program", program, "rsr, cr, or ps")
      ->required()
      ->check(CLI::IsMember({"rsr", "cr", "ps"}));
  swp->add_option("--tech", tech, "technology name from the config")->required();
  swp->add_option("--axis1", axis1_text, "name=v1,v2 or name=lo:hi:n")->required();
  swp->add_option("--axis2", axis2_text, "second axis, same syntax");
  swp->add_option("--workers", workers, "worker threads, 0 = cores");
  swp->add_option("--config", opt.config_path, "config JSON path");
  swp->add_option("--trace", opt.trace_path, "input trace CSV");
  swp->add_option("--fix-caps", opt.fix_caps, "fix capacities to P,E");
  swp->add_option("--rho2", opt.rho2, "required tracked fraction");
  swp->add_option("--heuristic", opt.heuristic, "rand, mincap, or fixint");
  swp->add_option("--seed", opt.seed, "seed for --heuristic rand");
  swp->add_option("--out-dir", opt.out_dir, "output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    if (gen->parsed()) {
      if (kind == "power") {
        if (slots_opt->count() == 0) slots = 96;
        if (slotsec_opt->count() == 0) slot_seconds = 900.0;
      }
      return cmd_gen_trace(kind, slots, slot_seconds, tau, mean_reversion,
                           peak_kw, base_fraction, noise_fraction, gen_seed, ds,
                           gen_out, opt);
    }
    if (opti->parsed()) return cmd_optimize(program, tech, opt);
    if (onl->parsed()) return cmd_online(tech, lambda, window_hours, opt);
    if (swp->parsed()) return cmd_sweep(program, tech, axis1_text, axis2_text, workers, opt);
    return kUsage;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kUsage;
  } catch (const esskit::TraceParseError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kUsage;
  } catch (const std::runtime_error& e) {
    const std::string what = e.what();
    std::fprintf(stderr, "error: %s\n", what.c_str());
    return what.rfind("config:", 0) == 0 || what.rfind("cannot write", 0) == 0
               ? kUsage
               : kInternal;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "internal error: %s\n", e.what());
    return kInternal;
  }
}
