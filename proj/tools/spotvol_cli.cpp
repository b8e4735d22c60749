// spotvol command-line front end.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "spotvol/baselines.hpp"
#include "spotvol/errors.hpp"
#include "spotvol/experiments.hpp"
#include "spotvol/fourier.hpp"
#include "spotvol/ingestion.hpp"
#include "spotvol/io.hpp"
#include "spotvol/kernel_check.hpp"
#include "spotvol/metrics.hpp"
#include "spotvol/parallel.hpp"
#include "spotvol/plugin.hpp"
#include "spotvol/selector.hpp"
#include "spotvol/simulator.hpp"

namespace fs = std::filesystem;
using namespace spotvol;
using io::fmt;

namespace {

const std::vector<std::string> kCommands{"simulate",  "estimate", "select",      "benchmark",
                                         "empirical", "clt",      "kernel-check"};

// ---------------------------------------------------------------- helpers

double parse_number(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const double x = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw ValidationError("parameter " + key + ": cannot parse '" + v + "'");
  }
}

// Model parameters from a key = value file. Keys are either bare (applied to
// `primary`) or prefixed with the model name, e.g. `heston.gamma = 0.03`.
sim::ModelParams load_model_params(const std::string& file, sim::Model primary) {
  sim::ModelParams p;
  p.model = primary;
  if (file.empty()) return p;
  for (const auto& [raw_key, value] : io::read_config(file)) {
    std::string key = raw_key;
    sim::Model target = primary;
    if (const auto dot = key.find('.'); dot != std::string::npos) {
      target = sim::parse_model(key.substr(0, dot));
      key = key.substr(dot + 1);
    }
    const double v = parse_number(raw_key, value);
    bool known = true;
    switch (target) {
      case sim::Model::Sv1f: {
        auto& s = p.sv1f;
        if (key == "mu") s.mu = v;
        else if (key == "beta0") s.beta0 = v;
        else if (key == "beta1") s.beta1 = v;
        else if (key == "alpha") s.alpha = v;
        else if (key == "rho") s.rho = v;
        else if (key == "tau0") s.tau0 = v;
        else known = false;
        break;
      }
      case sim::Model::Heston: {
        auto& h = p.heston;
        if (key == "mu") h.mu = v;
        else if (key == "theta") h.theta = v;
        else if (key == "alpha") h.alpha = v;
        else if (key == "gamma") h.gamma = v;
        else if (key == "rho") h.rho = v;
        else if (key == "v0") h.v0 = v;
        else known = false;
        break;
      }
      case sim::Model::Constant: {
        auto& c = p.constant;
        if (key == "variance") c.variance = v;
        else if (key == "mu") c.mu = v;
        else known = false;
        break;
      }
    }
    if (!known) throw ValidationError("unknown model parameter '" + raw_key + "'");
  }
  p.sv1f.validate();
  p.heston.validate();
  p.constant.validate();
  return p;
}

std::vector<double> range(double lo, double hi, double step, const std::string& what) {
  require(step > 0.0 && hi >= lo, what + " range needs step > 0 and max >= min");
  std::vector<double> out;
  const long count = std::lround(std::floor((hi - lo) / step + 1e-9)) + 1;
  for (long i = 0; i < count; ++i) {
    out.push_back(std::round((lo + static_cast<double>(i) * step) * 1e9) / 1e9);
  }
  return out;
}

void check_finite(const SpotVolPath& p, const std::string& what) {
  for (double v : p.values) {
    if (!std::isfinite(v)) throw NumericalError(what + " produced a non-finite value");
  }
}

struct InputOptions {
  std::string input;
  bool ticks = false;
  std::string open = "09:30:00";
  std::string close = "16:00:00";
  std::size_t expected_n = 23400;
};

ingest::SessionSpec session_of(const InputOptions& o) {
  ingest::SessionSpec s;
  s.open = ingest::parse_clock(o.open);
  s.close = ingest::parse_clock(o.close);
  s.expected_n = o.expected_n;
  s.validate();
  return s;
}

PricePath load_input(const InputOptions& o) {
  require(!o.input.empty(), "an input file is required");
  if (!o.ticks) return io::read_path_csv(o.input);
  const ingest::SessionSpec s = session_of(o);
  const ingest::LoadResult r = ingest::load_ticks_file(o.input, s);
  for (const auto& e : r.rejected) {
    std::cerr << "warning: " << o.input << ":" << e.line << ": " << e.message << '\n';
  }
  return ingest::resample_last_tick(r.ticks, s);
}

void add_input_options(CLI::App* cmd, InputOptions& o) {
  cmd->add_option("--input", o.input, "price path CSV (timestamp,logprice) or tick CSV with --ticks");
  cmd->add_flag("--ticks", o.ticks, "treat the input as raw ticks (timestamp,price) and resample");
  cmd->add_option("--open", o.open, "session open, HH:MM:SS (ticks only)");
  cmd->add_option("--close", o.close, "session close, HH:MM:SS (ticks only)");
  cmd->add_option("--expected-n", o.expected_n, "grid increments per session (ticks only)");
}

struct PluginFlags {
  bool bias_correction = false;
  std::optional<double> iv, iq, ivv, xi;
};

void add_plugin_options(CLI::App* cmd, PluginFlags& f) {
  cmd->add_flag("--volvol-bias-correction", f.bias_correction,
                "subtract the coefficient-noise term from the vol-of-vol plug-in");
  cmd->add_option("--iv", f.iv, "override the integrated variance plug-in (per day)");
  cmd->add_option("--iq", f.iq, "override the integrated quarticity plug-in");
  cmd->add_option("--ivv", f.ivv, "override the integrated vol-of-vol plug-in");
  cmd->add_option("--xi", f.xi, "override the noise variance plug-in");
}

plugin::PluginOptions plugin_options(const PluginFlags& f) {
  plugin::PluginOptions p;
  p.volvol_bias_correction = f.bias_correction;
  p.iv_override = f.iv;
  p.iq_override = f.iq;
  p.ivv_override = f.ivv;
  p.xi_override = f.xi;
  return p;
}

struct SelectorFlags {
  double c_lambda = 500.0;
  std::optional<double> learning_rate;
  double threshold = 1e-3;
  long max_iters = 100000;
  std::optional<double> n_lo, n_hi, m_lo, m_hi;
};

void add_selector_options(CLI::App* cmd, SelectorFlags& f) {
  cmd->add_option("--c-lambda", f.c_lambda, "learning-rate constant, lambda = c / xi");
  cmd->add_option("--learning-rate", f.learning_rate, "explicit learning rate");
  cmd->add_option("--threshold", f.threshold, "stop when the relative objective change is below");
  cmd->add_option("--max-iters", f.max_iters, "iteration cap");
  cmd->add_option("--n-lo", f.n_lo, "box lower bound for N");
  cmd->add_option("--n-hi", f.n_hi, "box upper bound for N");
  cmd->add_option("--m-lo", f.m_lo, "box lower bound for M");
  cmd->add_option("--m-hi", f.m_hi, "box upper bound for M");
}

select::SelectorOptions selector_options(const SelectorFlags& f, std::size_t n) {
  select::SelectorOptions s;
  s.c_lambda = f.c_lambda;
  s.learning_rate = f.learning_rate;
  s.threshold = f.threshold;
  s.max_iters = f.max_iters;
  if (f.n_lo || f.n_hi || f.m_lo || f.m_hi) {
    require(n > 0, "box overrides need the sample size");
    select::Box b = select::default_box(n);
    if (f.n_lo) b.n_lo = *f.n_lo;
    if (f.n_hi) b.n_hi = *f.n_hi;
    if (f.m_lo) b.m_lo = *f.m_lo;
    if (f.m_hi) b.m_hi = *f.m_hi;
    b.validate();
    s.box = b;
  }
  s.validate();
  return s;
}

// Config keys become leading --key=value tokens right after the subcommand, so
// explicit flags (which come later) win under the take-last policy.
std::vector<std::string> inject_config(std::vector<std::string> args) {
  std::size_t cmd_pos = args.size();
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (std::find(kCommands.begin(), kCommands.end(), args[i]) != kCommands.end()) {
      cmd_pos = i;
      break;
    }
  }
  if (cmd_pos == args.size()) return args;
  std::optional<std::string> config;
  for (std::size_t i = cmd_pos + 1; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) config = args[i + 1];
    else if (args[i].rfind("--config=", 0) == 0) config = args[i].substr(9);
  }
  if (!config) return args;
  std::string manifest_command;
  const auto kv = io::read_config(*config, &manifest_command);
  if (!manifest_command.empty() && manifest_command != args[cmd_pos]) {
    throw ValidationError("manifest " + *config + " belongs to command '" + manifest_command + "'");
  }
  std::vector<std::string> injected;
  for (const auto& [k, v] : kv) {
    if (k == "config") continue;
    injected.push_back("--" + k + "=" + v);
  }
  args.insert(args.begin() + static_cast<long>(cmd_pos) + 1, injected.begin(), injected.end());
  return args;
}

std::map<std::string, std::string> resolved_config(const CLI::App* cmd) {
  std::map<std::string, std::string> out;
  for (const CLI::Option* opt : cmd->get_options()) {
    if (opt->get_lnames().empty()) continue;
    const std::string name = opt->get_lnames().front();
    if (name == "help" || name == "config") continue;
    std::string value;
    if (opt->count() > 0) {
      value = opt->results().back();
    } else {
      value = opt->get_default_str();
    }
    if (value.empty()) continue;
    out[name] = value;
  }
  return out;
}

// ---------------------------------------------------------------- commands

struct Common {
  std::string out = ".";
  std::uint64_t seed = 1;
  int jobs = 1;
  std::string config;
};

void add_common(CLI::App* cmd, Common& c, bool seeded) {
  cmd->add_option("--config", c.config, "key = value file or a manifest.json from an earlier run");
  cmd->add_option("--out", c.out, "output directory")->envname("SPOTVOL_OUT");
  cmd->add_option("--jobs", c.jobs, "worker threads (0 = hardware concurrency)");
  if (seeded) cmd->add_option("--seed", c.seed, "base random seed");
}

struct Outputs {
  fs::path dir;
  std::vector<fs::path> files;
  fs::path add(const std::string& name) {
    files.push_back(dir / name);
    return files.back();
  }
};

void finish(const CLI::App* cmd, const Common& c, Outputs& o,
            std::vector<std::pair<std::string, std::string>> extra = {}) {
  io::Manifest m;
  m.command = cmd->get_name();
  m.seed = c.seed;
  m.config = resolved_config(cmd);
  m.outputs = o.files;
  m.extra_json = std::move(extra);
  io::write_manifest(o.dir, m);
  std::cout << "wrote " << o.files.size() << " file(s) and manifest.json to " << o.dir.string()
            << '\n';
}

Outputs prepare(const Common& c) {
  Outputs o;
  o.dir = c.out;
  io::ensure_writable_dir(o.dir);
  return o;
}

// simulate ---------------------------------------------------------------

struct SimulateArgs {
  Common common;
  std::string model = "sv1f";
  std::string params;
  std::size_t n = 23400;
  double T = 23400.0;
  double zeta = 0.0;
  std::size_t paths = 1;
};

void run_simulate(const CLI::App* cmd, const SimulateArgs& a) {
  const sim::ModelParams params = load_model_params(a.params, sim::parse_model(a.model));
  require(a.paths >= 1, "--paths must be >= 1");
  require(a.zeta >= 0.0, "--zeta must be >= 0");
  Outputs o = prepare(a.common);
  std::vector<sim::SimulatedPath> sims(a.paths);
  parallel_for(a.paths, a.common.jobs, [&](std::size_t i) {
    const std::uint64_t s = sim::derive_seed(a.common.seed, i);
    sims[i] = sim::simulate(params, a.n, a.T, s);
    sims[i] = sim::add_noise(std::move(sims[i]), a.zeta, s);
  });
  nlohmann::ordered_json info = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < a.paths; ++i) {
    const auto& sp = sims[i];
    char stem[32];
    std::snprintf(stem, sizeof stem, "path_%04zu", i);
    const io::Meta meta{{"model", a.model},
                        {"path_seed", std::to_string(sp.seed)},
                        {"zeta", fmt(sp.zeta)},
                        {"xi", fmt(sp.xi)}};
    io::write_path_csv(o.add(std::string(stem) + "_clean.csv"), sp.prices, meta);
    io::write_path_csv(o.add(std::string(stem) + "_noisy.csv"), sp.noisy_prices, meta);
    io::Meta tmeta = meta;
    tmeta.emplace_back("units", "variance and vol-of-vol per day, one day = horizon");
    io::CsvWriter w(o.add(std::string(stem) + "_truevar.csv"), tmeta,
                    {"timestamp", "variance", "volvol"});
    for (std::size_t j = 0; j < sp.true_var.grid.size(); ++j) {
      w.row({fmt(sp.true_var.grid[j]), fmt(sp.true_var.values[j]), fmt(sp.true_volvol[j])});
    }
    info.push_back({{"index", i},
                    {"seed", sp.seed},
                    {"zeta", sp.zeta},
                    {"xi", sp.xi},
                    {"truncations", sp.truncations}});
  }
  finish(cmd, a.common, o, {{"paths", info.dump()}});
}

// estimate ---------------------------------------------------------------

struct EstimateArgs {
  Common common;
  InputOptions input;
  std::string method = "fourier";
  std::optional<int> N, M;
  bool adaptive = false;
  double step = 60.0;
  std::string times;
  bool clip = false;
  std::string edge = "truncate";
  std::optional<double> ts_ck, ts_ch, pa_ck, pa_cm;
  PluginFlags plug;
  SelectorFlags sel;
};

baseline::WindowEdge parse_edge(const std::string& s) {
  if (s == "reject") return baseline::WindowEdge::Reject;
  if (s == "truncate") return baseline::WindowEdge::Truncate;
  if (s == "shift") return baseline::WindowEdge::Shift;
  throw ValidationError("unknown window edge rule '" + s + "' (reject|truncate|shift)");
}

void run_estimate(const CLI::App* cmd, const EstimateArgs& a) {
  const PricePath path = load_input(a.input);
  const std::size_t n = path.increments();
  const std::vector<double> grid =
      a.times.empty() ? interior_grid(path.horizon, a.step) : io::parse_list(a.times);
  require(!grid.empty(), "evaluation grid is empty");
  for (double g : grid) {
    require(g > 0.0 && g < path.horizon, "evaluation time " + fmt(g) + " lies outside (0, T)");
  }
  Outputs o = prepare(a.common);
  io::Meta meta{{"method", a.method}, {"n", std::to_string(n)}, {"horizon_seconds", fmt(path.horizon)}};
  SpotVolPath est;
  const bool need_plugin = a.adaptive || (a.method != "fourier" && !(a.ts_ck || a.pa_ck));
  plugin::PluginReport rep;
  if (need_plugin) {
    rep = plugin::build_amise_inputs(path, plugin_options(a.plug));
    if (rep.clamped) std::cerr << "warning: plug-in floor applied to " << rep.clamped_fields << '\n';
  }
  if (a.method == "fourier") {
    EstimatorConfig cfg;
    if (a.adaptive) {
      require(!a.N && !a.M, "--adaptive cannot be combined with explicit --N/--M");
      const auto r = select::select_params(rep.inputs, selector_options(a.sel, n));
      cfg = {r.N_star, r.M_star};
    } else {
      require(a.N && a.M, "fourier needs --N and --M, or --adaptive");
      cfg = {*a.N, *a.M};
    }
    est = estimate_path(path, cfg, grid);
    meta.emplace_back("N", std::to_string(cfg.N));
    meta.emplace_back("M", std::to_string(cfg.M));
  } else if (a.method == "two-scale") {
    baseline::TwoScaleConfig cfg =
        need_plugin ? baseline::tune_baselines(rep.inputs).two_scale : baseline::TwoScaleConfig{};
    if (a.ts_ck) cfg.c_k = *a.ts_ck;
    if (a.ts_ch) cfg.c_h = *a.ts_ch;
    cfg.edge = parse_edge(a.edge);
    est = baseline::two_scale_path(path, grid, cfg);
    meta.emplace_back("k", std::to_string(cfg.lag(n)));
    meta.emplace_back("h_days", fmt(cfg.window(n)));
  } else if (a.method == "preavg") {
    baseline::PreAvgConfig cfg =
        need_plugin ? baseline::tune_baselines(rep.inputs).preavg : baseline::PreAvgConfig{};
    if (a.pa_ck) cfg.c_k = *a.pa_ck;
    if (a.pa_cm) cfg.c_m = *a.pa_cm;
    est = baseline::preaveraging_path(path, grid, cfg);
    meta.emplace_back("k", std::to_string(cfg.window(n)));
    meta.emplace_back("m", fmt(cfg.m(n)));
  } else {
    throw ValidationError("unknown method '" + a.method + "' (fourier|two-scale|preavg)");
  }
  check_finite(est, a.method);
  const std::size_t negatives = est.negative_count();
  if (a.clip) est = clip_nonnegative(est);
  meta.emplace_back("negative_count", std::to_string(negatives));
  meta.emplace_back("clipped", a.clip ? "true" : "false");
  meta.emplace_back("units", "variance per day, one day = horizon");
  io::CsvWriter w(o.add("estimate.csv"), meta, {"timestamp", "variance"});
  for (std::size_t i = 0; i < est.grid.size(); ++i) w.row({fmt(est.grid[i]), fmt(est.values[i])});
  std::cout << est.grid.size() << " estimates, " << negatives << " negative\n";
  finish(cmd, a.common, o);
}

// select -----------------------------------------------------------------

struct SelectArgs {
  Common common;
  InputOptions input;
  std::optional<std::size_t> n;
  PluginFlags plug;
  SelectorFlags sel;
};

void run_select(const CLI::App* cmd, const SelectArgs& a) {
  plugin::AmiseInputs in;
  plugin::PluginReport rep;
  if (!a.input.input.empty()) {
    const PricePath path = load_input(a.input);
    rep = plugin::build_amise_inputs(path, plugin_options(a.plug));
    in = rep.inputs;
  } else {
    // Synthetic inputs supplied entirely on the command line.
    require(a.n && a.plug.iv && a.plug.iq && a.plug.ivv && a.plug.xi,
            "without --input, --n, --iv, --iq, --ivv and --xi are all required");
    in = {*a.plug.iv, *a.plug.iq, *a.plug.ivv, *a.plug.xi, *a.n, 1.0};
  }
  in.validate();
  const select::SelectorOptions so = selector_options(a.sel, in.n);
  const select::SelectorResult r = select::select_params(in, so);
  const select::Box box = so.box.value_or(select::default_box(in.n));
  Outputs o = prepare(a.common);
  {
    io::CsvWriter w(o.add("select.csv"), {{"units", "plug-ins per day, one day = horizon"}},
                    {"N_star", "M_star", "N_cont", "M_cont", "iterations", "converged",
                     "stalled_at_corner", "learning_rate", "objective", "iv", "iq", "ivv", "xi", "n",
                     "n_lo", "n_hi", "m_lo", "m_hi", "clamped"});
    w.row({std::to_string(r.N_star), std::to_string(r.M_star), fmt(r.N_cont), fmt(r.M_cont),
           std::to_string(r.iterations), r.converged ? "1" : "0", r.stalled_at_corner ? "1" : "0",
           fmt(r.learning_rate), fmt(select::c_amise(in, r.N_star, r.M_star)), fmt(in.iv),
           fmt(in.iq), fmt(in.ivv), fmt(in.xi), std::to_string(in.n), fmt(box.n_lo), fmt(box.n_hi),
           fmt(box.m_lo), fmt(box.m_hi), rep.clamped_fields});
  }
  {
    io::CsvWriter w(o.add("trace.csv"), {}, {"iteration", "objective"});
    for (std::size_t i = 0; i < r.objective_trace.size(); ++i) {
      w.row({std::to_string(i), fmt(r.objective_trace[i])});
    }
  }
  std::cout << "N* = " << r.N_star << ", M* = " << r.M_star << " after " << r.iterations
            << " iterations\n";
  finish(cmd, a.common, o);
}

// benchmark --------------------------------------------------------------

struct BenchmarkArgs {
  Common common;
  std::string models = "sv1f,heston";
  std::string params;
  std::string zetas = "1,2,3";
  double c_min = 1, c_max = 10, c_step = 1;
  double a_min = 0.1, a_max = 0.5, a_step = 0.1;
  std::size_t paths = 200;
  std::size_t n = 23400;
  double T = 23400.0;
  double step = 60.0;
  bool compare = false;
  PluginFlags plug;
  SelectorFlags sel;
};

exp::MonteCarloSetup setup_of(const BenchmarkArgs& a) {
  exp::MonteCarloSetup s;
  s.models.clear();
  for (const std::string& m : io::split(a.models, ',')) {
    if (!m.empty()) s.models.push_back(sim::parse_model(m));
  }
  s.params = load_model_params(a.params, s.models.empty() ? sim::Model::Sv1f : s.models.front());
  s.zetas = io::parse_list(a.zetas);
  s.n = a.n;
  s.horizon = a.T;
  s.n_paths = a.paths;
  s.seed = a.common.seed;
  s.grid_step = a.step;
  s.jobs = a.common.jobs;
  s.validate();
  return s;
}

void run_benchmark(const CLI::App* cmd, const BenchmarkArgs& a) {
  exp::SweepOptions so;
  so.setup = setup_of(a);
  so.cs = range(a.c_min, a.c_max, a.c_step, "c");
  so.as = range(a.a_min, a.a_max, a.a_step, "a");
  Outputs o = prepare(a.common);
  const auto rows = exp::run_sweep(so);
  const io::Meta meta{{"units", "MISE in (variance per day)^2 x days, MIAE in variance per day x days"},
                      {"grid", "N = floor(c sqrt(n)), M = floor(a sqrt(N))"}};
  {
    io::CsvWriter w(o.add("benchmark.csv"), meta,
                    {"model", "zeta", "c", "a", "N", "M", "mise", "miae", "mise_se", "paths"});
    for (const auto& r : rows) {
      if (!std::isfinite(r.mise) || !std::isfinite(r.miae)) {
        throw NumericalError("non-finite MISE in the sweep");
      }
      w.row({r.model, fmt(r.zeta), fmt(r.c), fmt(r.a), std::to_string(r.N), std::to_string(r.M),
             fmt(r.mise), fmt(r.miae), fmt(r.mise_se), std::to_string(r.paths)});
    }
  }
  {
    io::CsvWriter w(o.add("benchmark_argmin.csv"), meta, {"model", "zeta", "c", "a", "N", "M", "mise"});
    for (sim::Model m : so.setup.models) {
      for (double z : so.setup.zetas) {
        const auto& r = exp::sweep_argmin(rows, sim::model_name(m), z);
        w.row({r.model, fmt(r.zeta), fmt(r.c), fmt(r.a), std::to_string(r.N), std::to_string(r.M),
               fmt(r.mise)});
        std::cout << r.model << " zeta=" << fmt(z) << ": argmin (c, a) = (" << fmt(r.c) << ", "
                  << fmt(r.a) << ")\n";
      }
    }
  }
  if (a.compare) {
    exp::ComparisonOptions co;
    co.setup = so.setup;
    co.plugin = plugin_options(a.plug);
    co.selector = selector_options(a.sel, a.n);
    const auto crow = exp::run_comparison(co);
    io::CsvWriter w(o.add("comparison.csv"), meta,
                    {"model", "zeta", "method", "mise", "miae", "mise_se", "mean_p1", "mean_p2",
                     "paths"});
    for (const auto& r : crow) {
      w.row({r.model, fmt(r.zeta), r.method, fmt(r.mise), fmt(r.miae), fmt(r.mise_se),
             fmt(r.mean_p1), fmt(r.mean_p2), std::to_string(r.paths)});
    }
  }
  finish(cmd, a.common, o);
}

// empirical --------------------------------------------------------------

struct EmpiricalArgs {
  Common common;
  std::string data;
  std::string exclude;
  InputOptions session;
  double h = 300.0;
  bool midpoints = false;
  std::size_t simulate_days = 0;
  std::string model = "heston";
  std::string params;
  double zeta = 0.0;
  PluginFlags plug;
  SelectorFlags sel;
};

void run_empirical_cmd(const CLI::App* cmd, const EmpiricalArgs& a) {
  std::vector<std::pair<std::string, PricePath>> days;
  if (a.simulate_days > 0) {
    require(a.data.empty(), "--data and --simulate-days are exclusive");
    const sim::ModelParams mp = load_model_params(a.params, sim::parse_model(a.model));
    days = exp::simulate_days(mp, a.simulate_days, a.session.expected_n,
                              static_cast<double>(a.session.expected_n), a.zeta, a.common.seed);
  } else {
    require(!a.data.empty(), "--data (directory of daily tick CSVs) or --simulate-days is required");
    const std::set<std::string> excluded =
        a.exclude.empty() ? std::set<std::string>{} : ingest::load_exclusions_file(a.exclude);
    const auto files = ingest::list_days(a.data, excluded);
    const ingest::SessionSpec s = session_of(a.session);
    days.resize(files.size());
    parallel_for(files.size(), a.common.jobs, [&](std::size_t i) {
      const auto r = ingest::load_ticks_file(files[i].path, s);
      days[i] = {files[i].date, ingest::resample_last_tick(r.ticks, s)};
    });
  }
  exp::EmpiricalOptions eo;
  eo.h_seconds = a.h;
  eo.midpoints = a.midpoints;
  eo.plugin = plugin_options(a.plug);
  eo.selector = selector_options(a.sel, 0);
  eo.jobs = a.common.jobs;
  const exp::EmpiricalReport rep = exp::run_empirical(days, eo);
  Outputs o = prepare(a.common);
  {
    io::CsvWriter w(o.add("empirical_days.csv"), {{"h_seconds", fmt(a.h)}},
                    {"day", "N", "M", "returns", "mean", "variance", "skewness", "kurtosis",
                     "jb_stat", "jb_p", "skipped", "note"});
    for (const auto& d : rep.days) {
      w.row({d.day, std::to_string(d.N), std::to_string(d.M), std::to_string(d.n_returns),
             fmt(d.moments.mean), fmt(d.moments.variance), fmt(d.moments.skewness),
             fmt(d.moments.kurtosis), fmt(d.jb.statistic), fmt(d.jb.p_value), d.skipped ? "1" : "0",
             d.note});
    }
  }
  {
    io::CsvWriter w(o.add("empirical_summary.csv"),
                    {{"used_days", std::to_string(rep.used_days)},
                     {"jb_rejection_rate_5pct", fmt(rep.rejection_rate_5)}},
                    {"statistic", "average", "sd"});
    const std::vector<std::pair<std::string, exp::Summary>> s{
        {"mean", rep.mean},         {"variance", rep.variance}, {"skewness", rep.skewness},
        {"kurtosis", rep.kurtosis}, {"jb_stat", rep.jb_stat},   {"jb_p", rep.jb_p},
        {"N", rep.N},               {"M", rep.M}};
    for (const auto& [k, v] : s) w.row({k, fmt(v.mean), fmt(v.sd)});
  }
  std::cout << rep.used_days << " days: mean " << fmt(rep.mean.mean) << ", variance "
            << fmt(rep.variance.mean) << ", kurtosis " << fmt(rep.kurtosis.mean)
            << ", JB rejection rate " << fmt(rep.rejection_rate_5) << '\n';
  finish(cmd, a.common, o);
}

// clt --------------------------------------------------------------------

struct CltArgs {
  Common common;
  std::string regime = "notef";
  std::string model = "constant";
  std::string params;
  double c = 0.5;
  double a = 1.0;
  double tau = 1.5;
  std::size_t n = 23400;
  double T = 23400.0;
  std::size_t paths = 1000;
  double zeta = 0.0;
  std::optional<double> xi;
  double avar_scale = 1.0;
  std::optional<double> t_eval;
};

void run_clt(const CLI::App* cmd, const CltArgs& a) {
  metrics::CltSpec spec;
  spec.regime = metrics::parse_regime(a.regime);
  spec.c = a.c;
  spec.a = a.a;
  spec.tau = a.tau;
  spec.t_eval = a.t_eval;
  metrics::CltOptions co;
  co.n = a.n;
  co.horizon = a.T;
  co.n_paths = a.paths;
  co.seed = a.common.seed;
  co.zeta = a.zeta;
  co.fixed_xi = a.xi;
  co.avar_scale = a.avar_scale;
  co.jobs = a.common.jobs;
  const sim::ModelParams mp = load_model_params(a.params, sim::parse_model(a.model));
  const metrics::CltResult r = metrics::clt_check(mp, spec, co);
  Outputs o = prepare(a.common);
  {
    io::CsvWriter w(o.add("clt.csv"), {{"interval", "95% two-sided, |z| <= 1.959964"}},
                    {"regime", "n", "N", "M", "t_eval", "paths", "coverage", "ks", "jb_stat", "jb_p",
                     "z_mean", "z_var", "avar_scale"});
    w.row({a.regime, std::to_string(r.n), std::to_string(r.N), std::to_string(r.M), fmt(r.t_eval),
           std::to_string(r.z.size()), fmt(r.coverage), fmt(r.ks), fmt(r.jb.statistic),
           fmt(r.jb.p_value), fmt(r.z_mean), fmt(r.z_var), fmt(a.avar_scale)});
  }
  {
    io::CsvWriter w(o.add("clt_z.csv"), {}, {"path", "z"});
    for (std::size_t i = 0; i < r.z.size(); ++i) {
      if (!std::isfinite(r.z[i])) throw NumericalError("non-finite standardized error");
      w.row({std::to_string(i), fmt(r.z[i])});
    }
  }
  std::cout << a.regime << ": N=" << r.N << " M=" << r.M << " coverage " << fmt(r.coverage)
            << " KS " << fmt(r.ks) << '\n';
  finish(cmd, a.common, o);
}

// kernel-check -----------------------------------------------------------

struct KernelArgs {
  Common common;
  std::string orders = "16,32,64,128,256,512";
  int points = 1 << 16;
};

bool run_kernel_check(const CLI::App* cmd, const KernelArgs& a) {
  kcheck::SuiteOptions so;
  so.orders.clear();
  for (double v : io::parse_list(a.orders)) {
    require(v >= 4 && v == std::floor(v), "orders must be integers >= 4");
    so.orders.push_back(static_cast<int>(v));
  }
  so.quadrature_points = a.points;
  so.jobs = a.common.jobs;
  const kcheck::SuiteReport rep = kcheck::run_lemma_suite(so);
  Outputs o = prepare(a.common);
  io::CsvWriter w(o.add("kernel_check.csv"), {{"tolerance", "relative error <= 10/order"}},
                  {"name", "description", "target", "order", "observed", "error", "tolerance",
                   "convergence_order", "exact", "counted", "pass"});
  for (const auto& r : rep.rows) {
    for (std::size_t i = 0; i < r.orders.size(); ++i) {
      w.row({r.name, r.description, fmt(r.target), std::to_string(r.orders[i]), fmt(r.observed[i]),
             fmt(r.errors[i]), fmt(r.tolerances[i]), fmt(r.convergence_order), r.exact ? "1" : "0",
             r.counted ? "1" : "0", r.pass ? "1" : "0"});
    }
    std::printf("%-28s %s\n", r.name.c_str(), !r.counted ? "info" : r.pass ? "pass" : "FAIL");
  }
  std::cout << "overall: " << (rep.pass ? "pass" : "FAIL") << '\n';
  finish(cmd, a.common, o);
  return rep.pass;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Fourier spot-volatility estimation under microstructure noise"};
  app.set_version_flag("--version", std::string("spotvol ") + io::kVersion);
  app.require_subcommand(1);
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast)->always_capture_default();

  SimulateArgs sa;
  auto* simulate = app.add_subcommand("simulate", "simulate price paths with optional noise");
  add_common(simulate, sa.common, true);
  simulate->add_option("--model", sa.model, "sv1f | heston | constant");
  simulate->add_option("--params", sa.params, "model parameter file (key = value)");
  simulate->add_option("--n", sa.n, "increments per path");
  simulate->add_option("--T", sa.T, "horizon in seconds");
  simulate->add_option("--zeta", sa.zeta, "noise-to-signal ratio");
  simulate->add_option("--paths", sa.paths, "number of paths");

  EstimateArgs ea;
  auto* estimate = app.add_subcommand("estimate", "spot variance on a time grid");
  add_common(estimate, ea.common, false);
  add_input_options(estimate, ea.input);
  estimate->add_option("--method", ea.method, "fourier | two-scale | preavg");
  estimate->add_option("--N", ea.N, "convolution cut-off");
  estimate->add_option("--M", ea.M, "inversion cut-off");
  estimate->add_flag("--adaptive", ea.adaptive, "choose (N, M) with the c-AMISE selector");
  estimate->add_option("--step", ea.step, "grid spacing in seconds (interior points)");
  estimate->add_option("--times", ea.times, "explicit comma-separated evaluation times (seconds)");
  estimate->add_flag("--clip", ea.clip, "replace negative estimates by 0");
  estimate->add_option("--edge", ea.edge, "two-scale window rule at the end: reject|truncate|shift");
  estimate->add_option("--ts-ck", ea.ts_ck, "two-scale lag constant");
  estimate->add_option("--ts-ch", ea.ts_ch, "two-scale window constant");
  estimate->add_option("--pa-ck", ea.pa_ck, "pre-averaging window constant");
  estimate->add_option("--pa-cm", ea.pa_cm, "pre-averaging bandwidth constant");
  add_plugin_options(estimate, ea.plug);
  add_selector_options(estimate, ea.sel);

  SelectArgs sla;
  auto* selectc = app.add_subcommand("select", "adaptive (N, M) with iteration trace");
  add_common(selectc, sla.common, false);
  add_input_options(selectc, sla.input);
  selectc->add_option("--n", sla.n, "sample size for synthetic inputs");
  add_plugin_options(selectc, sla.plug);
  add_selector_options(selectc, sla.sel);

  BenchmarkArgs ba;
  auto* bench = app.add_subcommand("benchmark", "Monte Carlo MISE/MIAE sweep over (c, a)");
  add_common(bench, ba.common, true);
  bench->add_option("--models", ba.models, "comma-separated models");
  bench->add_option("--params", ba.params, "model parameter file, keys prefixed by model name");
  bench->add_option("--zetas", ba.zetas, "comma-separated noise-to-signal ratios");
  bench->add_option("--c-min", ba.c_min);
  bench->add_option("--c-max", ba.c_max);
  bench->add_option("--c-step", ba.c_step);
  bench->add_option("--a-min", ba.a_min);
  bench->add_option("--a-max", ba.a_max);
  bench->add_option("--a-step", ba.a_step);
  bench->add_option("--paths", ba.paths, "paths per cell");
  bench->add_option("--n", ba.n, "increments per path");
  bench->add_option("--T", ba.T, "horizon in seconds");
  bench->add_option("--step", ba.step, "evaluation grid spacing in seconds");
  bench->add_flag("--compare", ba.compare, "also compare adaptive Fourier with the baselines");
  add_plugin_options(bench, ba.plug);
  add_selector_options(bench, ba.sel);

  EmpiricalArgs ema;
  auto* emp = app.add_subcommand("empirical", "standardized-return normality over trading days");
  add_common(emp, ema.common, true);
  emp->add_option("--data", ema.data, "directory of YYYY-MM-DD*.csv tick files");
  emp->add_option("--exclude", ema.exclude, "file listing ISO dates to skip");
  emp->add_option("--open", ema.session.open, "session open, HH:MM:SS");
  emp->add_option("--close", ema.session.close, "session close, HH:MM:SS");
  emp->add_option("--expected-n", ema.session.expected_n, "grid increments per session");
  emp->add_option("--h-seconds", ema.h, "return horizon in seconds");
  emp->add_flag("--midpoints", ema.midpoints, "evaluate the variance at interval midpoints");
  emp->add_option("--simulate-days", ema.simulate_days, "use this many simulated days instead of --data");
  emp->add_option("--model", ema.model, "model for simulated days");
  emp->add_option("--params", ema.params, "model parameter file");
  emp->add_option("--zeta", ema.zeta, "noise-to-signal ratio for simulated days");
  add_plugin_options(emp, ema.plug);
  add_selector_options(emp, ema.sel);

  CltArgs ca;
  auto* clt = app.add_subcommand("clt", "Monte Carlo check of the asymptotic normality");
  add_common(clt, ca.common, true);
  clt->add_option("--regime", ca.regime, "notef | ef | notefm | efm");
  clt->add_option("--model", ca.model, "sv1f | heston | constant");
  clt->add_option("--params", ca.params, "model parameter file");
  clt->add_option("--c", ca.c);
  clt->add_option("--a", ca.a);
  clt->add_option("--tau", ca.tau);
  clt->add_option("--n", ca.n);
  clt->add_option("--T", ca.T, "horizon in seconds");
  clt->add_option("--paths", ca.paths);
  clt->add_option("--zeta", ca.zeta, "noise-to-signal ratio");
  clt->add_option("--xi", ca.xi, "absolute noise variance (replaces --zeta)");
  clt->add_option("--avar-scale", ca.avar_scale, "multiplier on the asymptotic variance");
  clt->add_option("--t-eval", ca.t_eval, "evaluation time in seconds (default T/2)");

  KernelArgs ka;
  auto* kern = app.add_subcommand("kernel-check", "numerical check of the kernel limit identities");
  add_common(kern, ka.common, false);
  kern->add_option("--orders", ka.orders, "comma-separated kernel orders");
  kern->add_option("--points", ka.points, "quadrature nodes");

  int code = 0;
  try {
    std::vector<std::string> args = inject_config(std::vector<std::string>(argv + 1, argv + argc));
    std::reverse(args.begin(), args.end());
    app.parse(args);
    if (*simulate) run_simulate(simulate, sa);
    else if (*estimate) run_estimate(estimate, ea);
    else if (*selectc) run_select(selectc, sla);
    else if (*bench) run_benchmark(bench, ba);
    else if (*emp) run_empirical_cmd(emp, ema);
    else if (*clt) run_clt(clt, ca);
    else if (*kern) code = run_kernel_check(kern, ka) ? 0 : 1;
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: validation: " << e.what() << '\n';
    return 2;
  } catch (const ValidationError& e) {
    std::cerr << "error: validation: " << e.what() << '\n';
    return 2;
  } catch (const NumericalError& e) {
    std::cerr << "error: numerical: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: validation: " << e.what() << '\n';
    return 2;
  }
  return code;
}
