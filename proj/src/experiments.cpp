#include "spotvol/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

#include "spotvol/baselines.hpp"
#include "spotvol/errors.hpp"
#include "spotvol/parallel.hpp"

namespace spotvol::exp {

namespace {

Summary summarize(const std::vector<double>& x) {
  Summary s;
  if (x.empty()) return s;
  const double n = static_cast<double>(x.size());
  s.mean = std::accumulate(x.begin(), x.end(), 0.0) / n;
  if (x.size() > 1) {
    double ss = 0.0;
    for (double v : x) ss += (v - s.mean) * (v - s.mean);
    s.sd = std::sqrt(ss / (n - 1.0));
  }
  return s;
}

struct ErrorAccumulator {
  std::vector<double> ise, iae;
  explicit ErrorAccumulator(std::size_t paths) : ise(paths), iae(paths) {}

  void finish(double& mise, double& miae, double& se) const {
    const Summary a = summarize(ise);
    mise = a.mean;
    miae = summarize(iae).mean;
    se = ise.size() > 1 ? a.sd / std::sqrt(double(ise.size())) : 0.0;
  }
};

sim::ModelParams with_model(sim::ModelParams p, sim::Model m) {
  p.model = m;
  return p;
}

}  // namespace

void MonteCarloSetup::validate() const {
  require(!models.empty(), "at least one model is required");
  require(!zetas.empty(), "at least one noise level is required");
  for (double z : zetas) require(z >= 0.0, "noise-to-signal ratios must be nonnegative");
  require(n >= 16, "n must be at least 16");
  require(horizon > 0.0, "horizon must be positive");
  require(n_paths >= 1, "at least one path is required");
  require(grid_step > 0.0 && grid_step < horizon, "grid step must lie in (0, T)");
}

sim::SimulatedPath simulate_cell_path(const MonteCarloSetup& setup, sim::Model model, double zeta,
                                      std::size_t index) {
  const std::uint64_t seed =
      sim::derive_seed(sim::derive_seed(setup.seed, static_cast<std::uint64_t>(model)), index);
  sim::SimulatedPath p = sim::simulate(with_model(setup.params, model), setup.n, setup.horizon, seed);
  return sim::add_noise(std::move(p), zeta, seed);
}

std::vector<SweepRow> run_sweep(const SweepOptions& opts) {
  const MonteCarloSetup& su = opts.setup;
  su.validate();
  require(!opts.cs.empty() && !opts.as.empty(), "sweep needs c and a values");
  const double rn = std::sqrt(double(su.n));
  struct Cell {
    double c, a;
    EstimatorConfig cfg;
  };
  std::vector<Cell> cells;
  int max_order = 0;
  for (double c : opts.cs) {
    for (double a : opts.as) {
      require(c > 0.0 && a > 0.0, "sweep constants must be positive");
      EstimatorConfig cfg;
      cfg.N = static_cast<int>(std::floor(c * rn));
      cfg.M = static_cast<int>(std::floor(a * std::sqrt(double(cfg.N))));
      cfg.validate(su.n);
      max_order = std::max(max_order, cfg.N + cfg.M);
      cells.push_back({c, a, cfg});
    }
  }
  const std::vector<double> grid = interior_grid(su.horizon, su.grid_step);

  std::vector<SweepRow> rows;
  for (sim::Model model : su.models) {
    for (double zeta : su.zetas) {
      std::vector<ErrorAccumulator> acc(cells.size(), ErrorAccumulator(su.n_paths));
      parallel_for(su.n_paths, su.jobs, [&](std::size_t i) {
        const sim::SimulatedPath p = simulate_cell_path(su, model, zeta, i);
        const SpotVolPath truth = metrics::sample_at(p.true_var, grid);
        const CirclePath circle = rescale_time(p.noisy_prices);
        const FourierCoeffs pc = price_coeffs(circle, max_order);
        for (std::size_t k = 0; k < cells.size(); ++k) {
          const SpotVolPath est = estimate_from_coeffs(pc, su.horizon, cells[k].cfg, grid);
          const metrics::PathError e = metrics::path_error(est, truth);
          acc[k].ise[i] = e.ise;
          acc[k].iae[i] = e.iae;
        }
      });
      for (std::size_t k = 0; k < cells.size(); ++k) {
        SweepRow r;
        r.model = sim::model_name(model);
        r.zeta = zeta;
        r.c = cells[k].c;
        r.a = cells[k].a;
        r.N = cells[k].cfg.N;
        r.M = cells[k].cfg.M;
        r.paths = su.n_paths;
        acc[k].finish(r.mise, r.miae, r.mise_se);
        if (!std::isfinite(r.mise)) throw NumericalError("non-finite MISE in sweep");
        rows.push_back(r);
      }
    }
  }
  return rows;
}

const SweepRow& sweep_argmin(const std::vector<SweepRow>& rows, const std::string& model,
                             double zeta) {
  const SweepRow* best = nullptr;
  for (const SweepRow& r : rows) {
    if (r.model != model || r.zeta != zeta) continue;
    if (!best || r.mise < best->mise) best = &r;
  }
  require(best != nullptr, "no sweep rows for " + model);
  return *best;
}

std::vector<ComparisonRow> run_comparison(const ComparisonOptions& opts) {
  const MonteCarloSetup& su = opts.setup;
  su.validate();
  const std::vector<double> grid = interior_grid(su.horizon, su.grid_step);
  const double nd = static_cast<double>(su.n);

  std::vector<ComparisonRow> rows;
  for (sim::Model model : su.models) {
    for (double zeta : su.zetas) {
      ErrorAccumulator fo(su.n_paths), pa(su.n_paths), ts(su.n_paths);
      std::vector<double> fN(su.n_paths), fM(su.n_paths), pk(su.n_paths), pm(su.n_paths),
          tk(su.n_paths), th(su.n_paths);
      parallel_for(su.n_paths, su.jobs, [&](std::size_t i) {
        const sim::SimulatedPath p = simulate_cell_path(su, model, zeta, i);
        const PricePath& obs = p.noisy_prices;
        const SpotVolPath truth = metrics::sample_at(p.true_var, grid);

        const plugin::PluginReport plug = plugin::build_amise_inputs(obs, opts.plugin);
        const select::SelectorResult sel = select::select_params(plug.inputs, opts.selector);
        const EstimatorConfig cfg{sel.N_star, sel.M_star};
        metrics::PathError e = metrics::path_error(estimate_path(obs, cfg, grid), truth);
        fo.ise[i] = e.ise;
        fo.iae[i] = e.iae;
        fN[i] = sel.N_star;
        fM[i] = sel.M_star;

        const baseline::BaselineTuning tune = baseline::tune_baselines(plug.inputs);
        e = metrics::path_error(baseline::preaveraging_path(obs, grid, tune.preavg), truth);
        pa.ise[i] = e.ise;
        pa.iae[i] = e.iae;
        pk[i] = tune.preavg.window(su.n);
        pm[i] = tune.preavg.m(su.n);

        e = metrics::path_error(baseline::two_scale_path(obs, grid, tune.two_scale), truth);
        ts.ise[i] = e.ise;
        ts.iae[i] = e.iae;
        tk[i] = tune.two_scale.lag(su.n);
        th[i] = tune.two_scale.window(su.n) * nd;
      });
      auto emit = [&](const char* method, const ErrorAccumulator& acc, const std::vector<double>& p1,
                      const std::vector<double>& p2) {
        ComparisonRow r;
        r.model = sim::model_name(model);
        r.zeta = zeta;
        r.method = method;
        acc.finish(r.mise, r.miae, r.mise_se);
        if (!std::isfinite(r.mise)) throw NumericalError(std::string("non-finite MISE for ") + method);
        r.mean_p1 = summarize(p1).mean;
        r.mean_p2 = summarize(p2).mean;
        r.paths = su.n_paths;
        rows.push_back(r);
      };
      emit("fourier-adaptive", fo, fN, fM);
      emit("preavg", pa, pk, pm);
      emit("two-scale", ts, tk, th);
    }
  }
  return rows;
}

EmpiricalReport run_empirical(const std::vector<std::pair<std::string, PricePath>>& days,
                              const EmpiricalOptions& opts) {
  require(!days.empty(), "no trading days to analyse");
  require(opts.h_seconds > 0.0, "return horizon must be positive");
  EmpiricalReport rep;
  rep.days.resize(days.size());
  parallel_for(days.size(), opts.jobs, [&](std::size_t d) {
    const PricePath& path = days[d].second;
    DayResult& r = rep.days[d];
    r.day = days[d].first;
    const plugin::PluginReport plug = plugin::build_amise_inputs(path, opts.plugin);
    const select::SelectorResult sel = select::select_params(plug.inputs, opts.selector);
    r.N = sel.N_star;
    r.M = sel.M_star;
    const std::vector<double> grid = opts.midpoints ? metrics::midpoint_grid(path.horizon, opts.h_seconds)
                                                   : metrics::start_grid(path.horizon, opts.h_seconds);
    const SpotVolPath vol = estimate_path(path, {sel.N_star, sel.M_star}, grid);
    if (vol.negative_count() > 0 ||
        std::any_of(vol.values.begin(), vol.values.end(), [](double v) { return !(v > 0.0); })) {
      r.skipped = true;
      r.note = "nonpositive variance estimate";
      return;
    }
    const std::vector<double> z = metrics::standardized_returns(path, vol, opts.h_seconds);
    r.n_returns = z.size();
    r.moments = metrics::moments(z);
    r.jb = metrics::jarque_bera(z);
  });

  std::vector<double> mean, var, skew, kurt, jbs, jbp, Ns, Ms;
  std::size_t rejected = 0;
  for (const DayResult& r : rep.days) {
    if (r.skipped) continue;
    mean.push_back(r.moments.mean);
    var.push_back(r.moments.variance);
    skew.push_back(r.moments.skewness);
    kurt.push_back(r.moments.kurtosis);
    jbs.push_back(r.jb.statistic);
    jbp.push_back(r.jb.p_value);
    Ns.push_back(r.N);
    Ms.push_back(r.M);
    rejected += r.jb.p_value < 0.05 ? 1 : 0;
  }
  rep.used_days = mean.size();
  require(rep.used_days > 0, "every day was skipped");
  rep.mean = summarize(mean);
  rep.variance = summarize(var);
  rep.skewness = summarize(skew);
  rep.kurtosis = summarize(kurt);
  rep.jb_stat = summarize(jbs);
  rep.jb_p = summarize(jbp);
  rep.N = summarize(Ns);
  rep.M = summarize(Ms);
  rep.rejection_rate_5 = double(rejected) / double(rep.used_days);
  return rep;
}

std::vector<std::pair<std::string, PricePath>> simulate_days(const sim::ModelParams& params,
                                                             std::size_t count, std::size_t n,
                                                             double horizon, double zeta,
                                                             std::uint64_t seed) {
  std::vector<std::pair<std::string, PricePath>> out;
  out.reserve(count);
  for (std::size_t d = 0; d < count; ++d) {
    const std::uint64_t s = sim::derive_seed(seed, d);
    sim::SimulatedPath p = sim::add_noise(sim::simulate(params, n, horizon, s), zeta, s);
    char name[32];
    std::snprintf(name, sizeof name, "day%03zu", d + 1);
    out.emplace_back(name, std::move(p.noisy_prices));
  }
  return out;
}

}  // namespace spotvol::exp
