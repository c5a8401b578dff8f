#pragma once

#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "json.hpp"

#include "aptlab/chain_models.hpp"
#include "aptlab/config.hpp"
#include "aptlab/errors.hpp"
#include "aptlab/generator_lab.hpp"
#include "aptlab/io.hpp"
#include "aptlab/limit_processes.hpp"
#include "aptlab/measure_kit.hpp"
#include "aptlab/schedule.hpp"
#include "aptlab/stationary.hpp"

namespace aptlab::runner {

using json = nlohmann::json;
namespace fs = std::filesystem;

/// Reads top-level keys and records every default it falls back on, so the
/// summary can embed the resolved config.
class Settings {
 public:
  explicit Settings(json cfg) : cfg_(std::move(cfg)) {}

  template <class T>
  T get_or(const std::string& key, T fallback) {
    if (!cfg_.contains(key) || cfg_.at(key).is_null()) cfg_[key] = fallback;
    return config::get<T>(cfg_, key);
  }
  template <class T>
  T get(const std::string& key) const {
    return config::get<T>(cfg_, key);
  }
  bool has(const std::string& key) const { return cfg_.contains(key) && !cfg_.at(key).is_null(); }
  const json& at(const std::string& key) const { return cfg_.at(key); }
  json& raw() { return cfg_; }
  const json& resolved() const { return cfg_; }

 private:
  json cfg_;
};

inline json describe(const LimitProcess& p) {
  if (auto* o = p.as<OU>()) return {{"type", "ou"}, {"l", o->l}, {"sigma", o->sigma}, {"dim", o->dim}};
  if (auto* q = p.as<LinearJumpPDMP>()) return {{"type", "pdmp"}, {"a", q->a}, {"b", q->b}, {"c", q->c}, {"d", q->d}};
  if (auto* d = p.as<Diffusion>()) return {{"type", "diffusion"}, {"euler_step", d->h}, {"dim", d->dim}};
  if (auto* s = p.as<SubordinatedChain>()) return {{"type", "subordinated-chain"}, {"states", s->R.rows()}};
  if (auto* j = p.as<JumpDiffusion>()) return {{"type", "jump-diffusion"}, {"l", j->l}, {"sigma", j->sigma}};
  return {{"type", p.kind()}};
}

inline std::optional<State> initial_state(Settings& s) {
  if (!s.has("y0")) return std::nullopt;
  return s.get<std::vector<double>>("y0");
}

struct Context {
  Settings settings;
  fs::path out;
  std::uint64_t seed = 1;
  json metrics = json::object();
  json outputs = json::array();
  bool pass = true;

  std::string file(const std::string& name) {
    outputs.push_back(name);
    return (out / name).string();
  }
};

inline void run_trajectory(Context& c) {
  auto& s = c.settings;
  const ChainModel model = config::parse_model(s.resolved());
  std::uint64_t n_steps;
  if (s.has("t_max")) {
    n_steps = std::max<std::uint64_t>(1, model.schedule().m_of_t(s.get<double>("t_max")));
  } else {
    n_steps = s.get_or<std::uint64_t>("n_steps", 10000);
  }
  const auto stride = s.get_or<std::uint64_t>("stride", 1);
  State y0;
  if (auto v = initial_state(s)) {
    y0 = *v;
  } else {
    Rng r = Rng::stream(splitmix64(c.seed), 0);
    y0 = model.default_initial(r);
  }
  const auto path = simulate(model, y0, n_steps, c.seed, stride);
  path.write_csv(c.file("path.csv"));
  c.metrics = {{"model", model.kind()},
               {"n_steps", n_steps},
               {"points", path.n.size()},
               {"tau_final", model.schedule().tau(n_steps)},
               {"y_final", path.states.back()}};
}

inline void run_gap_scan(Context& c) {
  auto& s = c.settings;
  const ChainModel model = config::parse_model(s.resolved());
  const LimitProcess proc = config::parse_limit(s.resolved(), model);
  const auto n_list = config::parse_index_list(s.has("n_list") ? s.at("n_list") : json{{"from", 100}, {"to", 1000000}});
  const auto grid = config::parse_grid(s.has("y_grid") ? s.at("y_grid") : json{{"lo", 0.0}, {"hi", 5.0}, {"points", 51}});
  const int d1 = s.get_or("d1", 3);
  const int nodes = s.get_or("quad_nodes", 64);
  const auto rep = gap_scan(model, proc, FunctionDictionary::standard(), grid, n_list, d1, nodes);
  rep.write_csv(c.file("gap.csv"));
  c.metrics = io::to_json(rep);
  c.metrics["limit"] = describe(proc);
  if (s.has("slope_band")) {
    const auto band = s.get<std::vector<double>>("slope_band");
    require(band.size() == 2, "config: slope_band is [lo, hi]");
    c.pass = rep.slope_vs_log_n >= band[0] && rep.slope_vs_log_n <= band[1];
  }
}

inline std::vector<double> t_list_of(Settings& s, std::vector<double> fallback) {
  if (!s.has("t_list")) {
    s.raw()["t_list"] = fallback;
    return fallback;
  }
  const auto& j = s.at("t_list");
  if (j.is_array()) return j.get<std::vector<double>>();
  const auto from = config::get<double>(j, "from"), to = config::get<double>(j, "to"),
             step = config::get<double>(j, "step");
  require(step > 0.0 && to >= from, "config: t_list range needs step > 0 and to >= from");
  std::vector<double> t;
  for (double x = from; x <= to + 1e-9 * step; x += step) t.push_back(x);
  return t;
}

inline PseudoGapCurve gap_curve(Context& c, const ChainModel& model, const LimitProcess& proc) {
  auto& s = c.settings;
  const auto t_list = t_list_of(s, {1, 2, 3, 4, 5, 6, 7, 8});
  const double T = s.get_or("T", 1.0);
  const auto G = s.get_or<std::size_t>("s_grid", 16);
  const bool exact = s.get_or("exact", model.as<LLRWFinite>() != nullptr);
  if (exact) {
    std::optional<FiniteMeasure> init;
    if (s.has("initial_state")) {
      const auto* f = model.as<LLRWFinite>();
      require(f != nullptr, "config: initial_state needs a finite chain");
      init = FiniteMeasure::dirac(static_cast<std::size_t>(f->R.rows()), s.get<std::size_t>("initial_state"));
    }
    return exact_pseudo_gap(model, t_list, T, G, init);
  }
  PseudoGapOptions opt;
  opt.T = T;
  opt.s_grid_size = G;
  opt.replicas = s.get_or<std::uint64_t>("replicas", 10000);
  opt.seed = c.seed;
  const auto dist = s.get_or<std::string>("distance", model.as<LLRWFinite>() ? "tv" : "w1");
  if (dist == "w1") opt.kind = DistanceKind::W1;
  else if (dist == "tv") opt.kind = DistanceKind::TV;
  else if (dist == "dict") opt.kind = DistanceKind::Dictionary;
  else throw ValidationError("config: distance must be w1, tv or dict");
  opt.y0 = initial_state(s);
  return pseudo_gap(model, proc, t_list, opt);
}

inline void run_pseudo_gap(Context& c) {
  auto& s = c.settings;
  const ChainModel model = config::parse_model(s.resolved());
  const LimitProcess proc = config::parse_limit(s.resolved(), model);
  const auto curve = gap_curve(c, model, proc);
  curve.write_csv(c.file("pseudo_gap.csv"));
  c.metrics = io::to_json(curve);
  c.metrics["limit"] = describe(proc);
  if (!curve.bound.empty()) {
    bool ok = true;
    for (std::size_t i = 0; i < curve.t.size(); ++i) ok = ok && curve.gap[i] <= curve.bound[i] + 1e-12;
    c.metrics["within_bound"] = ok;
    c.pass = ok;
  }
  try {
    c.metrics["rate_fit"] = io::to_json(rate_fit(curve));
  } catch (const ValidationError& e) {
    c.metrics["rate_fit"] = std::string("not fitted: ") + e.what();
  }
}

inline double lambda_for(Settings& s, const ChainModel& model) {
  const auto eps = s.get_or<std::string>("eps", "gamma");
  if (eps == "zero") return lambda_closed_form(model.schedule(), RateSequence());
  if (eps == "gamma") return lambda_closed_form(model.schedule(), RateSequence::same_as(model.schedule()));
  throw ValidationError("config: eps must be 'zero' or 'gamma'");
}

inline void run_rate_fit(Context& c) {
  auto& s = c.settings;
  const ChainModel model = config::parse_model(s.resolved());
  const LimitProcess proc = config::parse_limit(s.resolved(), model);
  const auto curve_kind = s.get_or<std::string>("curve", "pseudo-gap");
  std::vector<double> t, d;
  if (curve_kind == "pseudo-gap") {
    const auto curve = gap_curve(c, model, proc);
    t = curve.t;
    d = curve.gap;
  } else if (curve_kind == "stationary-distance") {
    t = t_list_of(s, {1, 2, 3, 4, 5, 6, 7, 8});
    if (const auto* f = model.as<LLRWFinite>()) {
      const auto pi = invariant_law(f->R);
      FiniteMeasure mu = FiniteMeasure::dirac(static_cast<std::size_t>(f->R.rows()), s.get_or<std::size_t>("initial_state", 0));
      std::uint64_t n = 0;
      for (double x : t) {
        const auto m = model.schedule().m_of_t(x);
        for (; n < m; ++n) llrw_kernel_step(mu, f->R, model.schedule().gamma_at(n + 1));
        d.push_back(tv_distance(mu, pi));
      }
    } else if (const auto* o = proc.as<OU>()) {
      const auto law = ou_stationary(o->l, o->sigma);
      const auto ens = evolve_ensemble(model, initial_state(s), s.get_or<std::uint64_t>("replicas", 10000), t, c.seed);
      for (const auto& e : ens) d.push_back(w1_to_normal(e, 0.0, law.sd()));
    } else {
      throw ValidationError("rate-fit: stationary-distance curves need a finite chain or an OU limit");
    }
  } else {
    throw ValidationError("config: curve must be 'pseudo-gap' or 'stationary-distance'");
  }
  {
    std::ofstream os(c.file("curve.csv"));
    os << "# aptlab rate-curve v1 curve=" << curve_kind << "\nt,value\n";
    os.precision(17);
    for (std::size_t i = 0; i < t.size(); ++i) os << t[i] << "," << d[i] << "\n";
  }
  const auto fit = rate_fit(t, d);
  c.metrics["fit"] = io::to_json(fit);
  c.metrics["curve"] = curve_kind;
  const double lambda = lambda_for(s, model);
  c.metrics["lambda"] = io::number(lambda);
  if (s.has("ergodicity")) {
    const auto& e = s.at("ergodicity");
    ErgodicityProfile prof{config::get<double>(e, "v"), config::get_or(e, "M3", 1.0), config::get_or(e, "r", 0.0),
                           config::get_or<std::string>(e, "class", "F")};
    prof.validate();
    const double band = prof.predicted_rate(lambda);
    c.metrics["predicted_rate_upper"] = io::number(band);
    c.metrics["fitted_at_least_predicted"] = fit.u >= band;
  }
  if (s.has("expected_u")) {
    const auto band = s.get<std::vector<double>>("expected_u");
    require(band.size() == 2, "config: expected_u is [lo, hi]");
    c.pass = fit.u >= band[0] && fit.u <= band[1];
  }
}

inline void stationary_pdmp(Context& c) {
  auto& s = c.settings;
  LinearJumpPDMP p;
  double p1 = 0, p0p = 0, pt0 = 0;
  if (s.has("model")) {
    const ChainModel model = config::parse_model(s.resolved());
    require(model.as<PBA>() || model.as<OverPBA>(), "stationary pdmp: model must be a bandit");
    const auto lim = model.bandit_limit();
    p = {lim[0], lim[1], lim[2], lim[3]};
  } else {
    p = config::parse_pdmp(s.at("limit"));
  }
  // (a, b, c, d) = (pt0(1), p1(1), 0, -p0'(1)) for the bandit
  require(p.c == 0.0, "stationary pdmp: the printed recursion is stated for c = 0");
  p1 = p.b;
  p0p = -p.d;
  pt0 = p.a;
  const int K = s.get_or("order", 4);
  const auto dyn = pdmp_moments_dynkin(p, K);
  const auto pap = pdmp_moments_paper(p1, p0p, pt0, K);
  std::optional<MomentTable> sim;
  const auto paths = s.get_or<std::uint64_t>("replicas", 10000);
  if (paths > 0) sim = pdmp_moments_simulated(p, K, s.get_or("t", 50.0), paths, c.seed, s.get_or("x0", 0.0));
  const auto rep = compare_moment_engines(dyn, pap, sim, 4.0);
  dyn.write_csv(c.file("moments_dynkin.csv"));
  pap.write_csv(c.file("moments_paper.csv"));
  if (sim) sim->write_csv(c.file("moments_simulated.csv"));
  io::write_json(c.file("discrepancy.json"), io::to_json(rep));
  c.metrics = {{"limit", describe(LimitProcess(p))},
               {"dynkin", io::to_json(dyn)},
               {"paper_recursion", io::to_json(pap)},
               {"discrepancy", io::to_json(rep)}};
  if (sim) c.metrics["simulation"] = io::to_json(*sim);
  bool ok = dyn.hankel_psd();
  if (sim) {
    for (int n = 1; n <= std::min(2, K); ++n) {
      ok = ok && std::abs(sim->m[n] - dyn.m[n]) <= 4.0 * sim->se[n];
    }
  }
  c.pass = ok;
}

inline void stationary_langevin(Context& c) {
  auto& s = c.settings;
  const auto drift_name = s.get_or<std::string>("drift", "langevin-sin");
  const double sigma = s.get_or("sigma", 1.0);
  const auto range = s.get_or<std::vector<double>>("range", {-10.0, 10.0});
  require(range.size() == 2, "config: range is [lo, hi]");
  const auto law = langevin_stationary(config::drift(drift_name).potential, sigma, range[0], range[1],
                                       s.get_or<std::size_t>("cells", 4000));
  law.write_csv(c.file("density.csv"));
  c.metrics = {{"drift", drift_name},
               {"mass", law.mass()},
               {"quadrature_gap", law.quadrature_gap()},
               {"tail_mass", law.tail_mass()},
               {"mean", law.mean()},
               {"variance", law.variance()}};
  const auto replicas = s.get_or<std::uint64_t>("replicas", 0);
  if (replicas > 0) {
    json m = {{"type", "dses"}, {"drift", drift_name}, {"sigma", sigma}};
    const std::optional<json> sched = s.has("schedule") ? std::optional<json>(s.at("schedule")) : std::nullopt;
    const ChainModel model = config::parse_model(m, sched);
    const auto n = s.get_or<std::uint64_t>("n_steps", 100000);
    const double t = model.schedule().tau(n);
    const auto ens = evolve_ensemble(model, State{0.0}, replicas, {t}, c.seed);
    const double w1 = w1_to_cdf(ens[0], [&](double y) { return law.cdf(y); }, range[0], range[1]);
    c.metrics["chain_w1"] = w1;
    c.metrics["chain_n_steps"] = n;
    const double gate = s.get_or("w1_max", 0.05);
    c.pass = w1 < gate;
  }
}

inline void stationary_ou(Context& c) {
  auto& s = c.settings;
  const ChainModel model = config::parse_model(s.resolved());
  const LimitProcess proc = config::parse_limit(s.resolved(), model);
  const auto* o = proc.as<OU>();
  require(o != nullptr, "stationary ou: the limit process must be an OU process");
  const auto law = ou_stationary(o->l, o->sigma, o->dim);
  c.metrics = {{"limit", describe(proc)}, {"variance", law.variance}, {"fourth_moment", law.moment(4)}};
  const auto replicas = s.get_or<std::uint64_t>("replicas", 10000);
  const auto n = s.get_or<std::uint64_t>("n_steps", 100000);
  const auto ens = evolve_ensemble(model, initial_state(s), replicas, {model.schedule().tau(n)}, c.seed);
  const double w1 = w1_to_normal(ens[0], 0.0, law.sd());
  const auto sum = stats::summarize(ens[0].marginal(0));
  c.metrics["chain_w1"] = w1;
  c.metrics["chain_mean"] = sum.mean;
  c.metrics["chain_variance"] = sum.variance;
  c.pass = w1 < s.get_or("w1_max", 0.05);
}

inline void run_stationary(Context& c) {
  const auto engine = c.settings.get_or<std::string>("engine", "pdmp");
  if (engine == "pdmp") return stationary_pdmp(c);
  if (engine == "langevin") return stationary_langevin(c);
  if (engine == "ou") return stationary_ou(c);
  throw ValidationError("config: stationary engine must be pdmp, langevin or ou");
}

inline void run_fdd(Context& c) {
  auto& s = c.settings;
  const ChainModel model = config::parse_model(s.resolved());
  const LimitProcess proc = config::parse_limit(s.resolved(), model);
  const auto* o = proc.as<OU>();
  require(o != nullptr, "fdd: a stationary sampler exists only for OU limits");
  const auto law = ou_stationary(o->l, o->sigma, 1);
  const double t = s.get_or("t", 30.0);
  const auto s_list = s.get_or<std::vector<double>>("s_list", {0.5, 1.0});
  const auto rep = fdd_compare(model, proc, [law](Rng& r) { return law.sample_scalar(r); }, t, s_list,
                               s.get_or<std::uint64_t>("replicas", 10000), c.seed, initial_state(s));
  c.metrics = io::to_json(rep);
  c.pass = rep.pass;
}

inline void run_doeblin(Context& c) {
  auto& s = c.settings;
  const double eps = s.get_or("eps", 0.2);
  Eigen::MatrixXd R;
  if (s.has("R")) {
    R = config::parse_matrix(s.at("R"));
  } else {
    const auto K = s.get_or<std::size_t>("states", 3);
    R = random_doeblin_kernel(K, eps, c.seed);
  }
  const StepSchedule sched = s.has("schedule") ? config::parse_schedule(s.at("schedule")) : StepSchedule(PowerLog{1, 1, 0});
  const auto rep = doeblin_exact_oracle(R, eps, sched, s.get_or<std::uint64_t>("n_max", 10000));
  rep.write_csv(c.file("doeblin.csv"));
  c.metrics = io::to_json(rep);
  c.pass = rep.pass;
}

inline void run_lyapunov(Context& c) {
  auto& s = c.settings;
  const ChainModel model = config::parse_model(s.resolved());
  const TestFunction V = config::parse_function(s.has("V") ? s.at("V") : json{{"poly", {1.0, 0.0, 1.0}}});
  const auto grid = config::parse_grid(s.has("y_grid") ? s.at("y_grid") : json{{"lo", 0.0}, {"hi", 20.0}, {"points", 81}});
  const auto n_list = config::parse_index_list(s.has("n_list") ? s.at("n_list") : json{{"from", 10}, {"to", 10000}});
  std::optional<double> yc;
  if (s.has("y_c")) yc = s.get<double>("y_c");
  const auto rep = lyapunov_check(model, V, grid, n_list, yc, s.get_or("quad_nodes", 64));
  c.metrics = io::to_json(rep);
  if (rep.pass) {
    Rng r = Rng::stream(c.seed, 0);
    const State y0 = initial_state(s).value_or(model.default_initial(r));
    const auto mb = moment_bound_recursion(V(y0[0]), rep.alpha, rep.beta, model.schedule(),
                                           s.get_or<std::uint64_t>("n_max", 10000));
    c.metrics["moment_bound"] = {{"uniform", mb.uniform}, {"n1", mb.n1}, {"v_final", mb.v.back()}};
  }
  c.pass = rep.pass;
}

inline void run_martingale(Context& c) {
  auto& s = c.settings;
  const ChainModel model = config::parse_model(s.resolved());
  const TestFunction f = config::parse_function(s.has("f") ? s.at("f") : json("sin(1y)"));
  const auto cps = config::parse_index_list(s.has("checkpoints") ? s.at("checkpoints") : json{10, 100, 1000});
  const auto rep = martingale_check(model, f, cps, s.get_or<std::uint64_t>("replicas", 1000), c.seed,
                                    initial_state(s), s.get_or("quad_nodes", 64));
  c.metrics = io::to_json(rep);
  c.pass = rep.pass;
}

/// Runs one experiment and writes its outputs plus summary.json into out_dir.
inline json run_experiment(const json& cfg, const fs::path& out_dir) {
  config::validate_common(cfg);
  Context c{Settings(cfg), out_dir};
  c.seed = c.settings.get_or<std::uint64_t>("seed", 1);
  const auto kind = c.settings.get<std::string>("experiment");
  const auto id = c.settings.get_or<std::string>("id", kind);
  // constructing the model up front validates it before any simulation
  if (c.settings.has("model")) config::parse_model(c.settings.resolved());
  fs::create_directories(out_dir);
  static const std::map<std::string, std::function<void(Context&)>> table{
      {"trajectory", run_trajectory}, {"gap-scan", run_gap_scan},   {"pseudo-gap", run_pseudo_gap},
      {"stationary", run_stationary}, {"rate-fit", run_rate_fit},   {"fdd", run_fdd},
      {"doeblin", run_doeblin},       {"lyapunov", run_lyapunov},   {"martingale", run_martingale}};
  table.at(kind)(c);
  c.outputs.push_back("summary.json");
  json summary = {{"experiment", id}, {"kind", kind},         {"seed", c.seed},    {"config", c.settings.resolved()},
                  {"metrics", c.metrics}, {"pass", c.pass}, {"outputs", c.outputs}};
  io::write_json((out_dir / "summary.json").string(), summary);
  return summary;
}

// ---------------------------------------------------------------- presets

struct Preset {
  std::string name;
  std::string description;
  json config;
};

inline const std::vector<Preset>& presets() {
  static const std::vector<Preset> p{
      {"figure-1", "WRW trajectory, omega = 1, E = +-1 (interpolated normalized mean)",
       {{"experiment", "trajectory"}, {"id", "figure-1"}, {"model", {{"type", "wrw"}, {"noise", {{"type", "pm1"}}}}},
        {"n_steps", 100000}, {"stride", 10}, {"seed", 1}}},
      {"figure-2", "jump-diffusion toy trajectory, F = G = +-1, gamma_n = 1/n",
       {{"experiment", "trajectory"}, {"id", "figure-2"}, {"model", {{"type", "jump-toy"}}}, {"n_steps", 100000},
        {"stride", 10}, {"seed", 2}}},
      {"figure-3", "rescaled PBA trajectory, s(x) = x, pA = 0.7, pB = 0.4, gamma_n = n^{-1/2}",
       {{"experiment", "trajectory"}, {"id", "figure-3"},
        {"model", {{"type", "pba"}, {"strategy", "identity"}, {"pA", 0.7}, {"pB", 0.4}}}, {"n_steps", 10000},
        {"y0", {0.5}}, {"seed", 3}}},
      {"acceptance-exact-llrw", "exact pseudotrajectory gap of a 2-state LLRW against C'_T gamma_{m(t)}",
       {{"experiment", "pseudo-gap"}, {"id", "acceptance-exact-llrw"},
        {"model", {{"type", "llrw"}, {"R", {{0.3, 0.7}, {0.6, 0.4}}}}}, {"initial_state", 0},
        {"t_list", {{"from", 1}, {"to", 30}, {"step", 1}}}, {"T", 1.0}, {"s_grid", 16}}},
      {"acceptance-doeblin", "exact TV of a random 3-state LLRW (eps = 0.2) under the Doeblin product",
       {{"experiment", "doeblin"}, {"id", "acceptance-doeblin"}, {"states", 3}, {"eps", 0.2}, {"n_max", 10000}, {"seed", 7}}},
      {"acceptance-wrw-stationary", "WRW at n = 1e5 against N(0, 1), 1e4 replicas",
       {{"experiment", "stationary"}, {"id", "acceptance-wrw-stationary"}, {"engine", "ou"},
        {"model", {{"type", "wrw"}}}, {"n_steps", 100000}, {"replicas", 10000}, {"w1_max", 0.05}, {"seed", 4}}},
      {"acceptance-pba-gap", "PBA generator gap over n = 1e2..1e6, y in [0, 5]",
       {{"experiment", "gap-scan"}, {"id", "acceptance-pba-gap"}, {"model", {{"type", "pba"}}},
        {"n_list", {{"from", 100}, {"to", 1000000}, {"per_decade", 2}}},
        {"y_grid", {{"lo", 0.0}, {"hi", 5.0}, {"points", 51}}}, {"slope_band", {-0.6, -0.4}}}},
      {"acceptance-pdmp-moments", "PDMP (0.3, 0.7, 0, 0.4) moments: Dynkin, printed recursion, simulation",
       {{"experiment", "stationary"}, {"id", "acceptance-pdmp-moments"}, {"engine", "pdmp"},
        {"limit", {{"type", "pdmp"}, {"a", 0.3}, {"b", 0.7}, {"c", 0.0}, {"d", 0.4}}}, {"order", 4}, {"t", 50.0},
        {"replicas", 10000}, {"seed", 6}}},
      {"acceptance-dses-langevin", "DSES with b(y) = -y + sin(y) against the quadrature density",
       {{"experiment", "stationary"}, {"id", "acceptance-dses-langevin"}, {"engine", "langevin"},
        {"drift", "langevin-sin"}, {"sigma", 1.0}, {"range", {-8.0, 8.0}}, {"replicas", 1000},
        {"n_steps", 1000000}, {"w1_max", 0.05}, {"seed", 8}}},
      {"acceptance-fdd", "WRW (omega = n^2) two-time moments at t = 30 against OU started from pi",
       {{"experiment", "fdd"}, {"id", "acceptance-fdd"}, {"model", {{"type", "wrw"}, {"weight_exponent", 2.0}}},
        {"t", 30.0}, {"s_list", {0.5, 1.0}}, {"replicas", 10000}, {"seed", 10}}},
      {"acceptance-martingale-wrw", "martingale and bracket check on the WRW, n <= 1e3",
       {{"experiment", "martingale"}, {"id", "acceptance-martingale-wrw"}, {"model", {{"type", "wrw"}}},
        {"f", "sin(1y)"}, {"checkpoints", {10, 100, 1000}}, {"replicas", 1000}, {"seed", 11}}},
      {"acceptance-martingale-pba", "martingale and bracket check on the PBA, n <= 1e3",
       {{"experiment", "martingale"}, {"id", "acceptance-martingale-pba"}, {"model", {{"type", "pba"}}},
        {"f", "sin(1y)"}, {"checkpoints", {10, 100, 1000}}, {"replicas", 1000}, {"seed", 12}}},
      {"lyapunov-pba", "grid Lyapunov certificate for V = 1 + y^2 on the PBA",
       {{"experiment", "lyapunov"}, {"id", "lyapunov-pba"}, {"model", {{"type", "pba"}}},
        {"V", {{"poly", {1.0, 0.0, 1.0}}}}, {"y_grid", {{"lo", 0.0}, {"hi", 20.0}, {"points", 81}}},
        {"n_list", {{"from", 10}, {"to", 10000}}}}},
      {"rate-fit-llrw", "decay rate of the exact LLRW distance to pi",
       {{"experiment", "rate-fit"}, {"id", "rate-fit-llrw"}, {"curve", "stationary-distance"},
        {"model", {{"type", "llrw"}, {"R", {{0.3, 0.7}, {0.6, 0.4}}}}},
        {"t_list", {{"from", 1}, {"to", 12}, {"step", 1}}},
        {"ergodicity", {{"v", 1.3}, {"M3", 1.0}, {"r", 0.0}}}}},
  };
  return p;
}

inline const Preset& preset(const std::string& name) {
  for (const auto& p : presets()) {
    if (p.name == name) return p;
  }
  throw ValidationError("unknown preset '" + name + "' (see list-presets)");
}

inline std::string list_presets() {
  std::string out;
  for (const auto& p : presets()) {
    out += p.name;
    out.append(p.name.size() < 28 ? 28 - p.name.size() : 1, ' ');
    out += p.description + "\n";
  }
  out += "acceptance group:";
  for (const auto& p : presets()) {
    if (p.name.rfind("acceptance-", 0) == 0) out += " " + p.name;
  }
  out += "\n";
  return out;
}

}  // namespace aptlab::runner
