#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "aptlab/chain_models.hpp"
#include "aptlab/errors.hpp"
#include "aptlab/limit_processes.hpp"
#include "aptlab/parallel.hpp"
#include "aptlab/rng.hpp"
#include "aptlab/stats.hpp"
#include "aptlab/test_function.hpp"

namespace aptlab {

struct Provenance {
  std::string model;
  double t = 0.0;
  std::uint64_t n = 0;
  std::uint64_t seed = 0;
  std::uint64_t replicas = 0;
};

/// Uniformly weighted samples, stored flat (sample i occupies [i*dim, (i+1)*dim)).
struct EmpiricalMeasure {
  std::vector<double> samples;
  std::size_t dim = 1;
  Provenance provenance;

  std::size_t size() const { return dim == 0 ? 0 : samples.size() / dim; }
  double at(std::size_t i, std::size_t k = 0) const { return samples[i * dim + k]; }
  State point(std::size_t i) const {
    return State(samples.begin() + static_cast<std::ptrdiff_t>(i * dim),
                 samples.begin() + static_cast<std::ptrdiff_t>((i + 1) * dim));
  }
  std::vector<double> marginal(std::size_t k = 0) const {
    std::vector<double> out(size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = at(i, k);
    return out;
  }
  double mean_of(const std::function<double(double)>& f, std::size_t k = 0) const {
    double s = 0.0;
    for (std::size_t i = 0; i < size(); ++i) s += f(at(i, k));
    return s / static_cast<double>(size());
  }
};

/// Exact law on {0, ..., K-1}.
struct FiniteMeasure {
  std::vector<double> p;

  FiniteMeasure() = default;
  explicit FiniteMeasure(std::vector<double> probs) : p(std::move(probs)) {
    require(!p.empty(), "finite measure: empty state space");
    double s = 0.0;
    for (double v : p) {
      require(v >= 0.0, "finite measure: negative mass");
      s += v;
    }
    require(std::abs(s - 1.0) <= 1e-12, "finite measure: masses must sum to 1");
  }
  static FiniteMeasure uniform(std::size_t k) { return FiniteMeasure(std::vector<double>(k, 1.0 / k)); }
  static FiniteMeasure dirac(std::size_t k, std::size_t i) {
    std::vector<double> v(k, 0.0);
    v.at(i) = 1.0;
    return FiniteMeasure(std::move(v));
  }
  std::size_t size() const { return p.size(); }

  void renormalize() {
    double s = 0.0;
    for (double v : p) s += v;
    for (double& v : p) v /= s;
  }
};

inline FiniteMeasure empirical_frequencies(const EmpiricalMeasure& mu, std::size_t k) {
  std::vector<double> p(k, 0.0);
  for (std::size_t i = 0; i < mu.size(); ++i) {
    const auto j = static_cast<std::size_t>(mu.at(i));
    require(j < k, "empirical_frequencies: state outside the space");
    p[j] += 1.0;
  }
  for (double& v : p) v /= static_cast<double>(mu.size());
  FiniteMeasure out;
  out.p = std::move(p);
  return out;
}

// ---------------------------------------------------------------- ensembles

/// Replicas of the chain observed at indices m(t) for each t in t_marks (the
/// interpolated process is piecewise constant). Replica r uses stream (seed, r).
inline std::vector<EmpiricalMeasure> evolve_ensemble(const ChainModel& model, std::optional<State> y0,
                                                     std::uint64_t replicas, const std::vector<double>& t_marks,
                                                     std::uint64_t seed) {
  require(replicas >= 1, "evolve_ensemble: need replicas");
  require(!t_marks.empty(), "evolve_ensemble: no time marks");
  std::vector<std::uint64_t> idx;
  for (std::size_t i = 0; i < t_marks.size(); ++i) {
    require(t_marks[i] >= 0.0 && (i == 0 || t_marks[i] >= t_marks[i - 1]),
            "evolve_ensemble: time marks must be non-negative and increasing");
    idx.push_back(model.schedule().m_of_t(t_marks[i]));
  }
  const auto gamma = model.schedule().gamma_table(idx.back() + 1);
  const std::size_t d = model.dim();
  std::vector<EmpiricalMeasure> out(t_marks.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i].dim = d;
    out[i].samples.assign(replicas * d, 0.0);
    out[i].provenance = {model.kind(), t_marks[i], idx[i], seed, replicas};
  }
  parallel_for(replicas, [&](std::uint64_t r) {
    Rng rng = Rng::stream(seed, r);
    State y = y0 ? *y0 : model.default_initial(rng);
    require(y.size() == d, "evolve_ensemble: initial state has the wrong dimension");
    std::uint64_t n = 0;
    for (std::size_t i = 0; i < idx.size(); ++i) {
      model.run(y, n, idx[i], rng, gamma);
      n = idx[i];
      std::copy(y.begin(), y.end(), out[i].samples.begin() + static_cast<std::ptrdiff_t>(r * d));
    }
  });
  return out;
}

/// Pushes every sample through one draw of the limit transition over time s.
/// Sample i uses stream (seed, i).
inline EmpiricalMeasure flow_push(const LimitProcess& proc, const EmpiricalMeasure& mu, double s,
                                  std::uint64_t seed) {
  require(s >= 0.0, "flow_push: s must be non-negative");
  EmpiricalMeasure out = mu;
  out.provenance.t += s;
  if (s == 0.0) return out;
  parallel_for(mu.size(), [&](std::uint64_t i) {
    Rng rng = Rng::stream(seed, i);
    const State z = transition(proc, mu.point(i), s, rng);
    std::copy(z.begin(), z.end(), out.samples.begin() + static_cast<std::ptrdiff_t>(i * mu.dim));
  });
  return out;
}

// ---------------------------------------------------------------- distances

/// W1 between empirical laws. One-dimensional: exact, by the quantile
/// coupling of sorted samples (any sample counts). Higher dimension: the
/// matched-pairs cost (1/N) sum |x_i - y_i|, an upper bound, equal counts only.
inline double w1_distance(const EmpiricalMeasure& mu, const EmpiricalMeasure& nu) {
  require(mu.size() > 0 && nu.size() > 0, "w1_distance: empty measure");
  require(mu.dim == nu.dim, "w1_distance: dimension mismatch");
  if (mu.dim > 1) {
    require(mu.size() == nu.size(), "w1_distance: matched pairs need equal sample counts");
    double s = 0.0;
    for (std::size_t i = 0; i < mu.size(); ++i) {
      double d2 = 0.0;
      for (std::size_t k = 0; k < mu.dim; ++k) d2 += (mu.at(i, k) - nu.at(i, k)) * (mu.at(i, k) - nu.at(i, k));
      s += std::sqrt(d2);
    }
    return s / static_cast<double>(mu.size());
  }
  auto a = mu.samples, b = nu.samples;
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
  // walk the merged quantile breakpoints i/na and j/nb
  std::size_t i = 0, j = 0;
  double u = 0.0, total = 0.0;
  while (i < a.size() && j < b.size()) {
    const double ua = static_cast<double>(i + 1) / na, ub = static_cast<double>(j + 1) / nb;
    const double next = std::min(ua, ub);
    total += (next - u) * std::abs(a[i] - b[j]);
    u = next;
    if (ua <= next) ++i;
    if (ub <= next) ++j;
  }
  return total;
}

/// W1 of an empirical law to N(m, sd^2): the integral of |F_n - Phi| in closed form.
inline double w1_to_normal(const EmpiricalMeasure& mu, double m, double sd) {
  require(sd > 0.0, "w1_to_normal: sd must be positive");
  auto x = mu.marginal(0);
  std::sort(x.begin(), x.end());
  const double n = static_cast<double>(x.size());
  // G(z) = int Phi = z Phi(z) + phi(z); int_a^b |c - Phi| handled by splitting at Phi = c
  auto phi = [](double z) { return std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi); };
  auto G = [&](double z) { return z * stats::normal_cdf(z) + phi(z); };
  // int over standardized [lo, hi] of |c - Phi|; infinite ends only with c = 0 or 1
  auto seg = [&](double lo, double hi, double c) {
    if (hi <= lo) return 0.0;
    auto I = [&](double a, double b) { return c * (b - a) - (G(b) - G(a)); };  // int_a^b (c - Phi)
    if (c <= 0.0) {
      // int (Phi) over (-inf, hi] = G(hi)
      return lo == -INFINITY ? G(hi) : G(hi) - G(lo);
    }
    if (c >= 1.0) {
      // int (1 - Phi) over [lo, inf) = G(-lo) by symmetry
      return hi == INFINITY ? G(-lo) : (hi - lo) - (G(hi) - G(lo));
    }
    // normal quantile of c by bisection
    double zc = 0.0;
    {
      double a = -40.0, b = 40.0;
      for (int it = 0; it < 200; ++it) {
        zc = 0.5 * (a + b);
        (stats::normal_cdf(zc) < c ? a : b) = zc;
      }
    }
    double total = 0.0;
    const double l1 = lo, h1 = std::min(hi, zc);
    if (h1 > l1) total += I(l1, h1);
    const double l2 = std::max(lo, zc), h2 = hi;
    if (h2 > l2) total -= I(l2, h2);
    return total;
  };
  double total = 0.0;
  // (-inf, x0): F_n = 0 ; [x_i, x_{i+1}): F_n = (i+1)/n ; [x_{n-1}, inf): 1
  total += seg(-INFINITY, (x.front() - m) / sd, 0.0);
  for (std::size_t i = 0; i + 1 < x.size(); ++i) {
    total += seg((x[i] - m) / sd, (x[i + 1] - m) / sd, static_cast<double>(i + 1) / n);
  }
  total += seg((x.back() - m) / sd, INFINITY, 1.0);
  return sd * total;
}

/// W1 of an empirical law to a law with CDF F, by the integral of |F_n - F|
/// on [lo, hi] (widened to cover the samples) with a fine trapezoid rule.
/// The caller is responsible for negligible mass of F outside [lo, hi].
inline double w1_to_cdf(const EmpiricalMeasure& mu, const std::function<double(double)>& cdf, double lo,
                        double hi, std::size_t grid = 400001) {
  auto x = mu.marginal(0);
  std::sort(x.begin(), x.end());
  lo = std::min(lo, x.front());
  hi = std::max(hi, x.back());
  const double n = static_cast<double>(x.size());
  const double h = (hi - lo) / static_cast<double>(grid - 1);
  std::size_t k = 0;
  double total = 0.0, prev = 0.0;
  for (std::size_t i = 0; i < grid; ++i) {
    const double z = lo + h * static_cast<double>(i);
    while (k < x.size() && x[k] <= z) ++k;
    const double v = std::abs(static_cast<double>(k) / n - cdf(z));
    if (i > 0) total += 0.5 * h * (v + prev);
    prev = v;
  }
  return total;
}

/// (1/2) sum |p_i - q_i|
inline double tv_distance(const FiniteMeasure& mu, const FiniteMeasure& nu) {
  require(mu.size() == nu.size(), "tv_distance: state spaces differ");
  double s = 0.0;
  for (std::size_t i = 0; i < mu.size(); ++i) s += std::abs(mu.p[i] - nu.p[i]);
  return 0.5 * s;
}

/// max over the dictionary of |mu(f) - nu(f)|; a lower bound of the distance
/// over the full test class.
inline double dict_distance(const EmpiricalMeasure& mu, const EmpiricalMeasure& nu, const FunctionDictionary& dict) {
  double best = 0.0;
  for (const auto& f : dict.members()) {
    best = std::max(best, std::abs(mu.mean_of([&](double y) { return f(y); }) -
                                   nu.mean_of([&](double y) { return f(y); })));
  }
  return best;
}

// ---------------------------------------------------------------- pseudotrajectory gaps

enum class DistanceKind { W1, TV, Dictionary };

inline std::string to_string(DistanceKind k) {
  switch (k) {
    case DistanceKind::W1: return "w1";
    case DistanceKind::TV: return "tv";
    default: return "dict";
  }
}

struct PseudoGapCurve {
  std::vector<double> t;
  std::vector<double> gap;
  std::vector<double> bound;  // filled by the exact pipeline: C'_T gamma_{m(t)}
  double T = 1.0;
  DistanceKind kind = DistanceKind::W1;
  std::uint64_t replicas = 0;
  std::uint64_t seed = 0;

  void write_csv(const std::string& path) const {
    std::ofstream os(path);
    if (!os) throw ValidationError("cannot open " + path + " for writing");
    os << "# aptlab pseudo-gap v1\n";
    os << "t,gap,distance_kind,replicas,seed" << (bound.empty() ? "" : ",bound") << "\n";
    os.precision(17);
    for (std::size_t i = 0; i < t.size(); ++i) {
      os << t[i] << "," << gap[i] << "," << to_string(kind) << "," << replicas << "," << seed;
      if (!bound.empty()) os << "," << bound[i];
      os << "\n";
    }
  }
};

struct PseudoGapOptions {
  double T = 1.0;
  std::size_t s_grid_size = 16;
  std::uint64_t replicas = 10000;
  std::uint64_t seed = 1;
  DistanceKind kind = DistanceKind::W1;
  bool shared_seeds = true;
  std::optional<State> y0;
  FunctionDictionary dict = FunctionDictionary::standard();
};

/// Monte Carlo pseudotrajectory gap: for each t, the max over s in
/// {0, T/G, ..., T} of d(mu_{t+s}, Phi(mu_t, s)). With shared seeds, mu_{t+s}
/// is read off the same replicas that form mu_t.
inline PseudoGapCurve pseudo_gap(const ChainModel& model, const LimitProcess& proc,
                                 const std::vector<double>& t_list, const PseudoGapOptions& opt) {
  require(opt.T > 0.0, "pseudo_gap: T must be positive");
  require(opt.s_grid_size >= 8, "pseudo_gap: s-grid needs at least 8 points");
  PseudoGapCurve curve;
  curve.T = opt.T;
  curve.kind = opt.kind;
  curve.replicas = opt.replicas;
  curve.seed = opt.seed;
  const std::size_t G = opt.s_grid_size;
  std::size_t K = 0;
  if (opt.kind == DistanceKind::TV) {
    const auto* f = model.as<LLRWFinite>();
    require(f != nullptr, "pseudo_gap: TV needs a finite-state chain");
    K = static_cast<std::size_t>(f->R.rows());
  }
  auto dist = [&](const EmpiricalMeasure& a, const EmpiricalMeasure& b) {
    switch (opt.kind) {
      case DistanceKind::W1: return w1_distance(a, b);
      case DistanceKind::TV: return tv_distance(empirical_frequencies(a, K), empirical_frequencies(b, K));
      default: return dict_distance(a, b, opt.dict);
    }
  };
  for (std::size_t ti = 0; ti < t_list.size(); ++ti) {
    const double t = t_list[ti];
    std::vector<double> marks{t};
    for (std::size_t k = 1; k <= G; ++k) marks.push_back(t + opt.T * static_cast<double>(k) / G);
    const std::uint64_t base = opt.seed + 7919 * ti;
    const auto ens = evolve_ensemble(model, opt.y0, opt.replicas, marks, base);
    double worst = 0.0;
    for (std::size_t k = 1; k <= G; ++k) {
      const double s = opt.T * static_cast<double>(k) / G;
      const auto pushed = flow_push(proc, ens[0], s, splitmix64(base) + k);
      if (opt.shared_seeds) {
        worst = std::max(worst, dist(ens[k], pushed));
      } else {
        const auto other = evolve_ensemble(model, opt.y0, opt.replicas, {t + s}, splitmix64(base ^ (k + 1)));
        worst = std::max(worst, dist(other[0], pushed));
      }
    }
    curve.t.push_back(t);
    curve.gap.push_back(worst);
  }
  return curve;
}

/// R-uniformization: sum_{k<=50} e^{-s} s^k/k! mu R^k.
inline FiniteMeasure subordinated_push(const FiniteMeasure& mu, const Eigen::MatrixXd& R, double s) {
  Eigen::RowVectorXd term = Eigen::Map<const Eigen::RowVectorXd>(mu.p.data(), static_cast<Eigen::Index>(mu.size()));
  Eigen::RowVectorXd acc = Eigen::RowVectorXd::Zero(term.size());
  double w = std::exp(-s);
  for (int k = 0; k <= 50; ++k) {
    if (k > 0) {
      term = term * R;
      w *= s / k;
    }
    acc += w * term;
  }
  FiniteMeasure out;
  out.p.assign(acc.data(), acc.data() + acc.size());
  out.renormalize();
  return out;
}

/// One exact kernel step mu ((1 - g) I + g R).
inline void llrw_kernel_step(FiniteMeasure& mu, const Eigen::MatrixXd& R, double g) {
  if (!(g >= 0.0 && g <= 1.0)) throw ModelError("LLRW: gamma_{n+1} = " + std::to_string(g) + " is not a jump probability");
  const auto K = static_cast<Eigen::Index>(mu.size());
  std::vector<double> next(mu.size(), 0.0);
  for (Eigen::Index i = 0; i < K; ++i) {
    const double mi = mu.p[static_cast<std::size_t>(i)];
    if (mi == 0.0) continue;
    next[static_cast<std::size_t>(i)] += (1.0 - g) * mi;
    for (Eigen::Index j = 0; j < K; ++j) next[static_cast<std::size_t>(j)] += g * mi * R(i, j);
  }
  mu.p = std::move(next);
  mu.renormalize();
}

/// Exact pseudotrajectory gap for a finite lazier-and-lazier walk: mu_t by
/// iterating the kernels, Phi(mu_t, s) by uniformization, TV exactly. The
/// bound column is (3/2 + (T+1)/2) gamma_{m(t)}.
inline PseudoGapCurve exact_pseudo_gap(const ChainModel& model, const std::vector<double>& t_list, double T,
                                       std::size_t s_grid_size, std::optional<FiniteMeasure> initial = std::nullopt) {
  const auto* f = model.as<LLRWFinite>();
  require(f != nullptr, "exact_pseudo_gap: needs a finite-state lazier-and-lazier walk");
  require(f->R.rows() <= 1000, "exact_pseudo_gap: state space too large (max 1000)");
  require(T > 0.0 && s_grid_size >= 1, "exact_pseudo_gap: need T > 0 and a non-empty s-grid");
  const auto K = static_cast<std::size_t>(f->R.rows());
  const auto& sched = model.schedule();
  FiniteMeasure mu = initial.value_or(FiniteMeasure::uniform(K));
  require(mu.size() == K, "exact_pseudo_gap: initial law has the wrong size");

  struct Query {
    std::uint64_t n;
    std::size_t t_index;
    std::size_t s_index;
  };
  std::vector<Query> queries;
  for (std::size_t i = 0; i < t_list.size(); ++i) {
    for (std::size_t k = 0; k <= s_grid_size; ++k) {
      const double s = T * static_cast<double>(k) / static_cast<double>(s_grid_size);
      queries.push_back({sched.m_of_t(t_list[i] + s), i, k});
    }
  }
  std::stable_sort(queries.begin(), queries.end(), [](const Query& a, const Query& b) { return a.n < b.n; });
  std::vector<std::vector<FiniteMeasure>> at(t_list.size(), std::vector<FiniteMeasure>(s_grid_size + 1));
  std::uint64_t n = 0;
  for (const auto& q : queries) {
    for (; n < q.n; ++n) llrw_kernel_step(mu, f->R, sched.gamma_at(n + 1));
    at[q.t_index][q.s_index] = mu;
  }
  PseudoGapCurve curve;
  curve.T = T;
  curve.kind = DistanceKind::TV;
  const double constant = 1.5 + 0.5 * (T + 1.0);
  for (std::size_t i = 0; i < t_list.size(); ++i) {
    double worst = 0.0;
    for (std::size_t k = 1; k <= s_grid_size; ++k) {
      const double s = T * static_cast<double>(k) / static_cast<double>(s_grid_size);
      worst = std::max(worst, tv_distance(at[i][k], subordinated_push(at[i][0], f->R, s)));
    }
    const std::uint64_t m = sched.m_of_t(t_list[i]);
    curve.t.push_back(t_list[i]);
    curve.gap.push_back(worst);
    curve.bound.push_back(constant * sched.gamma_or_one(m));
  }
  return curve;
}

// ---------------------------------------------------------------- rates

struct RateFit {
  double u = 0.0;  // decay rate: gap ~ C e^{-u t}
  double intercept = 0.0;
  double residual = 0.0;
  double t_min = 0.0, t_max = 0.0;
  std::size_t used = 0;
};

/// Least squares of log(gap) against t over the positive gaps.
inline RateFit rate_fit(const std::vector<double>& t, const std::vector<double>& gap) {
  require(t.size() == gap.size(), "rate_fit: length mismatch");
  std::vector<double> x, y;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (gap[i] > 0.0 && std::isfinite(gap[i])) {
      x.push_back(t[i]);
      y.push_back(std::log(gap[i]));
    }
  }
  require(x.size() >= 4, "rate_fit: fewer than 4 positive gap values");
  const auto fit = stats::linear_fit(x, y);
  return {-fit.slope, fit.intercept, fit.residual, *std::min_element(x.begin(), x.end()),
          *std::max_element(x.begin(), x.end()), x.size()};
}

inline RateFit rate_fit(const PseudoGapCurve& c) { return rate_fit(c.t, c.gap); }

// ---------------------------------------------------------------- finite-dimensional laws

struct MomentCheck {
  std::string label;  // "E[Y_i]" or "E[Y_i Y_j]"
  double chain = 0.0;
  double limit = 0.0;
  double se = 0.0;  // combined standard error
  bool pass = false;
};

struct FddReport {
  std::vector<MomentCheck> checks;
  bool pass = false;
};

/// Compares first and second joint moments of (Y_{t+s_1}, ..., Y_{t+s_m}) with
/// those of the stationary limit process sampled at (s_1, ..., s_m). PASS if
/// every difference is within 4 combined standard errors.
inline FddReport fdd_compare(const ChainModel& model, const LimitProcess& proc,
                             const std::function<double(Rng&)>& pi_sampler, double t,
                             const std::vector<double>& s_list, std::uint64_t replicas, std::uint64_t seed,
                             std::optional<State> y0 = std::nullopt) {
  require(!s_list.empty() && s_list.size() <= 4, "fdd_compare: s_list must hold 1 to 4 times");
  require(static_cast<bool>(pi_sampler), "fdd_compare: a stationary sampler is required");
  for (std::size_t i = 1; i < s_list.size(); ++i) require(s_list[i] > s_list[i - 1], "fdd_compare: s_list must increase");
  const std::size_t m = s_list.size();
  std::vector<double> marks;
  for (double s : s_list) marks.push_back(t + s);
  const auto ens = evolve_ensemble(model, y0, replicas, marks, seed);

  std::vector<std::vector<double>> lim(m, std::vector<double>(replicas));
  const std::uint64_t lseed = splitmix64(seed ^ 0xF00DULL);
  parallel_for(replicas, [&](std::uint64_t r) {
    Rng rng = Rng::stream(lseed, r);
    State x{pi_sampler(rng)};
    lim[0][r] = x[0];
    for (std::size_t k = 1; k < m; ++k) {
      x = transition(proc, x, s_list[k] - s_list[k - 1], rng);
      lim[k][r] = x[0];
    }
  });

  FddReport rep;
  rep.pass = true;
  auto compare = [&](const std::string& label, const std::vector<double>& a, const std::vector<double>& b) {
    const auto sa = stats::summarize(a), sb = stats::summarize(b);
    MomentCheck c{label, sa.mean, sb.mean, std::sqrt(sa.se * sa.se + sb.se * sb.se), false};
    c.pass = std::abs(c.chain - c.limit) <= 4.0 * c.se;
    rep.pass = rep.pass && c.pass;
    rep.checks.push_back(c);
  };
  for (std::size_t i = 0; i < m; ++i) {
    compare("E[Y_" + std::to_string(i) + "]", ens[i].marginal(0), lim[i]);
  }
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = i; j < m; ++j) {
      std::vector<double> a(replicas), b(replicas);
      for (std::uint64_t r = 0; r < replicas; ++r) {
        a[r] = ens[i].at(r) * ens[j].at(r);
        b[r] = lim[i][r] * lim[j][r];
      }
      compare("E[Y_" + std::to_string(i) + " Y_" + std::to_string(j) + "]", a, b);
    }
  }
  return rep;
}

}  // namespace aptlab
