#pragma once

#include <cmath>
#include <cstdint>
#include <fstream>
#include <limits>
#include <string>
#include <vector>

#include "aptlab/chain_models.hpp"
#include "aptlab/limit_processes.hpp"
#include "aptlab/rng.hpp"
#include "aptlab/stats.hpp"
#include "aptlab/test_function.hpp"

namespace aptlab {

// Test functions act on the first state component.

/// K_n f(y) = E[f(y_{n+1}) | y_n = y]
inline double apply_Kn(const ChainModel& m, const TestFunction& f, const State& y, std::uint64_t n,
                       int nodes = 64) {
  return m.expect(y, n, [&](const State& z) { return f(z[0]); }, nodes);
}

/// L_n f(y) = E[f(y_{n+1}) - f(y_n) | y_n = y] / gamma_{n+1}. The difference is
/// taken inside the expectation, so L_n 1 = 0 exactly.
inline double apply_Ln(const ChainModel& m, const TestFunction& f, const State& y, std::uint64_t n,
                       int nodes = 64) {
  const double fy = f(y[0]);
  if (auto* q = m.as<LLRWFinite>()) {
    // gamma cancels: L_n f = R f - f for every n, summed as in apply_L
    const auto i = static_cast<Eigen::Index>(y[0]);
    require(static_cast<double>(i) == y[0] && i >= 0 && i < q->R.rows(), "apply_Ln: LLRW state must be an index of R");
    double s = 0.0;
    for (Eigen::Index j = 0; j < q->R.cols(); ++j) s += q->R(i, j) * (f(static_cast<double>(j)) - fy);
    return s;
  }
  const double e = m.expect(y, n, [&](const State& z) { return f(z[0]) - fy; }, nodes);
  return e / m.schedule().gamma_at(n + 1);
}

/// Closed-form limit generator.
inline double apply_L(const LimitProcess& proc, const TestFunction& f, const State& y, int nodes = 64) {
  const double x = y[0];
  return std::visit(
      [&](const auto& p) -> double {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, OU>) {
          return -p.l * x * f.derivative(x, 1) + 0.5 * p.sigma * p.sigma * f.derivative(x, 2);
        } else if constexpr (std::is_same_v<T, LinearJumpPDMP>) {
          return (p.a - p.b * x) * f.derivative(x, 1) + (p.c + p.d * x) * (f(x + 1.0) - f(x));
        } else if constexpr (std::is_same_v<T, Diffusion>) {
          const double s = p.diffusion(x);
          return p.drift(x) * f.derivative(x, 1) + 0.5 * s * s * f.derivative(x, 2);
        } else if constexpr (std::is_same_v<T, SubordinatedChain>) {
          const auto i = static_cast<Eigen::Index>(x);
          double s = 0.0;
          for (Eigen::Index j = 0; j < p.R.cols(); ++j) s += p.R(i, j) * (f(static_cast<double>(j)) - f(x));
          return s;
        } else {
          double jump = 0.0;
          if (p.Q.finite()) {
            for (const auto& a : p.Q.atoms().atoms) jump += a.prob * (f(x + a.value[0]) - f(x));
          } else {
            const auto& rule = normal_rule(nodes);
            const auto& g = p.Q.gaussian();
            for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
              const double z = g.mean[0] + std::sqrt(g.variance[0]) * rule.nodes[i];
              jump += rule.weights[i] * (f(x + z) - f(x));
            }
          }
          return -p.l * x * f.derivative(x, 1) + 0.5 * p.sigma * p.sigma * f.derivative(x, 2) + jump;
        }
      },
      proc.variant());
}

/// Gamma_n f = L_n f^2 - gamma_{n+1} (L_n f)^2 - 2 f L_n f
inline double apply_Gamma_n(const ChainModel& m, const TestFunction& f, const State& y, std::uint64_t n,
                            int nodes = 64) {
  const double g = m.schedule().gamma_at(n + 1);
  const double lf = apply_Ln(m, f, y, n, nodes);
  const double lf2 = apply_Ln(m, f.squared(), y, n, nodes);
  return lf2 - g * lf * lf - 2.0 * f(y[0]) * lf;
}

/// K_n f^2 - (K_n f)^2, the one-step conditional variance.
inline double kernel_variance(const ChainModel& m, const TestFunction& f, const State& y, std::uint64_t n,
                              int nodes = 64) {
  const double k1 = apply_Kn(m, f, y, n, nodes);
  const double k2 = m.expect(y, n, [&](const State& z) { return f(z[0]) * f(z[0]); }, nodes);
  return k2 - k1 * k1;
}

// ---------------------------------------------------------------- gap scan

struct GapRow {
  std::uint64_t n = 0;
  double gamma_n = 0.0;
  std::string f_id;
  double y = 0.0;
  double Ln = 0.0;
  double L = 0.0;
  double gap = 0.0;
  double normalized_gap = 0.0;
};

struct GapReport {
  std::vector<GapRow> rows;
  std::vector<std::uint64_t> n_list;
  std::vector<double> max_normalized_gap;  // one per n
  int d1 = 3;
  double slope_vs_log_n = std::numeric_limits<double>::quiet_NaN();
  double slope_vs_log_gamma = std::numeric_limits<double>::quiet_NaN();
  bool all_zero = false;

  void write_csv(const std::string& path) const {
    std::ofstream os(path);
    if (!os) throw ValidationError("cannot open " + path + " for writing");
    os << "# aptlab gap-scan v1\n";
    os << "n,gamma_n,f_id,y,Ln,L,gap,normalized_gap\n";
    os.precision(17);
    for (const auto& r : rows) {
      os << r.n << "," << r.gamma_n << "," << r.f_id << "," << r.y << "," << r.Ln << "," << r.L << ","
         << r.gap << "," << r.normalized_gap << "\n";
    }
  }
};

/// |L_n f(y) - L f(y)| over the dictionary and grid, normalized by
/// chi_{d1}(y) sum_j ||f^{(j)}||. Grid points outside the chain's state space
/// at index n (bandits: y > 1/gamma_n, or above the truncation cap) are skipped.
inline GapReport gap_scan(const ChainModel& model, const LimitProcess& proc, const FunctionDictionary& dict,
                          const std::vector<double>& y_grid, const std::vector<std::uint64_t>& n_list,
                          int d1, int nodes = 64) {
  require(!n_list.empty() && !y_grid.empty(), "gap_scan: empty grid");
  GapReport rep;
  rep.n_list = n_list;
  rep.d1 = d1;
  const bool bandit = model.as<PBA>() || model.as<OverPBA>();
  for (std::uint64_t n : n_list) {
    require(n >= 1, "gap_scan: n must be >= 1");
    const double g = model.schedule().gamma_at(n);
    double cap = std::numeric_limits<double>::infinity();
    if (bandit) {
      cap = 1.0 / g;
      if (auto* p = model.as<PBA>(); p && p->truncation && n > p->truncation->l) {
        cap = p->truncation->delta / g;
      }
    }
    double worst = 0.0;
    for (const auto& f : dict.members()) {
      for (double y : y_grid) {
        if (bandit && (y < 0.0 || y > cap)) continue;
        const State s(model.dim(), y);
        GapRow r{n, g, f.id(), y, apply_Ln(model, f, s, n, nodes), apply_L(proc, f, s, nodes), 0, 0};
        r.gap = std::abs(r.Ln - r.L);
        r.normalized_gap = r.gap / (chi(y, d1) * f.norm_sum());
        worst = std::max(worst, r.normalized_gap);
        rep.rows.push_back(std::move(r));
      }
    }
    rep.max_normalized_gap.push_back(worst);
  }
  std::vector<double> ln, lg, lv;
  for (std::size_t i = 0; i < n_list.size(); ++i) {
    if (rep.max_normalized_gap[i] > 0.0) {
      ln.push_back(std::log(static_cast<double>(n_list[i])));
      lg.push_back(std::log(model.schedule().gamma_at(n_list[i])));
      lv.push_back(std::log(rep.max_normalized_gap[i]));
    }
  }
  rep.all_zero = lv.empty();
  if (lv.size() >= 2) {
    rep.slope_vs_log_n = stats::linear_fit(ln, lv).slope;
    rep.slope_vs_log_gamma = stats::linear_fit(lg, lv).slope;
  }
  return rep;
}

// ---------------------------------------------------------------- Lyapunov

struct LyapunovReport {
  double alpha = 0.0;
  double beta = 0.0;
  double y_c = 0.0;
  bool feasible = false;
  bool pass = false;
  std::size_t constraints = 0;
};

/// Best (alpha, beta) with L_n V <= -alpha V + beta at every grid point and
/// n in n_list, maximizing alpha subject to beta <= alpha V(y_c). Without the
/// cap on beta the grid problem is unbounded; y_c marks the compact set
/// outside of which V must strictly decrease. Certificate holds on the grid only.
inline LyapunovReport lyapunov_check(const ChainModel& model, const TestFunction& V,
                                     const std::vector<double>& y_grid, const std::vector<std::uint64_t>& n_list,
                                     std::optional<double> y_c = std::nullopt, int nodes = 64) {
  require(!y_grid.empty() && !n_list.empty(), "lyapunov_check: empty grid");
  double y_max = 0.0;
  for (double y : y_grid) y_max = std::max(y_max, std::abs(y));
  LyapunovReport rep;
  rep.y_c = y_c.value_or(y_max / 10.0);
  const double Vc = V(rep.y_c);
  double upper = std::numeric_limits<double>::infinity();
  double lower = -std::numeric_limits<double>::infinity();
  bool ok = true;
  std::vector<std::pair<double, double>> pts;  // (V, LV)
  for (std::uint64_t n : n_list) {
    for (double y : y_grid) {
      const State s(model.dim(), y);
      const double v = V(y);
      if (!(v > 0.0) || !std::isfinite(v)) throw ValidationError("lyapunov_check: V must be positive and finite on the grid");
      const double lv = apply_Ln(model, V, s, n, nodes);
      if (!std::isfinite(lv)) throw NumericalError("lyapunov_check: L_n V is not finite at y = " + std::to_string(y));
      pts.emplace_back(v, lv);
      if (v > Vc) {
        upper = std::min(upper, -lv / (v - Vc));
      } else if (v < Vc) {
        lower = std::max(lower, lv / (Vc - v));
      } else if (lv > 0.0) {
        ok = false;
      }
    }
  }
  rep.constraints = pts.size();
  rep.feasible = ok && std::isfinite(upper) && upper >= lower;
  if (!std::isfinite(upper)) {
    rep.alpha = 0.0;
    return rep;
  }
  rep.alpha = upper;
  rep.beta = -std::numeric_limits<double>::infinity();
  for (const auto& [v, lv] : pts) rep.beta = std::max(rep.beta, lv + rep.alpha * v);
  rep.pass = rep.feasible && rep.alpha > 0.0;
  return rep;
}

struct MomentBound {
  std::vector<double> v;  // v_0..v_{n_max}
  double uniform = 0.0;   // beta/alpha v v_{n1}
  std::uint64_t n1 = 0;   // first index with alpha gamma_{k+1} <= 1 for all k >= n1
};

/// Iterates v_{n+1} = v_n + gamma_{n+1}(beta - alpha v_n).
inline MomentBound moment_bound_recursion(double v0, double alpha, double beta, const StepSchedule& sched,
                                          std::uint64_t n_max) {
  require(alpha > 0.0, "moment_bound_recursion: alpha must be positive");
  MomentBound mb;
  mb.v.reserve(n_max + 1);
  mb.v.push_back(v0);
  bool found = false;
  for (std::uint64_t n = 0; n < n_max; ++n) {
    const double g = sched.gamma_at(n + 1);
    if (!found && alpha * g <= 1.0) {
      mb.n1 = n;
      found = true;
    }
    mb.v.push_back(mb.v.back() + g * (beta - alpha * mb.v.back()));
  }
  if (!found) mb.n1 = n_max;
  mb.uniform = std::max(beta / alpha, mb.v[mb.n1]);
  return mb;
}

// ---------------------------------------------------------------- martingales

struct MartingaleRow {
  std::uint64_t n = 0;
  double mean_M = 0.0;
  double t_M = 0.0;
  double mean_centered_square = 0.0;  // E[M^2 - <M>]
  double t_square = 0.0;
};

struct MartingaleReport {
  std::vector<MartingaleRow> rows;
  bool pass = false;
};

/// Simulates replicas of M_n = f(y_n) - f(y_0) - sum gamma_{k+1} L_k f(y_k) and
/// M_n^2 - sum gamma_{k+1} Gamma_k f(y_k); both must have mean zero.
inline MartingaleReport martingale_check(const ChainModel& model, const TestFunction& f,
                                         const std::vector<std::uint64_t>& checkpoints,
                                         std::uint64_t replicas, std::uint64_t seed,
                                         std::optional<State> y0 = std::nullopt, int nodes = 64) {
  require(!checkpoints.empty(), "martingale_check: no checkpoints");
  require(replicas >= 2, "martingale_check: need replicas");
  std::uint64_t n_max = 0;
  for (auto c : checkpoints) n_max = std::max(n_max, c);
  const auto gamma = model.schedule().gamma_table(n_max + 1);
  const TestFunction f2 = f.squared();
  std::vector<std::vector<double>> M(checkpoints.size()), S(checkpoints.size());

  for (std::uint64_t r = 0; r < replicas; ++r) {
    Rng rng = Rng::stream(seed, r);
    State y = y0 ? *y0 : model.default_initial(rng);
    const double f0 = f(y[0]);
    double comp = 0.0, bracket = 0.0;
    for (std::uint64_t n = 0; n < n_max; ++n) {
      const double g1 = gamma[n + 1];
      const double fy = f(y[0]);
      // increments written with gamma_{n+1} folded in, which avoids dividing
      // and re-multiplying by a small step
      const double k1 = model.expect(y, n, [&](const State& z) { return f(z[0]) - fy; }, nodes);
      const double k2 = model.expect(y, n, [&](const State& z) { return f2(z[0]) - fy * fy; }, nodes);
      comp += k1;
      bracket += k2 - k1 * k1 - 2.0 * fy * k1;
      model.advance(y, n, gamma[n], g1, rng);
      for (std::size_t c = 0; c < checkpoints.size(); ++c) {
        if (checkpoints[c] == n + 1) {
          const double m = f(y[0]) - f0 - comp;
          M[c].push_back(m);
          S[c].push_back(m * m - bracket);
        }
      }
    }
  }
  MartingaleReport rep;
  rep.pass = true;
  for (std::size_t c = 0; c < checkpoints.size(); ++c) {
    const auto sm = stats::summarize(M[c]);
    const auto ss = stats::summarize(S[c]);
    MartingaleRow row{checkpoints[c], sm.mean, stats::t_stat(sm), ss.mean, stats::t_stat(ss)};
    if (!(std::abs(row.t_M) < 4.0 && std::abs(row.t_square) < 4.0)) rep.pass = false;
    rep.rows.push_back(row);
  }
  return rep;
}

}  // namespace aptlab
