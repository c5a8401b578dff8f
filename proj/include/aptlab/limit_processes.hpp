#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "aptlab/chain_models.hpp"
#include "aptlab/errors.hpp"
#include "aptlab/noise.hpp"
#include "aptlab/rng.hpp"
#include "aptlab/test_function.hpp"

namespace aptlab {

/// Generator -l y f' + (sigma^2/2) f'' in each component.
struct OU {
  double l = 0.5;
  double sigma = 1.0;
  std::size_t dim = 1;
};

/// Generator (a - b x) f' + (c + d x)[f(x+1) - f(x)] on [0, inf).
struct LinearJumpPDMP {
  double a = 0.3, b = 0.7, c = 0.0, d = 0.4;
};

/// Generator b f' + (sigma^2/2) f'' (component-wise), simulated by Euler steps of size h.
struct Diffusion {
  ScalarFn drift = [](double y) { return -y; };
  ScalarFn diffusion = [](double) { return 1.0; };
  double h = 1e-2;
  std::size_t dim = 1;
};

/// Jumps of R at the times of a unit-rate Poisson process.
struct SubordinatedChain {
  Eigen::MatrixXd R;
};

/// OU plus unit-rate jumps with law Q.
struct JumpDiffusion {
  double l = 0.5;
  double sigma = 1.0;
  NoiseSpec Q = NoiseSpec::plus_minus_one();
};

using LimitVariant = std::variant<OU, LinearJumpPDMP, Diffusion, SubordinatedChain, JumpDiffusion>;

class LimitProcess {
 public:
  LimitProcess(LimitVariant v) : v_(std::move(v)) { validate(); }

  const LimitVariant& variant() const { return v_; }
  template <class T>
  const T* as() const {
    return std::get_if<T>(&v_);
  }
  std::string kind() const {
    static const char* names[] = {"ou", "pdmp", "diffusion", "subordinated", "jump-diffusion"};
    return names[v_.index()];
  }
  std::size_t dim() const {
    if (auto* o = as<OU>()) return o->dim;
    if (auto* d = as<Diffusion>()) return d->dim;
    return 1;
  }

 private:
  void validate() const {
    if (auto* o = as<OU>()) {
      require(o->l > 0.0 && o->sigma > 0.0 && o->dim >= 1, "OU: l and sigma must be positive");
    } else if (auto* p = as<LinearJumpPDMP>()) {
      require(p->a >= 0 && p->b >= 0 && p->c >= 0 && p->d >= 0, "PDMP: a, b, c, d must be >= 0");
      require(p->b > 0.0 || p->a != 0.0, "PDMP: need b > 0, or b = 0 with a != 0");
    } else if (auto* d = as<Diffusion>()) {
      require(d->h > 0.0 && d->drift && d->diffusion, "diffusion: needs drift, diffusion and h > 0");
    } else if (auto* s = as<SubordinatedChain>()) {
      require(s->R.rows() >= 1 && s->R.rows() == s->R.cols(), "subordinated chain: R must be square");
      for (Eigen::Index i = 0; i < s->R.rows(); ++i) {
        require((s->R.row(i).array() >= 0.0).all() && std::abs(s->R.row(i).sum() - 1.0) <= 1e-12,
                "subordinated chain: R must be row-stochastic");
      }
    } else if (auto* j = as<JumpDiffusion>()) {
      require(j->l > 0.0 && j->sigma > 0.0 && j->Q.dim() == 1, "jump-diffusion: invalid parameters");
    }
  }

  LimitVariant v_;
};

// ---------------------------------------------------------------- OU

/// Exact draw of X_t given X_0 = x.
inline State ou_transition(const OU& p, const State& x, double t, Rng& rng) {
  require(t > 0.0, "ou_transition: t must be positive");
  const double decay = std::exp(-p.l * t);
  const double sd = std::sqrt(p.sigma * p.sigma * -std::expm1(-2.0 * p.l * t) / (2.0 * p.l));
  State out(x.size());
  for (std::size_t k = 0; k < x.size(); ++k) out[k] = x[k] * decay + sd * rng.normal();
  return out;
}

// ---------------------------------------------------------------- PDMP

/// Psi(x, t): the deterministic flow of y' = a - b y.
inline double flow(const LinearJumpPDMP& p, double x, double t) {
  if (p.b > 0.0) {
    const double fix = p.a / p.b;
    return (x - fix) * std::exp(-p.b * t) + fix;
  }
  return x + p.a * t;
}

/// int_0^t Psi(x, s) ds
inline double flow_integral(const LinearJumpPDMP& p, double x, double t) {
  if (p.b > 0.0) {
    const double fix = p.a / p.b;
    return fix * t + (x - fix) * (-std::expm1(-p.b * t)) / p.b;
  }
  return x * t + 0.5 * p.a * t * t;
}

/// P(first jump <= t | X_0 = x) = 1 - exp(-int_0^t (c + d Psi(x,s)) ds).
inline double pdmp_first_jump_cdf(const LinearJumpPDMP& p, double x, double t) {
  if (t <= 0.0) return 0.0;
  return -std::expm1(-(p.c * t + p.d * flow_integral(p, x, t)));
}

namespace detail {

// Thinning envelope: after k jumps the state is at most top + k (b > 0), or
// top + a t + k on [0, t] (b = 0). Passing a common `top` to several starting
// points keeps their candidate jump times identical.
inline double pdmp_top(const LinearJumpPDMP& p, double x, std::optional<double> envelope) {
  double top = envelope ? std::max(*envelope, x) : x;
  if (p.b > 0.0) top = std::max(top, p.a / p.b);
  return top;
}

}  // namespace detail

/// Exact draw of X_t by thinning. `envelope` (>= x) fixes the rate bound so
/// that nearby starting points share their random numbers.
inline double pdmp_simulate(const LinearJumpPDMP& p, double x, double t, Rng& rng,
                            std::optional<double> envelope = std::nullopt) {
  require(x >= 0.0, "pdmp_simulate: x must be non-negative");
  if (t <= 0.0) return x;
  double top = detail::pdmp_top(p, x, envelope);
  if (p.b == 0.0) top += p.a * t;
  double now = 0.0;
  std::uint64_t jumps = 0;
  for (;;) {
    const double bound = p.c + p.d * (top + static_cast<double>(jumps));
    if (bound <= 0.0) return flow(p, x, t - now);
    const double wait = rng.exponential(bound);
    if (now + wait >= t) return flow(p, x, t - now);
    x = flow(p, x, wait);
    now += wait;
    if (rng.uniform() * bound < p.c + p.d * x) {
      x += 1.0;
      ++jumps;
    }
  }
}

/// First jump time from x (infinite if none occurs before t_max).
inline double pdmp_first_jump_time(const LinearJumpPDMP& p, double x, Rng& rng,
                                   double t_max = 1e6) {
  const double top = detail::pdmp_top(p, x, std::nullopt);
  double now = 0.0;
  for (;;) {
    const double bound = p.c + p.d * (p.b == 0.0 ? top + p.a * t_max : top);
    if (bound <= 0.0) return std::numeric_limits<double>::infinity();
    now += rng.exponential(bound);
    if (now >= t_max) return std::numeric_limits<double>::infinity();
    if (rng.uniform() * bound < p.c + p.d * flow(p, x, now)) return now;
  }
}

// ---------------------------------------------------------------- diffusion

/// Euler-Maruyama with substep h and a final partial step; weak error O(h).
inline State diffusion_simulate(const Diffusion& p, const State& x, double t, Rng& rng) {
  require(t > 0.0, "diffusion_simulate: t must be positive");
  State y = x;
  double left = t;
  while (left > 0.0) {
    const double h = left < p.h * (1.0 + 1e-12) ? left : p.h;
    const double r = std::sqrt(h);
    for (double& v : y) {
      v += h * p.drift(v) + r * p.diffusion(v) * rng.normal();
      if (!std::isfinite(v)) {
        throw NumericalError("diffusion_simulate: state became non-finite (drift blow-up?) at t = " +
                             std::to_string(t - left));
      }
    }
    left -= h;
  }
  return y;
}

// ---------------------------------------------------------------- finite chains

inline std::size_t sample_row(const Eigen::MatrixXd& R, std::size_t i, Rng& rng) {
  const double u = rng.uniform();
  double acc = 0.0;
  const auto K = static_cast<std::size_t>(R.cols());
  for (std::size_t j = 0; j + 1 < K; ++j) {
    acc += R(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
    if (u < acc) return j;
  }
  return K - 1;
}

/// N ~ Poisson(t) steps of R from state i.
inline std::size_t subordinated_simulate(const SubordinatedChain& p, std::size_t i, double t, Rng& rng) {
  require(t >= 0.0, "subordinated_simulate: t must be non-negative");
  const std::uint64_t n = rng.poisson(t);
  for (std::uint64_t k = 0; k < n; ++k) i = sample_row(p.R, i, rng);
  return i;
}

/// OU pieces between unit-rate jump times.
inline double jump_diffusion_simulate(const JumpDiffusion& p, double x, double t, Rng& rng) {
  const OU ou{p.l, p.sigma, 1};
  double left = t;
  for (;;) {
    const double wait = rng.exponential(1.0);
    if (wait >= left) return ou_transition(ou, {x}, left, rng)[0];
    x = ou_transition(ou, {x}, wait, rng)[0];
    double z;
    p.Q.sample(rng, &z);
    x += z;
    left -= wait;
  }
}

/// One draw of X_t given X_0 = x for any limit process.
inline State transition(const LimitProcess& proc, const State& x, double t, Rng& rng,
                        std::optional<double> envelope = std::nullopt) {
  if (t <= 0.0) return x;
  return std::visit(
      [&](const auto& p) -> State {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, OU>) {
          return ou_transition(p, x, t, rng);
        } else if constexpr (std::is_same_v<T, LinearJumpPDMP>) {
          return {pdmp_simulate(p, x[0], t, rng, envelope)};
        } else if constexpr (std::is_same_v<T, Diffusion>) {
          return diffusion_simulate(p, x, t, rng);
        } else if constexpr (std::is_same_v<T, SubordinatedChain>) {
          return {static_cast<double>(subordinated_simulate(p, static_cast<std::size_t>(x[0]), t, rng))};
        } else {
          return {jump_diffusion_simulate(p, x[0], t, rng)};
        }
      },
      proc.variant());
}

/// The limit process a chain model converges to.
inline LimitProcess limit_of(const ChainModel& m) {
  if (auto* w = m.as<WRW>()) {
    const auto var = w->noise.variance();
    for (double v : var) {
      require(std::abs(v - var[0]) <= 1e-12, "WRW limit: noise must have equal component variances");
    }
    const double a = w->weight_exponent;
    require(a > -1.0, "WRW limit: weight exponent must exceed -1");
    return LimitProcess(OU{(1.0 + 2.0 * a) / (2.0 + 2.0 * a), std::sqrt(var[0]), var.size()});
  }
  if (m.as<PBA>() || m.as<OverPBA>()) {
    const auto c = m.bandit_limit();
    return LimitProcess(LinearJumpPDMP{c[0], c[1], c[2], c[3]});
  }
  if (auto* d = m.as<DSES>()) return LimitProcess(Diffusion{d->drift, d->diffusion, 1e-2, d->dim});
  if (auto* f = m.as<LLRWFinite>()) return LimitProcess(SubordinatedChain{f->R});
  if (auto* t = m.as<JumpDiffToy>()) return LimitProcess(JumpDiffusion{0.5, std::sqrt(t->F.variance()[0]), t->G});
  throw ValidationError("limit_of: no built-in limit for " + m.kind());
}

// ---------------------------------------------------------------- semigroup

struct Estimate {
  double value = 0.0;
  double se = 0.0;
};

/// Monte Carlo P_t f(x). Sample i always uses stream (seed, i), so two calls
/// with the same seed and different x share their noise.
inline Estimate semigroup_estimate(const LimitProcess& proc, const TestFunction& f, const State& x,
                                   double t, std::uint64_t n_mc, std::uint64_t seed,
                                   std::optional<double> envelope = std::nullopt) {
  require(n_mc >= 2, "semigroup_estimate: need at least two samples");
  double mean = 0.0, m2 = 0.0;
  for (std::uint64_t i = 0; i < n_mc; ++i) {
    Rng rng = Rng::stream(seed, i);
    const double v = f(transition(proc, x, t, rng, envelope)[0]);
    const double delta = v - mean;
    mean += delta / static_cast<double>(i + 1);
    m2 += delta * (v - mean);
  }
  const double var = m2 / static_cast<double>(n_mc - 1);
  return {mean, std::sqrt(var / static_cast<double>(n_mc))};
}

/// Bound on ||(P_t f)^{(n)}|| for the linear PDMP: sum_k (2|d|/b)^{n-k} ||f^{(k)}||
/// for b > 0, sum_k n!/k! (2|d|T)^{n-k} ||f^{(k)}|| for b = 0.
inline double pdmp_derivative_bound(const LinearJumpPDMP& p, const TestFunction& f, int order, double T) {
  require(order >= 1 && order <= 3, "derivative bound: order must be 1..3");
  double s = 0.0;
  for (int k = 0; k <= order; ++k) {
    double factor;
    if (p.b > 0.0) {
      factor = std::pow(2.0 * std::abs(p.d) / p.b, order - k);
    } else {
      double ratio = 1.0;
      for (int j = k + 1; j <= order; ++j) ratio *= j;
      factor = ratio * std::pow(2.0 * std::abs(p.d) * T, order - k);
    }
    s += factor * f.sup_norms()[k];
  }
  return s;
}

struct DerivativeRow {
  double x = 0.0;
  double h = 0.0;
  double estimate = 0.0;
  double se = 0.0;
  bool forward = false;
};

struct DerivativeReport {
  int order = 1;
  double t = 0.0;
  double bound = 0.0;
  double max_abs = 0.0;
  double se_at_max = 0.0;
  bool pass = false;
  std::vector<DerivativeRow> rows;
  std::vector<std::string> warnings;
};

/// Finite differences of the semigroup under common random numbers, compared
/// with the analytic derivative bound. PASS if every |estimate| <= bound + 5 SE.
inline DerivativeReport semigroup_derivative_check(const LinearJumpPDMP& p, const TestFunction& f,
                                                   int order, double t, const std::vector<double>& x_grid,
                                                   std::uint64_t n_mc, std::uint64_t seed) {
  require(order >= 1 && order <= 3, "derivative check: order must be 1..3");
  require(!x_grid.empty(), "derivative check: empty grid");
  require(f.bounded(), "derivative check: f needs finite sup norms");
  const LimitProcess proc(p);
  DerivativeReport rep;
  rep.order = order;
  rep.t = t;
  rep.bound = pdmp_derivative_bound(p, f, order, t);

  static constexpr double central[3][5] = {
      {0, -0.5, 0, 0.5, 0}, {0, 1, -2, 1, 0}, {-0.5, 1, 0, -1, 0.5}};
  static constexpr double forward[3][4] = {{-1, 1, 0, 0}, {1, -2, 1, 0}, {-1, 3, -3, 1}};

  double envelope = 0.0;
  for (double x : x_grid) envelope = std::max(envelope, x);

  for (double x : x_grid) {
    require(x >= 0.0, "derivative check: grid points must be non-negative");
    const Estimate base = semigroup_estimate(proc, f, {x}, t, n_mc, seed);
    double h = std::max(1e-3, 10.0 * std::sqrt(base.se));
    h = std::min(h, 0.25);
    if (h > 1e-3) rep.warnings.push_back("x = " + std::to_string(x) + ": step widened to " +
                                         std::to_string(h) + " against MC noise");
    DerivativeRow row{x, h, 0.0, 0.0, false};
    const int reach = order == 3 ? 2 : 1;
    row.forward = x - reach * h < 0.0;
    const double top = envelope + 3.0 * h + 1.0;

    double mean = 0.0, m2 = 0.0;
    for (std::uint64_t i = 0; i < n_mc; ++i) {
      double v = 0.0;
      if (row.forward) {
        for (int j = 0; j <= order; ++j) {
          Rng rng = Rng::stream(seed, i);
          v += forward[order - 1][j] * f(pdmp_simulate(p, x + j * h, t, rng, top));
        }
      } else {
        for (int j = -2; j <= 2; ++j) {
          const double w = central[order - 1][j + 2];
          if (w == 0.0) continue;
          Rng rng = Rng::stream(seed, i);
          v += w * f(pdmp_simulate(p, x + j * h, t, rng, top));
        }
      }
      v /= std::pow(h, order);
      const double delta = v - mean;
      mean += delta / static_cast<double>(i + 1);
      m2 += delta * (v - mean);
    }
    row.estimate = mean;
    row.se = std::sqrt(m2 / static_cast<double>(n_mc - 1) / static_cast<double>(n_mc));
    rep.rows.push_back(row);
  }
  rep.pass = true;
  for (const auto& r : rep.rows) {
    if (std::abs(r.estimate) > rep.max_abs) {
      rep.max_abs = std::abs(r.estimate);
      rep.se_at_max = r.se;
    }
    if (std::abs(r.estimate) > rep.bound + 5.0 * r.se) rep.pass = false;
  }
  return rep;
}

}  // namespace aptlab
