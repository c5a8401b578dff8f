#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <functional>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "aptlab/errors.hpp"
#include "aptlab/noise.hpp"
#include "aptlab/quadrature.hpp"
#include "aptlab/rng.hpp"
#include "aptlab/schedule.hpp"

namespace aptlab {

using State = std::vector<double>;
using ScalarFn = std::function<double(double)>;

struct Outcome {
  State next;
  double prob;
};

/// Weighted random walk: x_{n+1} = x_n + gamma_{n+1}(E_{n+1} - x_n) with
/// weights omega_n = n^a, observed as y_n = x_n gamma_n^{-1/2}.
struct WRW {
  NoiseSpec noise = NoiseSpec::plus_minus_one();
  double weight_exponent = 0.0;
};

/// Strategy form: p1 = s pA, p0 = (1-s) pB, pt1 = (1-s)(1-pB), pt0 = s(1-pA).
struct PBAStrategy {
  ScalarFn s = [](double x) { return x; };
  ScalarFn s_prime = [](double) { return 1.0; };
  double pA = 0.7;
  double pB = 0.4;
};

/// General form: four non-negative functions of x summing to one.
struct PBAFunctions {
  ScalarFn p1, p0, pt1, pt0;
  std::optional<double> p0_prime_at_1;
};

struct Truncation {
  std::uint64_t l = 1;
  double delta = 1.0;
};

/// Penalized two-armed bandit; state y_n = (1 - x_n)/gamma_n.
struct PBA {
  std::variant<PBAStrategy, PBAFunctions> law = PBAStrategy{};
  std::optional<Truncation> truncation;
};

/// Over-penalized bandit with six outcomes.
struct OverPBA {
  double pA = 0.7;
  double pB = 0.4;
  double sigma = 0.5;
};

/// Decreasing-step Euler scheme y + gamma b(y) + sqrt(gamma) sigma(y) E,
/// with b and sigma acting component-wise.
struct DSES {
  std::size_t dim = 1;
  ScalarFn drift = [](double y) { return -y; };
  ScalarFn diffusion = [](double) { return 1.0; };
  NoiseSpec noise = NoiseSpec::standard_normal();
};

/// Lazier and lazier random walk on {0..K-1}: jump by R with probability gamma_{n+1}.
struct LLRWFinite {
  Eigen::MatrixXd R;
};

/// Lazier and lazier random walk on R^D: y + Z, Z ~ Q(y), with probability gamma_{n+1}.
struct LLRWJumps {
  std::size_t dim = 1;
  std::function<NoiseSpec(const State&)> Q;
};

/// Random walk with rare large increments: E = F, or G gamma^{-1/2} with
/// probability gamma_{n+1}. Converges to OU plus rate-one jumps of law G.
struct JumpDiffToy {
  NoiseSpec F = NoiseSpec::plus_minus_one();
  NoiseSpec G = NoiseSpec::plus_minus_one();
};

using ChainVariant = std::variant<WRW, PBA, OverPBA, DSES, LLRWFinite, LLRWJumps, JumpDiffToy>;

struct PBAHypotheses {
  bool p0_vanishes_at_1 = false;
  bool pt1_vanishes_at_1 = false;
  bool p0_slope_nonpositive = false;
  bool drift_positive = false;  // p1(1) + p0'(1) > 0
  bool pt1_positive_at_0 = false;
  bool all() const {
    return p0_vanishes_at_1 && pt1_vanishes_at_1 && p0_slope_nonpositive && drift_positive &&
           pt1_positive_at_0;
  }
};

class ChainModel {
 public:
  ChainModel(ChainVariant v, StepSchedule schedule) : v_(std::move(v)), sched_(std::move(schedule)) {
    validate();
  }

  static ChainModel wrw(NoiseSpec noise, double weight_exponent = 0.0) {
    StepSchedule s(WeightedSteps{weight_exponent});
    return ChainModel(WRW{std::move(noise), weight_exponent}, s);
  }
  static ChainModel pba(PBA p, StepSchedule s = StepSchedule(PowerLog{1.0, 0.5, 0.0})) {
    return ChainModel(std::move(p), std::move(s));
  }
  static ChainModel llrw(Eigen::MatrixXd R, StepSchedule s) {
    return ChainModel(LLRWFinite{std::move(R)}, std::move(s));
  }
  static ChainModel jump_toy(NoiseSpec F, NoiseSpec G) {
    return ChainModel(JumpDiffToy{std::move(F), std::move(G)}, StepSchedule(PowerLog{1.0, 1.0, 0.0}));
  }

  const ChainVariant& variant() const { return v_; }
  const StepSchedule& schedule() const { return sched_; }
  template <class T>
  const T* as() const {
    return std::get_if<T>(&v_);
  }

  std::string kind() const {
    static const char* names[] = {"wrw", "pba", "overpba", "dses", "llrw", "llrw-jumps", "jump-toy"};
    return names[v_.index()];
  }

  std::size_t dim() const {
    if (auto* w = as<WRW>()) return w->noise.dim();
    if (auto* d = as<DSES>()) return d->dim;
    if (auto* q = as<LLRWJumps>()) return q->dim;
    return 1;
  }

  /// Natural coordinates -> rescaled state at index n (gamma_0 = 1).
  State rescale(const State& x, std::uint64_t n) const {
    const double g = sched_.gamma_or_one(n);
    State y = x;
    if (as<WRW>()) {
      for (double& v : y) v /= std::sqrt(g);
    } else if (as<PBA>() || as<OverPBA>()) {
      y[0] = (1.0 - x[0]) / g;
    }
    return y;
  }
  State unscale(const State& y, std::uint64_t n) const {
    const double g = sched_.gamma_or_one(n);
    State x = y;
    if (as<WRW>()) {
      for (double& v : x) v *= std::sqrt(g);
    } else if (as<PBA>() || as<OverPBA>()) {
      x[0] = 1.0 - g * y[0];
    }
    return x;
  }

  /// Default rescaled start: x0 = 1/2 for bandits, 0 for walks and schemes,
  /// a uniform state for finite chains (drawn from rng).
  State default_initial(Rng& rng) const {
    if (as<PBA>() || as<OverPBA>()) return {0.5};
    if (auto* f = as<LLRWFinite>()) {
      const auto k = static_cast<std::uint64_t>(f->R.rows());
      return {static_cast<double>(std::min<std::uint64_t>(k - 1, static_cast<std::uint64_t>(rng.uniform() * k)))};
    }
    return State(dim(), 0.0);
  }

  bool finite_support() const {
    if (auto* w = as<WRW>()) return w->noise.finite();
    if (auto* d = as<DSES>()) return d->noise.finite();
    if (auto* t = as<JumpDiffToy>()) return t->F.finite() && t->G.finite();
    return !as<LLRWJumps>();
  }

  /// One draw from K_n(y, .) in rescaled coordinates.
  State step(const State& y, std::uint64_t n, Rng& rng) const {
    State out = y;
    advance(out, n, sched_.gamma_or_one(n), sched_.gamma_at(n + 1), rng);
    return out;
  }

  /// In-place step from index n to n+1 given gamma_n and gamma_{n+1}.
  void advance(State& y, std::uint64_t n, double g0, double g1, Rng& rng) const {
    std::visit([&](const auto& m) { advance_impl(m, y, n, g0, g1, rng); }, v_);
  }

  /// Advances y from index n0 to n1 using a gamma table covering n1.
  void run(State& y, std::uint64_t n0, std::uint64_t n1, Rng& rng,
           const std::vector<double>& gamma) const {
    if (n1 >= gamma.size()) throw ValidationError("run: gamma table too short");
    std::visit(
        [&](const auto& m) {
          for (std::uint64_t n = n0; n < n1; ++n) advance_impl(m, y, n, gamma[n], gamma[n + 1], rng);
        },
        v_);
  }

  /// Full atomic law of the next rescaled state.
  std::vector<Outcome> support(const State& y, std::uint64_t n) const {
    if (!finite_support()) {
      throw ValidationError("support: " + kind() +
                            " has no finite support; use quadrature-based expectations");
    }
    const double g0 = sched_.gamma_or_one(n), g1 = sched_.gamma_at(n + 1);
    std::vector<Outcome> out;
    std::visit([&](const auto& m) { support_impl(m, y, n, g0, g1, out); }, v_);
    return out;
  }

  /// E[g(y_{n+1}) | y_n = y]; exact sum over atoms, Gauss-Hermite otherwise.
  double expect(const State& y, std::uint64_t n, const std::function<double(const State&)>& g,
                int nodes = 64) const {
    if (finite_support()) {
      double s = 0.0;
      for (const auto& o : support(y, n)) s += o.prob * g(o.next);
      return s;
    }
    const double g0 = sched_.gamma_or_one(n), g1 = sched_.gamma_at(n + 1);
    if (auto* w = as<WRW>()) {
      return gauss_expect(w->noise.gaussian(), nodes, [&](const double* e) {
        State z = y;
        wrw_update(z, e, g0, g1);
        return g(z);
      });
    }
    if (auto* d = as<DSES>()) {
      return gauss_expect(d->noise.gaussian(), nodes, [&](const double* e) {
        State z = y;
        dses_update(*d, z, e, g1);
        return g(z);
      });
    }
    if (auto* q = as<LLRWJumps>()) {
      check_probability(g1);
      const NoiseSpec Q = q->Q(y);
      double jump;
      if (Q.finite()) {
        jump = 0.0;
        for (const auto& a : Q.atoms().atoms) jump += a.prob * g(shifted(y, a.value.data()));
      } else {
        jump = gauss_expect(Q.gaussian(), nodes, [&](const double* z) { return g(shifted(y, z)); });
      }
      return (1.0 - g1) * g(y) + g1 * jump;
    }
    const auto& t = std::get<JumpDiffToy>(v_);
    auto part = [&](const NoiseSpec& ns, bool jump) {
      auto h = [&](const double* e) {
        State z = y;
        toy_update(z, e[0], jump, g0, g1);
        return g(z);
      };
      if (ns.finite()) {
        double s = 0.0;
        for (const auto& a : ns.atoms().atoms) s += a.prob * h(a.value.data());
        return s;
      }
      return gauss_expect(ns.gaussian(), nodes, h);
    };
    return (1.0 - g1) * part(t.F, false) + g1 * part(t.G, true);
  }

  /// PBA/OverPBA limit coefficients (a, b, c, d) of (a - b y) f' + (c + d y)[f(y+1) - f(y)].
  std::array<double, 4> bandit_limit() const {
    if (auto* o = as<OverPBA>()) return {1.0 - o->sigma * o->pA, o->pA, 0.0, o->pB};
    const auto& p = std::get<PBA>(v_);
    return {pba_probs(p, 1.0)[3], pba_probs(p, 1.0)[0], 0.0, -p0_prime_at_1(p)};
  }

  PBAHypotheses pba_hypotheses() const {
    const auto& p = std::get<PBA>(v_);
    const auto one = pba_probs(p, 1.0), zero = pba_probs(p, 0.0);
    PBAHypotheses h;
    h.p0_vanishes_at_1 = std::abs(one[1]) <= 1e-12;
    h.pt1_vanishes_at_1 = std::abs(one[2]) <= 1e-12;
    h.p0_slope_nonpositive = p0_prime_at_1(p) <= 1e-12;
    h.drift_positive = one[0] + p0_prime_at_1(p) > 0.0;
    h.pt1_positive_at_0 = zero[2] > 0.0;
    return h;
  }

  /// (p1, p0, pt1, pt0) at x, validated.
  static std::array<double, 4> pba_probs(const PBA& p, double x) {
    std::array<double, 4> q;
    if (auto* s = std::get_if<PBAStrategy>(&p.law)) {
      const double sx = s->s(x);
      if (!(sx >= -1e-12 && sx <= 1.0 + 1e-12)) throw ModelError("PBA: s(x) outside [0,1]");
      q = {sx * s->pA, (1.0 - sx) * s->pB, (1.0 - sx) * (1.0 - s->pB), sx * (1.0 - s->pA)};
    } else {
      const auto& f = std::get<PBAFunctions>(p.law);
      q = {f.p1(x), f.p0(x), f.pt1(x), f.pt0(x)};
    }
    double sum = 0.0;
    for (double v : q) {
      if (!(v >= -1e-12 && v <= 1.0 + 1e-12)) {
        throw ModelError("PBA: outcome probability outside [0,1] at x = " + std::to_string(x));
      }
      sum += v;
    }
    if (std::abs(sum - 1.0) > 1e-12) {
      throw ModelError("PBA: outcome probabilities sum to " + std::to_string(sum) + " at x = " +
                       std::to_string(x));
    }
    return q;
  }

  static double p0_prime_at_1(const PBA& p) {
    if (auto* s = std::get_if<PBAStrategy>(&p.law)) return -s->s_prime(1.0) * s->pB;
    const auto& f = std::get<PBAFunctions>(p.law);
    if (f.p0_prime_at_1) return *f.p0_prime_at_1;
    const double h = 1e-4;  // second-order one-sided difference
    return (3.0 * f.p0(1.0) - 4.0 * f.p0(1.0 - h) + f.p0(1.0 - 2.0 * h)) / (2.0 * h);
  }

 private:
  void validate() const {
    if (auto* w = as<WRW>()) {
      require(w->noise.centered(), "WRW: noise must be centered");
    } else if (auto* p = as<PBA>()) {
      if (auto* s = std::get_if<PBAStrategy>(&p->law)) {
        require(s->pA >= 0 && s->pA <= 1 && s->pB >= 0 && s->pB <= 1, "PBA: pA, pB must lie in [0,1]");
        require(static_cast<bool>(s->s) && static_cast<bool>(s->s_prime), "PBA: strategy needs s and s'");
      } else {
        const auto& f = std::get<PBAFunctions>(p->law);
        require(f.p1 && f.p0 && f.pt1 && f.pt0, "PBA: all four outcome functions are required");
      }
      for (int i = 0; i <= 20; ++i) pba_probs(*p, i / 20.0);
      if (p->truncation) {
        require(p->truncation->l >= 1, "PBA truncation: l must be >= 1");
        require(p->truncation->delta > 0.0 && p->truncation->delta <= 1.0,
                "PBA truncation: delta must lie in (0,1]");
      }
    } else if (auto* o = as<OverPBA>()) {
      require(o->pA >= 0 && o->pA <= 1 && o->pB >= 0 && o->pB <= 1 && o->sigma >= 0 && o->sigma <= 1,
              "OverPBA: pA, pB, sigma must lie in [0,1]");
    } else if (auto* d = as<DSES>()) {
      require(d->dim >= 1 && d->noise.dim() == d->dim, "DSES: noise dimension must match dim");
      require(d->drift && d->diffusion, "DSES: drift and diffusion are required");
    } else if (auto* f = as<LLRWFinite>()) {
      require(f->R.rows() >= 1 && f->R.rows() == f->R.cols(), "LLRW: R must be square");
      for (Eigen::Index i = 0; i < f->R.rows(); ++i) {
        require((f->R.row(i).array() >= 0.0).all(), "LLRW: R must be non-negative");
        require(std::abs(f->R.row(i).sum() - 1.0) <= 1e-12, "LLRW: R rows must sum to 1");
      }
    } else if (auto* q = as<LLRWJumps>()) {
      require(static_cast<bool>(q->Q), "LLRW: jump law Q is required");
    } else if (auto* t = as<JumpDiffToy>()) {
      require(t->F.centered(), "jump toy: F must be centered");
      require(t->F.dim() == 1 && t->G.dim() == 1, "jump toy: F and G must be scalar");
    }
  }

  static void check_probability(double g1) {
    if (g1 > 1.0) throw ModelError("LLRW: gamma_{n+1} > 1 is not a jump probability");
  }

  static State shifted(const State& y, const double* z) {
    State out = y;
    for (std::size_t k = 0; k < out.size(); ++k) out[k] += z[k];
    return out;
  }

  template <class G>
  static double gauss_expect(const Gaussian& g, int nodes, G&& h) {
    const auto& rule = normal_rule(nodes);
    const std::size_t d = g.mean.size();
    if (d == 1) {
      double s = 0.0, e;
      for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
        e = g.mean[0] + std::sqrt(g.variance[0]) * rule.nodes[i];
        s += rule.weights[i] * h(&e);
      }
      return s;
    }
    if (d == 2) {
      double s = 0.0, e[2];
      for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
        e[0] = g.mean[0] + std::sqrt(g.variance[0]) * rule.nodes[i];
        for (std::size_t j = 0; j < rule.nodes.size(); ++j) {
          e[1] = g.mean[1] + std::sqrt(g.variance[1]) * rule.nodes[j];
          s += rule.weights[i] * rule.weights[j] * h(e);
        }
      }
      return s;
    }
    throw ValidationError("quadrature expectations support noise dimension <= 2");
  }

  static void wrw_update(State& y, const double* e, double g0, double g1) {
    const double a = std::sqrt(g0 / g1), b = std::sqrt(g1), c = std::sqrt(g0);
    for (std::size_t k = 0; k < y.size(); ++k) y[k] = a * y[k] + b * (e[k] - c * y[k]);
  }

  static void dses_update(const DSES& d, State& y, const double* e, double g1) {
    const double r = std::sqrt(g1);
    for (std::size_t k = 0; k < y.size(); ++k) y[k] = y[k] + g1 * d.drift(y[k]) + r * d.diffusion(y[k]) * e[k];
  }

  // jump = true: the increment of y is exactly e (the large-noise branch).
  static void toy_update(State& y, double e, bool jump, double g0, double g1) {
    const double a = std::sqrt(g0 / g1), b = std::sqrt(g1), c = std::sqrt(g0);
    y[0] = jump ? a * y[0] - b * c * y[0] + e : a * y[0] + b * (e - c * y[0]);
  }

  // Outcome codes for the bandit update: 1, 0, or 2 meaning "stays at x".
  static double bandit_next(double y, int X, int Xt, double g0, double g1) {
    auto delta = [&](int v) { return v == 1 ? g0 * y : v == 0 ? -(1.0 - g0 * y) : 0.0; };
    return (g0 / g1) * y - delta(X) - g1 * delta(Xt);
  }

  static double bandit_x(double y, double g0) {
    const double x = 1.0 - g0 * y;
    if (x < -1e-9 || x > 1.0 + 1e-9) {
      throw ModelError("bandit: state y = " + std::to_string(y) + " maps outside x in [0,1]");
    }
    return std::clamp(x, 0.0, 1.0);
  }

  static double cap(const PBA& p, double y, std::uint64_t n, double g1) {
    if (p.truncation && n + 1 > p.truncation->l) return std::min(y, p.truncation->delta / g1);
    return y;
  }

  static std::array<std::pair<double, double>, 4> pba_atoms(const PBA& p, double y, std::uint64_t n,
                                                            double g0, double g1) {
    const auto q = pba_probs(p, bandit_x(y, g0));
    static constexpr int codes[4][2] = {{1, 2}, {0, 2}, {2, 1}, {2, 0}};
    std::array<std::pair<double, double>, 4> out;
    for (int i = 0; i < 4; ++i) {
      out[i] = {cap(p, bandit_next(y, codes[i][0], codes[i][1], g0, g1), n, g1), q[i]};
    }
    return out;
  }

  static std::array<std::pair<double, double>, 6> overpba_atoms(const OverPBA& o, double y, double g0,
                                                                double g1) {
    const double x = bandit_x(y, g0);
    const double p[6] = {o.pA * x * o.sigma,         o.pB * (1 - x) * o.sigma,
                         o.pA * x * (1 - o.sigma),   o.pB * (1 - x) * (1 - o.sigma),
                         (1 - o.pB) * (1 - x),       (1 - o.pA) * x};
    static constexpr int codes[6][2] = {{1, 2}, {0, 2}, {1, 0}, {0, 1}, {2, 1}, {2, 0}};
    std::array<std::pair<double, double>, 6> out;
    for (int i = 0; i < 6; ++i) out[i] = {bandit_next(y, codes[i][0], codes[i][1], g0, g1), p[i]};
    return out;
  }

  template <class Atoms>
  static double pick(const Atoms& atoms, Rng& rng) {
    const double u = rng.uniform();
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < atoms.size(); ++i) {
      acc += atoms[i].second;
      if (u < acc) return atoms[i].first;
    }
    return atoms.back().first;
  }

  // --- per-variant sampling ---
  void advance_impl(const WRW& w, State& y, std::uint64_t, double g0, double g1, Rng& rng) const {
    double e[8];
    double* buf = y.size() <= 8 ? e : nullptr;
    std::vector<double> big;
    if (!buf) {
      big.resize(y.size());
      buf = big.data();
    }
    w.noise.sample(rng, buf);
    wrw_update(y, buf, g0, g1);
  }
  void advance_impl(const PBA& p, State& y, std::uint64_t n, double g0, double g1, Rng& rng) const {
    y[0] = pick(pba_atoms(p, y[0], n, g0, g1), rng);
  }
  void advance_impl(const OverPBA& o, State& y, std::uint64_t, double g0, double g1, Rng& rng) const {
    y[0] = pick(overpba_atoms(o, y[0], g0, g1), rng);
  }
  void advance_impl(const DSES& d, State& y, std::uint64_t, double, double g1, Rng& rng) const {
    const double r = std::sqrt(g1);
    double e[8];
    if (y.size() <= 8) {
      d.noise.sample(rng, e);
      for (std::size_t k = 0; k < y.size(); ++k) y[k] += g1 * d.drift(y[k]) + r * d.diffusion(y[k]) * e[k];
    } else {
      std::vector<double> big(y.size());
      d.noise.sample(rng, big.data());
      dses_update(d, y, big.data(), g1);
    }
  }
  void advance_impl(const LLRWFinite& f, State& y, std::uint64_t, double, double g1, Rng& rng) const {
    check_probability(g1);
    if (rng.uniform() >= g1) return;
    const auto i = static_cast<Eigen::Index>(y[0]);
    const double u = rng.uniform();
    double acc = 0.0;
    const Eigen::Index K = f.R.cols();
    for (Eigen::Index j = 0; j < K; ++j) {
      acc += f.R(i, j);
      if (u < acc || j == K - 1) {
        y[0] = static_cast<double>(j);
        return;
      }
    }
  }
  void advance_impl(const LLRWJumps& q, State& y, std::uint64_t, double, double g1, Rng& rng) const {
    check_probability(g1);
    if (rng.uniform() >= g1) return;
    const NoiseSpec Q = q.Q(y);
    std::vector<double> z(Q.dim());
    Q.sample(rng, z.data());
    for (std::size_t k = 0; k < y.size(); ++k) y[k] += z[k];
  }
  void advance_impl(const JumpDiffToy& t, State& y, std::uint64_t, double g0, double g1, Rng& rng) const {
    const bool jump = rng.uniform() < g1;
    double e;
    (jump ? t.G : t.F).sample(rng, &e);
    toy_update(y, e, jump, g0, g1);
  }

  // --- per-variant enumeration ---
  void support_impl(const WRW& w, const State& y, std::uint64_t, double g0, double g1,
                    std::vector<Outcome>& out) const {
    for (const auto& a : w.noise.atoms().atoms) {
      State z = y;
      wrw_update(z, a.value.data(), g0, g1);
      out.push_back({std::move(z), a.prob});
    }
  }
  void support_impl(const PBA& p, const State& y, std::uint64_t n, double g0, double g1,
                    std::vector<Outcome>& out) const {
    for (const auto& [v, pr] : pba_atoms(p, y[0], n, g0, g1)) out.push_back({{v}, pr});
  }
  void support_impl(const OverPBA& o, const State& y, std::uint64_t, double g0, double g1,
                    std::vector<Outcome>& out) const {
    for (const auto& [v, pr] : overpba_atoms(o, y[0], g0, g1)) out.push_back({{v}, pr});
  }
  void support_impl(const DSES& d, const State& y, std::uint64_t, double, double g1,
                    std::vector<Outcome>& out) const {
    for (const auto& a : d.noise.atoms().atoms) {
      State z = y;
      dses_update(d, z, a.value.data(), g1);
      out.push_back({std::move(z), a.prob});
    }
  }
  void support_impl(const LLRWFinite& f, const State& y, std::uint64_t, double, double g1,
                    std::vector<Outcome>& out) const {
    check_probability(g1);
    const auto i = static_cast<Eigen::Index>(y[0]);
    for (Eigen::Index j = 0; j < f.R.cols(); ++j) {
      if (j != i && f.R(i, j) > 0.0) out.push_back({{static_cast<double>(j)}, g1 * f.R(i, j)});
    }
    out.push_back({y, 1.0 - g1 * (1.0 - f.R(i, i))});
  }
  void support_impl(const LLRWJumps&, const State&, std::uint64_t, double, double,
                    std::vector<Outcome>&) const {}
  void support_impl(const JumpDiffToy& t, const State& y, std::uint64_t, double g0, double g1,
                    std::vector<Outcome>& out) const {
    for (const auto& a : t.F.atoms().atoms) {
      State z = y;
      toy_update(z, a.value[0], false, g0, g1);
      out.push_back({std::move(z), (1.0 - g1) * a.prob});
    }
    for (const auto& a : t.G.atoms().atoms) {
      State z = y;
      toy_update(z, a.value[0], true, g0, g1);
      out.push_back({std::move(z), g1 * a.prob});
    }
  }

  ChainVariant v_;
  StepSchedule sched_;
};

/// Recorded path: states at indices n[i], every stride-th step.
struct ChainPath {
  std::vector<std::uint64_t> n;
  std::vector<State> states;
  StepSchedule schedule;
  std::uint64_t seed = 0;

  void write_csv(const std::string& path) const {
    std::ofstream os(path);
    if (!os) throw ValidationError("cannot open " + path + " for writing");
    os << "# aptlab path v1\n";
    os << "n,tau_n";
    const std::size_t d = states.empty() ? 0 : states.front().size();
    for (std::size_t k = 0; k < d; ++k) os << ",y" << k;
    os << "\n";
    os.precision(17);
    for (std::size_t i = 0; i < n.size(); ++i) {
      os << n[i] << "," << schedule.tau(n[i]);
      for (double v : states[i]) os << "," << v;
      os << "\n";
    }
  }
};

/// Iterates the chain from rescaled state y0 at index 0. Deterministic in seed.
inline ChainPath simulate(const ChainModel& model, const State& y0, std::uint64_t n_steps,
                          std::uint64_t seed, std::uint64_t stride = 1) {
  require(n_steps >= 1, "simulate: n_steps must be >= 1");
  require(stride >= 1, "simulate: stride must be >= 1");
  require(y0.size() == model.dim(), "simulate: initial state has the wrong dimension");
  const auto gamma = model.schedule().gamma_table(n_steps);
  Rng rng = Rng::stream(seed, 0);
  ChainPath path{{}, {}, model.schedule(), seed};
  State y = y0;
  path.n.push_back(0);
  path.states.push_back(y);
  for (std::uint64_t n = 0; n < n_steps; ++n) {
    model.advance(y, n, gamma[n], gamma[n + 1], rng);
    if ((n + 1) % stride == 0 || n + 1 == n_steps) {
      path.n.push_back(n + 1);
      path.states.push_back(y);
    }
  }
  return path;
}

/// The truncated bandit y^{(l,delta)}: equal to the PBA up to index l, then
/// capped at delta/gamma_n.
inline ChainModel truncate_wrap(const ChainModel& model, std::uint64_t l, double delta) {
  const auto* p = model.as<PBA>();
  require(p != nullptr, "truncate_wrap: only the PBA can be truncated");
  PBA q = *p;
  q.truncation = Truncation{l, delta};
  return ChainModel(std::move(q), model.schedule());
}

}  // namespace aptlab
