#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <memory>
#include <mutex>
#include <shared_mutex>
#include <string>
#include <variant>
#include <vector>

#include "aptlab/errors.hpp"

namespace aptlab {

/// gamma_n = A n^{-a} log(n+1)^{-b}
struct PowerLog {
  double A = 1.0;
  double a = 1.0;
  double b = 0.0;

  double operator()(std::uint64_t n) const {
    double v = A * std::pow(static_cast<double>(n), -a);
    if (b != 0.0) v *= std::pow(std::log(static_cast<double>(n) + 1.0), -b);
    return v;
  }
};

/// Stored prefix, then the tail family.
struct ExplicitSteps {
  std::vector<double> values;
  PowerLog tail;
};

/// Steps induced by weights omega_n = n^a: gamma_n = omega_n / sum_{k<=n} omega_k.
struct WeightedSteps {
  double a = 0.0;
};

using ScheduleFamily = std::variant<PowerLog, ExplicitSteps, WeightedSteps>;

namespace detail {

struct KahanSum {
  double sum = 0.0;
  double comp = 0.0;
  void add(double x) {
    const double y = x - comp;
    const double t = sum + y;
    comp = (t - sum) - y;
    sum = t;
  }
};

// Lazily grown prefix tables shared by copies of one schedule.
struct ScheduleCache {
  std::shared_mutex mutex;
  std::vector<double> gamma{1.0};  // gamma[0] is the rescaling convention, never summed
  std::vector<double> tau{0.0};
  KahanSum tau_sum;
  KahanSum weight_sum;
};

}  // namespace detail

/// The step sequence (gamma_n)_{n>=1} with partial sums tau_n and the
/// inverse clock m(t). Immutable apart from the prefix cache, which is safe
/// to extend under concurrent readers.
class StepSchedule {
 public:
  /// Largest index the prefix cache may reach (about 1 GiB of tables).
  static constexpr std::uint64_t kMaxCache = std::uint64_t{1} << 26;

  StepSchedule() : StepSchedule(PowerLog{}) {}

  explicit StepSchedule(ScheduleFamily family, std::uint64_t cache_len = 1024)
      : family_(std::move(family)), cache_(std::make_shared<detail::ScheduleCache>()) {
    validate();
    extend(std::min<std::uint64_t>(cache_len, kMaxCache));
  }

  const ScheduleFamily& family() const { return family_; }

  double gamma_at(std::uint64_t n) const {
    require(n >= 1, "gamma_at: the step sequence starts at n = 1");
    if (const auto* p = std::get_if<PowerLog>(&family_)) return (*p)(n);
    if (const auto* e = std::get_if<ExplicitSteps>(&family_)) {
      return n <= e->values.size() ? e->values[n - 1] : e->tail(n);
    }
    return cached(n, &detail::ScheduleCache::gamma);
  }

  /// gamma_n with the convention gamma_0 = 1, used only to rescale initial states.
  double gamma_or_one(std::uint64_t n) const { return n == 0 ? 1.0 : gamma_at(n); }

  double tau(std::uint64_t n) const { return cached(n, &detail::ScheduleCache::tau); }

  /// m(t) = sup{n : tau_n <= t}.
  std::uint64_t m_of_t(double t) const {
    require(t >= 0.0, "m_of_t: t must be non-negative");
    {
      std::shared_lock lock(cache_->mutex);
      const auto& tau = cache_->tau;
      if (tau.back() > t) return search(tau, t);
    }
    std::unique_lock lock(cache_->mutex);
    while (cache_->tau.back() <= t) {
      const std::uint64_t len = cache_->tau.size();
      if (len > kMaxCache) {
        throw NumericalError("m_of_t: t = " + std::to_string(t) +
                             " needs more than 2^26 steps of this schedule");
      }
      extend_locked(std::min<std::uint64_t>(2 * len, kMaxCache + 1));
    }
    return search(cache_->tau, t);
  }

  /// gamma_0..gamma_n as a flat table (gamma_0 = 1) for tight simulation loops.
  std::vector<double> gamma_table(std::uint64_t n) const {
    std::vector<double> out(n + 1);
    out[0] = 1.0;
    if (std::holds_alternative<WeightedSteps>(family_)) {
      ensure(n);
      std::shared_lock lock(cache_->mutex);
      std::copy(cache_->gamma.begin(), cache_->gamma.begin() + static_cast<std::ptrdiff_t>(n + 1),
                out.begin());
      out[0] = 1.0;
      return out;
    }
    for (std::uint64_t k = 1; k <= n; ++k) out[k] = gamma_at(k);
    return out;
  }

  /// Asymptotically equivalent PowerLog, when one exists.
  PowerLog asymptotic_powerlog() const {
    if (const auto* p = std::get_if<PowerLog>(&family_)) return *p;
    if (const auto* e = std::get_if<ExplicitSteps>(&family_)) return e->tail;
    const double a = std::get<WeightedSteps>(family_).a;
    if (a > -1.0) return PowerLog{1.0 + a, 1.0, 0.0};
    return PowerLog{1.0, 1.0, 1.0};  // omega_n = 1/n gives gamma_n ~ 1/(n log n)
  }

 private:
  void validate() const {
    if (const auto* p = std::get_if<PowerLog>(&family_)) {
      validate_powerlog(*p);
    } else if (const auto* e = std::get_if<ExplicitSteps>(&family_)) {
      validate_powerlog(e->tail);
      double prev = std::numeric_limits<double>::infinity();
      for (double v : e->values) {
        require(std::isfinite(v) && v > 0.0, "explicit schedule: steps must be positive");
        require(v <= prev, "explicit schedule: steps must be non-increasing");
        prev = v;
      }
      if (!e->values.empty()) {
        require(e->tail(e->values.size() + 1) <= e->values.back(),
                "explicit schedule: tail must not exceed the last stored step");
      }
    } else {
      const double a = std::get<WeightedSteps>(family_).a;
      require(std::isfinite(a) && a >= -1.0, "weighted schedule: exponent must be >= -1");
    }
  }

  static void validate_powerlog(const PowerLog& p) {
    require(std::isfinite(p.A) && p.A > 0.0, "schedule: A must be positive");
    require(p.a >= 0.0 && p.b >= 0.0, "schedule: exponents a, b must be non-negative");
    require(p.a <= 1.0,
            "schedule: a > 1 makes sum gamma_n finite; the step sums must diverge");
  }

  static std::uint64_t search(const std::vector<double>& tau, double t) {
    const auto it = std::upper_bound(tau.begin(), tau.end(), t);
    return static_cast<std::uint64_t>(it - tau.begin()) - 1;
  }

  double cached(std::uint64_t n, std::vector<double> detail::ScheduleCache::*table) const {
    ensure(n);
    std::shared_lock lock(cache_->mutex);
    return ((*cache_).*table)[n];
  }

  void ensure(std::uint64_t n) const {
    {
      std::shared_lock lock(cache_->mutex);
      if (cache_->tau.size() > n) return;
    }
    if (n > kMaxCache) throw NumericalError("schedule: index beyond the prefix cache limit");
    std::unique_lock lock(cache_->mutex);
    std::uint64_t target = std::max<std::uint64_t>(n + 1, 2 * cache_->tau.size());
    extend_locked(std::min<std::uint64_t>(target, kMaxCache + 1));
  }

  void extend(std::uint64_t len) const {
    std::unique_lock lock(cache_->mutex);
    extend_locked(len);
  }

  void extend_locked(std::uint64_t len) const {
    auto& c = *cache_;
    const auto* w = std::get_if<WeightedSteps>(&family_);
    c.gamma.reserve(len);
    c.tau.reserve(len);
    for (std::uint64_t n = c.tau.size(); n < len; ++n) {
      double g;
      if (w) {
        const double omega = std::pow(static_cast<double>(n), w->a);
        c.weight_sum.add(omega);
        g = omega / c.weight_sum.sum;
      } else {
        g = gamma_at(n);
      }
      c.gamma.push_back(g);
      c.tau_sum.add(g);
      c.tau.push_back(c.tau_sum.sum);
    }
  }

  ScheduleFamily family_;
  std::shared_ptr<detail::ScheduleCache> cache_;
};

/// The error-rate sequence epsilon_n. Zero is allowed.
struct ZeroRate {};
using RateFamily = std::variant<PowerLog, ExplicitSteps, ZeroRate>;

class RateSequence {
 public:
  RateSequence() : family_(ZeroRate{}) {}
  explicit RateSequence(RateFamily family) : family_(std::move(family)) {
    if (const auto* p = std::get_if<PowerLog>(&family_)) {
      require(p->A > 0.0 && p->a >= 0.0 && p->b >= 0.0, "rate sequence: invalid PowerLog");
    } else if (const auto* e = std::get_if<ExplicitSteps>(&family_)) {
      double prev = std::numeric_limits<double>::infinity();
      for (double v : e->values) {
        require(v >= 0.0 && v <= prev, "rate sequence: values must be non-increasing and >= 0");
        prev = v;
      }
    }
  }

  static RateSequence same_as(const StepSchedule& gamma) {
    const auto& f = gamma.family();
    if (const auto* p = std::get_if<PowerLog>(&f)) return RateSequence(*p);
    if (const auto* e = std::get_if<ExplicitSteps>(&f)) return RateSequence(*e);
    return RateSequence(gamma.asymptotic_powerlog());
  }

  const RateFamily& family() const { return family_; }
  bool is_zero() const { return std::holds_alternative<ZeroRate>(family_); }

  double at(std::uint64_t n) const {
    if (const auto* p = std::get_if<PowerLog>(&family_)) return (*p)(n);
    if (const auto* e = std::get_if<ExplicitSteps>(&family_)) {
      return n <= e->values.size() ? e->values[n - 1] : e->tail(n);
    }
    return 0.0;
  }

 private:
  RateFamily family_;
};

/// lambda(gamma, eps) from the power-log table. Throws on regimes the table
/// does not cover.
inline double lambda_closed_form(const StepSchedule& gamma, const RateSequence& eps) {
  const PowerLog g = gamma.asymptotic_powerlog();
  if (g.a < 1.0) return 0.0;
  require(g.b <= 1.0, "lambda_closed_form: unsupported regime a = 1 with b > 1");

  double c, d;
  if (eps.is_zero()) {
    c = g.a;
    d = g.b;
  } else {
    const auto& f = eps.family();
    const PowerLog e = std::holds_alternative<PowerLog>(f) ? std::get<PowerLog>(f)
                                                           : std::get<ExplicitSteps>(f).tail;
    c = e.a;
    d = e.b;
  }

  if (g.b == 0.0) {
    if (d > 0.0 && c < 1.0) {
      throw ValidationError("lambda_closed_form: unsupported regime c < 1 with d > 0");
    }
    return std::min(c, 1.0) / g.A;
  }
  if (c <= 0.0) throw ValidationError("lambda_closed_form: unsupported regime a = 1, b > 0, c = 0");
  return std::numeric_limits<double>::infinity();
}

/// Finite-n surrogate of the limsup: max of -log(gamma_n v eps_n)/tau_n over
/// the last decade n in [n_max/10, n_max]. An estimate, not the limit.
inline double lambda_estimate(const StepSchedule& gamma, const RateSequence& eps,
                              std::uint64_t n_max) {
  require(n_max >= 1000, "lambda_estimate: n_max must be at least 1000");
  gamma.tau(n_max);
  double best = -std::numeric_limits<double>::infinity();
  for (std::uint64_t n = n_max / 10; n <= n_max; ++n) {
    const double v = std::max(gamma.gamma_at(n), eps.at(n));
    best = std::max(best, -std::log(v) / gamma.tau(n));
  }
  return best;
}

}  // namespace aptlab
