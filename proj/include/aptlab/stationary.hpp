#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "aptlab/errors.hpp"
#include "aptlab/limit_processes.hpp"
#include "aptlab/measure_kit.hpp"
#include "aptlab/parallel.hpp"
#include "aptlab/rng.hpp"
#include "aptlab/schedule.hpp"
#include "aptlab/stats.hpp"

namespace aptlab {

// ---------------------------------------------------------------- Gaussian

/// Centered Gaussian with the same variance in every component.
struct GaussianLaw {
  double variance = 1.0;
  std::size_t dim = 1;

  double sd() const { return std::sqrt(variance); }
  State sample(Rng& rng) const {
    State y(dim);
    for (auto& v : y) v = sd() * rng.normal();
    return y;
  }
  double sample_scalar(Rng& rng) const { return sd() * rng.normal(); }
  double density(double y) const {
    return std::exp(-0.5 * y * y / variance) / std::sqrt(2.0 * std::numbers::pi * variance);
  }
  double cdf(double y) const { return stats::normal_cdf(y / sd()); }
  /// E[Y^k] of one component.
  double moment(int k) const {
    if (k < 0) throw ValidationError("moment order must be non-negative");
    if (k % 2) return 0.0;
    double m = 1.0;
    for (int j = k - 1; j > 0; j -= 2) m *= j * variance;
    return m;
  }
};

/// N(0, sigma^2/(2l)) per component.
inline GaussianLaw ou_stationary(double l, double sigma, std::size_t dim = 1) {
  require(l > 0.0, "ou_stationary: needs l > 0");
  require(sigma >= 0.0 && std::isfinite(sigma), "ou_stationary: sigma must be finite and >= 0");
  require(dim >= 1, "ou_stationary: dim >= 1");
  return {sigma * sigma / (2.0 * l), dim};
}

// ---------------------------------------------------------------- moment tables

struct MomentTable {
  std::vector<double> m;  // m[0] = 1
  std::vector<double> se; // only for simulation tables
  std::string method;     // dynkin-linear-solve | paper-recursion | simulation

  int order() const { return static_cast<int>(m.size()) - 1; }
  double variance() const { return m.size() > 2 ? m[2] - m[1] * m[1] : 0.0; }

  /// Smallest eigenvalue of the Hankel matrix (m_{i+j})_{i,j <= K'/2}, K' = min(K, 4).
  double hankel_min_eigenvalue() const {
    const int K = std::min(order(), 4);
    const int h = K / 2;
    Eigen::MatrixXd H(h + 1, h + 1);
    for (int i = 0; i <= h; ++i)
      for (int j = 0; j <= h; ++j) H(i, j) = m[static_cast<std::size_t>(i + j)];
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(H, Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
  }
  bool hankel_psd(double tol = 1e-9) const { return hankel_min_eigenvalue() >= -tol; }

  void write_csv(const std::string& path) const {
    std::ofstream os(path);
    if (!os) throw ValidationError("cannot open " + path + " for writing");
    os << "# aptlab moments v1 method=" << method << "\n";
    os << "n,m_n" << (se.empty() ? "" : ",se") << "\n";
    os.precision(17);
    for (std::size_t n = 0; n < m.size(); ++n) {
      os << n << "," << m[n];
      if (!se.empty()) os << "," << se[n];
      os << "\n";
    }
  }
};

inline double binomial(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  double r = 1.0;
  for (int j = 1; j <= k; ++j) r = r * (n - k + j) / j;
  return r;
}

/// Stationary moments of the PDMP with generator
/// (a - bx) f' + (c + dx)(f(x+1) - f(x)), from L x^n = 0 solved upward in n.
inline MomentTable pdmp_moments_dynkin(double a, double b, double c, double d, int K) {
  require(K >= 1 && K <= 8, "pdmp_moments_dynkin: order must be in 1..8");
  require(a >= 0.0 && c >= 0.0 && d >= 0.0, "pdmp_moments_dynkin: a, c, d must be non-negative");
  if (!(b > d)) throw ModelError("pdmp_moments_dynkin: b <= d, the stationary mean diverges");
  MomentTable t;
  t.method = "dynkin-linear-solve";
  t.m.assign(static_cast<std::size_t>(K) + 1, 0.0);
  t.m[0] = 1.0;
  for (int n = 1; n <= K; ++n) {
    double s = n * a * t.m[static_cast<std::size_t>(n - 1)];
    for (int k = 0; k < n; ++k) s += c * binomial(n, k) * t.m[static_cast<std::size_t>(k)];
    for (int k = 0; k <= n - 2; ++k) s += d * binomial(n, k) * t.m[static_cast<std::size_t>(k + 1)];
    t.m[static_cast<std::size_t>(n)] = s / (n * (b - d));
  }
  return t;
}

inline MomentTable pdmp_moments_dynkin(const LinearJumpPDMP& p, int K) {
  return pdmp_moments_dynkin(p.a, p.b, p.c, p.d, K);
}

/// The bandit recursion as printed:
/// m_n = -p0'(1)/(n(p1(1)+p0'(1))) sum_{k=1}^{n-2} C(n,k-1) m_k
///       + (2 pt0(1) + (n-1) p0'(1)) / (2(p1(1)+p0'(1))) m_{n-1}.
inline MomentTable pdmp_moments_paper(double p1_1, double p0p_1, double pt0_1, int K) {
  require(K >= 1 && K <= 8, "pdmp_moments_paper: order must be in 1..8");
  require(p1_1 + p0p_1 > 0.0, "pdmp_moments_paper: needs p1(1) + p0'(1) > 0");
  const double den = p1_1 + p0p_1;
  MomentTable t;
  t.method = "paper-recursion";
  t.m.assign(static_cast<std::size_t>(K) + 1, 0.0);
  t.m[0] = 1.0;
  for (int n = 1; n <= K; ++n) {
    double s = 0.0;
    for (int k = 1; k <= n - 2; ++k) s += binomial(n, k - 1) * t.m[static_cast<std::size_t>(k)];
    t.m[static_cast<std::size_t>(n)] = -p0p_1 / (n * den) * s +
                                       (2.0 * pt0_1 + (n - 1) * p0p_1) / (2.0 * den) * t.m[static_cast<std::size_t>(n - 1)];
  }
  return t;
}

/// Long-run moments by simulation: paths start at x0 and run to time t.
inline MomentTable pdmp_moments_simulated(const LinearJumpPDMP& p, int K, double t, std::uint64_t paths,
                                          std::uint64_t seed, double x0 = 0.0) {
  require(K >= 1 && K <= 8 && paths >= 2, "pdmp_moments_simulated: order 1..8 and at least 2 paths");
  std::vector<double> end(paths);
  parallel_for(paths, [&](std::uint64_t i) {
    Rng rng = Rng::stream(seed, i);
    end[i] = pdmp_simulate(p, x0, t, rng);
  });
  MomentTable tab;
  tab.method = "simulation";
  tab.m.assign(static_cast<std::size_t>(K) + 1, 1.0);
  tab.se.assign(static_cast<std::size_t>(K) + 1, 0.0);
  for (int n = 1; n <= K; ++n) {
    std::vector<double> v(paths);
    for (std::uint64_t i = 0; i < paths; ++i) v[i] = std::pow(end[i], n);
    const auto s = stats::summarize(v);
    tab.m[static_cast<std::size_t>(n)] = s.mean;
    tab.se[static_cast<std::size_t>(n)] = s.se;
  }
  return tab;
}

struct DiscrepancyRow {
  int n = 0;
  double dynkin = 0.0;
  double paper = 0.0;
  std::optional<double> simulated, simulated_se;
  bool flagged = false;                 // engines disagree
  std::string referee = "not-refereed"; // dynkin | paper | both | neither
};

struct MomentDiscrepancy {
  std::vector<DiscrepancyRow> rows;
  double sigma_gate = 4.0;
  bool any_flagged() const {
    return std::any_of(rows.begin(), rows.end(), [](const DiscrepancyRow& r) { return r.flagged; });
  }
};

/// Side by side tables. With a simulation table each row is refereed at
/// sigma_gate standard errors.
inline MomentDiscrepancy compare_moment_engines(const MomentTable& dynkin, const MomentTable& paper,
                                                const std::optional<MomentTable>& sim = std::nullopt,
                                                double sigma_gate = 4.0) {
  MomentDiscrepancy rep;
  rep.sigma_gate = sigma_gate;
  const int K = std::min(dynkin.order(), paper.order());
  for (int n = 1; n <= K; ++n) {
    DiscrepancyRow r;
    r.n = n;
    r.dynkin = dynkin.m[static_cast<std::size_t>(n)];
    r.paper = paper.m[static_cast<std::size_t>(n)];
    r.flagged = std::abs(r.dynkin - r.paper) > 1e-9 * std::max(1.0, std::abs(r.dynkin));
    if (sim && n <= sim->order() && !sim->se.empty()) {
      r.simulated = sim->m[static_cast<std::size_t>(n)];
      r.simulated_se = sim->se[static_cast<std::size_t>(n)];
      const double gate = sigma_gate * *r.simulated_se;
      const bool ok_d = std::abs(*r.simulated - r.dynkin) <= gate;
      const bool ok_p = std::abs(*r.simulated - r.paper) <= gate;
      r.referee = ok_d && ok_p ? "both" : ok_d ? "dynkin" : ok_p ? "paper" : "neither";
    }
    rep.rows.push_back(r);
  }
  return rep;
}

/// E[exp(lambda X_t)] along a time grid, for checking exponential moments stay bounded.
inline std::vector<Estimate> pdmp_exponential_moments(const LinearJumpPDMP& p, double lambda,
                                                      const std::vector<double>& t_list, std::uint64_t paths,
                                                      std::uint64_t seed, double x0 = 0.0) {
  require(lambda > 0.0 && paths >= 2, "pdmp_exponential_moments: lambda > 0 and at least 2 paths");
  require(std::is_sorted(t_list.begin(), t_list.end()), "pdmp_exponential_moments: t_list must increase");
  std::vector<std::vector<double>> v(t_list.size(), std::vector<double>(paths));
  parallel_for(paths, [&](std::uint64_t i) {
    Rng rng = Rng::stream(seed, i);
    double x = x0, now = 0.0;
    for (std::size_t k = 0; k < t_list.size(); ++k) {
      x = pdmp_simulate(p, x, t_list[k] - now, rng);
      now = t_list[k];
      v[k][i] = std::exp(lambda * x);
    }
  });
  std::vector<Estimate> out;
  for (const auto& col : v) {
    const auto s = stats::summarize(col);
    out.push_back({s.mean, s.se});
  }
  return out;
}

// ---------------------------------------------------------------- Langevin

/// Density proportional to exp(-2 V / sigma^2) on [lo, hi], with a tabulated
/// CDF and an inverse-CDF sampler. Drift convention b = -V'.
class LangevinLaw {
 public:
  LangevinLaw(ScalarFn V, double sigma, double lo, double hi, std::size_t cells)
      : V_(std::move(V)), sigma_(sigma), lo_(lo), hi_(hi) {
    require(static_cast<bool>(V_), "langevin_stationary: potential is empty");
    require(sigma > 0.0 && std::isfinite(sigma), "langevin_stationary: sigma must be positive");
    require(lo < hi && std::isfinite(lo) && std::isfinite(hi), "langevin_stationary: need a finite range lo < hi");
    require(cells >= 16, "langevin_stationary: at least 16 cells");
    const std::size_t probe = 4096;
    vmin_ = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i <= probe; ++i) vmin_ = std::min(vmin_, V_(lo + (hi - lo) * i / probe));
    if (!std::isfinite(vmin_)) throw NumericalError("langevin_stationary: potential is not finite on the range");

    edges_.resize(cells + 1);
    cum_.assign(cells + 1, 0.0);
    for (std::size_t i = 0; i <= cells; ++i) edges_[i] = lo + (hi - lo) * static_cast<double>(i) / cells;
    for (std::size_t i = 0; i < cells; ++i) cum_[i + 1] = cum_[i] + cell_mass(edges_[i], edges_[i + 1]);
    z_ = cum_.back();
    if (!(z_ > 0.0) || !std::isfinite(z_)) throw NumericalError("langevin_stationary: normalization failed");

    double err = 0.0;
    const double adaptive = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
        [&](double y) { return weight(y); }, lo, hi, 15, 1e-14, &err);
    quad_gap_ = std::abs(adaptive - z_) / z_;

    const double w = hi - lo;
    tail_ = (boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
                 [&](double y) { return weight(y); }, hi, hi + w, 15, 1e-12) +
             boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
                 [&](double y) { return weight(y); }, lo - w, lo, 15, 1e-12)) /
            z_;
    const double far = (weight(lo - w) + weight(hi + w)) * w / z_;
    if (!(tail_ < 1e-10) || !(far < 1e-10) || !std::isfinite(tail_)) {
      throw ModelError("langevin_stationary: tail mass outside the range is not negligible (" +
                       std::to_string(std::max(tail_, far)) + ")");
    }
  }

  double lo() const { return lo_; }
  double hi() const { return hi_; }
  double sigma() const { return sigma_; }
  /// Mass of the tabulated density (1 by construction) and relative gap to the adaptive rule.
  double mass() const { return cum_.back() / z_; }
  double quadrature_gap() const { return quad_gap_; }
  double tail_mass() const { return tail_; }

  double density(double y) const { return y < lo_ || y > hi_ ? 0.0 : weight(y) / z_; }

  double cdf(double y) const {
    if (y <= lo_) return 0.0;
    if (y >= hi_) return 1.0;
    const std::size_t i = cell_of(y);
    return std::min(1.0, (cum_[i] + cell_mass(edges_[i], y)) / z_);
  }

  double quantile(double u) const {
    require(u >= 0.0 && u <= 1.0, "quantile: u must lie in [0, 1]");
    const double target = u * z_;
    auto it = std::upper_bound(cum_.begin(), cum_.end(), target);
    std::size_t i = it == cum_.begin() ? 0 : static_cast<std::size_t>(it - cum_.begin()) - 1;
    i = std::min(i, edges_.size() - 2);
    double a = edges_[i], b = edges_[i + 1];
    const double need = target - cum_[i];
    double x = a + (b - a) * std::clamp(need / std::max(cum_[i + 1] - cum_[i], 1e-300), 0.0, 1.0);
    for (int it2 = 0; it2 < 40; ++it2) {
      const double g = cell_mass(edges_[i], x) - need;
      if (g > 0) b = x; else a = x;
      const double w = weight(x);
      double nx = w > 0 ? x - g / w : 0.5 * (a + b);
      if (!(nx > a && nx < b)) nx = 0.5 * (a + b);
      if (std::abs(nx - x) < 1e-14 * (1.0 + std::abs(x))) return nx;
      x = nx;
    }
    return x;
  }

  double sample(Rng& rng) const { return quantile(rng.uniform()); }

  /// E[Y^k] by adaptive quadrature.
  double moment(int k) const {
    require(k >= 0, "moment order must be non-negative");
    return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
               [&](double y) { return std::pow(y, k) * weight(y); }, lo_, hi_, 15, 1e-14) /
           z_;
  }
  double mean() const { return moment(1); }
  double variance() const {
    const double m = mean();
    return moment(2) - m * m;
  }

  void write_csv(const std::string& path, std::size_t points = 1001) const {
    std::ofstream os(path);
    if (!os) throw ValidationError("cannot open " + path + " for writing");
    os << "# aptlab density v1\ny,density,cdf\n";
    os.precision(17);
    for (std::size_t i = 0; i < points; ++i) {
      const double y = lo_ + (hi_ - lo_) * static_cast<double>(i) / static_cast<double>(points - 1);
      os << y << "," << density(y) << "," << cdf(y) << "\n";
    }
  }

 private:
  double weight(double y) const { return std::exp(-2.0 * (V_(y) - vmin_) / (sigma_ * sigma_)); }
  double cell_mass(double a, double b) const {
    return boost::math::quadrature::gauss<double, 20>::integrate([&](double y) { return weight(y); }, a, b);
  }
  std::size_t cell_of(double y) const {
    const double h = (hi_ - lo_) / static_cast<double>(edges_.size() - 1);
    return std::min(static_cast<std::size_t>((y - lo_) / h), edges_.size() - 2);
  }

  ScalarFn V_;
  double sigma_, lo_, hi_;
  double vmin_ = 0.0, z_ = 1.0, quad_gap_ = 0.0, tail_ = 0.0;
  std::vector<double> edges_, cum_;
};

inline LangevinLaw langevin_stationary(ScalarFn V, double sigma, double lo, double hi, std::size_t cells = 4000) {
  return LangevinLaw(std::move(V), sigma, lo, hi, cells);
}

// ---------------------------------------------------------------- Doeblin

/// bound[n] = prod_{k=0}^{n} (1 - gamma_{k+1} eps), summed in log space.
inline std::vector<double> doeblin_bound(const StepSchedule& gamma, double eps, std::uint64_t n_max) {
  require(eps > 0.0 && eps <= 1.0, "doeblin_bound: eps must lie in (0, 1]");
  std::vector<double> out(n_max + 1);
  double log_p = 0.0;
  for (std::uint64_t n = 0; n <= n_max; ++n) {
    const double f = gamma.gamma_at(n + 1) * eps;
    require(f <= 1.0, "doeblin_bound: gamma_" + std::to_string(n + 1) + " * eps exceeds 1, factor would be negative");
    log_p += f == 1.0 ? -std::numeric_limits<double>::infinity() : std::log1p(-f);
    out[n] = std::exp(log_p);
  }
  return out;
}

/// sum_j min_i R_ij, the largest eps in a minorization R(i, .) >= eps psi.
inline double doeblin_constant(const Eigen::MatrixXd& R) {
  double s = 0.0;
  for (Eigen::Index j = 0; j < R.cols(); ++j) s += R.col(j).minCoeff();
  return s;
}

inline void check_stochastic(const Eigen::MatrixXd& R) {
  require(R.rows() == R.cols() && R.rows() >= 1, "kernel must be square");
  for (Eigen::Index i = 0; i < R.rows(); ++i) {
    require(R.row(i).minCoeff() >= 0.0, "kernel has a negative entry");
    require(std::abs(R.row(i).sum() - 1.0) <= 1e-12, "kernel row " + std::to_string(i) + " does not sum to 1");
  }
}

/// Left Perron vector of R, normalized to a probability.
inline FiniteMeasure invariant_law(const Eigen::MatrixXd& R) {
  check_stochastic(R);
  Eigen::EigenSolver<Eigen::MatrixXd> es(R.transpose());
  Eigen::Index best = 0;
  for (Eigen::Index i = 1; i < es.eigenvalues().size(); ++i) {
    if (std::abs(es.eigenvalues()[i] - 1.0) < std::abs(es.eigenvalues()[best] - 1.0)) best = i;
  }
  if (std::abs(es.eigenvalues()[best] - 1.0) > 1e-9) throw NumericalError("invariant_law: no unit eigenvalue found");
  Eigen::VectorXd v = es.eigenvectors().col(best).real();
  v /= v.sum();
  FiniteMeasure pi;
  pi.p.assign(v.data(), v.data() + v.size());
  for (double& x : pi.p) x = std::max(x, 0.0);
  pi.renormalize();
  return pi;
}

/// eps psi + (1 - eps) S with psi and the rows of S drawn uniformly on the simplex.
inline Eigen::MatrixXd random_doeblin_kernel(std::size_t K, double eps, std::uint64_t seed) {
  require(K >= 1 && eps > 0.0 && eps <= 1.0, "random_doeblin_kernel: need K >= 1 and eps in (0, 1]");
  Rng rng(seed);
  auto simplex = [&] {
    Eigen::RowVectorXd r(static_cast<Eigen::Index>(K));
    for (auto& x : r) x = rng.exponential(1.0);
    return Eigen::RowVectorXd(r / r.sum());
  };
  const Eigen::RowVectorXd psi = simplex();
  Eigen::MatrixXd R(K, K);
  for (Eigen::Index i = 0; i < R.rows(); ++i) R.row(i) = eps * psi + (1.0 - eps) * simplex();
  return R;
}

struct DoeblinReport {
  std::vector<double> tv;     // tv[n] = TV(mu K_0 ... K_n, pi)
  std::vector<double> bound;  // tv0 * prod_{k=0}^{n} (1 - gamma_{k+1} eps)
  double tv0 = 0.0;
  double eps = 0.0;
  double eps_available = 0.0;
  FiniteMeasure pi;
  std::uint64_t first_violation = 0;  // 0 when none; else n + 1
  bool pass = false;

  void write_csv(const std::string& path) const {
    std::ofstream os(path);
    if (!os) throw ValidationError("cannot open " + path + " for writing");
    os << "# aptlab doeblin v1 eps=" << eps << "\nn,tv,bound\n";
    os.precision(17);
    for (std::size_t n = 0; n < tv.size(); ++n) os << n << "," << tv[n] << "," << bound[n] << "\n";
  }
};

/// Iterates K_n = (1 - gamma_{n+1}) I + gamma_{n+1} R exactly. Entry n of the
/// curves refers to the law after the kernels K_0, ..., K_n.
inline DoeblinReport doeblin_exact_oracle(const Eigen::MatrixXd& R, double eps, const StepSchedule& gamma,
                                          std::uint64_t n_max, std::optional<FiniteMeasure> initial = std::nullopt) {
  check_stochastic(R);
  DoeblinReport rep;
  rep.eps = eps;
  rep.eps_available = doeblin_constant(R);
  if (rep.eps_available < eps - 1e-12) {
    throw ValidationError("doeblin_exact_oracle: kernel only admits a minorization with eps = " +
                          std::to_string(rep.eps_available));
  }
  const auto K = static_cast<std::size_t>(R.rows());
  rep.pi = invariant_law(R);
  FiniteMeasure mu = initial.value_or(FiniteMeasure::dirac(K, 0));
  require(mu.size() == K, "doeblin_exact_oracle: initial law has the wrong size");
  rep.tv0 = tv_distance(mu, rep.pi);
  const auto prod = doeblin_bound(gamma, eps, n_max);
  rep.tv.resize(n_max + 1);
  rep.bound.resize(n_max + 1);
  rep.pass = true;
  for (std::uint64_t n = 0; n <= n_max; ++n) {
    llrw_kernel_step(mu, R, gamma.gamma_at(n + 1));
    rep.tv[n] = tv_distance(mu, rep.pi);
    rep.bound[n] = rep.tv0 * prod[n];
    if (rep.tv[n] > rep.bound[n] + 1e-14) {
      if (rep.pass) rep.first_violation = n + 1;
      rep.pass = false;
    }
  }
  return rep;
}

// ---------------------------------------------------------------- ergodicity data

/// Assumed ergodicity constants of a limit process: d_G(Phi(mu, t), pi) <= M3 e^{-v t}
/// and T C_T <= M4 e^{r T}. These are inputs, never estimated.
struct ErgodicityProfile {
  double v = 1.0;
  double M3 = 1.0;
  double r = 0.0;
  std::string class_tag = "F";

  void validate() const {
    require(v > 0.0 && std::isfinite(v), "ergodicity profile: v must be positive");
    require(M3 > 0.0 && std::isfinite(M3), "ergodicity profile: M3 must be positive");
    require(r >= 0.0 && std::isfinite(r), "ergodicity profile: r must be >= 0");
  }

  /// Upper end of the admissible rate band, v lambda / (r + v + lambda); v when lambda is infinite.
  double predicted_rate(double lambda) const {
    validate();
    require(lambda >= 0.0, "predicted_rate: lambda must be >= 0");
    if (std::isinf(lambda)) return v;
    return v * lambda / (r + v + lambda);
  }
};

}  // namespace aptlab
