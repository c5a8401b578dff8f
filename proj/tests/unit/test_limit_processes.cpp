#include "catch_amalgamated.hpp"

#include <cmath>

#include "aptlab/limit_processes.hpp"
#include "aptlab/measure_kit.hpp"
#include "aptlab/stats.hpp"

using namespace aptlab;
using Catch::Approx;

namespace {

double sample_var(const std::vector<double>& v) { return stats::summarize(v).variance; }

// standard error of a sample variance, from the fourth central moment
double var_se(const std::vector<double>& v) {
  const auto s = stats::summarize(v);
  double m4 = 0;
  for (double x : v) m4 += std::pow(x - s.mean, 4);
  m4 /= v.size();
  return std::sqrt((m4 - s.variance * s.variance) / v.size());
}

}  // namespace

TEST_CASE("OU transition has the closed-form variance", "[limit_processes]") {
  const OU p{0.5, 1.0, 1};
  Rng rng(1);
  std::vector<double> v(100000);
  for (auto& x : v) x = ou_transition(p, {0.0}, 1.0, rng)[0];
  const double target = 1 - std::exp(-1.0);
  CHECK(target == Approx(0.632).margin(1e-3));
  CHECK(std::abs(sample_var(v) - target) < 3 * var_se(v));

  // long horizon: N(0, sigma^2/(2l)) = N(0, 1)
  const OU q{1.0, std::sqrt(2.0), 1};
  for (auto& x : v) x = ou_transition(q, {1.0}, 50.0, rng)[0];
  const auto s = stats::summarize(v);
  CHECK(std::abs(s.mean) < 3 * s.se);
  CHECK(std::abs(s.variance - 1) < 3 * var_se(v));
  // tiny t: stays at x
  CHECK(ou_transition(q, {1.0}, 1e-14, rng)[0] == Approx(1.0).margin(1e-6));
  CHECK_THROWS_AS(ou_transition(q, {1.0}, 0.0, rng), ValidationError);
}

TEST_CASE("PDMP flow is a semiflow", "[limit_processes]") {
  const LinearJumpPDMP p{0.3, 0.7, 0.0, 0.4};
  CHECK(flow(p, 0.3 / 0.7, 5.0) == Approx(0.3 / 0.7).epsilon(1e-15));
  CHECK(flow(p, 2.0, 0.0) == 2.0);
  CHECK(std::abs(flow(p, flow(p, 1.0, 0.3), 0.7) - flow(p, 1.0, 1.0)) < 1e-12);
  const LinearJumpPDMP lin{1.0, 0.0, 0.0, 0.4};
  CHECK(flow(lin, 0.0, 2.0) == 2.0);
  CHECK(std::abs(flow(lin, flow(lin, 1.0, 0.3), 0.7) - flow(lin, 1.0, 1.0)) < 1e-12);
  CHECK_THROWS_AS(LimitProcess(LinearJumpPDMP{0.0, 0.0, 1.0, 1.0}), ValidationError);
  CHECK_THROWS_AS(LimitProcess(LinearJumpPDMP{0.3, -1.0, 0.0, 0.4}), ValidationError);
}

TEST_CASE("PDMP simulation: pure flow and stationary mean", "[limit_processes]") {
  Rng rng(2);
  const LinearJumpPDMP none{1.0, 1.0, 0.0, 0.0};
  CHECK(pdmp_simulate(none, 2.0, 1.0, rng) == Approx(std::exp(-1.0) + 1).epsilon(1e-15));
  CHECK(pdmp_simulate(none, 2.0, 1.0, rng) == Approx(1.3679).margin(1e-4));

  const LinearJumpPDMP p{0.3, 0.7, 0.0, 0.4};
  std::vector<double> v(10000);
  for (std::size_t i = 0; i < v.size(); ++i) {
    Rng r = Rng::stream(3, i);
    v[i] = pdmp_simulate(p, 0.0, 60.0, r);
  }
  const auto s = stats::summarize(v);
  CHECK(std::abs(s.mean - 1.0) < 3 * s.se);
  CHECK_THROWS_AS(pdmp_simulate(p, -1.0, 1.0, rng), ValidationError);
}

TEST_CASE("PDMP first-jump times pass KS", "[limit_processes]") {
  // constant rate: Exp(c)
  const LinearJumpPDMP flat{0.3, 0.7, 1.5, 0.0};
  std::vector<double> t(10000);
  for (std::size_t i = 0; i < t.size(); ++i) {
    Rng r = Rng::stream(4, i);
    t[i] = pdmp_first_jump_time(flat, 1.0, r);
  }
  CHECK(stats::ks_test(t, [](double x) { return x <= 0 ? 0.0 : -std::expm1(-1.5 * x); }).p_value > 0.01);

  // state-dependent rate against 1 - exp(-int (c + d Psi))
  const LinearJumpPDMP p{0.3, 0.7, 0.1, 0.4};
  for (std::size_t i = 0; i < t.size(); ++i) {
    Rng r = Rng::stream(5, i);
    t[i] = pdmp_first_jump_time(p, 2.0, r);
  }
  CHECK(stats::ks_test(t, [&](double x) { return pdmp_first_jump_cdf(p, 2.0, x); }).p_value > 0.01);
  // the closed form against a direct quadrature of the rate
  double integral = 0;
  const int N = 20000;
  for (int k = 0; k < N; ++k) {
    const double s = (k + 0.5) * 3.0 / N;
    integral += (0.1 + 0.4 * flow(p, 2.0, s)) * 3.0 / N;
  }
  CHECK(pdmp_first_jump_cdf(p, 2.0, 3.0) == Approx(1 - std::exp(-integral)).epsilon(1e-8));
}

TEST_CASE("PDMP simulator respects the semigroup property", "[limit_processes]") {
  const LinearJumpPDMP p{0.3, 0.7, 0.0, 0.4};
  std::vector<double> direct(20000), split(20000);
  for (std::size_t i = 0; i < direct.size(); ++i) {
    Rng r = Rng::stream(6, i);
    direct[i] = pdmp_simulate(p, 1.5, 2.0, r);
    Rng q = Rng::stream(7, i);
    split[i] = pdmp_simulate(p, pdmp_simulate(p, 1.5, 0.8, q), 1.2, q);
  }
  const auto a = stats::summarize(direct), b = stats::summarize(split);
  CHECK(std::abs(a.mean - b.mean) < 3 * std::hypot(a.se, b.se));
  CHECK(std::abs(a.variance - b.variance) < 3 * std::hypot(var_se(direct), var_se(split)));
}

TEST_CASE("diffusion simulation", "[limit_processes]") {
  const Diffusion bm{[](double) { return 0.0; }, [](double) { return 1.0; }, 1e-2, 1};
  std::vector<double> v(100000);
  for (std::size_t i = 0; i < v.size(); ++i) {
    Rng r = Rng::stream(8, i);
    v[i] = diffusion_simulate(bm, {0.0}, 1.0, r)[0];
  }
  CHECK(std::abs(sample_var(v) - 1) < 3 * var_se(v));

  // Euler OU against the exact transition
  const Diffusion ou{[](double y) { return -y; }, [](double) { return std::sqrt(2.0); }, 1e-3, 1};
  EmpiricalMeasure a, b;
  a.samples.resize(100000);
  b.samples.resize(100000);
  for (std::size_t i = 0; i < a.samples.size(); ++i) {
    Rng r = Rng::stream(9, i);
    a.samples[i] = diffusion_simulate(ou, {1.0}, 1.0, r)[0];
    Rng q = Rng::stream(10, i);
    b.samples[i] = ou_transition(OU{1.0, std::sqrt(2.0), 1}, {1.0}, 1.0, q)[0];
  }
  CHECK(w1_distance(a, b) < 0.02);

  const Diffusion bad{[](double y) { return y * y * y; }, [](double) { return 1.0; }, 0.5, 1};
  Rng r(1);
  CHECK_THROWS_AS(diffusion_simulate(bad, {10.0}, 50.0, r), NumericalError);
}

TEST_CASE("subordinated chain", "[limit_processes]") {
  Rng rng(11);
  const SubordinatedChain id{Eigen::MatrixXd::Identity(3, 3)};
  for (int i = 0; i < 100; ++i) CHECK(subordinated_simulate(id, 2, 3.0, rng) == 2);

  Eigen::MatrixXd flip(2, 2);
  flip << 0, 1, 1, 0;
  const SubordinatedChain f{flip};
  CHECK(subordinated_simulate(f, 1, 0.0, rng) == 1);
  const int N = 100000;
  int same = 0;
  for (int i = 0; i < N; ++i) same += subordinated_simulate(f, 0, 1.0, rng) == 0;
  // P(Poisson(1) even) = e^{-1} cosh(1) = 0.5677
  const double p = std::exp(-1.0) * std::cosh(1.0);
  CHECK(p == Approx(0.5677).margin(1e-4));
  CHECK(std::abs(same / double(N) - p) < 3 * std::sqrt(p * (1 - p) / N));

  // empirical law against the Poisson mixture of R^k
  Eigen::MatrixXd R(3, 3);
  R << 0.1, 0.6, 0.3, 0.5, 0.5, 0.0, 0.2, 0.2, 0.6;
  Eigen::RowVector3d nu(1, 0, 0), law = Eigen::RowVector3d::Zero(), cur = nu;
  double w = std::exp(-2.0);
  for (int k = 0; k <= 50; ++k) {
    law += w * cur;
    cur = cur * R;
    w *= 2.0 / (k + 1);
  }
  std::array<int, 3> c{};
  for (int i = 0; i < N; ++i) c[subordinated_simulate(SubordinatedChain{R}, 0, 2.0, rng)]++;
  double tv = 0;
  for (int j = 0; j < 3; ++j) tv += 0.5 * std::abs(c[j] / double(N) - law(j));
  CHECK(tv < 9 / std::sqrt(double(N)));
}

TEST_CASE("limit_of maps each model to its limit", "[limit_processes]") {
  const auto ou = limit_of(ChainModel::wrw(NoiseSpec::plus_minus_one(), 1.0));
  REQUIRE(ou.as<OU>());
  CHECK(ou.as<OU>()->l == Approx(0.75));
  CHECK(limit_of(ChainModel::wrw(NoiseSpec::plus_minus_one())).as<OU>()->l == 0.5);
  const auto pd = limit_of(ChainModel::pba(PBA{}));
  REQUIRE(pd.as<LinearJumpPDMP>());
  CHECK(pd.as<LinearJumpPDMP>()->a == Approx(0.3));
  CHECK(pd.as<LinearJumpPDMP>()->d == Approx(0.4));
  CHECK(limit_of(ChainModel::jump_toy(NoiseSpec::plus_minus_one(), NoiseSpec::plus_minus_one())).kind() ==
        "jump-diffusion");
  CHECK(limit_of(ChainModel(DSES{}, StepSchedule(PowerLog{1, 1, 0}))).kind() == "diffusion");
}

TEST_CASE("semigroup estimates", "[limit_processes]") {
  const LimitProcess ou(OU{0.5, 1.0, 1});
  const auto e = semigroup_estimate(ou, fn::identity(), {2.0}, 1.0, 20000, 12);
  CHECK(std::abs(e.value - 2 * std::exp(-0.5)) < 3 * e.se);
  const auto one = semigroup_estimate(LimitProcess(LinearJumpPDMP{}), fn::constant(1.0), {1.0}, 3.0, 1000, 1);
  CHECK(one.value == 1.0);
  CHECK(one.se == 0.0);
  const auto flow_only = semigroup_estimate(LimitProcess(LinearJumpPDMP{1, 1, 0, 0}), fn::identity(), {2.0}, 1.0, 1000, 1);
  CHECK(flow_only.value == Approx(1.3679).margin(1e-4));
  // same seed, shared noise: the x-dependence is smooth
  const LimitProcess pd(LinearJumpPDMP{});
  const auto a = semigroup_estimate(pd, fn::sine(1.0), {1.0}, 1.0, 2000, 5, 2.0);
  const auto b = semigroup_estimate(pd, fn::sine(1.0), {1.0 + 1e-6}, 1.0, 2000, 5, 2.0);
  CHECK(std::abs(a.value - b.value) < 1e-5);
}

TEST_CASE("PDMP derivative bounds and the finite-difference check", "[limit_processes]") {
  const auto f = fn::sine(1.0);  // ||f|| = ||f'|| = 1
  CHECK(pdmp_derivative_bound(LinearJumpPDMP{0.3, 1.0, 0.0, 0.4}, f, 1, 1.0) == Approx(1.8));
  const auto g = fn::sine(2.0).scaled(0.5);
  CHECK(pdmp_derivative_bound(LinearJumpPDMP{1.0, 0.0, 0.0, 0.4}, g, 1, 1.0) ==
        Approx(g.sup_norms()[1] + 0.8 * g.sup_norms()[0]));
  // no jumps: bound is ||f^{(n)}||
  CHECK(pdmp_derivative_bound(LinearJumpPDMP{0.3, 1.0, 0.0, 0.0}, f, 2, 1.0) == Approx(f.sup_norms()[2]));

  const auto rep = semigroup_derivative_check(LinearJumpPDMP{0.3, 0.7, 0.0, 0.4}, f, 1, 1.0,
                                              {0.0, 0.5, 1.0, 1.5, 2.0}, 20000, 3);
  CHECK(rep.pass);
  CHECK(rep.rows.size() == 5);
  CHECK(rep.rows[0].forward);
  CHECK(rep.max_abs <= rep.bound);

  // deterministic flow: derivative is e^{-bt} f'(Psi)
  const LinearJumpPDMP none{0.3, 1.0, 0.0, 0.0};
  const auto det = semigroup_derivative_check(none, f, 1, 1.0, {1.0}, 100, 1);
  CHECK(det.rows[0].estimate == Approx(std::exp(-1.0) * std::cos(flow(none, 1.0, 1.0))).epsilon(1e-5));
  CHECK(det.pass);
}
