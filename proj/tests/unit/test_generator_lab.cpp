#include "catch_amalgamated.hpp"

#include <cmath>

#include "aptlab/generator_lab.hpp"

using namespace aptlab;
using Catch::Approx;

namespace {

Eigen::MatrixXd three_state() {
  Eigen::MatrixXd R(3, 3);
  R << 0.2, 0.5, 0.3, 0.1, 0.1, 0.8, 0.6, 0.3, 0.1;
  return R;
}

ChainModel langevin_dses() {
  DSES d;
  d.drift = [](double y) { return -y + std::sin(y); };
  return ChainModel(d, StepSchedule(PowerLog{1, 1, 0}));
}

const NoiseSpec& skew_noise() {
  static const NoiseSpec s(FiniteSupport{{{{-1.0}, 2.0 / 3.0}, {{2.0}, 1.0 / 3.0}}});
  return s;
}

std::vector<ChainModel> finite_models() {
  return {ChainModel::wrw(NoiseSpec::plus_minus_one()),
          ChainModel::wrw(skew_noise(), 1.0),
          ChainModel::pba(PBA{}),
          ChainModel(OverPBA{}, StepSchedule(PowerLog{1, 0.5, 0})),
          ChainModel::llrw(three_state(), StepSchedule(ExplicitSteps{{1.0}, PowerLog{2, 1, 0}})),
          ChainModel::jump_toy(NoiseSpec::plus_minus_one(), skew_noise())};
}

}  // namespace

TEST_CASE("L_n kills constants", "[generator_lab]") {
  const auto one = fn::constant(1.0);
  for (const auto& m : finite_models()) {
    for (std::uint64_t n : {1ull, 10ull, 1000ull}) {
      const State y{m.as<LLRWFinite>() ? 1.0 : 0.5};
      CHECK(std::abs(apply_Ln(m, one, y, n)) <= 1e-12);
      CHECK(std::abs(apply_Gamma_n(m, one, y, n)) <= 1e-12);
    }
  }
  CHECK(std::abs(apply_Ln(langevin_dses(), one, {1.3}, 10)) <= 1e-8);
  CHECK(std::abs(apply_Ln(ChainModel::wrw(NoiseSpec::standard_normal()), one, {1.3}, 10)) <= 1e-8);
}

TEST_CASE("LLRW generator does not depend on n", "[generator_lab]") {
  const auto R = three_state();
  const auto m = ChainModel::llrw(R, StepSchedule(ExplicitSteps{{1.0}, PowerLog{2, 1, 0}}));
  const LimitProcess sub(SubordinatedChain{R});
  const auto dict = FunctionDictionary::standard();
  for (const auto& f : dict.members()) {
    for (double i : {0.0, 1.0, 2.0}) {
      const double l1 = apply_Ln(m, f, {i}, 1), l10 = apply_Ln(m, f, {i}, 10), l100 = apply_Ln(m, f, {i}, 100);
      CHECK(std::abs(l1 - l10) <= 1e-12);
      CHECK(std::abs(l1 - l100) <= 1e-12);
      double rf = 0;
      for (int j = 0; j < 3; ++j) rf += R(int(i), j) * (f(j) - f(i));
      CHECK(std::abs(l1 - rf) <= 1e-12);
      CHECK(std::abs(apply_L(sub, f, {i}) - rf) <= 1e-12);
    }
  }
  const auto rep = gap_scan(m, sub, FunctionDictionary::standard(), {0, 1, 2}, {1, 10, 100, 1000}, 0);
  CHECK(rep.all_zero);
}

TEST_CASE("DSES generator on y^2 has the closed form", "[generator_lab]") {
  const auto m = langevin_dses();
  const auto& s = m.schedule();
  for (double y : {-2.0, -0.3, 0.0, 1.1, 3.0}) {
    for (std::uint64_t n : {1ull, 9ull, 99ull}) {
      const double b = -y + std::sin(y), g = s.gamma_at(n + 1);
      const double closed = 2 * y * b + 1 + g * b * b;
      CHECK(std::abs(apply_Ln(m, fn::square(), {y}, n) - closed) <= 1e-8);
    }
  }
}

TEST_CASE("Gauss-Hermite node counts agree", "[generator_lab]") {
  const auto m = langevin_dses();
  for (int k : {0, 1, 2, 3}) {
    const auto f = fn::gauss_poly(k);
    for (double y : {-1.5, 0.2, 2.0}) {
      CHECK(std::abs(apply_Ln(m, f, {y}, 20, 64) - apply_Ln(m, f, {y}, 20, 128)) <= 1e-10);
    }
  }
}

TEST_CASE("limit generators in closed form", "[generator_lab]") {
  const LimitProcess ou(OU{0.5, 1.0, 1});
  const auto sine = fn::sine(1.0);
  for (double y : {-1.0, 0.0, 2.5}) {
    CHECK(apply_L(ou, sine, {y}) == Approx(-0.5 * y * std::cos(y) - 0.5 * std::sin(y)).margin(1e-14));
  }
  const LimitProcess pd = limit_of(ChainModel::pba(PBA{}));
  const auto f = fn::cosine(0.5);
  for (double y : {0.0, 0.7, 4.0}) {
    const double want = (0.3 - 0.7 * y) * (-0.5 * std::sin(0.5 * y)) + 0.4 * y * (std::cos(0.5 * (y + 1)) - std::cos(0.5 * y));
    CHECK(apply_L(pd, f, {y}) == Approx(want).margin(1e-14));
    CHECK(apply_L(pd, fn::constant(1.0), {y}) == 0.0);
  }
}

TEST_CASE("carre du champ identity and positivity", "[generator_lab]") {
  const auto dict = FunctionDictionary::standard();
  for (const auto& m : finite_models()) {
    for (std::uint64_t n : {1ull, 10ull, 1000ull}) {
      const double g = m.schedule().gamma_at(n + 1);
      for (const auto& f : dict.members()) {
        for (double y : {0.0, 0.5, 1.0, 2.0}) {
          if ((m.as<PBA>() || m.as<OverPBA>()) && y * m.schedule().gamma_at(n) > 1) continue;
          if (m.as<LLRWFinite>() && y != std::floor(y)) continue;
          const State s{y};
          const double k1 = apply_Kn(m, f, s, n);
          const double k2 = apply_Kn(m, f.squared(), s, n);
          const double G = apply_Gamma_n(m, f, s, n);
          INFO(m.kind() << " n=" << n << " " << f.id() << " y=" << y);
          CHECK(std::abs(g * G - (k2 - k1 * k1)) <= 1e-12);
          CHECK(G >= -1e-12);
        }
      }
    }
  }
}

TEST_CASE("PBA generator gap decays like n^{-1/2}", "[generator_lab]") {
  const auto m = ChainModel::pba(PBA{});
  std::vector<double> grid;
  for (int i = 0; i <= 50; ++i) grid.push_back(0.1 * i);
  const auto rep = gap_scan(m, limit_of(m), FunctionDictionary::standard(), grid,
                            {100, 1000, 10000, 100000, 1000000}, 3);
  CHECK_FALSE(rep.all_zero);
  CHECK(rep.slope_vs_log_n >= -0.6);
  CHECK(rep.slope_vs_log_n <= -0.4);
  CHECK(rep.slope_vs_log_gamma == Approx(-2 * rep.slope_vs_log_n).epsilon(1e-9));
  for (const auto& r : rep.rows) REQUIRE(r.gap >= 0);
}

TEST_CASE("WRW gap exponent depends on the noise skewness", "[generator_lab]") {
  std::vector<double> grid;
  for (int i = -20; i <= 20; ++i) grid.push_back(0.2 * i);
  const std::vector<std::uint64_t> ns{100, 1000, 10000, 100000};
  // skewed noise: the third cumulant survives, exponent 1/2 in gamma
  const auto skew = ChainModel::wrw(skew_noise());
  const auto a = gap_scan(skew, limit_of(skew), FunctionDictionary::standard(), grid, ns, 3);
  CHECK(std::abs(a.slope_vs_log_gamma - 0.5) <= 0.15);
  // symmetric noise: next order, exponent 1
  const auto sym = ChainModel::wrw(NoiseSpec::plus_minus_one());
  const auto b = gap_scan(sym, limit_of(sym), FunctionDictionary::standard(), grid, ns, 3);
  CHECK(std::abs(b.slope_vs_log_gamma - 1.0) <= 0.15);
}

TEST_CASE("Lyapunov certificates", "[generator_lab]") {
  std::vector<double> grid;
  for (int i = -40; i <= 40; ++i) grid.push_back(0.25 * i);
  const auto V = fn::polynomial({1, 0, 1}, "1+y^2");
  const auto dses = lyapunov_check(langevin_dses(), V, grid, {10, 100, 1000}, 2.0);
  CHECK(dses.pass);
  CHECK(dses.alpha > 0);

  const auto still = ChainModel::llrw(Eigen::MatrixXd::Identity(3, 3), StepSchedule(PowerLog{1, 1, 0}));
  const auto none = lyapunov_check(still, V, {0, 1, 2}, {1, 10});
  CHECK_FALSE(none.pass);
  CHECK(none.alpha <= 0);

  // truncated bandit with V = e^{theta y}
  const auto pba = truncate_wrap(ChainModel::pba(PBA{}), 10, 0.1);
  std::vector<double> ygrid;
  for (int i = 0; i <= 30; ++i) ygrid.push_back(0.1 * i);
  const auto tr = lyapunov_check(pba, fn::exponential(0.2), ygrid, {1000, 10000}, 2.0);
  CHECK(tr.pass);
}

TEST_CASE("moment bound recursion", "[generator_lab]") {
  const StepSchedule s(PowerLog{1, 1, 0});
  const auto fixed = moment_bound_recursion(2.0, 1.5, 3.0, s, 100);
  for (double v : fixed.v) REQUIRE(v == Approx(2.0).epsilon(1e-14));
  const auto down = moment_bound_recursion(10.0, 0.5, 1.0, s, 1000);
  for (std::size_t i = 1; i < down.v.size(); ++i) {
    REQUIRE(down.v[i] <= down.v[i - 1]);
    REQUIRE(down.v[i] >= 2.0);
  }
  CHECK(down.uniform == 10.0);
  CHECK_THROWS_AS(moment_bound_recursion(1, 0, 1, s, 10), ValidationError);

  // simulated E V(y_n) for the Langevin scheme stays under the bound
  const auto m = langevin_dses();
  std::vector<double> grid;
  for (int i = -40; i <= 40; ++i) grid.push_back(0.25 * i);
  const auto V = fn::polynomial({1, 0, 1}, "1+y^2");
  const auto cert = lyapunov_check(m, V, grid, {1, 10, 100}, 2.0);
  REQUIRE(cert.pass);
  const auto bound = moment_bound_recursion(V(3.0), cert.alpha, cert.beta, m.schedule(), 1000);
  const auto g = m.schedule().gamma_table(1000);
  std::vector<std::vector<double>> vals(3);
  for (std::uint64_t r = 0; r < 2000; ++r) {
    Rng rng = Rng::stream(17, r);
    State y{3.0};
    std::uint64_t n = 0;
    int c = 0;
    for (std::uint64_t stop : {10ull, 100ull, 1000ull}) {
      m.run(y, n, stop, rng, g);
      n = stop;
      vals[c++].push_back(V(y[0]));
    }
  }
  int c = 0;
  for (std::uint64_t stop : {10ull, 100ull, 1000ull}) {
    const auto sm = stats::summarize(vals[c++]);
    CHECK(sm.mean <= bound.v[stop] + 3 * sm.se);
  }
}

TEST_CASE("martingale checks", "[generator_lab]") {
  const auto wrw = ChainModel::wrw(NoiseSpec::plus_minus_one());
  const auto trivial = martingale_check(wrw, fn::constant(1.0), {10, 100}, 100, 1);
  for (const auto& r : trivial.rows) {
    CHECK(r.mean_M == 0.0);
    CHECK(r.mean_centered_square == 0.0);
  }
  CHECK(trivial.pass);

  const auto still = ChainModel::llrw(Eigen::MatrixXd::Identity(2, 2), StepSchedule(PowerLog{1, 1, 0}));
  const auto frozen = martingale_check(still, fn::sine(1.0), {10, 100}, 50, 2, State{1.0});
  for (const auto& r : frozen.rows) CHECK(r.mean_M == 0.0);

  CHECK(martingale_check(wrw, fn::sine(1.0), {10, 100, 1000}, 1000, 3).pass);
  CHECK(martingale_check(ChainModel::pba(PBA{}), fn::gauss_poly(1), {10, 100, 1000}, 1000, 4).pass);
  CHECK(martingale_check(langevin_dses(), fn::cosine(0.5), {10, 100}, 1000, 5, State{1.0}).pass);
}
