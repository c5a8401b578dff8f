#include "catch_amalgamated.hpp"

#include <cmath>
#include <thread>

#include "aptlab/schedule.hpp"

using namespace aptlab;
using Catch::Approx;

TEST_CASE("gamma_at follows each family", "[schedule]") {
  CHECK(StepSchedule(PowerLog{1, 1, 0}).gamma_at(4) == 0.25);
  CHECK(StepSchedule(PowerLog{1, 0.5, 0}).gamma_at(4) == 0.5);
  const StepSchedule e(ExplicitSteps{{0.5, 0.5}, PowerLog{1, 1, 0}});
  CHECK(e.gamma_at(1) == 0.5);
  CHECK(e.gamma_at(2) == 0.5);
  CHECK(e.gamma_at(3) == Approx(1.0 / 3.0).epsilon(1e-15));
  CHECK_THROWS_AS(e.gamma_at(0), ValidationError);
  // log(n+1) in the denominator
  CHECK(StepSchedule(PowerLog{1, 1, 0.5}).gamma_at(3) == Approx(1.0 / (3.0 * std::sqrt(std::log(4.0)))));
}

TEST_CASE("weighted steps are omega_n / running sum", "[schedule]") {
  const StepSchedule s(WeightedSteps{2.0});
  double sum = 0;
  for (int n = 1; n <= 50; ++n) {
    sum += double(n) * n;
    CHECK(s.gamma_at(n) == Approx(double(n) * n / sum).epsilon(1e-14));
  }
  CHECK(StepSchedule(WeightedSteps{0.0}).gamma_at(7) == Approx(1.0 / 7.0));
  CHECK_THROWS_AS(StepSchedule(WeightedSteps{-1.5}), ValidationError);
}

TEST_CASE("tau is the compensated partial sum", "[schedule]") {
  const StepSchedule h(PowerLog{1, 1, 0});
  CHECK(h.tau(0) == 0.0);
  CHECK(h.tau(3) == Approx(11.0 / 6.0).epsilon(1e-15));
  CHECK(StepSchedule(PowerLog{1, 0.5, 0}).tau(2) == Approx(1.0 + 1.0 / std::sqrt(2.0)).epsilon(1e-15));
  // harmonic number oracle in long double
  long double H = 0;
  for (int k = 1; k <= 1000000; ++k) H += 1.0L / k;
  CHECK(std::abs(h.tau(1000000) - double(H)) < 1e-9);
}

TEST_CASE("m_of_t inverts tau", "[schedule]") {
  const StepSchedule h(PowerLog{1, 1, 0});
  CHECK(h.m_of_t(0.0) == 0);
  CHECK(h.m_of_t(1.2) == 1);
  CHECK(h.m_of_t(h.tau(5)) == 5);
  for (std::uint64_t n : {0ull, 1ull, 2ull, 17ull, 1000ull, 123456ull}) CHECK(h.m_of_t(h.tau(n)) == n);
  for (double t : {0.3, 1.0, 2.71, 9.5, 12.0}) {
    const auto m = h.m_of_t(t);
    CHECK(h.tau(m) <= t);
    CHECK(t < h.tau(m + 1));
  }
  CHECK_THROWS_AS(h.m_of_t(-1.0), ValidationError);
}

TEST_CASE("schedules are non-increasing", "[schedule]") {
  for (const StepSchedule& s : {StepSchedule(PowerLog{2, 1, 0}), StepSchedule(PowerLog{1, 0.5, 1}),
                                StepSchedule(WeightedSteps{2.0}), StepSchedule(WeightedSteps{-1.0}),
                                StepSchedule(ExplicitSteps{{1.0}, PowerLog{2, 1, 0}})}) {
    const auto g = s.gamma_table(100000);
    for (std::size_t n = 2; n < g.size(); ++n) REQUIRE(g[n] <= g[n - 1]);
  }
}

TEST_CASE("invalid schedules are rejected", "[schedule]") {
  CHECK_THROWS_WITH(StepSchedule(PowerLog{1, 1.5, 0}), Catch::Matchers::ContainsSubstring("diverge"));
  CHECK_THROWS_AS(StepSchedule(PowerLog{0, 1, 0}), ValidationError);
  CHECK_THROWS_AS(StepSchedule(ExplicitSteps{{0.25, 0.5}, PowerLog{1, 1, 0}}), ValidationError);
}

TEST_CASE("lambda closed form covers the three regimes", "[schedule]") {
  CHECK(lambda_closed_form(StepSchedule(PowerLog{2, 1, 0}), RateSequence(PowerLog{1, 1, 0})) == 0.5);
  const StepSchedule slow(PowerLog{1, 0.5, 0});
  CHECK(lambda_closed_form(slow, RateSequence::same_as(slow)) == 0.0);
  const StepSchedule log_(PowerLog{1, 1, 0.5});
  CHECK(std::isinf(lambda_closed_form(log_, RateSequence::same_as(log_))));
  // eps = 0 is read as eps = gamma
  CHECK(lambda_closed_form(StepSchedule(PowerLog{2, 1, 0}), RateSequence()) == 0.5);
  // sqrt(gamma) rate: (1/2 ^ 1)/A
  CHECK(lambda_closed_form(StepSchedule(PowerLog{1, 1, 0}), RateSequence(PowerLog{1, 0.5, 0})) == 0.5);
  CHECK_THROWS_AS(lambda_closed_form(StepSchedule(PowerLog{1, 1, 2}), RateSequence()), ValidationError);
  CHECK_THROWS_AS(lambda_closed_form(StepSchedule(PowerLog{1, 1, 0}), RateSequence(PowerLog{1, 0.5, 1})),
                  ValidationError);
}

TEST_CASE("lambda estimate approaches the closed form", "[schedule]") {
  const StepSchedule g(PowerLog{2, 1, 0});
  // independent oracle: plain long double sums over the last decade
  long double tau = 0, best = -1e300;
  for (int n = 1; n <= 1000000; ++n) {
    tau += 2.0L / n;
    if (n >= 100000) best = std::max(best, -std::log(2.0L / n) / tau);
  }
  const double est = lambda_estimate(g, RateSequence::same_as(g), 1000000);
  CHECK(est == Approx(double(best)).epsilon(1e-9));
  CHECK(est == Approx(0.4559).margin(1e-4));
  CHECK(std::abs(est - 0.5) < 0.05);

  const StepSchedule s(PowerLog{1, 0.5, 0});
  CHECK(lambda_estimate(s, RateSequence::same_as(s), 1000000) < 0.01);

  const StepSchedule h(PowerLog{1, 1, 0});
  CHECK(lambda_estimate(h, RateSequence(), 10000) == lambda_estimate(h, RateSequence::same_as(h), 10000));
  CHECK_THROWS_AS(lambda_estimate(h, RateSequence(), 999), ValidationError);
}

TEST_CASE("tau cache is safe under concurrent readers", "[schedule]") {
  const StepSchedule s(PowerLog{1, 0.7, 0});
  std::vector<double> a(4), b(4);
  std::vector<std::thread> th;
  for (int i = 0; i < 4; ++i) th.emplace_back([&, i] { a[i] = s.tau(200000 + 1000 * i); });
  for (auto& t : th) t.join();
  const StepSchedule fresh(PowerLog{1, 0.7, 0});
  for (int i = 0; i < 4; ++i) b[i] = fresh.tau(200000 + 1000 * i);
  CHECK(a == b);
}
