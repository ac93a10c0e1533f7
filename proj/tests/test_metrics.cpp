#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "epiflow/metrics.hpp"

using namespace epiflow;

namespace {

Trajectory make_trajectory(const std::vector<std::vector<CompartmentState>>& days) {
    Trajectory t;
    t.start = Date::parse("2020-05-01");
    t.days = days;
    t.cum_q.assign(days.size(), std::vector<double>(days[0].size(), 0.0));
    return t;
}

}  // namespace

TEST_CASE("rates on a constant trajectory") {
    const CompartmentState s{9000, 0, 0, 500, 400, 100};
    const Trajectory t = make_trajectory({{s}, {s}, {s}});
    CHECK(incidence_rate(t, 0, 0) == 0.0);
    CHECK(death_rate(t, 0, 0) == 0.0);
    CHECK(active_case_rate(t, 0, 1) == doctest::Approx(500.0 / 9900.0));
}

TEST_CASE("incidence rate by hand: Q 100 -> 150 over N = 10000") {
    CompartmentState a{9650, 100, 100, 100, 50, 0};   // living 10000
    CompartmentState b = a;
    b.Q = 150;
    const Trajectory t = make_trajectory({{a}, {b}});
    CHECK(incidence_rate(t, 0, 0) == doctest::Approx(0.005).epsilon(1e-12));
}

TEST_CASE("negative Q change clamps to zero incidence") {
    CompartmentState a{9650, 100, 100, 100, 50, 0};
    CompartmentState b = a;
    b.Q = 60;
    const Trajectory t = make_trajectory({{a}, {b}});
    CHECK(incidence_rate(t, 0, 0) == 0.0);
}

TEST_CASE("terminal-day IR and DR are out of range") {
    const CompartmentState s{9000, 0, 0, 500, 400, 100};
    const Trajectory t = make_trajectory({{s}, {s}});
    CHECK_THROWS_AS(incidence_rate(t, 0, 1), ValidationError);
    CHECK_THROWS_AS(death_rate(t, 0, 1), ValidationError);
    CHECK_NOTHROW(active_case_rate(t, 0, 1));
    CHECK_THROWS_AS(active_case_rate(t, 0, 2), ValidationError);
}

TEST_CASE("period averages equal the mean of dailies") {
    std::mt19937_64 rng(12);
    std::uniform_real_distribution<double> u(0.0, 100.0);
    std::vector<std::vector<CompartmentState>> days;
    for (int t = 0; t < 30; ++t) {
        CompartmentState s{50000, u(rng), u(rng), 1000.0 + 10.0 * t, u(rng), 5.0 * t};
        days.push_back({s});
    }
    const Trajectory t = make_trajectory(days);
    const RateSeries rs = rate_series(t, 0);
    double ir = 0, dr = 0, acr = 0;
    for (double v : rs.ir) ir += v;
    for (double v : rs.dr) dr += v;
    for (double v : rs.acr) acr += v;
    CHECK(rs.ir_mean == doctest::Approx(ir / rs.ir.size()).epsilon(1e-12));
    CHECK(rs.dr_mean == doctest::Approx(dr / rs.dr.size()).epsilon(1e-12));
    CHECK(rs.acr_mean == doctest::Approx(acr / rs.acr.size()).epsilon(1e-12));
}

TEST_CASE("equity coefficient") {
    SUBCASE("equal positive improvements are perfectly equitable") {
        const std::vector<double> x = {0.2, 0.2, 0.2};
        const EquityResult e = equity_coefficient(x);
        CHECK(e.defined);
        CHECK(e.gini == doctest::Approx(0.0).epsilon(1e-12));
        CHECK(e.equity == doctest::Approx(1.0).epsilon(1e-12));
    }
    SUBCASE("single beneficiary over three regions: E = 1/3") {
        const std::vector<double> x = {1.0, 0.0, 0.0};
        const EquityResult e = equity_coefficient(x);
        CHECK(e.defined);
        CHECK(e.gini == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
        CHECK(e.equity == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
    }
    SUBCASE("permutation invariance") {
        std::mt19937_64 rng(4);
        std::uniform_real_distribution<double> u(0.0, 1.0);
        for (int trial = 0; trial < 20; ++trial) {
            std::vector<double> x(6);
            for (double& v : x) v = u(rng);
            std::vector<double> y = x;
            std::shuffle(y.begin(), y.end(), rng);
            CHECK(equity_coefficient(x).gini ==
                  doctest::Approx(equity_coefficient(y).gini).epsilon(1e-12));
        }
    }
    SUBCASE("population-replication invariance") {
        std::mt19937_64 rng(9);
        std::uniform_real_distribution<double> u(0.0, 1.0);
        for (int trial = 0; trial < 20; ++trial) {
            std::vector<double> x(5);
            for (double& v : x) v = u(rng);
            std::vector<double> doubled = x;
            doubled.insert(doubled.end(), x.begin(), x.end());
            CHECK(equity_coefficient(x).gini ==
                  doctest::Approx(equity_coefficient(doubled).gini).epsilon(1e-12));
        }
    }
    SUBCASE("all-zero improvements are undefined, not fake equity") {
        const std::vector<double> x = {0.0, 0.0, 0.0};
        CHECK_FALSE(equity_coefficient(x).defined);
    }
    SUBCASE("negative inputs are rejected") {
        const std::vector<double> x = {0.5, -0.1};
        CHECK_THROWS_AS(equity_coefficient(x), ValidationError);
    }
}

TEST_CASE("improvements formula and clamping") {
    const std::vector<double> ground = {1000, 500, 100};
    const std::vector<double> agent = {800, 600, 100};
    const ImprovementVector iv = improvements(ground, agent, 1e-9);
    CHECK(iv.delta[0] == doctest::Approx(0.2).epsilon(1e-12));
    CHECK(iv.delta[1] == doctest::Approx(-0.2).epsilon(1e-12));
    CHECK(iv.delta[2] == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(iv.clamped[0] == doctest::Approx(0.2));
    CHECK(iv.clamped[1] == 0.0);
}

TEST_CASE("forecast") {
    SUBCASE("flat series stays flat") {
        const std::vector<double> series(20, 400.0);
        const auto f = forecast_cumulative(series, 10);
        REQUIRE(f.size() == 30);
        for (double v : f) CHECK(v == 400.0);
    }
    SUBCASE("constant increments: C_T + 180 * cbar exactly") {
        std::vector<double> series;
        for (int i = 0; i <= 14; ++i) series.push_back(1000.0 - 10.0 * (14 - i));
        REQUIRE(series.back() == 1000.0);
        const auto f = forecast_cumulative(series, 180);
        CHECK(f.back() == doctest::Approx(2800.0).epsilon(1e-12));
    }
    SUBCASE("forecast is affine in the horizon day") {
        std::mt19937_64 rng(3);
        std::uniform_real_distribution<double> u(0.0, 10.0);
        std::vector<double> series = {0.0};
        for (int i = 0; i < 25; ++i) series.push_back(series.back() + u(rng));
        const auto f = forecast_cumulative(series, 50);
        const double slope = f[series.size()] - series.back();
        for (std::size_t h = 2; h + series.size() <= f.size(); ++h) {
            const double expected = series.back() + slope * h;
            CHECK(f[series.size() + h - 1] == doctest::Approx(expected).epsilon(1e-9));
        }
    }
    SUBCASE("too-short series errors") {
        const std::vector<double> series(14, 1.0);
        CHECK_THROWS_AS(forecast_cumulative(series, 10), ValidationError);
    }
}
