#include <doctest.h>

#include <cmath>
#include <random>

#include "epiflow/policy.hpp"
#include "epiflow/scenario.hpp"

using namespace epiflow;

namespace {

RegionTable abc_table() {
    RegionTable t;
    t.codes = {"OO", "AA", "BB"};
    return t;
}

MobilitySchedule uniform_schedule(Date start, int regions, int days, double flow) {
    MobilitySchedule s(start, regions, days);
    for (int d = 0; d < days; ++d)
        for (int o = 0; o < regions; ++o)
            for (int i = 0; i < regions; ++i)
                if (o != i) s.at(d).at(o, i) = flow;
    return s;
}

}  // namespace

TEST_CASE("normalize_tir") {
    SUBCASE("uniform passes untouched") {
        const std::vector<double> u(6, 1.0 / 6);
        const auto r = normalize_tir(u);
        CHECK_FALSE(r.repaired);
        for (double v : r.p) CHECK(v == doctest::Approx(1.0 / 6).epsilon(1e-15));
    }
    SUBCASE("positive vector summing to one is unchanged") {
        const std::vector<double> raw = {0.1, 0.1, 0.1, 0.1, 0.2, 0.4};
        const auto r = normalize_tir(raw);
        CHECK_FALSE(r.repaired);
        CHECK(r.p == raw);
    }
    SUBCASE("divide by the sum") {
        const std::vector<double> raw = {2, 1, 1, 1, 1, 2};
        const auto r = normalize_tir(raw);
        CHECK(r.repaired);
        const std::vector<double> want = {0.25, 0.125, 0.125, 0.125, 0.125, 0.25};
        for (int i = 0; i < 6; ++i) CHECK(r.p[i] == doctest::Approx(want[i]).epsilon(1e-15));
    }
    SUBCASE("nonpositive entries floored then renormalized") {
        const auto r = normalize_tir(std::vector<double>{0.5, 0.0, -0.2, 0.5});
        CHECK(r.repaired);
        double sum = 0;
        for (double v : r.p) {
            CHECK(v > 0.0);
            sum += v;
        }
        CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
    }
    SUBCASE("slightly off sums are repaired") {
        const auto r = normalize_tir(std::vector<double>{0.24, 0.24, 0.25, 0.25});
        CHECK(r.repaired);
        double sum = 0;
        for (double v : r.p) sum += v;
        CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
    }
    SUBCASE("unrecoverable vectors") {
        CHECK_THROWS_AS(normalize_tir(std::vector<double>{0, 0, 0}), ValidationError);
        CHECK_THROWS_AS(normalize_tir(std::vector<double>{0.5, std::nan("")}), ValidationError);
        CHECK_THROWS_AS(normalize_tir(std::vector<double>{}), ValidationError);
    }
}

TEST_CASE("apply_tir reproduces the 80,000-over-8-weeks example") {
    // Uniform baseline 10,000/week for 8 weeks; p_1 = 1/16 and p_4 = 3/16
    // give week-1 5,000 and week-4 15,000 with the 80,000 total unchanged.
    RegionTable t;
    t.codes = {"BB", "AA"};  // origin BB -> destination AA
    const Date start = Date::parse("2020-05-03");
    MobilitySchedule base(start, 2, 8 * 7);
    for (int d = 0; d < 56; ++d) base.at(d).at(0, 1) = 10000.0 / 7.0;

    std::vector<double> p(8, 2.0 / 16.0);
    p[0] = 1.0 / 16.0;
    p[3] = 3.0 / 16.0;
    TirAllocation alloc;
    alloc.dest = "AA";
    alloc.by_origin["BB"] = normalize_tir(p);

    const auto realized = apply_tir(base, alloc, {start, 8}, t);
    auto week_sum = [&](int w) {
        double s = 0;
        for (int d = 0; d < 7; ++d) s += realized.at(w * 7 + d).at(0, 1);
        return s;
    };
    CHECK(week_sum(0) == doctest::Approx(5000.0).epsilon(1e-12));
    CHECK(week_sum(3) == doctest::Approx(15000.0).epsilon(1e-12));
    double total = 0;
    for (int w = 0; w < 8; ++w) total += week_sum(w);
    CHECK(total == doctest::Approx(80000.0).epsilon(1e-12));
}

TEST_CASE("uniform allocation on a week-uniform baseline is the identity") {
    RegionTable t = abc_table();
    const Date start = Date::parse("2020-05-03");
    const auto base = uniform_schedule(start, 3, 42, 250.0);
    TirAllocation alloc;
    alloc.dest = "AA";
    alloc.by_origin["OO"] = normalize_tir(std::vector<double>(6, 1.0 / 6));
    alloc.by_origin["BB"] = normalize_tir(std::vector<double>(6, 1.0 / 6));
    const auto realized = apply_tir(base, alloc, {start, 6}, t);
    for (int d = 0; d < 42; ++d)
        for (int o = 0; o < 3; ++o)
            for (int i = 0; i < 3; ++i)
                CHECK(realized.at(d).at(o, i) == doctest::Approx(base.at(d).at(o, i)).epsilon(1e-12));
}

TEST_CASE("apply_tir preserves per-pair cycle volume on random inputs") {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> uf(0.0, 500.0);
    std::exponential_distribution<double> expo(1.0);
    RegionTable t = abc_table();
    const Date start = Date::parse("2020-05-03");

    for (int trial = 0; trial < 50; ++trial) {
        MobilitySchedule base(start, 3, 42);
        for (int d = 0; d < 42; ++d)
            for (int o = 0; o < 3; ++o)
                for (int i = 0; i < 3; ++i)
                    if (o != i) base.at(d).at(o, i) = uf(rng);

        TirAllocation alloc;
        alloc.dest = "AA";
        for (const char* origin : {"OO", "BB"}) {
            std::vector<double> p(6);
            for (double& v : p) v = expo(rng);
            alloc.by_origin[origin] = normalize_tir(p);
        }
        const auto realized = apply_tir(base, alloc, {start, 6}, t);
        for (int o = 0; o < 3; ++o) {
            double b = 0, r = 0;
            for (int d = 0; d < 42; ++d) {
                b += base.at(d).at(o, 1);
                r += realized.at(d).at(o, 1);
            }
            if (b > 0) CHECK(std::fabs(r - b) <= 1e-6 * b);
        }
    }
}

TEST_CASE("apply_tir rejects misaligned windows and bad lengths") {
    RegionTable t = abc_table();
    const Date start = Date::parse("2020-05-03");
    const auto base = uniform_schedule(start, 3, 42, 100.0);
    TirAllocation alloc;
    alloc.dest = "AA";
    alloc.by_origin["OO"] = normalize_tir(std::vector<double>(6, 1.0 / 6));
    CHECK_THROWS_AS(apply_tir(base, alloc, {start + 20, 6}, t), ValidationError);  // past the end
    CHECK_THROWS_AS(apply_tir(base, alloc, {start - 5, 6}, t), ValidationError);   // before start
    TirAllocation bad;
    bad.dest = "AA";
    bad.by_origin["OO"] = normalize_tir(std::vector<double>(4, 0.25));
    CHECK_THROWS_AS(apply_tir(base, bad, {start, 6}, t), ValidationError);  // 4 weeks vs 6
}

TEST_CASE("apply_sis") {
    RegionTable t = abc_table();
    const Date start = Date::parse("2020-06-01");
    MobilitySchedule base(start, 3, 14);
    for (int d = 0; d < 14; ++d) {
        base.at(d).at(0, 1) = 100.0;  // OO -> AA
        base.at(d).at(0, 2) = 100.0;  // OO -> BB
    }

    SUBCASE("factor 1.0 leaves the schedule unchanged") {
        const SisOrder o{"AA", "OO", 1.0, 14, true, start};
        const auto res = apply_sis(base, std::vector<SisOrder>{o}, t);
        for (int d = 0; d < 14; ++d) {
            CHECK(res.schedule.at(d).at(0, 1) == 100.0);
            CHECK(res.schedule.at(d).at(0, 2) == 100.0);
        }
    }
    SUBCASE("suppressed volume spills to the other destination") {
        const SisOrder o{"AA", "OO", 0.5, 14, true, start};
        const auto res = apply_sis(base, std::vector<SisOrder>{o}, t);
        CHECK(res.schedule.at(3).at(0, 1) == doctest::Approx(50.0));
        CHECK(res.schedule.at(3).at(0, 2) == doctest::Approx(150.0));
        double outflow = res.schedule.at(3).row_sum(0);
        CHECK(outflow == doctest::Approx(200.0).epsilon(1e-12));
        CHECK(res.dropped_days == 0);
    }
    SUBCASE("full coordination drops the spillover") {
        const std::vector<SisOrder> orders = {{"AA", "OO", 0.5, 14, true, start},
                                              {"BB", "OO", 0.5, 14, true, start}};
        const auto res = apply_sis(base, orders, t);
        CHECK(res.schedule.at(0).at(0, 1) == doctest::Approx(50.0));
        CHECK(res.schedule.at(0).at(0, 2) == doctest::Approx(50.0));
        CHECK(res.schedule.at(0).row_sum(0) == doctest::Approx(100.0));
        CHECK(res.dropped_days == 14);
    }
    SUBCASE("without redistribution no flow ever increases") {
        const SisOrder o{"AA", "OO", 0.5, 14, false, start};
        const auto res = apply_sis(base, std::vector<SisOrder>{o}, t);
        for (int d = 0; d < 14; ++d)
            for (int a = 0; a < 3; ++a)
                for (int b = 0; b < 3; ++b)
                    CHECK(res.schedule.at(d).at(a, b) <= base.at(d).at(a, b) + 1e-12);
    }
    SUBCASE("window bounds are respected") {
        const SisOrder o{"AA", "OO", 0.5, 7, true, start + 3};
        const auto res = apply_sis(base, std::vector<SisOrder>{o}, t);
        CHECK(res.schedule.at(2).at(0, 1) == 100.0);
        CHECK(res.schedule.at(3).at(0, 1) == 50.0);
        CHECK(res.schedule.at(9).at(0, 1) == 50.0);
        CHECK(res.schedule.at(10).at(0, 1) == 100.0);
    }
    SUBCASE("one order per acting destination per round") {
        const std::vector<SisOrder> orders = {{"AA", "OO", 0.5, 14, true, start},
                                              {"AA", "BB", 0.5, 14, true, start}};
        CHECK_THROWS_WITH_AS(apply_sis(base, orders, t), doctest::Contains("one order"),
                             ValidationError);
    }
    SUBCASE("invalid factor and window") {
        CHECK_THROWS_AS(apply_sis(base, std::vector<SisOrder>{{"AA", "OO", 0.0, 14, true, start}}, t),
                        ValidationError);
        CHECK_THROWS_AS(apply_sis(base, std::vector<SisOrder>{{"AA", "OO", 1.5, 14, true, start}}, t),
                        ValidationError);
        CHECK_THROWS_AS(apply_sis(base, std::vector<SisOrder>{{"AA", "OO", 0.5, 0, true, start}}, t),
                        ValidationError);
    }
}

TEST_CASE("compile_tis") {
    RegionTable t = abc_table();
    const Date start = Date::parse("2020-06-01");

    SUBCASE("eta 0 compiles to an empty calendar") {
        const TisOrder o{"AA", "OO", 0.0, 14, start};
        const auto cal = compile_tis(std::vector<TisOrder>{o}, t);
        CHECK(cal.empty());
    }
    SUBCASE("orders cover their window") {
        const TisOrder o{"AA", "OO", 1.0, 14, start};
        const auto cal = compile_tis(std::vector<TisOrder>{o}, t);
        CHECK(cal.at(start).size() == 1);
        CHECK(cal.at(start + 13).size() == 1);
        CHECK(cal.at(start + 14).empty());
        CHECK(cal.at(start)[0].eta == 1.0);
    }
    SUBCASE("one order per destination per round") {
        const std::vector<TisOrder> orders = {{"AA", "OO", 1.0, 14, start},
                                              {"AA", "BB", 1.0, 14, start}};
        CHECK_THROWS_AS(compile_tis(orders, t), ValidationError);
    }
    SUBCASE("eta bounds") {
        CHECK_THROWS_AS(compile_tis(std::vector<TisOrder>{{"AA", "OO", 1.2, 14, start}}, t),
                        ValidationError);
    }
}

TEST_CASE("classify_policy worked examples") {
    const std::vector<double> strict = {0.05, 0.05, 0.15, 0.15, 0.30, 0.30};
    CHECK(classify_policy(strict) == PolicyType::StrictFirst);  // p1=0.10, p3=0.60
    const std::vector<double> uniform(6, 1.0 / 6);
    CHECK(classify_policy(uniform) == PolicyType::Balanced);  // p1=p3=1/3
    const std::vector<double> relaxed = {0.25, 0.25, 0.20, 0.10, 0.10, 0.10};
    CHECK(classify_policy(relaxed) == PolicyType::RelaxedFirst);  // p1=0.50, p3=0.30
}

TEST_CASE("classification grid partitions the simplex") {
    // Every composition of 20 steps of 0.05 over 6 positive weeks lands in
    // exactly one class, and the strict/relaxed predicates never overlap.
    int counts[3] = {0, 0, 0};
    int total = 0;
    std::vector<int> k(6, 0);
    // enumerate k_i >= 1, sum k_i = 20 (fractions k_i * 0.05)
    for (k[0] = 1; k[0] <= 15; ++k[0])
        for (k[1] = 1; k[1] <= 16 - k[0]; ++k[1])
            for (k[2] = 1; k[2] <= 17 - k[0] - k[1]; ++k[2])
                for (k[3] = 1; k[3] <= 18 - k[0] - k[1] - k[2]; ++k[3])
                    for (k[4] = 1; k[4] <= 19 - k[0] - k[1] - k[2] - k[3]; ++k[4]) {
                        k[5] = 20 - k[0] - k[1] - k[2] - k[3] - k[4];
                        if (k[5] < 1) continue;
                        std::vector<double> p(6);
                        for (int i = 0; i < 6; ++i) p[i] = k[i] * 0.05;
                        const double early = p[0] + p[1], late = p[4] + p[5];
                        const bool is_strict = early <= 0.3 && late >= 0.4;
                        const bool is_relaxed = early >= 0.4 && late <= 0.3;
                        CHECK_FALSE((is_strict && is_relaxed));
                        const PolicyType got = classify_policy(p);
                        if (is_strict) CHECK(got == PolicyType::StrictFirst);
                        else if (is_relaxed) CHECK(got == PolicyType::RelaxedFirst);
                        else CHECK(got == PolicyType::Balanced);
                        ++counts[static_cast<int>(got)];
                        ++total;
                    }
    CHECK(total == 11628);  // C(19,5) compositions
    CHECK(counts[0] > 0);
    CHECK(counts[1] > 0);
    CHECK(counts[2] > 0);
    CHECK(counts[0] + counts[1] + counts[2] == total);
}

TEST_CASE("reversing a strict-first allocation yields relaxed-first") {
    std::mt19937_64 rng(5);
    std::exponential_distribution<double> expo(1.0);
    int seen = 0;
    while (seen < 25) {
        std::vector<double> p(6);
        for (double& v : p) v = expo(rng);
        const auto norm = normalize_tir(p).p;
        if (classify_policy(norm) != PolicyType::StrictFirst) continue;
        ++seen;
        std::vector<double> rev(norm.rbegin(), norm.rend());
        CHECK(classify_policy(rev) == PolicyType::RelaxedFirst);
    }
}

TEST_CASE("classification for other horizons uses ceil-split thirds") {
    // H=4 splits as {1,2}, {3}, {4}.
    CHECK(classify_policy(std::vector<double>{0.1, 0.1, 0.3, 0.5}, 4) == PolicyType::StrictFirst);
    CHECK(classify_policy(std::vector<double>{0.3, 0.3, 0.3, 0.1}, 4) == PolicyType::RelaxedFirst);
    CHECK_THROWS_AS(classify_policy(std::vector<double>{0.5, 0.5}, 2), ValidationError);
    CHECK_THROWS_AS(classify_policy(std::vector<double>(5, 0.2), 6), ValidationError);
}
