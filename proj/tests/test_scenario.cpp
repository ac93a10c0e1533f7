#include <doctest.h>

#include "epiflow/scenario.hpp"
#include "support/fixtures.hpp"

using namespace epiflow;

TEST_CASE("legal two-region config is accepted unchanged") {
    ScenarioConfig cfg = fixtures::two_region_config();
    const ScenarioConfig v = validate_scenario(cfg);
    CHECK(v.validated);
    CHECK(v.regions[0].id.index == 0);
    CHECK(v.regions[1].id.index == 1);
    CHECK(v.regions[0].initial.S == cfg.regions[0].initial.S);
    CHECK(v.baseline.days() == cfg.baseline.days());
}

TEST_CASE("validation is idempotent") {
    const ScenarioConfig v1 = validate_scenario(fixtures::two_region_config());
    const ScenarioConfig v2 = validate_scenario(v1);
    CHECK(v2.validated);
    CHECK(v2.regions[0].id.index == v1.regions[0].id.index);
    CHECK(v2.baseline.at(0).at(0, 1) == v1.baseline.at(0).at(0, 1));
}

TEST_CASE("beta_Q must be strictly lower than beta_I") {
    ScenarioConfig cfg = fixtures::two_region_config();
    cfg.regions[0].params.base.beta_I = 0.3;
    cfg.regions[0].params.base.beta_Q = 0.3;
    CHECK_THROWS_WITH_AS(validate_scenario(cfg),
                         doctest::Contains("strictly lower"), ValidationError);
}

TEST_CASE("cycle calendar ending before the simulation end is a gap") {
    ScenarioConfig cfg = fixtures::two_region_config(2);  // needs two 6-week cycles
    cfg.cycle_starts = {cfg.start_date + cfg.warmup_days};  // truncated calendar
    CHECK_THROWS_WITH_AS(validate_scenario(cfg), doctest::Contains("calendar gap"),
                         ValidationError);
}

TEST_CASE("misaligned explicit calendar is rejected") {
    ScenarioConfig cfg = fixtures::two_region_config(2);
    cfg.cycle_starts = {cfg.start_date + cfg.warmup_days,
                        cfg.start_date + cfg.warmup_days + 35};  // not H*7 apart
    CHECK_THROWS_AS(validate_scenario(cfg), ValidationError);
}

TEST_CASE("negative population is rejected") {
    ScenarioConfig cfg = fixtures::two_region_config();
    cfg.regions[1].initial.I = -5;
    CHECK_THROWS_WITH_AS(validate_scenario(cfg), doctest::Contains("negative"), ValidationError);
}

TEST_CASE("duplicate and malformed region codes are rejected") {
    ScenarioConfig cfg = fixtures::two_region_config();
    cfg.regions[1].id.code = "AA";
    CHECK_THROWS_AS(validate_scenario(cfg), ValidationError);
    cfg.regions[1].id.code = "bb";
    CHECK_THROWS_AS(validate_scenario(cfg), ValidationError);
}

TEST_CASE("delta + gamma + mu above one overdraws I") {
    ScenarioConfig cfg = fixtures::two_region_config();
    cfg.regions[0].params.base.delta = 0.9;
    cfg.regions[0].params.base.gamma = 0.3;
    CHECK_THROWS_AS(validate_scenario(cfg), ValidationError);
}

TEST_CASE("schedule must cover every cycle day") {
    ScenarioConfig cfg = fixtures::two_region_config();
    RegionTable table = cfg.region_table();
    SyntheticFlowSpec spec;
    cfg.baseline = generate_synthetic_flows(table, cfg.start_date, 30, spec);  // too short
    CHECK_THROWS_WITH_AS(validate_scenario(cfg), doctest::Contains("does not cover"),
                         ValidationError);
}

TEST_CASE("scripted fractions must name known regions with H entries") {
    ScenarioConfig cfg = fixtures::two_region_config();
    cfg.regions[0].scripted_tir["ZZ"] = std::vector<double>(6, 1.0 / 6);
    CHECK_THROWS_AS(validate_scenario(cfg), ValidationError);
    cfg.regions[0].scripted_tir.clear();
    cfg.regions[0].scripted_tir["BB"] = {0.5, 0.5};
    CHECK_THROWS_AS(validate_scenario(cfg), ValidationError);
}

TEST_CASE("scenario JSON round trip") {
    const std::string text = R"({
      "name": "mini",
      "start_date": "2020-04-12",
      "end_date": "2020-07-05",
      "warmup_days": 21,
      "horizon_weeks": 2,
      "seed": 5,
      "regions": [
        {"code": "AA",
         "initial": {"S": 10000, "E": 20, "I": 10, "Q": 5, "R": 0, "D": 0},
         "params": {"beta_I": 0.3, "beta_Q": 0.05, "sigma": 0.2, "delta": 0.1, "gamma": 0.08, "mu": 0.002},
         "param_steps": [{"from": "2020-05-01", "delta": 0.2}]},
        {"code": "BB",
         "initial": {"S": 5000, "E": 0, "I": 0, "Q": 0, "R": 0, "D": 0},
         "params": {"beta_I": 0.25, "beta_Q": 0.04, "sigma": 0.2, "delta": 0.1, "gamma": 0.08, "mu": 0.002}}
      ],
      "flows": {"kind": "synthetic", "base": 50.0}
    })";
    const ScenarioConfig cfg = validate_scenario(parse_scenario_json(text));
    CHECK(cfg.num_regions() == 2);
    CHECK(cfg.horizon_weeks == 2);
    CHECK(cfg.regions[0].params.at(Date::parse("2020-04-20")).delta == doctest::Approx(0.1));
    CHECK(cfg.regions[0].params.at(Date::parse("2020-05-02")).delta == doctest::Approx(0.2));
    // step inherits unmentioned fields
    CHECK(cfg.regions[0].params.at(Date::parse("2020-05-02")).beta_I == doctest::Approx(0.3));
    CHECK(cycle_calendar(cfg).size() == 5);  // (84-21)/14 = 4.5 -> 5 cycles, last clipped
}

TEST_CASE("synthetic flows have identical weekly totals") {
    RegionTable table;
    table.codes = {"AA", "BB"};
    SyntheticFlowSpec spec;
    spec.base = 100.0;
    spec.weekday_amplitude = 0.4;
    const auto sched = generate_synthetic_flows(table, Date::parse("2020-04-12"), 28, spec);
    double w0 = 0, w1 = 0;
    for (int d = 0; d < 7; ++d) w0 += sched.at(d).at(0, 1);
    for (int d = 7; d < 14; ++d) w1 += sched.at(d).at(0, 1);
    CHECK(w0 == doctest::Approx(w1).epsilon(1e-12));
    CHECK(sched.at(3).at(0, 0) == 0.0);  // zero diagonal
}
