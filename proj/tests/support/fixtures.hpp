#pragma once

// Shared scenario builders for the unit and acceptance suites.

#include <random>
#include <string>
#include <vector>

#include "epiflow/scenario.hpp"
#include "epiflow/types.hpp"

namespace fixtures {

using namespace epiflow;

inline Region make_region(const std::string& code, CompartmentState init, ParamSet params,
                          const std::string& backend = "expert") {
    Region r;
    r.id.code = code;
    r.initial = init;
    r.params.base = params;
    r.backend = backend;
    return r;
}

/// Two quiet regions with constant cross flows; 21-day warmup + one 6-week
/// cycle by default.
inline ScenarioConfig two_region_config(int cycles = 1, double flow = 200.0) {
    ScenarioConfig cfg;
    cfg.name = "two_region";
    cfg.start_date = Date::parse("2020-04-12");
    cfg.warmup_days = 21;
    cfg.horizon_weeks = 6;
    cfg.end_date = cfg.start_date + 21 + cycles * 42;
    cfg.seed = 7;

    const ParamSet p{0.25, 0.05, 0.2, 0.1, 0.08, 0.004};
    cfg.regions.push_back(make_region("AA", {99000, 400, 300, 200, 100, 0}, p));
    cfg.regions.push_back(make_region("BB", {49500, 200, 150, 100, 50, 0}, p));

    RegionTable table;
    table.codes = {"AA", "BB"};
    SyntheticFlowSpec spec;
    spec.base = flow;
    cfg.baseline = generate_synthetic_flows(table, cfg.start_date, cfg.sim_days() + 42, spec);
    return cfg;
}

/// Hot origin AA exporting into four initially clean destinations; the shape
/// used for directional policy checks.
inline ScenarioConfig planted_outbreak_config(int n_dest = 4, int cycles = 4) {
    ScenarioConfig cfg;
    cfg.name = "planted_outbreak";
    cfg.start_date = Date::parse("2020-04-12");
    cfg.warmup_days = 21;
    cfg.horizon_weeks = 6;
    cfg.end_date = cfg.start_date + 21 + cycles * 42;
    cfg.seed = 11;

    // Young exponential outbreak in the source: IR trend stays positive
    // through warmup. Destinations amplify faster once seeded (lower
    // detection), so delaying imports pays off.
    const ParamSet hot{0.22, 0.02, 0.25, 0.12, 0.05, 0.004};
    const ParamSet clean{0.19, 0.02, 0.25, 0.07, 0.05, 0.003};

    cfg.regions.push_back(
        make_region("AA", {2e6 - 86000, 16000, 20000, 20000, 30000, 0}, hot));
    const char* codes[] = {"BB", "CC", "DD", "EE", "FF", "GG"};
    for (int i = 0; i < n_dest; ++i)
        cfg.regions.push_back(make_region(codes[i], {5e7, 0, 0, 0, 0, 0}, clean));

    RegionTable table = cfg.region_table();
    SyntheticFlowSpec spec;
    spec.base = 800.0;
    for (int i = 0; i < n_dest; ++i) spec.pair_scale["AA->" + std::string(codes[i])] = 3.75;
    cfg.baseline = generate_synthetic_flows(table, cfg.start_date, cfg.sim_days() + 42, spec);
    return cfg;
}

/// Randomized scenario for the conservation suite: params inside the
/// documented plausibility bounds (with delta+gamma+mu <= 1), random flows
/// that can exceed populations to exercise the outflow cap.
inline ScenarioConfig random_config(std::mt19937_64& rng, bool extreme_flows = false) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::uniform_int_distribution<int> nr(2, 5);
    const int n = nr(rng);

    ScenarioConfig cfg;
    cfg.name = "random";
    cfg.start_date = Date::parse("2020-06-01");
    cfg.warmup_days = 7;
    cfg.horizon_weeks = 2;
    cfg.end_date = cfg.start_date + 63;
    cfg.seed = rng();

    for (int i = 0; i < n; ++i) {
        ParamSet p;
        p.beta_I = 0.05 + 0.95 * u(rng);
        p.beta_Q = p.beta_I * (0.05 + 0.9 * u(rng));
        p.sigma = 1.0 / 14.0 + (0.5 - 1.0 / 14.0) * u(rng);
        do {
            p.delta = u(rng);
            p.gamma = 1.0 / 30.0 + (1.0 / 3.0 - 1.0 / 30.0) * u(rng);
            p.mu = 0.05 * u(rng);
        } while (p.delta + p.gamma + p.mu > 1.0);

        const double pop = 1e4 + 1e6 * u(rng);
        CompartmentState init;
        init.E = pop * 0.02 * u(rng);
        init.I = pop * 0.02 * u(rng);
        init.Q = pop * 0.02 * u(rng);
        init.R = pop * 0.10 * u(rng);
        init.D = pop * 0.01 * u(rng);
        init.S = pop - init.E - init.I - init.Q - init.R;
        cfg.regions.push_back(make_region("R" + std::to_string(i), init, p));
        cfg.regions.back().id.code = std::string(1, 'A' + i) + std::string(1, 'A' + i);
    }

    RegionTable table = cfg.region_table();
    cfg.baseline = MobilitySchedule(cfg.start_date, n, cfg.sim_days() + 14);
    for (int day = 0; day < cfg.baseline.days(); ++day)
        for (int o = 0; o < n; ++o)
            for (int d = 0; d < n; ++d) {
                if (o == d) continue;
                const double pop = cfg.regions[o].initial.total();
                const double lo_scale = 0.02, hi_scale = extreme_flows ? 1.5 : 0.2;
                cfg.baseline.at(day).at(o, d) =
                    pop * (lo_scale + (hi_scale - lo_scale) * u(rng)) / n;
            }
    return cfg;
}

}  // namespace fixtures
