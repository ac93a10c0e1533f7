#include "epiflow/calibration.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>

#include "epiflow/dynamics.hpp"
#include "epiflow/ingest.hpp"
#include "epiflow/optimize.hpp"

namespace epiflow {

namespace {

struct WindowSlice {
    int first = 0;  // index of window.start in the observed series
    int days = 0;
};

WindowSlice slice_for(const ObservedSeries& obs, const CalibrationWindow& window) {
    const auto off = window.start - obs.start;
    if (off < 0 || off + window.days() > obs.days())
        throw ValidationError("calibration window not covered by observations");
    return {static_cast<int>(off), window.days()};
}

std::vector<CompartmentState> initial_states(const ObservedSeries& obs, int first,
                                             const CalibrationOptions& options) {
    const int n = obs.num_regions();
    if (static_cast<int>(options.populations.size()) != n)
        throw ValidationError("calibration options must provide one population per region");
    std::vector<CompartmentState> init(n);
    for (int r = 0; r < n; ++r) {
        const double active0 = obs.active[r][first];
        CompartmentState s;
        s.Q = active0;
        s.R = obs.recovered[r][first];
        s.D = obs.deaths[r][first];
        s.E = options.exposed_seed_factor * active0;
        s.I = options.infected_seed_factor * active0;
        s.S = options.populations[r] - s.E - s.I - s.Q - s.R - s.D;
        if (!(s.S > 0.0))
            throw ValidationError("region " + obs.region_codes[r] +
                                  ": population too small for observed caseload");
        init[r] = s;
    }
    return init;
}

/// Simulated daily increments of confirmed and deaths under constant params.
void simulate_increments(const std::vector<ParamSet>& params,
                         const std::vector<CompartmentState>& init,
                         const MobilitySchedule& flows, Date start, int days,
                         std::vector<std::vector<double>>& d_conf,
                         std::vector<std::vector<double>>& d_dead) {
    const int n = static_cast<int>(init.size());
    d_conf.assign(n, std::vector<double>(days, 0.0));
    d_dead.assign(n, std::vector<double>(days, 0.0));
    std::vector<CompartmentState> cur = init;
    for (int t = 0; t < days; ++t) {
        StepResult r = step(cur, flows.on(start + t), params);
        for (int i = 0; i < n; ++i) {
            d_conf[i][t] = r.new_confirmed[i];
            d_dead[i][t] = r.next[i].D - cur[i].D;
        }
        cur = std::move(r.next);
    }
}

double window_loss(const std::vector<ParamSet>& params, const ObservedSeries& obs,
                   const MobilitySchedule& flows, const CalibrationWindow& window,
                   const CalibrationOptions& options, int only_region) {
    const WindowSlice sl = slice_for(obs, window);
    const auto init = initial_states(obs, sl.first, options);
    std::vector<std::vector<double>> d_conf, d_dead;
    simulate_increments(params, init, flows, window.start, sl.days - 1, d_conf, d_dead);

    double loss = 0.0;
    const int n = obs.num_regions();
    for (int r = 0; r < n; ++r) {
        if (only_region >= 0 && r != only_region) continue;
        for (int t = 0; t < sl.days - 1; ++t) {
            const double oc = obs.confirmed[r][sl.first + t + 1] - obs.confirmed[r][sl.first + t];
            const double od = obs.deaths[r][sl.first + t + 1] - obs.deaths[r][sl.first + t];
            const double ec = d_conf[r][t] - oc;
            const double ed = d_dead[r][t] - od;
            loss += ec * ec + options.death_weight * ed * ed;
        }
    }
    if (!std::isfinite(loss)) throw ValidationError("calibration loss is not finite");
    return loss;
}

ParamSet from_vector(const std::vector<double>& x) {
    ParamSet p;
    p.beta_I = x[0];
    p.beta_Q = x[0] * x[1];  // ratio keeps beta_Q strictly below beta_I
    p.sigma = x[2];
    p.delta = x[3];
    p.gamma = x[4];
    p.mu = x[5];
    return p;
}

std::uint64_t mix(std::uint64_t a, std::uint64_t b) {
    std::uint64_t x = a + 0x9e3779b97f4a7c15ull + (b << 6) + (b >> 2);
    x ^= x >> 30;
    x *= 0xbf58476d1ce4e5b9ull;
    x ^= x >> 27;
    x *= 0x94d049bb133111ebull;
    x ^= x >> 31;
    return x;
}

}  // namespace

double calibration_loss(const std::vector<ParamSet>& params, const ObservedSeries& observed,
                        const MobilitySchedule& flows, const CalibrationWindow& window,
                        const CalibrationOptions& options) {
    if (window.days() < 2) throw ValidationError("calibration window too short");
    if (static_cast<int>(params.size()) != observed.num_regions())
        throw ValidationError("one parameter set per region required");
    return window_loss(params, observed, flows, window, options, -1);
}

CalibrationResult calibrate(const ObservedSeries& observed, const MobilitySchedule& flows,
                            const std::vector<CalibrationWindow>& windows,
                            const CalibrationOptions& options) {
    const int n = observed.num_regions();
    CalibrationResult result;
    result.windows = windows;
    result.region_codes = observed.region_codes;
    result.params.resize(windows.size());
    result.degenerate.assign(windows.size(), std::vector<bool>(n, false));

    const ParamBounds& b = options.bounds;
    const std::vector<double> lo = {b.beta_lo, b.ratio_lo, b.sigma_lo, b.delta_lo, b.gamma_lo, b.mu_lo};
    const std::vector<double> hi = {b.beta_hi, b.ratio_hi, b.sigma_hi, b.delta_hi, b.gamma_hi, b.mu_hi};

    for (std::size_t w = 0; w < windows.size(); ++w) {
        const CalibrationWindow& window = windows[w];
        if (window.days() < 14)
            throw ValidationError("calibration window too short: need >= 14 days of observations");
        const WindowSlice sl = slice_for(observed, window);

        // Mid-bound starting point per region; Jacobi sweeps refine.
        std::vector<std::vector<double>> current(n);
        std::vector<bool> degenerate(n, false);
        for (int r = 0; r < n; ++r) {
            current[r].resize(6);
            for (int i = 0; i < 6; ++i) current[r][i] = 0.5 * (lo[i] + hi[i]);

            bool zero_signal = observed.active[r][sl.first] == 0.0;
            for (int t = 0; zero_signal && t < sl.days - 1; ++t) {
                if (observed.confirmed[r][sl.first + t + 1] != observed.confirmed[r][sl.first + t] ||
                    observed.deaths[r][sl.first + t + 1] != observed.deaths[r][sl.first + t])
                    zero_signal = false;
            }
            if (zero_signal) {
                degenerate[r] = true;
                current[r] = {b.beta_lo, b.ratio_lo, 0.5 * (lo[2] + hi[2]),
                              0.5 * (lo[3] + hi[3]), 0.5 * (lo[4] + hi[4]), lo[5]};
            }
        }

        for (int sweep = 0; sweep < options.sweeps; ++sweep) {
            std::vector<std::vector<double>> updated = current;
            for (int r = 0; r < n; ++r) {
                if (degenerate[r]) continue;
                auto objective = [&](const std::vector<double>& x) {
                    std::vector<ParamSet> ps(n);
                    for (int k = 0; k < n; ++k)
                        ps[k] = from_vector(k == r ? x : current[k]);
                    // The box allows delta+gamma+mu > 1, where the update
                    // overdraws I; steer the simplex away instead of throwing.
                    const double excess = ps[r].delta + ps[r].gamma + ps[r].mu - 1.0;
                    if (excess > 0.0) return 1e30 * (1.0 + excess);
                    try {
                        return window_loss(ps, observed, flows, window, options, r);
                    } catch (const InstabilityError&) {
                        return 1e30;
                    }
                };

                NelderMeadResult best;
                best.fx = std::numeric_limits<double>::infinity();
                for (int restart = 0; restart <= options.restarts; ++restart) {
                    std::vector<double> x0;
                    if (restart == 0) {
                        x0 = current[r];
                    } else {
                        std::mt19937_64 rng(mix(options.seed, mix(w * 1000 + r, sweep * 10 + restart)));
                        std::uniform_real_distribution<double> u(0.0, 1.0);
                        x0.resize(6);
                        for (int i = 0; i < 6; ++i) x0[i] = lo[i] + u(rng) * (hi[i] - lo[i]);
                    }
                    std::vector<double> stepv(6);
                    for (int i = 0; i < 6; ++i) stepv[i] = 0.1 * (hi[i] - lo[i]);
                    NelderMeadResult run =
                        nelder_mead(objective, x0, stepv, lo, hi, options.max_iters);
                    if (run.fx < best.fx) best = run;
                }
                if (!best.converged) result.converged = false;  // best-so-far kept
                updated[r] = best.x;
            }
            current = std::move(updated);
        }

        result.params[w].resize(n);
        for (int r = 0; r < n; ++r) {
            result.params[w][r] = from_vector(current[r]);
            result.degenerate[w][r] = degenerate[r];
        }
    }
    return result;
}

ParamSchedule CalibrationResult::schedule_for(int region) const {
    ParamSchedule sched;
    if (params.empty()) return sched;
    sched.base = params[0][region];
    for (std::size_t w = 1; w < windows.size(); ++w)
        sched.steps.emplace_back(windows[w].start, params[w][region]);
    return sched;
}

void write_params_csv(const CalibrationResult& result, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write '" + path + "'");
    out << "region,window_start,window_end,beta_I,beta_Q,sigma,delta,gamma,mu\n";
    for (std::size_t w = 0; w < result.windows.size(); ++w) {
        for (std::size_t r = 0; r < result.region_codes.size(); ++r) {
            const ParamSet& p = result.params[w][r];
            out << result.region_codes[r] << ',' << result.windows[w].start.to_string() << ','
                << result.windows[w].end.to_string() << ',' << format_double(p.beta_I) << ','
                << format_double(p.beta_Q) << ',' << format_double(p.sigma) << ','
                << format_double(p.delta) << ',' << format_double(p.gamma) << ','
                << format_double(p.mu) << '\n';
        }
    }
}

CalibrationResult load_params_csv(const std::string& path) {
    const CsvTable t = read_csv(path);
    const int c_region = t.column("region"), c_ws = t.column("window_start"),
              c_we = t.column("window_end"), c_bi = t.column("beta_I"),
              c_bq = t.column("beta_Q"), c_sig = t.column("sigma"), c_del = t.column("delta"),
              c_gam = t.column("gamma"), c_mu = t.column("mu");

    CalibrationResult result;
    std::map<std::pair<std::int64_t, std::int64_t>, std::size_t> window_index;
    std::map<std::string, std::size_t> region_index;
    struct RowVal { std::size_t w, r; ParamSet p; };
    std::vector<RowVal> vals;

    for (const auto& row : t.rows) {
        const Date ws = Date::parse(row[c_ws]);
        const Date we = Date::parse(row[c_we]);
        const auto wkey = std::make_pair(ws.days_since_epoch(), we.days_since_epoch());
        if (!window_index.count(wkey)) {
            window_index[wkey] = result.windows.size();
            result.windows.push_back({ws, we});
        }
        if (!region_index.count(row[c_region])) {
            region_index[row[c_region]] = result.region_codes.size();
            result.region_codes.push_back(row[c_region]);
        }
        ParamSet p;
        p.beta_I = std::stod(row[c_bi]);
        p.beta_Q = std::stod(row[c_bq]);
        p.sigma = std::stod(row[c_sig]);
        p.delta = std::stod(row[c_del]);
        p.gamma = std::stod(row[c_gam]);
        p.mu = std::stod(row[c_mu]);
        vals.push_back({window_index[wkey], region_index[row[c_region]], p});
    }

    result.params.assign(result.windows.size(),
                         std::vector<ParamSet>(result.region_codes.size()));
    result.degenerate.assign(result.windows.size(),
                             std::vector<bool>(result.region_codes.size(), false));
    for (const auto& v : vals) result.params[v.w][v.r] = v.p;
    return result;
}

}  // namespace epiflow
