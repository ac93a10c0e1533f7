#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "epiflow/calibration.hpp"
#include "epiflow/ingest.hpp"
#include "epiflow/metrics.hpp"
#include "epiflow/orchestrator.hpp"
#include "epiflow/rt.hpp"
#include "epiflow/scenario.hpp"

using namespace epiflow;
using nlohmann::json;

namespace {

int run_command(const std::string& scenario_path, const std::string& paradigm,
                std::uint64_t seed, bool seed_given, const std::string& out_dir) {
    ScenarioConfig config = validate_scenario(load_scenario(scenario_path));
    const std::uint64_t effective_seed = seed_given ? seed : config.seed;
    EpisodeReport report = run_episode(config, paradigm_from_name(paradigm), effective_seed);
    write_report(report, config, out_dir);
    std::printf("%s: infections %.1f deaths %.1f (seed %llu) -> %s\n", report.paradigm.c_str(),
                report.aggregate_infections(), report.aggregate_deaths(),
                static_cast<unsigned long long>(effective_seed), out_dir.c_str());
    if (report.degradations > 0) {
        std::fprintf(stderr, "warning: %d backend degradation(s); results written\n",
                     report.degradations);
        return 3;
    }
    return 0;
}

EpisodeReport load_report_stub(const std::string& dir) {
    std::ifstream in(dir + "/summary.json");
    if (!in) throw IoError("cannot open " + dir + "/summary.json");
    json j = json::parse(in);
    EpisodeReport r;
    r.scenario_name = j.at("scenario").get<std::string>();
    r.paradigm = j.at("paradigm").get<std::string>();
    r.seed = j.at("seed").get<std::uint64_t>();
    r.start = Date::parse(j.at("start_date").get<std::string>());
    r.end = Date::parse(j.at("end_date").get<std::string>());
    for (const auto& [code, vals] : j.at("regions").items()) {
        r.region_codes.push_back(code);
        r.total_infections.push_back(vals.at("total_infections").get<double>());
        r.total_deaths.push_back(vals.at("total_deaths").get<double>());
    }
    if (std::filesystem::exists(dir + "/policy_log.csv")) {
        const CsvTable t = read_csv(dir + "/policy_log.csv");
        if (!t.rows.empty()) {
            const int c_cycle = t.column("cycle"), c_act = t.column("acting_region"),
                      c_org = t.column("origin_region"), c_type = t.column("action_type"),
                      c_label = t.column("policy_type_label");
            for (const auto& row : t.rows) {
                PolicyLogEntry e;
                e.cycle = std::stoi(row[c_cycle]);
                e.acting_region = row[c_act];
                e.origin_region = row[c_org];
                e.action_type = row[c_type];
                e.policy_type = row[c_label];
                r.policy_log.push_back(std::move(e));
            }
        }
    }
    return r;
}

int compare_command(const std::string& reports_dir, const std::string& out_file) {
    std::vector<EpisodeReport> reports;
    for (const auto& entry : std::filesystem::directory_iterator(reports_dir)) {
        if (entry.is_directory() && std::filesystem::exists(entry.path() / "summary.json"))
            reports.push_back(load_report_stub(entry.path().string()));
    }
    std::sort(reports.begin(), reports.end(),
              [](const auto& a, const auto& b) { return a.paradigm < b.paradigm; });
    if (reports.empty()) throw IoError("no report directories under " + reports_dir);
    const ComparisonTable table = compare_paradigms(reports);

    std::printf("scenario: %s\n", table.scenario_name.c_str());
    std::printf("%-14s %14s %14s %10s %10s\n", "paradigm", "inf_reduction", "dea_reduction",
                "equity_inf", "equity_dea");
    json out;
    out["scenario"] = table.scenario_name;
    json rows = json::array();
    for (const auto& row : table.rows) {
        std::printf("%-14s %13.2f%% %13.2f%% %10s %10s\n", row.paradigm.c_str(),
                    100.0 * row.aggregate_reduction_infections,
                    100.0 * row.aggregate_reduction_deaths,
                    row.equity_infections.defined
                        ? (std::to_string(row.equity_infections.equity).substr(0, 6)).c_str()
                        : "n/a",
                    row.equity_deaths.defined
                        ? (std::to_string(row.equity_deaths.equity).substr(0, 6)).c_str()
                        : "n/a");
        json r;
        r["paradigm"] = row.paradigm;
        r["aggregate_reduction_infections"] = row.aggregate_reduction_infections;
        r["aggregate_reduction_deaths"] = row.aggregate_reduction_deaths;
        json per;
        for (std::size_t i = 0; i < table.region_codes.size(); ++i) {
            per[table.region_codes[i]] = {{"reduction_infections", row.reduction_infections[i]},
                                          {"reduction_deaths", row.reduction_deaths[i]}};
        }
        r["regions"] = per;
        if (row.equity_infections.defined) r["equity_infections"] = row.equity_infections.equity;
        if (row.equity_deaths.defined) r["equity_deaths"] = row.equity_deaths.equity;
        r["policy_type_counts"] = row.policy_type_counts;
        rows.push_back(std::move(r));
    }
    out["paradigms"] = rows;
    if (!out_file.empty()) {
        std::ofstream f(out_file);
        f << out.dump(2) << "\n";
    }
    return 0;
}

int calibrate_command(const std::string& scenario_path, const std::string& epi_path,
                      const std::string& flows_path, int window_days, const std::string& out) {
    ScenarioConfig config = validate_scenario(load_scenario(scenario_path));
    std::vector<std::string> codes;
    for (const auto& r : config.regions) codes.push_back(r.id.code);
    const ObservedSeries observed = load_epi(epi_path, codes);
    const MobilitySchedule flows =
        flows_path.empty() ? config.baseline : load_flows(flows_path, config.region_table());

    CalibrationOptions options;
    options.seed = config.seed;
    for (const auto& r : config.regions) options.populations.push_back(r.initial.total());

    std::vector<CalibrationWindow> windows;
    Date w = observed.start;
    const Date last = observed.start + observed.days();
    while (w + window_days <= last) {
        windows.push_back({w, w + window_days});
        w += window_days;
    }
    if (windows.empty()) throw ValidationError("observation series shorter than one window");

    const CalibrationResult result = calibrate(observed, flows, windows, options);
    write_params_csv(result, out);
    std::printf("calibrated %zu window(s) x %d region(s) -> %s%s\n", windows.size(),
                observed.num_regions(), out.c_str(),
                result.converged ? "" : " (non-converged windows kept best-so-far)");
    return 0;
}

int rt_command(const std::string& epi_path, const std::string& out, int window) {
    const ObservedSeries observed = load_epi(epi_path);
    const SerialInterval si = discretize_serial_interval();
    std::ostringstream os;
    os << "date,region,rt_mean,rt_lo,rt_hi\n";
    for (int r = 0; r < observed.num_regions(); ++r) {
        int clamped = 0;
        const auto incidence = incidence_from_cumulative(observed.confirmed[r], &clamped);
        if (clamped > 0)
            std::fprintf(stderr, "warning: %s: clamped %d negative increment(s)\n",
                         observed.region_codes[r].c_str(), clamped);
        if (static_cast<int>(incidence.size()) < window) continue;
        const RtSeries rt = estimate_rt(incidence, si, window);
        for (int k = 0; k < rt.size(); ++k) {
            // estimate at t is the nowcast for observed.start + t
            const Date date = observed.start + rt.first_day + k;
            os << date.to_string() << ',' << observed.region_codes[r] << ','
               << format_double(rt.mean[k]) << ',' << format_double(rt.lower[k]) << ','
               << format_double(rt.upper[k]) << '\n';
        }
    }
    std::ofstream f(out);
    if (!f) throw IoError("cannot write '" + out + "'");
    f << os.str();
    std::printf("rt series -> %s\n", out.c_str());
    return 0;
}

int forecast_command(const std::string& input, const std::string& column,
                     const std::string& region, int horizon, const std::string& out) {
    const CsvTable t = read_csv(input);
    const int c_val = t.column(column);
    int c_region = -1;  // trajectory exports say "region", epi data says "state"
    for (std::size_t i = 0; i < t.header.size(); ++i)
        if (t.header[i] == "region" || t.header[i] == "state") c_region = static_cast<int>(i);
    if (c_region < 0) throw ParseError("CSV is missing a 'region' or 'state' column");
    const int c_date = t.column("date");
    std::vector<double> series;
    std::vector<std::string> dates;
    for (const auto& row : t.rows) {
        if (row[c_region] != region) continue;
        series.push_back(std::stod(row[c_val]));
        dates.push_back(row[c_date]);
    }
    if (series.empty()) throw ParseError("no rows for region '" + region + "'");
    const auto extended = forecast_cumulative(series, horizon);
    const Date last = Date::parse(dates.back());
    std::ofstream f(out);
    if (!f) throw IoError("cannot write '" + out + "'");
    f << "date,region," << column << ",forecast\n";
    for (std::size_t i = 0; i < extended.size(); ++i) {
        const bool observed = i < series.size();
        const Date d = observed ? Date::parse(dates[i]) : last + (i - series.size() + 1);
        f << d.to_string() << ',' << region << ',' << format_double(extended[i]) << ','
          << (observed ? 0 : 1) << '\n';
    }
    std::printf("forecast (+%d days) -> %s\n", horizon, out.c_str());
    return 0;
}

int attribute_command(const std::string& report_dir, const std::string& scenario_path,
                      const std::string& out) {
    ScenarioConfig config = validate_scenario(load_scenario(scenario_path));
    // Rebuild the pieces of the report the dataset needs.
    EpisodeReport report = load_report_stub(report_dir);
    const CsvTable t = read_csv(report_dir + "/trajectory.csv");
    const int c_date = t.column("date"), c_region = t.column("region");
    const int cols[6] = {t.column("S"), t.column("E"), t.column("I"),
                         t.column("Q"), t.column("R"), t.column("D")};
    const RegionTable table = config.region_table();
    report.trajectory.start = config.start_date;
    report.trajectory.days.assign(config.sim_days() + 1,
                                  std::vector<CompartmentState>(config.num_regions()));
    for (const auto& row : t.rows) {
        const int day = static_cast<int>(Date::parse(row[c_date]) - config.start_date);
        const int r = table.require(row[c_region]);
        CompartmentState s;
        s.S = std::stod(row[cols[0]]);
        s.E = std::stod(row[cols[1]]);
        s.I = std::stod(row[cols[2]]);
        s.Q = std::stod(row[cols[3]]);
        s.R = std::stod(row[cols[4]]);
        s.D = std::stod(row[cols[5]]);
        report.trajectory.days[day][r] = s;
    }

    const AttributionDataset data = build_attribution_dataset(report, config);
    if (static_cast<int>(data.rows.size()) < 50)
        throw ValidationError("attribution needs >= 50 TIR decisions, found " +
                              std::to_string(data.rows.size()));
    const BaggedForest model = build_attribution_model(data, config.seed);
    const auto background = data.background_mean();
    const PredictFn fn = model.as_function();

    std::ofstream f(out);
    if (!f) throw IoError("cannot write '" + out + "'");
    f << "feature,shapley_value,instance_id\n";
    for (std::size_t i = 0; i < data.rows.size(); ++i) {
        // Exact enumeration caps at 20 features: keep compartments + inflow,
        // drop the one-hot block when the region count pushes M over the cap.
        std::vector<double> instance = data.rows[i].features;
        std::size_t m = instance.size();
        if (m > 20) m = 13;
        std::vector<double> x(instance.begin(), instance.begin() + m);
        std::vector<double> bg(background.begin(), background.begin() + m);
        PredictFn sub = [&, m](const std::vector<double>& part) {
            std::vector<double> full = data.rows[i].features;
            for (std::size_t j = 0; j < m; ++j) full[j] = part[j];
            return fn(full);
        };
        const auto phi = shapley_values(sub, x, bg);
        for (std::size_t j = 0; j < phi.size(); ++j)
            f << data.feature_names[j] << ',' << format_double(phi[j]) << ',' << i << '\n';
    }
    std::printf("shapley attributions for %zu decision(s) -> %s\n", data.rows.size(), out.c_str());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Metapopulation pandemic policy simulation engine"};
    app.require_subcommand(1);

    std::string scenario_path, out_dir = "report", paradigm = "ground_truth";
    std::uint64_t seed = 0;
    auto* run = app.add_subcommand("run", "Run one episode and write its report");
    run->add_option("--scenario", scenario_path, "Scenario JSON file")->required();
    run->add_option("--paradigm", paradigm, "agent|ground_truth|expert|random");
    auto* seed_opt = run->add_option("--seed", seed, "Episode seed (defaults to scenario seed)");
    run->add_option("--out", out_dir, "Report output directory");

    std::string reports_dir, compare_out;
    auto* cmp = app.add_subcommand("compare", "Compare report directories against ground truth");
    cmp->add_option("--reports", reports_dir, "Directory of report subdirectories")->required();
    cmp->add_option("--out", compare_out, "comparison JSON output path");

    std::string epi_path, flows_path, calib_out = "params.csv";
    int window_days = 28;
    auto* cal = app.add_subcommand("calibrate", "Fit epidemiological parameters to observations");
    cal->add_option("--scenario", scenario_path, "Scenario JSON file")->required();
    cal->add_option("--epi", epi_path, "Observed epi CSV")->required();
    cal->add_option("--flows", flows_path, "Flow CSV (defaults to scenario baseline)");
    cal->add_option("--window-days", window_days, "Calibration window length");
    cal->add_option("--out", calib_out, "Fitted parameter CSV");

    std::string rt_out = "rt.csv";
    int rt_window = 21;
    auto* rt = app.add_subcommand("rt", "Estimate R_t from observed confirmed increments");
    rt->add_option("--epi", epi_path, "Observed epi CSV")->required();
    rt->add_option("--window", rt_window, "Sliding window length (days)");
    rt->add_option("--out", rt_out, "Output CSV");

    std::string fc_input, fc_column = "cum_q", fc_region, fc_out = "forecast.csv";
    int fc_horizon = 180;
    auto* fc = app.add_subcommand("forecast", "Extrapolate a cumulative series");
    fc->add_option("--input", fc_input, "CSV with date,region columns")->required();
    fc->add_option("--column", fc_column, "Cumulative column name");
    fc->add_option("--region", fc_region, "Region code")->required();
    fc->add_option("--horizon", fc_horizon, "Days to extrapolate");
    fc->add_option("--out", fc_out, "Output CSV");

    std::string attr_report, attr_out = "attribution.csv";
    auto* attr = app.add_subcommand("attribute", "Shapley attribution of strict-first policies");
    attr->add_option("--report", attr_report, "Report directory of an episode")->required();
    attr->add_option("--scenario", scenario_path, "Scenario JSON file")->required();
    attr->add_option("--out", attr_out, "Output CSV");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed())
            return run_command(scenario_path, paradigm, seed, seed_opt->count() > 0, out_dir);
        if (cmp->parsed()) return compare_command(reports_dir, compare_out);
        if (cal->parsed())
            return calibrate_command(scenario_path, epi_path, flows_path, window_days, calib_out);
        if (rt->parsed()) return rt_command(epi_path, rt_out, rt_window);
        if (fc->parsed()) return forecast_command(fc_input, fc_column, fc_region, fc_horizon, fc_out);
        if (attr->parsed()) return attribute_command(attr_report, scenario_path, attr_out);
    } catch (const ValidationError& e) {
        std::fprintf(stderr, "validation error: %s\n", e.what());
        return 2;
    } catch (const ParseError& e) {
        std::fprintf(stderr, "parse error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
