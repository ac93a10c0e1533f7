#include "epiflow/ingest.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <json.hpp>

#include "epiflow/orchestrator.hpp"

namespace epiflow {

using nlohmann::json;

std::string format_double(double v) {
    char buf[40];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

std::uint64_t fnv1a64(const std::string& bytes) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

std::string fnv1a64_hex(const std::string& bytes) {
    char buf[24];
    std::snprintf(buf, sizeof(buf), "%016llx",
                  static_cast<unsigned long long>(fnv1a64(bytes)));
    return buf;
}

int CsvTable::column(const std::string& name) const {
    for (std::size_t i = 0; i < header.size(); ++i)
        if (header[i] == name) return static_cast<int>(i);
    throw ParseError("CSV is missing required column '" + name + "'");
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line, int lineno) {
    std::vector<std::string> fields;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    cur += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                cur += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            fields.push_back(std::move(cur));
            cur.clear();
        } else if (c != '\r') {
            cur += c;
        }
    }
    if (quoted) throw ParseError("line " + std::to_string(lineno) + ": unterminated quote");
    fields.push_back(std::move(cur));
    return fields;
}

std::string csv_quote(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += "\"\"";
        else out += c;
    }
    out += '"';
    return out;
}

double parse_count(const std::string& s, int lineno, const std::string& what) {
    double v = 0.0;
    try {
        std::size_t pos = 0;
        v = std::stod(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
    } catch (const std::exception&) {
        throw ParseError("line " + std::to_string(lineno) + ": unparseable " + what + " '" + s +
                         "'");
    }
    if (!std::isfinite(v) || v < 0.0)
        throw ParseError("line " + std::to_string(lineno) + ": negative " + what);
    return v;
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write '" + path + "'");
    out << content;
    if (!out) throw IoError("write failed for '" + path + "'");
}

}  // namespace

CsvTable read_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open '" + path + "'");
    CsvTable t;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        auto fields = split_csv_line(line, lineno);
        if (t.header.empty()) {
            t.header = std::move(fields);
            continue;
        }
        if (fields.size() != t.header.size())
            throw ParseError("line " + std::to_string(lineno) + ": expected " +
                             std::to_string(t.header.size()) + " fields, got " +
                             std::to_string(fields.size()));
        t.rows.push_back(std::move(fields));
        t.line_numbers.push_back(lineno);
    }
    if (t.header.empty()) throw ParseError("'" + path + "': missing header row");
    return t;
}

ObservedSeries load_epi(const std::string& path, const std::vector<std::string>& regions) {
    const CsvTable t = read_csv(path);
    const int c_date = t.column("date"), c_state = t.column("state"),
              c_conf = t.column("confirmed"), c_dead = t.column("deaths"),
              c_rec = t.column("recovered"), c_act = t.column("active");

    struct Obs { double conf, dead, rec, act; };
    std::map<std::string, std::map<std::int64_t, Obs>> per_region;
    std::map<std::string, std::map<std::int64_t, int>> first_line;
    Date min_date(0), max_date(0);
    bool any = false;

    for (std::size_t k = 0; k < t.rows.size(); ++k) {
        const auto& row = t.rows[k];
        const int lineno = t.line_numbers[k];
        Date d(0);
        try {
            d = Date::parse(row[c_date]);
        } catch (const ParseError& e) {
            throw ParseError("line " + std::to_string(lineno) + ": " + e.what());
        }
        const std::string& code = row[c_state];
        if (!regions.empty() &&
            std::find(regions.begin(), regions.end(), code) == regions.end())
            throw ParseError("line " + std::to_string(lineno) + ": unknown region code '" + code +
                             "'");
        Obs o;
        o.conf = parse_count(row[c_conf], lineno, "confirmed");
        o.dead = parse_count(row[c_dead], lineno, "deaths");
        o.rec = parse_count(row[c_rec], lineno, "recovered");
        o.act = parse_count(row[c_act], lineno, "active");

        const auto key = d.days_since_epoch();
        if (per_region[code].count(key))
            throw ParseError("line " + std::to_string(lineno) + ": duplicate (date, state) also on line " +
                             std::to_string(first_line[code][key]));
        per_region[code][key] = o;
        first_line[code][key] = lineno;
        if (!any || d < min_date) min_date = d;
        if (!any || d > max_date) max_date = d;
        any = true;
    }
    if (!any) throw ParseError("'" + path + "': no data rows");

    ObservedSeries out;
    out.start = min_date;
    const int days = static_cast<int>(max_date - min_date) + 1;

    // Region order: filter order when given, else first appearance.
    if (!regions.empty()) {
        for (const auto& code : regions)
            if (per_region.count(code)) out.region_codes.push_back(code);
    } else {
        std::set<std::string> added;
        for (std::size_t k = 0; k < t.rows.size(); ++k) {
            const std::string& code = t.rows[k][c_state];
            if (added.insert(code).second) out.region_codes.push_back(code);
        }
    }

    for (const auto& code : out.region_codes) {
        auto& series = per_region[code];
        std::vector<double> conf, dead, rec, act;
        Obs last{0, 0, 0, 0};
        bool have_last = false;
        for (int k = 0; k < days; ++k) {
            const auto key = (min_date + k).days_since_epoch();
            const auto it = series.find(key);
            if (it != series.end()) {
                last = it->second;
                have_last = true;
            } else {
                if (!have_last) {
                    // leading gap: treat as zeros
                    last = {0, 0, 0, 0};
                    have_last = true;
                }
                ++out.filled_days;  // forward fill
            }
            conf.push_back(last.conf);
            dead.push_back(last.dead);
            rec.push_back(last.rec);
            act.push_back(last.act);
        }
        // Running-max repair of cumulative columns.
        for (auto* col : {&conf, &dead, &rec}) {
            double running = 0.0;
            for (double& v : *col) {
                if (v < running) {
                    v = running;
                    ++out.repairs;
                } else {
                    running = v;
                }
            }
        }
        // Active cleaned to be nonnegative.
        for (double& v : act) {
            if (v < 0.0) {
                v = 0.0;
                ++out.repairs;
            }
        }
        out.confirmed.push_back(std::move(conf));
        out.deaths.push_back(std::move(dead));
        out.recovered.push_back(std::move(rec));
        out.active.push_back(std::move(act));
    }
    return out;
}

MobilitySchedule load_flows(const std::string& path, const RegionTable& regions) {
    if (regions.size() == 0) throw ValidationError("load_flows: region filter is empty");
    const CsvTable t = read_csv(path);
    const int c_date = t.column("date"), c_origin = t.column("origin"),
              c_dest = t.column("destination");
    // Raw OD data carries pop_flow; our own flow exports carry flow.
    int c_flow = -1;
    for (std::size_t i = 0; i < t.header.size(); ++i)
        if (t.header[i] == "pop_flow" || t.header[i] == "flow") c_flow = static_cast<int>(i);
    if (c_flow < 0) throw ParseError("CSV is missing required column 'pop_flow' (or 'flow')");

    struct Entry { double flow; int lineno; };
    std::map<std::tuple<std::int64_t, int, int>, Entry> entries;
    Date min_date(0), max_date(0);
    bool any = false;

    for (std::size_t k = 0; k < t.rows.size(); ++k) {
        const auto& row = t.rows[k];
        const int lineno = t.line_numbers[k];
        Date d(0);
        try {
            d = Date::parse(row[c_date]);
        } catch (const ParseError& e) {
            throw ParseError("line " + std::to_string(lineno) + ": " + e.what());
        }
        const int o = regions.index_of(row[c_origin]);
        const int i = regions.index_of(row[c_dest]);
        if (o < 0 || i < 0) continue;  // outside the requested region set
        if (o == i)
            throw ParseError("line " + std::to_string(lineno) + ": origin equals destination");
        const double flow = parse_count(row[c_flow], lineno, "pop_flow");

        const auto key = std::make_tuple(d.days_since_epoch(), o, i);
        if (const auto it = entries.find(key); it != entries.end())
            throw ParseError("duplicate (date, origin, destination) on lines " +
                             std::to_string(it->second.lineno) + " and " + std::to_string(lineno));
        entries[key] = {flow, lineno};
        if (!any || d < min_date) min_date = d;
        if (!any || d > max_date) max_date = d;
        any = true;
    }
    if (!any) throw ParseError("'" + path + "': no usable flow rows");

    MobilitySchedule sched(min_date, regions.size(), static_cast<int>(max_date - min_date) + 1);
    for (const auto& [key, e] : entries) {
        const auto [day, o, i] = key;
        sched.at(static_cast<int>(day - min_date.days_since_epoch())).at(o, i) = e.flow;
    }
    return sched;
}

std::vector<PolicyCsvRow> load_policy(const std::string& path) {
    const CsvTable t = read_csv(path);
    const int c_date = t.column("date"), c_state = t.column("state"),
              c_cat = t.column("category"), c_detail = t.column("detail");
    std::vector<PolicyCsvRow> rows;
    for (std::size_t k = 0; k < t.rows.size(); ++k) {
        PolicyCsvRow r;
        try {
            r.date = Date::parse(t.rows[k][c_date]);
        } catch (const ParseError& e) {
            throw ParseError("line " + std::to_string(t.line_numbers[k]) + ": " + e.what());
        }
        r.state = t.rows[k][c_state];
        r.category = t.rows[k][c_cat];
        r.detail = t.rows[k][c_detail];
        rows.push_back(std::move(r));
    }
    return rows;
}

void write_flows_csv(const MobilitySchedule& sched, const RegionTable& regions,
                     const std::string& path) {
    std::ostringstream out;
    out << "date,origin,destination,flow\n";
    for (int day = 0; day < sched.days(); ++day) {
        const std::string date = (sched.start() + day).to_string();
        for (int o = 0; o < regions.size(); ++o)
            for (int i = 0; i < regions.size(); ++i) {
                if (o == i) continue;
                out << date << ',' << regions.codes[o] << ',' << regions.codes[i] << ','
                    << format_double(sched.at(day).at(o, i)) << '\n';
            }
    }
    write_file(path, out.str());
}

Manifest write_report(const EpisodeReport& report, const ScenarioConfig& config,
                      const std::string& dir) {
    std::filesystem::create_directories(dir);
    const RegionTable table = config.region_table();
    const int n = static_cast<int>(report.region_codes.size());
    std::vector<std::pair<std::string, std::string>> files;  // name -> content

    {
        std::ostringstream out;
        out << "date,region,S,E,I,Q,R,D,cum_q\n";
        for (int t = 0; t <= report.trajectory.sim_days(); ++t) {
            const std::string date = (report.trajectory.start + t).to_string();
            for (int r = 0; r < n; ++r) {
                const CompartmentState& s = report.trajectory.state(t, r);
                out << date << ',' << report.region_codes[r] << ',' << format_double(s.S) << ','
                    << format_double(s.E) << ',' << format_double(s.I) << ',' << format_double(s.Q)
                    << ',' << format_double(s.R) << ',' << format_double(s.D) << ','
                    << format_double(report.trajectory.cum_q[t][r]) << '\n';
            }
        }
        files.emplace_back("trajectory.csv", out.str());
    }

    {
        std::ostringstream out;
        out << "date,origin,destination,flow\n";
        const MobilitySchedule& sched = report.trajectory.realized;
        for (int day = 0; day < sched.days(); ++day) {
            const std::string date = (sched.start() + day).to_string();
            for (int o = 0; o < n; ++o)
                for (int i = 0; i < n; ++i) {
                    if (o == i) continue;
                    out << date << ',' << report.region_codes[o] << ',' << report.region_codes[i]
                        << ',' << format_double(sched.at(day).at(o, i)) << '\n';
                }
        }
        files.emplace_back("flows.csv", out.str());
    }

    {
        std::ostringstream out;
        out << "cycle,acting_region,origin_region,action_type,parameters,policy_type_label\n";
        for (const auto& e : report.policy_log)
            out << e.cycle << ',' << e.acting_region << ',' << e.origin_region << ','
                << e.action_type << ',' << csv_quote(e.parameters) << ',' << e.policy_type << '\n';
        files.emplace_back("policy_log.csv", out.str());
    }

    {
        std::ostringstream out;
        out << "date,region,ir,dr,acr\n";
        for (int t = 0; t < report.trajectory.sim_days(); ++t) {
            const std::string date = (report.trajectory.start + t).to_string();
            for (int r = 0; r < n; ++r)
                out << date << ',' << report.region_codes[r] << ','
                    << format_double(report.rates[r].ir[t]) << ','
                    << format_double(report.rates[r].dr[t]) << ','
                    << format_double(report.rates[r].acr[t]) << '\n';
        }
        files.emplace_back("metrics.csv", out.str());
    }

    {
        std::ostringstream out;
        out << "date,region,rt_mean,rt_lo,rt_hi\n";
        for (int r = 0; r < n; ++r) {
            const RtSeries& rt = report.rt[r];
            for (int k = 0; k < rt.size(); ++k) {
                const std::string date = (report.trajectory.start + rt.first_day + k).to_string();
                out << date << ',' << report.region_codes[r] << ',' << format_double(rt.mean[k])
                    << ',' << format_double(rt.lower[k]) << ',' << format_double(rt.upper[k])
                    << '\n';
            }
        }
        files.emplace_back("rt.csv", out.str());
    }

    {
        json j;
        j["schema_version"] = 1;
        j["scenario"] = report.scenario_name;
        j["paradigm"] = report.paradigm;
        j["seed"] = report.seed;
        j["config_hash"] = fnv1a64_hex(config.source_json);
        j["start_date"] = report.start.to_string();
        j["end_date"] = report.end.to_string();
        j["degradations"] = report.degradations;
        j["capped_outflow_days"] = report.capped_outflow_days;
        json per_region;
        for (int r = 0; r < n; ++r) {
            per_region[report.region_codes[r]] = {
                {"total_infections", report.total_infections[r]},
                {"total_deaths", report.total_deaths[r]},
            };
        }
        j["regions"] = per_region;
        j["aggregate"] = {{"total_infections", report.aggregate_infections()},
                          {"total_deaths", report.aggregate_deaths()}};
        files.emplace_back("summary.json", j.dump(2) + "\n");
    }

    if (!report.transcript.empty()) {
        std::ostringstream out;
        for (const auto& e : report.transcript) {
            json j;
            j["cycle"] = e.cycle;
            j["round"] = e.round;
            j["region"] = e.region;
            j["prompt_hash"] = e.prompt_hash;
            j["raw_response"] = e.raw_response;
            j["parsed"] = json::parse(e.parsed);
            j["repaired"] = e.repaired;
            j["fallback"] = e.fallback;
            out << j.dump() << '\n';
        }
        files.emplace_back("transcript.jsonl", out.str());
    }

    Manifest manifest;
    for (const auto& [name, content] : files) {
        write_file(dir + "/" + name, content);
        manifest.files.push_back({name, content.size(), fnv1a64_hex(content)});
    }
    std::sort(manifest.files.begin(), manifest.files.end(),
              [](const auto& a, const auto& b) { return a.name < b.name; });

    json mj;
    mj["schema_version"] = manifest.schema_version;
    json entries = json::array();
    for (const auto& f : manifest.files)
        entries.push_back({{"name", f.name}, {"bytes", f.bytes}, {"fnv1a64", f.fnv1a64}});
    mj["files"] = entries;
    write_file(dir + "/manifest.json", mj.dump(2) + "\n");
    return manifest;
}

}  // namespace epiflow
