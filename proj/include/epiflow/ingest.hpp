#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "epiflow/calibration.hpp"
#include "epiflow/types.hpp"

namespace epiflow {

struct EpisodeReport;
struct ScenarioConfig;

/// Shortest round-trip decimal rendering of a double (std::to_chars).
std::string format_double(double v);

std::uint64_t fnv1a64(const std::string& bytes);
std::string fnv1a64_hex(const std::string& bytes);

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
    std::vector<int> line_numbers;  // 1-based physical line of each row

    int column(const std::string& name) const;  // throws ParseError if absent
};

/// Strict CSV reader: mandatory header, consistent field counts, RFC-4180
/// quoting without embedded newlines.
CsvTable read_csv(const std::string& path);

struct PolicyCsvRow {
    Date date;
    std::string state;
    std::string category;
    std::string detail;
};

/// Epidemiological time-series loader. When `regions` is nonempty, rows must
/// use one of those codes. Cumulative dips are repaired by running max and
/// missing days forward-filled; both are counted on the result.
ObservedSeries load_epi(const std::string& path,
                        const std::vector<std::string>& regions = {});

/// Origin-destination daily flow loader; uses the population-flow estimate
/// column. Rows whose codes fall outside `regions` are skipped. Absent pairs
/// and days are zero.
MobilitySchedule load_flows(const std::string& path, const RegionTable& regions);

/// Ground-truth policy records; ingested for provenance and reporting only.
std::vector<PolicyCsvRow> load_policy(const std::string& path);

struct ManifestEntry {
    std::string name;
    std::uint64_t bytes = 0;
    std::string fnv1a64;
};

struct Manifest {
    int schema_version = 1;
    std::vector<ManifestEntry> files;
};

/// Write every episode artifact (trajectory.csv, flows.csv, policy_log.csv,
/// metrics.csv, rt.csv, summary.json, transcript.jsonl when nonempty) plus
/// manifest.json into `dir`. Deterministic byte-for-byte given the report.
Manifest write_report(const EpisodeReport& report, const ScenarioConfig& config,
                      const std::string& dir);

/// Export of the realized schedule: header date,origin,destination,flow with
/// every ordered pair on every scheduled day.
void write_flows_csv(const MobilitySchedule& sched, const RegionTable& regions,
                     const std::string& path);

}  // namespace epiflow
