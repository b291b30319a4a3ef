#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "pimsim/errors.hpp"

namespace pimsim {

inline constexpr const char* kVersion = "0.1.0";

// Sectioned key/value config document. Grammar:
//   [section]           section header; duplicate sections are errors
//   key = value         entries belong to the preceding section
//   # comment           full-line comments; blank lines ignored
// Keys must be unique within a section. No entries before the first
// section header.
struct ConfigSection {
    std::string name;
    std::vector<std::pair<std::string, std::string>> entries;
};

struct Config {
    std::vector<ConfigSection> sections;

    const ConfigSection* find(const std::string& name) const;
};

// Throws ParseError with line context on any syntax violation.
Config parse_config(const std::string& text);

enum class ExperimentKind {
    IsingMemory,
    CavitySteady,
    GapScan,
    ToyFidelity,
    MeanfieldPhase,
    OracleCheck,
    ToomDemo,
};

std::string kind_name(ExperimentKind kind);
// Throws ParseError on an unknown kind string.
ExperimentKind kind_from_name(const std::string& name);

struct ExperimentSpec {
    ExperimentKind kind = ExperimentKind::OracleCheck;
    std::uint64_t seed = 0;
    bool has_seed = false;
    int workers = 0;  // 0 = default (PIMSIM_WORKERS or 1)
    std::string output_path;
    std::map<std::string, std::string> params;
};

// parse_config + validation. Unknown sections/keys, missing required keys,
// negative rates and malformed numbers are collected and reported together
// in a single ValidationError.
ExperimentSpec parse_spec(const std::string& text);

struct ResultTable {
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;  // preformatted cells
};

struct RunResult {
    ExperimentSpec spec;
    ResultTable table;
    double wall_time_s = 0.0;
};

RunResult run_experiment(const ExperimentSpec& spec);

// One run per value (axis key overridden), results concatenated in value
// order. Stochastic kinds derive one child seed per value from the master
// seed. Empty value list is a ValidationError.
RunResult sweep_experiment(const ExperimentSpec& base, const std::string& axis,
                           const std::vector<std::string>& values);

// Shortest decimal representation that round-trips to the same double.
std::string format_double(double value);

std::string to_csv(const ResultTable& table);
// Inverse of to_csv for result schemas (used by the round-trip contract).
ResultTable csv_parse(const std::string& text);

std::string to_json(const RunResult& result);
// Sidecar document: spec echo, seed, workers, schema columns, version.
std::string metadata_json(const RunResult& result);

}  // namespace pimsim
