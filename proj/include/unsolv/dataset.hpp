#pragma once

#include <compare>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "unsolv/instance.hpp"

namespace unsolv::dataset {

inline constexpr const char* kToolVersion = "0.1.0";

Json to_json(const DatasetRecord& record);
/// Throws SchemaError carrying `line` when a required field is missing or mistyped.
DatasetRecord from_json(const Json& doc, std::size_t line = 0);

/// One JSON object per line. Blank lines are skipped on read.
void write_jsonl(std::span<const DatasetRecord> records, std::ostream& out);
std::vector<DatasetRecord> read_jsonl(std::istream& in);

struct CountKey {
    Split split;
    Domain domain;
    Label label;
    friend auto operator<=>(const CountKey&, const CountKey&) = default;
};

struct Manifest {
    std::map<CountKey, std::uint64_t> counts;
    std::uint64_t total = 0;
    std::string config_digest;
    std::string tool_version = kToolVersion;

    static Manifest of(std::span<const DatasetRecord> records, const Json& config);
    Json to_json() const;
    static Manifest from_json(const Json& doc);
    /// Counts and total agree with a recount of `records`.
    bool matches(std::span<const DatasetRecord> records) const;
};

std::filesystem::path manifest_path(const std::filesystem::path& records_path);

/// Writes the records and `<path>.manifest.json` next to them. Throws IoError.
Manifest write_records(std::span<const DatasetRecord> records, const std::filesystem::path& path, const Json& config = Json::object());
/// Throws IoError or SchemaError.
std::vector<DatasetRecord> read_records(const std::filesystem::path& path);
Manifest read_manifest(const std::filesystem::path& records_path);

struct Row {
    std::uint64_t solvable = 0;
    std::uint64_t unsolvable = 0;
    std::uint64_t total() const noexcept { return solvable + unsolvable; }
    friend bool operator==(const Row&, const Row&) = default;
};

struct SplitTable {
    std::map<Domain, Row> rows;
    Row totals;
};

struct StatsTable {
    std::map<Split, SplitTable> splits;
    Row grand_total;
};

StatsTable stats(std::span<const DatasetRecord> records);
/// Plain-text table: one block per split, a row per domain, then totals.
std::string format_stats(const StatsTable& table);

struct VerifyIssue {
    std::size_t index = 0;
    std::string id;
    std::string message;
};

/// Re-runs the domain verifiers: label from payload, witness validity, and id consistency.
/// Math instances are model-verified, so only their provenance is checked.
std::vector<VerifyIssue> verify(std::span<const DatasetRecord> records);

}  // namespace unsolv::dataset
