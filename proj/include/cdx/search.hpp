#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "cdx/decomp.hpp"
#include "cdx/lattice.hpp"

namespace cdx {

struct SearchRecord {
    int level = 1;
    long index = 1;
    int genus = 0;
    std::vector<Mat2> generators;
    std::string class_key;
    DecompositionCertificate certificate;
    long ms = 0;
};

nlohmann::json record_json(const SearchRecord& r);
SearchRecord record_from_json(const nlohmann::json& j);

struct SearchConfig {
    // Curve table; ignored when `curves` is non-empty.
    std::string curves_path = "fixtures/ec.csv";
    std::vector<CurveRecord> curves;
    // The table is assumed to hold every curve of conductor dividing N^2 for
    // N up to this level; larger N raise MissingFixture unless allowed.
    int covered_level = 15;
    bool allow_incomplete_pool = false;
    // Also report passing classes whose level properly divides N; such
    // records carry their own level.
    bool emit_lower_levels = false;
    SelectOptions select;
    WalkConfig walk;
    // Off: `ms` is written as 0 so outputs are reproducible byte for byte.
    bool record_timing = false;
    std::string ap_cache_path;
};

struct LevelSummary {
    int level = 1;
    std::size_t passed = 0, refuted = 0, pruned = 0, filtered = 0;
    std::size_t emitted = 0;
    double seconds = 0;
    bool interrupted = false;
    std::vector<std::string> diagnostics;
};

struct LevelRun {
    std::vector<SearchRecord> records;  // sorted by (index, class key)
    LevelSummary summary;
};

// Walks the level-N lattice with the predicate "test_cd does not refute"
// and reports every passing class of exact level N.
LevelRun run_level(int n, const SearchConfig& cfg = {});

// Global minimum per genus under (level, index, genus, class key).
using GenusTable = std::map<int, SearchRecord>;

struct MergedReport {
    GenusTable table;
    std::vector<SearchRecord> dataset;  // sorted by (level, index, genus, key)
};

// Throws ConflictingRecord when one class key carries different payloads.
MergedReport merge_reports(const std::vector<std::vector<SearchRecord>>& streams);

void write_jsonl(const std::vector<SearchRecord>& records, std::ostream& out);
std::vector<SearchRecord> read_jsonl(std::istream& in);
void write_summary_csv(const std::vector<LevelSummary>& rows, std::ostream& out);
void write_genus_table_csv(const GenusTable& table, std::ostream& out);

} // namespace cdx
