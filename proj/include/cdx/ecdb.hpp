#pragma once

#include <istream>
#include <map>
#include <ostream>
#include <string>
#include <vector>

#include "cdx/frobenius.hpp"

namespace cdx {

struct CurveRecord {
    std::string label;
    long conductor = 0;
    WeierstrassCurve coeffs;
    // Values known at load time, keyed by prime. ap_rows consults these
    // before computing.
    std::map<long, long> ap;

    friend bool operator==(const CurveRecord&, const CurveRecord&) = default;
};

// CSV with header `label,conductor,a1,a2,a3,a4,a6`. Order is preserved.
std::vector<CurveRecord> parse_curve_csv(std::istream& in);
std::vector<CurveRecord> load_curve_csv(const std::string& path);
void serialize_curve_csv(const std::vector<CurveRecord>& curves, std::ostream& out);

// Records with conductor dividing N^2, sorted by label.
std::vector<CurveRecord> curves_for_level(const std::vector<CurveRecord>& db, int n);

// rows[i][j] = a_{primes[i]}(curves[j]). Looks up and fills `cache` (keyed by
// label) when given. Throws BadReduction if a prime divides a conductor.
std::vector<std::vector<long>> ap_rows(const std::vector<CurveRecord>& curves, const std::vector<long>& primes,
                                       ApCache* cache = nullptr);

struct RemoteConfig {
    bool enabled = false;
    // e.g. http://127.0.0.1:8080/curves
    std::string base_url;
    int page_size = 100;
    int timeout_seconds = 10;
    int max_pages = 10000;
};

// GET <base_url>?max_conductor=B&offset=O&limit=L, each page a JSON array of
// {"label", "conductor", "ainvs": [a1,a2,a3,a4,a6]}. A page shorter than L
// ends the listing. Remote records are appended after `local`; a remote
// label already present locally is dropped.
std::vector<CurveRecord> fetch_remote(long conductor_bound, const RemoteConfig& cfg,
                                      const std::vector<CurveRecord>& local = {});

} // namespace cdx
