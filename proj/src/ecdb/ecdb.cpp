#include "cdx/ecdb.hpp"

#include <httplib.h>

#include <algorithm>
#include <fstream>
#include <json.hpp>
#include <set>

#include "cdx/csv.hpp"
#include "cdx/errors.hpp"

namespace cdx {

namespace {

const std::vector<std::string> kHeader{"label", "conductor", "a1", "a2", "a3", "a4", "a6"};

long parse_long(const std::string& s, long lineno, const char* what) {
    std::size_t used = 0;
    long v = 0;
    try {
        v = std::stol(s, &used);
    } catch (const std::logic_error&) {
        used = 0;
    }
    if (s.empty() || used != s.size())
        throw NonIntegerField("line " + std::to_string(lineno) + ": " + what + " = '" + s + "'");
    return v;
}

void check_record(const CurveRecord& r, const std::string& where) {
    if (r.label.empty()) throw MalformedRow(where + ": empty label");
    if (r.conductor < 11) throw MalformedRow(where + ": conductor below 11");
    if (discriminant_string(r.coeffs) == "0") throw MalformedRow(where + ": singular model");
}

} // namespace

std::vector<CurveRecord> parse_curve_csv(std::istream& in) {
    std::string line;
    long lineno = 0;
    bool header = false;
    std::vector<CurveRecord> out;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<std::string> f;
        try {
            f = split_csv_line(line);
        } catch (const MalformedRow&) {
            throw MalformedRow("line " + std::to_string(lineno) + ": unterminated quote");
        }
        if (!header) {
            if (f != kHeader) throw MissingHeader("line " + std::to_string(lineno) + ": expected label,conductor,a1,a2,a3,a4,a6");
            header = true;
            continue;
        }
        if (f.size() != kHeader.size())
            throw MalformedRow("line " + std::to_string(lineno) + ": expected 7 fields, got " + std::to_string(f.size()));
        CurveRecord r;
        r.label = f[0];
        r.conductor = parse_long(f[1], lineno, "conductor");
        long* a[] = {&r.coeffs.a1, &r.coeffs.a2, &r.coeffs.a3, &r.coeffs.a4, &r.coeffs.a6};
        for (int i = 0; i < 5; ++i) *a[i] = parse_long(f[static_cast<std::size_t>(i) + 2], lineno, kHeader[static_cast<std::size_t>(i) + 2].c_str());
        check_record(r, "line " + std::to_string(lineno));
        out.push_back(std::move(r));
    }
    if (!header) throw MissingHeader("empty curve table");
    return out;
}

std::vector<CurveRecord> load_curve_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw MissingHeader(path + ": cannot open");
    return parse_curve_csv(in);
}

void serialize_curve_csv(const std::vector<CurveRecord>& curves, std::ostream& out) {
    out << "label,conductor,a1,a2,a3,a4,a6\n";
    for (const CurveRecord& r : curves)
        out << csv_field(r.label) << ',' << r.conductor << ',' << r.coeffs.a1 << ',' << r.coeffs.a2 << ','
            << r.coeffs.a3 << ',' << r.coeffs.a4 << ',' << r.coeffs.a6 << '\n';
}

std::vector<CurveRecord> curves_for_level(const std::vector<CurveRecord>& db, int n) {
    const long n2 = static_cast<long>(n) * n;
    std::vector<CurveRecord> out;
    for (const CurveRecord& r : db)
        if (r.conductor > 0 && n2 % r.conductor == 0) out.push_back(r);
    std::stable_sort(out.begin(), out.end(), [](const CurveRecord& a, const CurveRecord& b) { return a.label < b.label; });
    return out;
}

std::vector<std::vector<long>> ap_rows(const std::vector<CurveRecord>& curves, const std::vector<long>& primes,
                                       ApCache* cache) {
    std::vector<std::vector<long>> rows(primes.size(), std::vector<long>(curves.size()));
    for (std::size_t j = 0; j < curves.size(); ++j) {
        const CurveRecord& c = curves[j];
        for (std::size_t i = 0; i < primes.size(); ++i) {
            const long p = primes[i];
            if (c.conductor % p == 0)
                throw BadReduction(c.label + " has bad reduction at " + std::to_string(p));
            long v = 0;
            if (auto it = c.ap.find(p); it != c.ap.end()) {
                v = it->second;
            } else if (!(cache && cache->get(c.label, p, v))) {
                v = ec_ap(c.coeffs, p);
                if (cache) cache->put(c.label, p, v);
            }
            rows[i][j] = v;
        }
    }
    return rows;
}

std::vector<CurveRecord> fetch_remote(long conductor_bound, const RemoteConfig& cfg,
                                      const std::vector<CurveRecord>& local) {
    if (!cfg.enabled) throw RemoteDisabled("remote curve source is disabled");
    if (cfg.page_size <= 0) throw PaginationInconsistency("page size must be positive");
    const std::string& url = cfg.base_url;
    const std::size_t scheme_end = url.find("://");
    const std::size_t path_start = url.find('/', scheme_end == std::string::npos ? 0 : scheme_end + 3);
    const std::string host = path_start == std::string::npos ? url : url.substr(0, path_start);
    const std::string path = path_start == std::string::npos ? "/" : url.substr(path_start);

    httplib::Client cli(host);
    cli.set_connection_timeout(cfg.timeout_seconds, 0);
    cli.set_read_timeout(cfg.timeout_seconds, 0);

    std::set<std::string> seen;
    std::vector<CurveRecord> remote;
    long offset = 0;
    for (int page = 0;; ++page) {
        if (page >= cfg.max_pages) throw PaginationInconsistency("more than " + std::to_string(cfg.max_pages) + " pages");
        const std::string target = path + "?max_conductor=" + std::to_string(conductor_bound) +
                                   "&offset=" + std::to_string(offset) + "&limit=" + std::to_string(cfg.page_size);
        auto res = cli.Get(target);
        if (!res) throw HttpError(0, "request failed: " + httplib::to_string(res.error()));
        if (res->status != 200) throw HttpError(res->status, target);
        nlohmann::json body;
        try {
            body = nlohmann::json::parse(res->body);
        } catch (const nlohmann::json::exception& e) {
            throw PaginationInconsistency("page " + std::to_string(page) + " is not JSON: " + e.what());
        }
        if (!body.is_array()) throw PaginationInconsistency("page " + std::to_string(page) + " is not an array");
        if (body.size() > static_cast<std::size_t>(cfg.page_size))
            throw PaginationInconsistency("page " + std::to_string(page) + " exceeds the page size");
        for (const auto& item : body) {
            CurveRecord r;
            try {
                r.label = item.at("label").get<std::string>();
                r.conductor = item.at("conductor").get<long>();
                const auto& a = item.at("ainvs");
                if (!a.is_array() || a.size() != 5) throw PaginationInconsistency("ainvs must have 5 entries");
                r.coeffs = {a[0].get<long>(), a[1].get<long>(), a[2].get<long>(), a[3].get<long>(), a[4].get<long>()};
            } catch (const nlohmann::json::exception& e) {
                throw MalformedRow("remote page " + std::to_string(page) + ": " + e.what());
            }
            check_record(r, "remote " + r.label);
            if (r.conductor > conductor_bound)
                throw PaginationInconsistency(r.label + " exceeds the requested conductor bound");
            if (!seen.insert(r.label).second)
                throw PaginationInconsistency(r.label + " appears on more than one page");
            remote.push_back(std::move(r));
        }
        offset += static_cast<long>(body.size());
        if (body.size() < static_cast<std::size_t>(cfg.page_size)) break;
    }

    std::vector<CurveRecord> out = local;
    std::set<std::string> local_labels;
    for (const CurveRecord& r : local) local_labels.insert(r.label);
    for (CurveRecord& r : remote)
        if (!local_labels.count(r.label)) out.push_back(std::move(r));
    return out;
}

} // namespace cdx
