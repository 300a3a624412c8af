#include "cdx/search.hpp"

#include <algorithm>
#include <chrono>
#include <istream>
#include <mutex>
#include <ostream>
#include <tuple>

#include "cdx/csv.hpp"
#include "cdx/errors.hpp"

namespace cdx {

namespace {

using Clock = std::chrono::steady_clock;

nlohmann::json witness_payload(const nlohmann::json& cert) { return cert.value("witness", nlohmann::json::object()); }

DecompositionCertificate certificate_from_json(const nlohmann::json& j) {
    DecompositionCertificate c;
    const std::string s = j.at("status").get<std::string>();
    if (s == "TriviallyCD") c.status = CdStatus::TriviallyCD;
    else if (s == "CandidateCD") c.status = CdStatus::CandidateCD;
    else if (s == "Refuted") c.status = CdStatus::Refuted;
    else throw ParseError("unknown certificate status " + s);
    for (const auto& [label, mult] : j.at("e").items()) {
        c.labels.push_back(label);
        c.e.push_back(mult.get<long>());
    }
    c.primes = j.at("primes").get<std::vector<long>>();
    c.extra_primes = j.at("extra_primes").get<std::vector<long>>();
    const nlohmann::json w = witness_payload(j);
    if (w.contains("kind")) {
        const std::string k = w["kind"].get<std::string>();
        for (WitnessKind wk : {WitnessKind::NonIntegralEntry, WitnessKind::NegativeEntry, WitnessKind::GenusSumMismatch,
                               WitnessKind::ExtraPrimeMismatch, WitnessKind::EmptyPool})
            if (to_string(wk) == k) c.witness.kind = wk;
        c.witness.index = w.value("index", -1L);
        if (w.contains("value")) c.witness.value = mpq_class(w["value"].get<std::string>());
        c.witness.sum = w.value("sum", 0L);
        c.witness.genus = w.value("genus", 0L);
        c.witness.prime = w.value("p", 0L);
        c.witness.lhs = w.value("lhs", 0L);
        c.witness.rhs = w.value("rhs", 0L);
    }
    return c;
}

auto order_key(const SearchRecord& r) { return std::tie(r.level, r.index, r.genus, r.class_key); }

nlohmann::json payload(const SearchRecord& r) {
    nlohmann::json j = record_json(r);
    j.erase("ms");
    return j;
}

} // namespace

nlohmann::json record_json(const SearchRecord& r) {
    nlohmann::json j;
    j["level"] = r.level;
    j["index"] = r.index;
    j["genus"] = r.genus;
    nlohmann::json gens = nlohmann::json::array();
    for (const Mat2& m : r.generators) gens.push_back({m.a, m.b, m.c, m.d});
    j["generators"] = gens;
    j["class_key"] = r.class_key;
    j["certificate"] = certificate_json(r.certificate);
    j["ms"] = r.ms;
    return j;
}

SearchRecord record_from_json(const nlohmann::json& j) {
    try {
        SearchRecord r;
        r.level = j.at("level").get<int>();
        r.index = j.at("index").get<long>();
        r.genus = j.at("genus").get<int>();
        for (const auto& g : j.at("generators")) {
            if (!g.is_array() || g.size() != 4) throw ParseError("generator must have four entries");
            r.generators.push_back({g[0].get<int>(), g[1].get<int>(), g[2].get<int>(), g[3].get<int>()});
        }
        r.class_key = j.at("class_key").get<std::string>();
        r.certificate = certificate_from_json(j.at("certificate"));
        r.ms = j.value("ms", 0L);
        return r;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("search record: ") + e.what());
    }
}

LevelRun run_level(int n, const SearchConfig& cfg) {
    const auto t0 = Clock::now();
    if (n > cfg.covered_level && !cfg.allow_incomplete_pool)
        throw MissingFixture("curve table covers levels up to " + std::to_string(cfg.covered_level) + ", not " +
                             std::to_string(n));
    std::vector<CurveRecord> db = cfg.curves;
    if (db.empty()) {
        try {
            db = load_curve_csv(cfg.curves_path);
        } catch (const MissingHeader& e) {
            throw MissingFixture(e.what());
        }
    }
    ApCache cache;
    if (!cfg.ap_cache_path.empty()) cache.load(cfg.ap_cache_path);

    const PrimeSelection sel = select_primes(curves_for_level(db, n), n, cfg.select, &cache);
    LatticeOptions lopt;
    lopt.exhaustive_cap = cfg.walk.order_cap;
    const LevelLattice lattice = build_level_lattice(n, lopt);

    std::mutex mu;
    std::map<std::string, std::pair<DecompositionCertificate, long>> certs;
    auto evaluate = [&](const SubgroupRep& h) {
        const auto s = Clock::now();
        DecompositionCertificate c = test_cd(h, sel, curve_invariants(h));
        const long ms = cfg.record_timing
                            ? static_cast<long>(std::chrono::duration_cast<std::chrono::milliseconds>(Clock::now() - s).count())
                            : 0;
        return std::make_pair(std::move(c), ms);
    };
    const Predicate pred = [&](const SubgroupRep& h) {
        auto res = evaluate(h);
        const bool ok = res.first.status != CdStatus::Refuted;
        std::lock_guard<std::mutex> lock(mu);
        // Lattice classes are already canonical conjugates.
        certs[format_class_key(h)] = std::move(res);
        return ok;
    };
    const WalkResult walk = pruned_walk(lattice, pred, cfg.walk);

    LevelRun out;
    for (const LatticeNode& node : walk.nodes) {
        if (node.status != NodeStatus::Passed) continue;
        const int level = level_of(node.subgroup);
        if (level != n && !cfg.emit_lower_levels) continue;
        auto it = certs.find(node.key);
        // Classes restored from a checkpoint were not evaluated in this run.
        std::pair<DecompositionCertificate, long> c = it != certs.end() ? it->second : evaluate(node.subgroup);
        if (c.first.status == CdStatus::Refuted)
            throw InternalInconsistency("passed class " + node.key + " has a refuting certificate");
        const CurveInvariants inv = curve_invariants(node.subgroup);
        SearchRecord r;
        r.level = level;
        r.index = inv.index;
        r.genus = inv.genus;
        r.generators = node.subgroup.generator_matrices();
        r.class_key = node.key;
        r.certificate = std::move(c.first);
        r.ms = c.second;
        out.records.push_back(std::move(r));
    }
    std::sort(out.records.begin(), out.records.end(), [](const SearchRecord& a, const SearchRecord& b) {
        return std::tie(a.index, a.class_key) < std::tie(b.index, b.class_key);
    });
    if (!cfg.ap_cache_path.empty()) cache.save(cfg.ap_cache_path);

    LevelSummary& s = out.summary;
    s.level = n;
    s.passed = walk.passed;
    s.refuted = walk.refuted;
    s.pruned = walk.pruned;
    s.filtered = walk.filtered;
    s.emitted = out.records.size();
    s.interrupted = walk.interrupted;
    s.diagnostics = walk.diagnostics;
    s.seconds = std::chrono::duration<double>(Clock::now() - t0).count();
    return out;
}

MergedReport merge_reports(const std::vector<std::vector<SearchRecord>>& streams) {
    std::map<std::string, SearchRecord> by_key;
    for (const auto& stream : streams)
        for (const SearchRecord& r : stream) {
            auto [it, fresh] = by_key.emplace(r.class_key, r);
            if (fresh) continue;
            if (payload(it->second) != payload(r))
                throw ConflictingRecord("class " + r.class_key + " appears with different payloads");
            it->second.ms = std::max(it->second.ms, r.ms);
        }
    MergedReport m;
    for (auto& [key, r] : by_key) m.dataset.push_back(r);
    std::sort(m.dataset.begin(), m.dataset.end(),
              [](const SearchRecord& a, const SearchRecord& b) { return order_key(a) < order_key(b); });
    for (const SearchRecord& r : m.dataset) m.table.emplace(r.genus, r);
    return m;
}

void write_jsonl(const std::vector<SearchRecord>& records, std::ostream& out) {
    for (const SearchRecord& r : records) out << record_json(r).dump() << '\n';
}

std::vector<SearchRecord> read_jsonl(std::istream& in) {
    std::vector<SearchRecord> out;
    std::string line;
    long lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(line);
        } catch (const nlohmann::json::exception& e) {
            throw ParseError("line " + std::to_string(lineno) + ": " + e.what());
        }
        out.push_back(record_from_json(j));
    }
    return out;
}

void write_summary_csv(const std::vector<LevelSummary>& rows, std::ostream& out) {
    out << "level,passed,refuted,pruned,seconds\n";
    for (const LevelSummary& s : rows) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.3f", s.seconds);
        out << s.level << ',' << s.passed << ',' << s.refuted << ',' << s.pruned << ',' << buf << '\n';
    }
}

void write_genus_table_csv(const GenusTable& table, std::ostream& out) {
    out << "genus,level,index,class_key\n";
    for (const auto& [g, r] : table) out << g << ',' << r.level << ',' << r.index << ',' << csv_field(r.class_key) << '\n';
}

} // namespace cdx
