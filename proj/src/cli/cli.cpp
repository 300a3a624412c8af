#include "cdx/cli.hpp"

#include <unistd.h>

#include <CLI11.hpp>
#include <cstdlib>
#include <fstream>
#include <iostream>

#include "cdx/errors.hpp"
#include "cdx/search.hpp"

namespace cdx {

namespace {

bool colorize(const std::ostream& out) {
    return &out == &std::cout && std::getenv("NO_COLOR") == nullptr && isatty(STDOUT_FILENO);
}

std::string tag(bool pass, const std::ostream& out) {
    const char* word = pass ? "PASS" : "FAIL";
    if (!colorize(out)) return word;
    return std::string(pass ? "\033[32m" : "\033[31m") + word + "\033[0m";
}

int exit_code_for(const Error& e) {
    static const std::set<std::string> config{"ParseError",   "ConstraintViolation", "RemoteDisabled",
                                              "OrderCapExceeded", "NotADivisor",   "NotAMultiple",
                                              "ModulusMismatch",  "NonUnitDeterminant", "BadPrime",
                                              "UnsupportedPrime"};
    static const std::set<std::string> data{"MissingFixture",     "MalformedRow",       "MissingHeader",
                                            "NonIntegerField",    "InsufficientPrimes", "CorruptCheckpoint",
                                            "VersionMismatch",    "HttpError",          "PaginationInconsistency",
                                            "ConflictingRecord",  "BadReduction",       "SingularMatrix"};
    if (config.count(e.kind())) return kExitConfig;
    if (data.count(e.kind())) return kExitData;
    return kExitMismatch;
}

std::vector<int> parse_levels(const std::vector<std::string>& tokens) {
    std::vector<int> out;
    auto to_int = [](const std::string& s) {
        std::size_t used = 0;
        int v = 0;
        try {
            v = std::stoi(s, &used);
        } catch (const std::logic_error&) {
            used = 0;
        }
        if (s.empty() || used != s.size()) throw ParseError("bad level '" + s + "'");
        return v;
    };
    for (const std::string& t : tokens) {
        const std::size_t dash = t.find('-', 1);
        if (dash == std::string::npos) {
            out.push_back(to_int(t));
        } else {
            const int lo = to_int(t.substr(0, dash)), hi = to_int(t.substr(dash + 1));
            if (lo > hi) throw ParseError("empty level range '" + t + "'");
            for (int n = lo; n <= hi; ++n) out.push_back(n);
        }
    }
    for (int n : out)
        if (n < 1 || n > Gl2Context::kMaxModulus) throw ParseError("level " + std::to_string(n) + " out of range");
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

void write_file(const std::string& path, const std::function<void(std::ostream&)>& body) {
    std::ofstream f(path, std::ios::trunc);
    if (!f) throw ParseError("cannot write " + path);
    body(f);
}

struct SearchArgs {
    std::vector<std::string> levels;
    std::string curves = "fixtures/ec.csv";
    long prime_bound = 8192;
    int extra = 3;
    long max_index = 0;
    int workers = 1;
    std::string out = "search.jsonl";
    std::string summary;
    std::string genus_table;
    std::string checkpoint;
    std::string ap_cache;
    bool allow_incomplete = false;
    bool lower_levels = false;
    bool timing = false;
    bool remote = false;
    std::string remote_url;
    int remote_page_size = 100;
};

int cmd_search(const SearchArgs& a, std::ostream& out) {
    if (a.prime_bound < 5) throw ParseError("prime bound must be at least 5");
    if (a.workers < 1) throw ParseError("worker count must be at least 1");
    if (a.extra < 0) throw ParseError("extra prime count must be nonnegative");
    if (a.max_index < 0) throw ParseError("max index must be nonnegative");
    const std::vector<int> levels = parse_levels(a.levels);
    if (levels.empty()) throw ParseError("no level given");

    SearchConfig cfg;
    cfg.curves_path = a.curves;
    cfg.allow_incomplete_pool = a.allow_incomplete;
    cfg.emit_lower_levels = a.lower_levels;
    cfg.record_timing = a.timing;
    cfg.select.bound = a.prime_bound;
    cfg.select.extra = a.extra;
    cfg.walk.max_index = a.max_index;
    cfg.walk.workers = static_cast<unsigned>(a.workers);
    cfg.ap_cache_path = a.ap_cache;
    if (a.remote) {
        if (a.remote_url.empty()) throw ParseError("--remote needs --remote-url");
        RemoteConfig rc;
        rc.enabled = true;
        rc.base_url = a.remote_url;
        rc.page_size = a.remote_page_size;
        const long top = static_cast<long>(levels.back()) * levels.back();
        cfg.curves = fetch_remote(top, rc, load_curve_csv(a.curves));
        out << "fetched curve table: " << cfg.curves.size() << " records\n";
    }

    std::vector<SearchRecord> all;
    std::vector<std::vector<SearchRecord>> streams;
    std::vector<LevelSummary> summaries;
    for (int n : levels) {
        SearchConfig c = cfg;
        if (!a.checkpoint.empty()) c.walk.checkpoint_path = levels.size() == 1 ? a.checkpoint : a.checkpoint + "." + std::to_string(n);
        LevelRun run = run_level(n, c);
        const LevelSummary& s = run.summary;
        out << "level " << n << ": passed " << s.passed << ", refuted " << s.refuted << ", pruned " << s.pruned
            << ", emitted " << s.emitted << " (" << s.seconds << " s)\n";
        for (const std::string& d : s.diagnostics) out << "  note: " << d << '\n';
        all.insert(all.end(), run.records.begin(), run.records.end());
        streams.push_back(std::move(run.records));
        summaries.push_back(s);
    }
    const MergedReport merged = merge_reports(streams);
    write_file(a.out, [&](std::ostream& f) { write_jsonl(all, f); });
    if (!a.summary.empty()) write_file(a.summary, [&](std::ostream& f) { write_summary_csv(summaries, f); });
    if (!a.genus_table.empty()) write_file(a.genus_table, [&](std::ostream& f) { write_genus_table_csv(merged.table, f); });
    out << "wrote " << all.size() << " records to " << a.out << '\n';
    return kExitOk;
}

int cmd_invariants(const std::string& text, std::ostream& out) {
    const SubgroupRep h = parse_subgroup_arg(text);
    const CurveInvariants inv = curve_invariants(h);
    out << inv.level << ' ' << inv.index << ' ' << inv.nu2 << ' ' << inv.nu3 << ' ' << inv.cusps << ' ' << inv.genus
        << '\n';
    return kExitOk;
}

struct DecomposeArgs {
    std::string subgroup;
    std::string curves = "fixtures/ec.csv";
    long prime_bound = 8192;
    int extra = 3;
    long verify = 0;
};

int cmd_decompose(const DecomposeArgs& a, std::ostream& out) {
    if (a.prime_bound < 5) throw ParseError("prime bound must be at least 5");
    if (a.extra < 0) throw ParseError("extra prime count must be nonnegative");
    const SubgroupRep h = parse_subgroup_arg(a.subgroup);
    if (!h.det_surjective() || !h.contains_minus_identity())
        throw ConstraintViolation("subgroup must be det-surjective and contain -I");
    const int n = h.modulus();
    SelectOptions opt;
    opt.bound = a.prime_bound;
    opt.extra = a.extra;
    const PrimeSelection sel = select_primes(curves_for_level(load_curve_csv(a.curves), n), n, opt);
    const DecompositionCertificate c = test_cd(h, sel, curve_invariants(h));
    out << certificate_json(c).dump() << '\n';
    if (a.verify > 0 && c.status == CdStatus::CandidateCD) {
        const ConsistencyReport rep = verify_candidate(h, c.e, sel, a.verify);
        out << "heuristic check up to " << a.verify << ": " << rep.checked.size() << " primes, "
            << rep.violations.size() << " violations\n";
        if (!rep.ok()) return kExitMismatch;
    }
    return kExitOk;
}

int cmd_oracle(const OracleOptions& opt, std::ostream& out) {
    const OracleReport r = run_oracle(opt);
    out << tag(r.matrix_mismatches == 0, out) << " frobenius matrices: " << r.samples << " samples, "
        << r.matrix_mismatches << " mismatches\n";
    out << tag(r.genus0_failures == 0, out) << " genus 0 point counts: " << r.genus0_checks << " checks, "
        << r.genus0_failures << " failures\n";
    out << tag(r.genus1_failures == 0, out) << " genus 1 traces: " << r.genus1_checks << " checks, "
        << r.genus1_failures << " failures\n";
    for (std::size_t i = 0; i < r.failures.size() && i < 20; ++i) out << "  " << r.failures[i] << '\n';
    return r.ok() ? kExitOk : kExitMismatch;
}

} // namespace

SubgroupRep parse_subgroup_arg(const std::string& text) {
    auto number = [&](const std::string& s) {
        std::size_t used = 0;
        int v = 0;
        try {
            v = std::stoi(s, &used);
        } catch (const std::logic_error&) {
            used = 0;
        }
        if (s.empty() || used != s.size() || v < 1 || v > Gl2Context::kMaxModulus)
            throw ParseError("bad modulus in '" + text + "'");
        return v;
    };
    if (text.rfind("full:", 0) == 0) return full_group(number(text.substr(5)));
    if (text.rfind("gamma0:", 0) == 0) return borel_subgroup(number(text.substr(7)));
    return parse_subgroup(text);
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Search for modular curves with completely decomposable Jacobians"};
    app.set_config("--config", "", "TOML-style configuration file; flags override it");
    app.require_subcommand(1);

    SearchArgs sa;
    auto* search = app.add_subcommand("search", "Run the pruned lattice search at one or more levels");
    search->add_option("--level", sa.levels, "Level, comma list or range such as 1-10")->delimiter(',')->required();
    search->add_option("--curves", sa.curves, "Curve table CSV")->capture_default_str();
    search->add_option("--prime-bound", sa.prime_bound, "Largest prime tried for the square system")->capture_default_str();
    search->add_option("--extra-primes", sa.extra, "Consistency primes after the square system")->capture_default_str();
    search->add_option("--max-index", sa.max_index, "Skip classes of larger index (0: no limit)")->capture_default_str();
    search->add_option("--workers", sa.workers, "Worker threads")->capture_default_str();
    search->add_option("--out", sa.out, "JSONL record output")->capture_default_str();
    search->add_option("--summary", sa.summary, "Per-level summary CSV");
    search->add_option("--genus-table", sa.genus_table, "Minimal record per genus CSV");
    search->add_option("--checkpoint", sa.checkpoint, "Checkpoint file (suffixed by level for several levels)");
    search->add_option("--ap-cache", sa.ap_cache, "a_p cache CSV shared across runs");
    search->add_flag("--allow-incomplete-pool", sa.allow_incomplete, "Run levels beyond the curve table's coverage");
    search->add_flag("--include-lower-levels", sa.lower_levels, "Also report classes of smaller level");
    search->add_flag("--timing", sa.timing, "Record per-class milliseconds");
    search->add_flag("--remote", sa.remote, "Merge curves from a remote endpoint");
    search->add_option("--remote-url", sa.remote_url, "Remote endpoint base URL");
    search->add_option("--remote-page-size", sa.remote_page_size, "Remote page size")->capture_default_str();

    std::string inv_arg;
    auto* invariants = app.add_subcommand("invariants", "Print `level index nu2 nu3 cusps genus` for a subgroup");
    invariants->add_option("subgroup", inv_arg, "N;a,b,c,d;... or full:N or gamma0:N")->required();

    DecomposeArgs da;
    auto* decompose = app.add_subcommand("decompose", "Print the decomposability certificate of a subgroup");
    decompose->add_option("subgroup", da.subgroup, "N;a,b,c,d;... or full:N or gamma0:N")->required();
    decompose->add_option("--curves", da.curves, "Curve table CSV")->capture_default_str();
    decompose->add_option("--prime-bound", da.prime_bound)->capture_default_str();
    decompose->add_option("--extra-primes", da.extra)->capture_default_str();
    decompose->add_option("--verify", da.verify, "Also compare traces at all good primes up to this bound");

    OracleOptions oo;
    auto* oracle = app.add_subcommand("oracle", "Cross-check the Frobenius formulas against slow oracles");
    oracle->add_option("--max-prime", oo.max_prime)->capture_default_str();
    oracle->add_option("--max-level", oo.max_level)->capture_default_str();
    oracle->add_option("--samples", oo.samples)->capture_default_str();
    oracle->add_option("--seed", oo.seed)->capture_default_str();
    oracle->add_option("--curves", oo.curves_path)->capture_default_str();
    oracle->add_flag("--inject-trace-sign-error", oo.negate_trace, "Negate traces in the closed form (self-test)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitConfig;
    }

    try {
        if (search->parsed()) return cmd_search(sa, out);
        if (invariants->parsed()) return cmd_invariants(inv_arg, out);
        if (decompose->parsed()) return cmd_decompose(da, out);
        if (oracle->parsed()) return cmd_oracle(oo, out);
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return exit_code_for(e);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitMismatch;
    }
    return kExitConfig;
}

} // namespace cdx
