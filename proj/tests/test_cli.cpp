#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "cdx/cli.hpp"
#include "cdx/search.hpp"

using namespace cdx;
namespace fs = std::filesystem;

namespace {

struct Run {
    int code;
    std::string out, err;
};

Run cli(std::vector<std::string> args) {
    args.insert(args.begin(), "cdx");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

std::string tmp(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("cdx_cli_" + name);
    fs::remove(p);
    return p.string();
}

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
}

std::vector<SearchRecord> records(const std::string& path) {
    std::ifstream in(path);
    return read_jsonl(in);
}

} // namespace

TEST_CASE("help on every command") {
    for (auto args : std::vector<std::vector<std::string>>{{"--help"},
                                                           {"search", "--help"},
                                                           {"invariants", "--help"},
                                                           {"decompose", "--help"},
                                                           {"oracle", "--help"}}) {
        const Run r = cli(args);
        CHECK(r.code == 0);
        CHECK(r.out.find("Usage") != std::string::npos);
    }
    CHECK(cli({}).code == kExitConfig);
    CHECK(cli({"frobnicate"}).code == kExitConfig);
}

TEST_CASE("invariants command") {
    CHECK(cli({"invariants", "full:11"}).out == "1 1 1 1 1 0\n");
    CHECK(cli({"invariants", "gamma0:11"}).out == "11 12 0 0 2 1\n");
    // Generators of the Borel subgroup mod 11 spelled out.
    CHECK(cli({"invariants", "11;1,1,0,1;2,0,0,1;1,0,0,2;10,0,0,10"}).out == "11 12 0 0 2 1\n");
    CHECK(cli({"invariants", "11;1,2,3"}).code == kExitConfig);
    CHECK(cli({"invariants", "eleven"}).code == kExitConfig);
    CHECK(cli({"invariants", "full:99"}).code == kExitConfig);
}

TEST_CASE("decompose command") {
    const Run g0 = cli({"decompose", "gamma0:11"});
    REQUIRE(g0.code == 0);
    const auto j = nlohmann::json::parse(g0.out);
    CHECK(j["status"] == "CandidateCD");
    CHECK(j["e"]["11a1"] == 1);
    for (const auto& [label, m] : j["e"].items())
        if (label != "11a1") CHECK(m == 0);

    CHECK(nlohmann::json::parse(cli({"decompose", "full:11"}).out)["status"] == "TriviallyCD");
    const auto r23 = nlohmann::json::parse(cli({"decompose", "gamma0:23"}).out);
    CHECK(r23["status"] == "Refuted");
    CHECK(r23["witness"]["kind"] == "EmptyPool");

    const Run v = cli({"decompose", "gamma0:11", "--verify", "100"});
    CHECK(v.code == 0);
    CHECK(v.out.find("0 violations") != std::string::npos);

    CHECK(cli({"decompose", "gamma0:11", "--curves", "nope.csv"}).code == kExitData);
    CHECK(cli({"decompose", "gamma0:11", "--prime-bound", "3"}).code == kExitConfig);
    // Not det-surjective.
    CHECK(cli({"decompose", "5;1,1,0,1"}).code == kExitConfig);
}

TEST_CASE("search command") {
    const std::string out = tmp("s11.jsonl"), summary = tmp("s11.csv"), genus = tmp("g11.csv");
    const Run r = cli({"search", "--level", "11", "--curves", "fixtures/ec.csv", "--out", out, "--summary", summary,
                       "--genus-table", genus});
    REQUIRE(r.code == 0);
    CHECK(r.out.find("level 11:") != std::string::npos);
    bool borel = false;
    for (const auto& rec : records(out)) borel = borel || (rec.index == 12 && rec.genus == 1);
    CHECK(borel);
    CHECK(slurp(summary).rfind("level,passed,refuted,pruned,seconds\n11,", 0) == 0);
    CHECK(slurp(genus).find("\n26,11,660,") != std::string::npos);

    CHECK(cli({"search", "--level", "0", "--out", out}).code == kExitConfig);
    CHECK(cli({"search", "--level", "6", "--workers", "0", "--out", out}).code == kExitConfig);
    CHECK(cli({"search", "--level", "6", "--prime-bound", "4", "--out", out}).code == kExitConfig);
    CHECK(cli({"search", "--level", "16", "--out", out}).code == kExitData);
    CHECK(cli({"search", "--level", "6", "--curves", "nope.csv", "--out", out}).code == kExitData);
    CHECK(cli({"search", "--level", "6", "--remote", "--out", out}).code == kExitConfig);

    fs::remove(out);
    fs::remove(summary);
    fs::remove(genus);
}

TEST_CASE("search max-index and lower levels") {
    const std::string out = tmp("m6.jsonl");
    REQUIRE(cli({"search", "--level", "6", "--max-index", "1", "--out", out}).code == 0);
    // The full group has level 1 and is reported by the level-1 run.
    CHECK(records(out).empty());
    REQUIRE(cli({"search", "--level", "6", "--max-index", "1", "--include-lower-levels", "--out", out}).code == 0);
    const auto recs = records(out);
    REQUIRE(recs.size() == 1);
    CHECK(recs[0].index == 1);
    CHECK(recs[0].level == 1);
    CHECK(recs[0].certificate.status == CdStatus::TriviallyCD);
    fs::remove(out);
}

TEST_CASE("search output is byte-identical across runs and workers") {
    const std::string a = tmp("w1.jsonl"), b = tmp("w3.jsonl"), c = tmp("w1b.jsonl");
    REQUIRE(cli({"search", "--level", "1-9", "--out", a}).code == 0);
    REQUIRE(cli({"search", "--level", "1-9", "--workers", "3", "--out", b}).code == 0);
    REQUIRE(cli({"search", "--level", "9,8,7,6,5,4,3,2,1", "--out", c}).code == 0);
    CHECK(slurp(a) == slurp(b));
    CHECK(slurp(a) == slurp(c));
    CHECK(!slurp(a).empty());
    fs::remove(a);
    fs::remove(b);
    fs::remove(c);
}

TEST_CASE("config file with flag precedence") {
    const std::string cfg = tmp("run.toml"), out = tmp("cfg.jsonl"), other = tmp("cfg2.jsonl");
    {
        std::ofstream f(cfg);
        f << "[search]\nlevel = [\"7\"]\nmax-index = 50\nout = \"" << out << "\"\n";
    }
    REQUIRE(cli({"--config", cfg, "search"}).code == 0);
    const auto recs = records(out);
    REQUIRE(!recs.empty());
    for (const auto& r : recs) {
        CHECK(r.level == 7);
        CHECK(r.index <= 50);
    }
    REQUIRE(cli({"--config", cfg, "search", "--max-index", "200", "--out", other}).code == 0);
    const auto more = records(other);
    CHECK(more.size() > recs.size());
    bool has168 = false;
    for (const auto& r : more) has168 = has168 || r.index == 168;
    CHECK(has168);
    fs::remove(cfg);
    fs::remove(out);
    fs::remove(other);
}

TEST_CASE("oracle command") {
    const Run ok = cli({"oracle"});
    CHECK(ok.code == 0);
    CHECK(ok.out.find("FAIL") == std::string::npos);
    CHECK(ok.out.find("60 samples, 0 mismatches") != std::string::npos);

    const Run bad = cli({"oracle", "--inject-trace-sign-error"});
    CHECK(bad.code == kExitMismatch);
    CHECK(bad.out.find("FAIL frobenius matrices") != std::string::npos);

    const Run empty = cli({"oracle", "--max-prime", "3", "--max-level", "1"});
    CHECK(empty.code == 0);
    CHECK(empty.out.find("0 samples") != std::string::npos);
}
