#include <doctest.h>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>

#include "cdx/errors.hpp"
#include "cdx/invariants.hpp"
#include "cdx/lattice.hpp"

using namespace cdx;

namespace {

// Every subgroup of GL2(Z/n), found by adjoining one element at a time.
std::vector<std::vector<uint32_t>> every_subgroup(int n) {
    auto ctx = Gl2Context::get(n);
    std::set<std::vector<uint32_t>> seen;
    std::vector<std::vector<uint32_t>> todo{{ctx->identity()}};
    seen.insert(todo[0]);
    for (std::size_t i = 0; i < todo.size(); ++i) {
        const std::vector<uint32_t> cur = todo[i];
        std::vector<char> in(ctx->order(), 0);
        for (uint32_t e : cur) in[e] = 1;
        for (uint32_t g : ctx->all_elements()) {
            if (in[g]) continue;
            std::vector<uint32_t> gens = cur;
            gens.push_back(g);
            SubgroupRep s = SubgroupRep::generate(ctx, gens);
            if (seen.insert(s.elements()).second) todo.push_back(s.elements());
        }
    }
    return todo;
}

// Canonical form by scanning all conjugates.
std::vector<uint32_t> least_conjugate(const Gl2Context& ctx, const std::vector<uint32_t>& a) {
    std::vector<uint32_t> best, c(a.size());
    for (uint32_t g : ctx.all_elements()) {
        for (std::size_t i = 0; i < a.size(); ++i) c[i] = ctx.conjugate(g, a[i]);
        std::sort(c.begin(), c.end());
        if (best.empty() || c < best) best = c;
    }
    return best;
}

bool subset(const std::vector<uint32_t>& a, const std::vector<uint32_t>& b) {
    return std::includes(b.begin(), b.end(), a.begin(), a.end());
}

std::set<std::string> keys_of(const std::vector<SubgroupRep>& v) {
    std::set<std::string> out;
    for (const auto& h : v) out.insert(canonical_class_key(h));
    return out;
}

} // namespace

TEST_CASE("derived series") {
    CHECK(solvable_residual(full_group(5)).order() == 120);
    CHECK(solvable_residual(full_group(4)).order() == 1);
    CHECK(solvable_residual(full_group(3)).order() == 1);
    CHECK(derived_subgroup(full_group(3)).order() == 24);
    CHECK(derived_subgroup(sl2_subgroup(3)).order() == 8);
    CHECK(solvable_residual(full_group(10)).order() == 120);

    ConjugationGroup g7(full_group(7));
    auto p7 = perfect_subgroups(g7);
    REQUIRE(p7.size() == 1);
    CHECK(p7[0].order() == 336);
    // SL2(F_11) contains SL2(F_5) in two conjugacy classes under SL2, fused by GL2.
    ConjugationGroup g11(full_group(11));
    std::vector<std::size_t> orders;
    for (const auto& p : perfect_subgroups(g11)) orders.push_back(p.order());
    std::sort(orders.begin(), orders.end());
    CHECK(orders == std::vector<std::size_t>{120, 1320});
}

TEST_CASE("subgroup classes match brute force") {
    for (int n = 2; n <= 4; ++n) {
        auto ctx = Gl2Context::get(n);
        const auto every = every_subgroup(n);
        std::set<std::vector<uint32_t>> classes;
        for (const auto& s : every) classes.insert(least_conjugate(*ctx, s));
        const auto found = all_subgroups(full_group(n));
        std::set<std::vector<uint32_t>> got;
        for (const auto& h : found) got.insert(least_conjugate(*ctx, h.elements()));
        CHECK(found.size() == classes.size());
        CHECK(got == classes);
        CHECK(keys_of(found).size() == found.size());
    }
    CHECK(all_subgroups(full_group(2)).size() == 4);
    CHECK(all_subgroups(full_group(3)).size() == 16);
}

TEST_CASE("maximal subgroups match brute force") {
    for (int n = 2; n <= 4; ++n) {
        auto ctx = Gl2Context::get(n);
        const auto every = every_subgroup(n);
        const std::size_t top = ctx->order();
        std::set<std::vector<uint32_t>> expected;
        for (const auto& m : every) {
            if (m.size() == top) continue;
            bool maximal = true;
            for (const auto& k : every)
                if (k.size() > m.size() && k.size() < top && subset(m, k)) {
                    maximal = false;
                    break;
                }
            if (maximal) expected.insert(least_conjugate(*ctx, m));
        }
        std::set<std::vector<uint32_t>> got;
        for (const auto& h : maximal_subgroups(full_group(n))) got.insert(least_conjugate(*ctx, h.elements()));
        CHECK(got == expected);
    }
    // Index-2 and index-(p+1) subgroups of GL2(F_5) are among the maximal ones.
    std::set<std::size_t> orders;
    for (const auto& h : maximal_subgroups(full_group(5))) orders.insert(h.order());
    CHECK(orders.count(240) == 1);
    CHECK(orders.count(80) == 1);
}

TEST_CASE("level lattice") {
    LevelLattice l2 = build_level_lattice(2);
    CHECK(l2.classes.size() == 4);  // -I = I mod 2, det trivial
    CHECK(l2.classes[0].order() == 6);
    CHECK(l2.parents[0].empty());

    for (int n = 3; n <= 4; ++n) {
        auto ctx = Gl2Context::get(n);
        std::set<std::vector<uint32_t>> expected;
        for (const auto& s : every_subgroup(n)) {
            SubgroupRep h = SubgroupRep::from_elements(ctx, s);
            if (h.det_surjective() && h.contains_minus_identity()) expected.insert(least_conjugate(*ctx, s));
        }
        LevelLattice lat = build_level_lattice(n);
        std::set<std::vector<uint32_t>> got;
        for (const auto& h : lat.classes) got.insert(least_conjugate(*ctx, h.elements()));
        CHECK(got == expected);
    }

    LevelLattice lat = build_level_lattice(6);
    for (std::size_t i = 0; i < lat.classes.size(); ++i) {
        CHECK(lat.keys[i] == canonical_class_key(lat.classes[i]));
        if (i > 0) {
            CHECK_FALSE(lat.parents[i].empty());
            CHECK(lat.classes[i - 1].index() <= lat.classes[i].index());
        }
        for (int p : lat.parents[i]) {
            CHECK(static_cast<std::size_t>(p) < i);
            CHECK(lat.classes[static_cast<std::size_t>(p)].order() % lat.classes[i].order() == 0);
        }
    }
}

TEST_CASE("pruned walk agrees with exhaustive filtering") {
    auto genus_at_most_one = [](const SubgroupRep& h) { return genus(h) <= 1; };
    for (int n = 2; n <= 7; ++n) {
        LevelLattice lat = build_level_lattice(n);
        std::set<std::string> all_keys(lat.keys.begin(), lat.keys.end());

        WalkResult everything = pruned_walk(lat, [](const SubgroupRep&) { return true; });
        std::set<std::string> got;
        for (const auto& node : everything.emitted()) got.insert(node.key);
        CHECK(got == all_keys);
        CHECK(everything.pruned == 0);

        std::set<std::string> expected;
        for (const auto& h : all_subgroups(full_group(n)))
            if (h.det_surjective() && h.contains_minus_identity() && genus_at_most_one(h))
                expected.insert(canonical_class_key(h));
        WalkResult w = pruned_walk(lat, genus_at_most_one);
        got.clear();
        for (const auto& node : w.emitted()) got.insert(node.key);
        CHECK(got == expected);
        CHECK(w.diagnostics.empty());
        CHECK(w.passed + w.refuted + w.pruned == lat.classes.size());
    }
}

TEST_CASE("walk filters by index and flags non-monotone predicates") {
    LevelLattice lat = build_level_lattice(5);
    WalkConfig cfg;
    cfg.max_index = 12;
    WalkResult w = pruned_walk(lat, [](const SubgroupRep&) { return true; }, cfg);
    for (const auto& node : w.nodes) CHECK(node.subgroup.index() <= 12);
    CHECK(w.filtered > 0);

    // Refutes the top but passes everything else: children of a refuted node pass.
    WalkConfig spot;
    spot.spot_checks = 1;
    WalkResult bad = pruned_walk(lat, [](const SubgroupRep& h) { return h.index() != 1; }, spot);
    CHECK(bad.passed == 0);
    CHECK_FALSE(bad.diagnostics.empty());
}

TEST_CASE("walk workers give identical results") {
    LevelLattice lat = build_level_lattice(6);
    auto pred = [](const SubgroupRep& h) { return genus(h) == 0; };
    WalkConfig one, four;
    four.workers = 4;
    WalkResult a = pruned_walk(lat, pred, one), b = pruned_walk(lat, pred, four);
    REQUIRE(a.nodes.size() == b.nodes.size());
    for (std::size_t i = 0; i < a.nodes.size(); ++i) {
        CHECK(a.nodes[i].key == b.nodes[i].key);
        CHECK(a.nodes[i].status == b.nodes[i].status);
    }
}

TEST_CASE("checkpoint and resume") {
    namespace fs = std::filesystem;
    const fs::path dir = fs::temp_directory_path() / "cdx_lattice_ckpt";
    fs::create_directories(dir);
    const std::string path = (dir / "walk6.ckpt").string();
    fs::remove(path);

    LevelLattice lat = build_level_lattice(6);
    auto pred = [](const SubgroupRep& h) { return genus(h) == 0; };
    WalkResult full = pruned_walk(lat, pred);

    WalkConfig cfg;
    cfg.checkpoint_path = path;
    cfg.stop_after = 3;
    WalkResult part = pruned_walk(lat, pred, cfg);
    CHECK(part.interrupted);
    CHECK(load_checkpoint(path, 6).size() == 3);

    long calls = 0;
    cfg.stop_after = -1;
    WalkResult resumed = pruned_walk(lat, [&](const SubgroupRep& h) { ++calls; return pred(h); }, cfg);
    CHECK_FALSE(resumed.interrupted);
    REQUIRE(resumed.nodes.size() == full.nodes.size());
    for (std::size_t i = 0; i < full.nodes.size(); ++i) {
        CHECK(resumed.nodes[i].key == full.nodes[i].key);
        CHECK(resumed.nodes[i].status == full.nodes[i].status);
    }
    // Checkpointed nodes are not re-evaluated (spot checks add a few calls).
    CHECK(static_cast<std::size_t>(calls) <= full.nodes.size() - 3 + 6);
    CHECK(load_checkpoint(path, 6).size() == full.nodes.size());

    {
        std::ofstream out(path, std::ios::app);
        out << "passed\t6:12";  // truncated write
    }
    CHECK_THROWS_AS(pruned_walk(lat, pred, cfg), CorruptCheckpoint);
    {
        std::ofstream out(path, std::ios::trunc);
        out << "cdx-checkpoint\t9\t6\n";
    }
    CHECK_THROWS_AS(load_checkpoint(path, 6), VersionMismatch);
    {
        std::ofstream out(path, std::ios::trunc);
        out << "cdx-checkpoint\t1\t6\nmaybe\t6:1\t6;1,0,0,1\n";
    }
    CHECK_THROWS_AS(load_checkpoint(path, 6), CorruptCheckpoint);
    fs::remove_all(dir);
}
