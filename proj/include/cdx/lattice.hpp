#pragma once

#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "cdx/subgroup.hpp"

namespace cdx {

// A group X ≤ GL2(Z/NZ) acting on its own subgroups by conjugation, with the
// element-class data needed for conjugacy tests inside X.
class ConjugationGroup {
public:
    explicit ConjugationGroup(SubgroupRep x);

    const SubgroupRep& group() const { return x_; }
    const ClassTable& classes() const { return *table_; }
    const std::vector<uint32_t>& centralizer(int k) const;
    std::vector<uint32_t> distribution(const SubgroupRep& h) const;
    // Some x in X with x a x^-1 = b.
    std::optional<uint32_t> conjugator(const SubgroupRep& a, const SubgroupRep& b) const;
    SubgroupRep normalizer(const SubgroupRep& u) const;
    // Left transversal of N_X(u) in X: one x per distinct conjugate x u x^-1.
    std::vector<uint32_t> conjugating_transversal(const SubgroupRep& u, const SubgroupRep& nu) const;

private:
    SubgroupRep x_;
    bool full_ = false;
    std::unique_ptr<ClassTable> own_;
    const ClassTable* table_ = nullptr;
    mutable std::mutex mu_;
    mutable std::vector<std::unique_ptr<std::vector<uint32_t>>> cent_;
};

SubgroupRep derived_subgroup(const SubgroupRep& s);
// Last term of the derived series.
SubgroupRep solvable_residual(const SubgroupRep& s);
// Non-trivial perfect subgroups of X up to X-conjugacy (two-generated search).
std::vector<SubgroupRep> perfect_subgroups(const ConjugationGroup& x);

struct LatticeOptions {
    bool require_minus_identity = false;
    std::size_t exhaustive_cap = 200000;  // largest |X| accepted
};

// Every subgroup of X up to X-conjugacy (restricted to those containing -I
// when requested), built by cyclic extension from perfect subgroups.
std::vector<SubgroupRep> subgroup_classes(const ConjugationGroup& x, const LatticeOptions& opt = {});

std::vector<SubgroupRep> all_subgroups(const SubgroupRep& g,
                                       const std::function<bool(const SubgroupRep&)>& filter = {});
std::vector<SubgroupRep> maximal_subgroups(const SubgroupRep& h);

enum class NodeStatus { Passed, Refuted, FilteredOut };
const char* to_string(NodeStatus s);

struct LatticeNode {
    SubgroupRep subgroup;
    std::string key;
    std::vector<std::string> parent_keys;
    NodeStatus status = NodeStatus::Passed;
};

// The det-surjective, -I-containing classes mod N with their Hasse diagram
// under containment up to conjugacy. Sorted by (index, key).
struct LevelLattice {
    int modulus = 1;
    std::vector<SubgroupRep> classes;
    std::vector<std::string> keys;
    std::vector<std::vector<int>> parents;
    std::size_t all_minus_identity_classes = 0;
};

LevelLattice build_level_lattice(int n, const LatticeOptions& opt = {});

struct WalkConfig {
    long max_index = 0;  // 0 = unlimited
    std::size_t order_cap = 200000;
    unsigned workers = 1;
    std::string checkpoint_path;  // empty: no checkpoint
    long stop_after = -1;         // stop after this many fresh evaluations (testing)
    int spot_checks = 2;          // refuted nodes whose children are re-tested
};

struct WalkResult {
    std::vector<LatticeNode> nodes;  // evaluated nodes (passed and refuted), sorted
    std::size_t passed = 0, refuted = 0, pruned = 0, filtered = 0;
    bool interrupted = false;
    std::vector<std::string> diagnostics;

    std::vector<LatticeNode> emitted() const;
};

using Predicate = std::function<bool(const SubgroupRep&)>;

WalkResult pruned_walk(const LevelLattice& lattice, const Predicate& predicate, const WalkConfig& config = {});
WalkResult pruned_walk(int n, const Predicate& predicate, const WalkConfig& config = {});

// Checkpoint: a header line, then `status<TAB>classkey<TAB>encoding` lines.
struct CheckpointEntry {
    NodeStatus status;
    std::string key;
    std::string encoding;
};
std::vector<CheckpointEntry> load_checkpoint(const std::string& path, int modulus);
void append_checkpoint(const std::string& path, int modulus, const std::vector<CheckpointEntry>& entries);

} // namespace cdx
