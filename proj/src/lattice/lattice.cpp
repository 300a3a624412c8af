#include "cdx/lattice.hpp"

#include <algorithm>
#include <atomic>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>
#include <thread>
#include <unordered_map>

#include "cdx/errors.hpp"

namespace cdx {

namespace {

bool is_prime(unsigned long k) {
    if (k < 2) return false;
    for (unsigned long d = 2; d * d <= k; ++d)
        if (k % d == 0) return false;
    return true;
}

uint64_t hash_dist(std::size_t order, const std::vector<uint32_t>& dist) {
    uint64_t h = 1469598103934665603ull ^ order;
    for (uint32_t v : dist) {
        h ^= v + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
        h *= 1099511628211ull;
    }
    return h;
}

uint32_t commutator(const Gl2Context& ctx, uint32_t a, uint32_t b) {
    return ctx.mul(ctx.mul(a, b), ctx.mul(ctx.inv(a), ctx.inv(b)));
}

// Is every generator of `small` inside some X-conjugate of `big`?
// `tsmall`/`tbig` are the conjugating transversals of the two groups.
bool contained_up_to_conjugacy(const SubgroupRep& small, const std::vector<uint32_t>& tsmall,
                               const SubgroupRep& big, const std::vector<uint32_t>& tbig) {
    const Gl2Context& ctx = small.context();
    if (tsmall.size() <= tbig.size()) {
        for (uint32_t x : tsmall) {
            bool ok = true;
            for (uint32_t k : small.generators())
                if (!big.contains(ctx.conjugate(x, k))) {
                    ok = false;
                    break;
                }
            if (ok) return true;
        }
        return false;
    }
    for (uint32_t y : tbig) {
        const uint32_t yi = ctx.inv(y);
        bool ok = true;
        for (uint32_t k : small.generators())
            if (!big.contains(ctx.conjugate(yi, k))) {
                ok = false;
                break;
            }
        if (ok) return true;
    }
    return false;
}

} // namespace

// ---------------------------------------------------------------------------
// ConjugationGroup

ConjugationGroup::ConjugationGroup(SubgroupRep x) : x_(std::move(x)) {
    const Gl2Context& ctx = x_.context();
    full_ = x_.order() == ctx.order();
    if (full_) {
        table_ = &ctx.classes();
    } else {
        own_ = std::make_unique<ClassTable>(build_class_table(ctx, x_.elements(), x_.generators()));
        table_ = own_.get();
    }
    cent_.resize(table_->reps.size());
}

const std::vector<uint32_t>& ConjugationGroup::centralizer(int k) const {
    if (full_) return x_.context().rep_centralizer(k);
    std::lock_guard<std::mutex> lock(mu_);
    auto& slot = cent_[static_cast<std::size_t>(k)];
    if (!slot) {
        const Gl2Context& ctx = x_.context();
        const uint32_t r = table_->reps[static_cast<std::size_t>(k)];
        auto c = std::make_unique<std::vector<uint32_t>>();
        for (uint32_t e : x_.elements())
            if (ctx.mul(e, r) == ctx.mul(r, e)) c->push_back(e);
        slot = std::move(c);
    }
    return *slot;
}

std::vector<uint32_t> ConjugationGroup::distribution(const SubgroupRep& h) const {
    std::vector<uint32_t> dist(table_->reps.size(), 0);
    for (uint32_t e : h.elements()) {
        const int32_t k = table_->class_of[e];
        if (k < 0) throw ConstraintViolation("subgroup is not contained in the acting group");
        ++dist[static_cast<std::size_t>(k)];
    }
    return dist;
}

std::optional<uint32_t> ConjugationGroup::conjugator(const SubgroupRep& a, const SubgroupRep& b) const {
    if (a.modulus() != b.modulus()) throw ModulusMismatch("conjugator");
    const Gl2Context& ctx = a.context();
    if (a.order() != b.order()) return std::nullopt;
    if (a.elements() == b.elements()) return ctx.identity();
    const std::vector<uint32_t> da = distribution(a);
    if (da != distribution(b)) return std::nullopt;
    std::vector<uint32_t> gens = a.generators();
    if (gens.empty()) return ctx.identity();

    const ClassTable& t = *table_;
    std::size_t best = 0;
    unsigned long long best_cost = ~0ull;
    for (std::size_t i = 0; i < gens.size(); ++i) {
        const auto k = static_cast<std::size_t>(t.class_of[gens[i]]);
        const unsigned long long cost = static_cast<unsigned long long>(da[k]) * (x_.order() / t.sizes[k]);
        if (cost < best_cost) {
            best_cost = cost;
            best = i;
        }
    }
    std::swap(gens[0], gens[best]);
    const uint32_t v1 = gens[0];
    const int k = t.class_of[v1];
    const std::vector<uint32_t>& cent = centralizer(k);
    const uint32_t back = ctx.inv(t.conj[v1]);
    for (uint32_t w : b.elements()) {
        if (t.class_of[w] != k) continue;
        const uint32_t cw = t.conj[w];
        for (uint32_t c : cent) {
            const uint32_t x = ctx.mul(ctx.mul(cw, c), back);
            bool ok = true;
            for (std::size_t i = 1; i < gens.size() && ok; ++i) ok = b.contains(ctx.conjugate(x, gens[i]));
            if (ok) return x;
        }
    }
    return std::nullopt;
}

SubgroupRep ConjugationGroup::normalizer(const SubgroupRep& u) const {
    const Gl2Context& ctx = x_.context();
    std::vector<uint32_t> elems;
    for (uint32_t x : x_.elements()) {
        bool ok = true;
        for (uint32_t g : u.generators())
            if (!u.contains(ctx.conjugate(x, g))) {
                ok = false;
                break;
            }
        if (ok) elems.push_back(x);
    }
    return SubgroupRep::from_elements(x_.context_ptr(), std::move(elems));
}

std::vector<uint32_t> ConjugationGroup::conjugating_transversal(const SubgroupRep& u, const SubgroupRep& nu) const {
    (void)u;
    const Gl2Context& ctx = x_.context();
    ElementMask seen(ctx.order());
    std::vector<uint32_t> out;
    for (uint32_t x : x_.elements()) {
        if (seen.test(x)) continue;
        out.push_back(x);
        for (uint32_t y : nu.elements()) seen.set(ctx.mul(x, y));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Derived series and perfect subgroups

SubgroupRep derived_subgroup(const SubgroupRep& s) {
    const Gl2Context& ctx = s.context();
    std::vector<uint32_t> gens;
    for (uint32_t a : s.generators())
        for (uint32_t b : s.generators()) {
            const uint32_t c = commutator(ctx, a, b);
            if (c != ctx.identity()) gens.push_back(c);
        }
    std::sort(gens.begin(), gens.end());
    gens.erase(std::unique(gens.begin(), gens.end()), gens.end());
    SubgroupRep k = SubgroupRep::generate(s.context_ptr(), gens);
    // Normal closure in S.
    for (bool changed = true; changed;) {
        changed = false;
        const std::vector<uint32_t> kg = k.generators();
        for (uint32_t c : kg) {
            for (uint32_t g : s.generators()) {
                const uint32_t z = ctx.conjugate(g, c);
                if (k.contains(z)) continue;
                gens.push_back(z);
                k = SubgroupRep::generate(s.context_ptr(), gens);
                changed = true;
            }
        }
    }
    return k;
}

SubgroupRep solvable_residual(const SubgroupRep& s) {
    SubgroupRep cur = s;
    while (cur.order() > 1) {
        SubgroupRep next = derived_subgroup(cur);
        if (next.order() == cur.order()) break;
        cur = std::move(next);
    }
    return cur;
}

std::vector<SubgroupRep> perfect_subgroups(const ConjugationGroup& x) {
    const SubgroupRep r = solvable_residual(x.group());
    if (r.order() <= 1) return {};
    const Gl2Context& ctx = r.context();
    const ClassTable& t = x.classes();

    std::vector<SubgroupRep> found{r};
    std::set<std::vector<uint32_t>> tried;
    std::set<std::vector<uint32_t>> perfect_sets{r.elements()};
    std::vector<char> class_done(t.reps.size(), 0);
    for (uint32_t a : r.elements()) {
        const auto k = static_cast<std::size_t>(t.class_of[a]);
        if (class_done[k]) continue;
        class_done[k] = 1;
        std::vector<uint32_t> cent;
        for (uint32_t e : x.group().elements())
            if (ctx.mul(e, a) == ctx.mul(a, e)) cent.push_back(e);
        if (cent.size() == x.group().order()) continue;  // central: <a, b> is abelian mod centre
        ElementMask seen(ctx.order());
        for (uint32_t b : r.elements()) {
            if (seen.test(b)) continue;
            for (uint32_t c : cent) seen.set(ctx.conjugate(c, b));
            SubgroupRep s = SubgroupRep::generate(r.context_ptr(), {a, b});
            if (s.order() == r.order() || !tried.insert(s.elements()).second) continue;
            SubgroupRep p = solvable_residual(s);
            if (p.order() <= 1 || !perfect_sets.insert(p.elements()).second) continue;
            found.push_back(std::move(p));
        }
    }
    std::vector<SubgroupRep> out;
    for (SubgroupRep& p : found) {
        bool dup = false;
        for (const SubgroupRep& q : out)
            if (x.conjugator(q, p)) {
                dup = true;
                break;
            }
        if (!dup) out.push_back(std::move(p));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Cyclic extension

std::vector<SubgroupRep> subgroup_classes(const ConjugationGroup& x, const LatticeOptions& opt) {
    const SubgroupRep& g = x.group();
    if (g.order() > opt.exhaustive_cap)
        throw OrderCapExceeded("group of order " + std::to_string(g.order()) + " exceeds the lattice cap");
    if (opt.require_minus_identity && !g.contains_minus_identity()) return {};
    const Gl2Context& ctx = g.context();
    const auto& ctxp = g.context_ptr();

    std::vector<SubgroupRep> classes;
    std::unordered_map<uint64_t, std::vector<std::size_t>> buckets;
    auto insert = [&](SubgroupRep v) {
        const uint64_t h = hash_dist(v.order(), x.distribution(v));
        auto& bucket = buckets[h];
        for (std::size_t idx : bucket)
            if (x.conjugator(classes[idx], v)) return;
        bucket.push_back(classes.size());
        classes.push_back(std::move(v));
    };

    const uint32_t mi = ctx.minus_identity();
    insert(opt.require_minus_identity ? SubgroupRep::generate(ctxp, {mi}) : SubgroupRep::generate(ctxp, {}));
    for (const SubgroupRep& p : perfect_subgroups(x)) {
        if (!opt.require_minus_identity || p.contains(mi)) {
            insert(p);
        } else {
            std::vector<uint32_t> gens = p.generators();
            gens.push_back(mi);
            insert(SubgroupRep::generate(ctxp, gens));
        }
    }

    std::vector<uint32_t> queue;
    for (std::size_t i = 0; i < classes.size(); ++i) {
        const SubgroupRep u = classes[i];
        const SubgroupRep nu = x.normalizer(u);
        ElementMask seen(ctx.order());
        for (uint32_t e : u.elements()) seen.set(e);
        for (uint32_t gg : nu.elements()) {
            if (seen.test(gg)) continue;
            // Mark the N_X(U)-orbit of the coset gU: all yield conjugate extensions.
            queue.assign(1, gg);
            for (uint32_t e : u.elements()) seen.set(ctx.mul(gg, e));
            for (std::size_t qi = 0; qi < queue.size(); ++qi) {
                for (uint32_t s : nu.generators()) {
                    const uint32_t z = ctx.conjugate(s, queue[qi]);
                    if (seen.test(z)) continue;
                    for (uint32_t e : u.elements()) seen.set(ctx.mul(z, e));
                    queue.push_back(z);
                }
            }
            unsigned long k = 1;
            uint32_t y = gg;
            while (!u.contains(y)) {
                y = ctx.mul(y, gg);
                ++k;
            }
            if (!is_prime(k)) continue;
            std::vector<uint32_t> elems;
            elems.reserve(u.order() * k);
            uint32_t pw = ctx.identity();
            for (unsigned long j = 0; j < k; ++j) {
                for (uint32_t e : u.elements()) elems.push_back(ctx.mul(e, pw));
                pw = ctx.mul(pw, gg);
            }
            std::sort(elems.begin(), elems.end());
            std::vector<uint32_t> gens = u.generators();
            gens.push_back(gg);
            insert(SubgroupRep::from_elements(ctxp, std::move(elems), std::move(gens)));
        }
    }
    std::stable_sort(classes.begin(), classes.end(), [](const SubgroupRep& a, const SubgroupRep& b) {
        if (a.order() != b.order()) return a.order() > b.order();
        return a.elements() < b.elements();
    });
    return classes;
}

std::vector<SubgroupRep> all_subgroups(const SubgroupRep& g, const std::function<bool(const SubgroupRep&)>& filter) {
    ConjugationGroup x(g);
    std::vector<SubgroupRep> out;
    for (SubgroupRep& h : subgroup_classes(x))
        if (!filter || filter(h)) out.push_back(std::move(h));
    return out;
}

std::vector<SubgroupRep> maximal_subgroups(const SubgroupRep& h) {
    ConjugationGroup x(h);
    std::vector<SubgroupRep> cls = subgroup_classes(x);
    std::vector<std::vector<uint32_t>> trans(cls.size());
    for (std::size_t i = 0; i < cls.size(); ++i) trans[i] = x.conjugating_transversal(cls[i], x.normalizer(cls[i]));
    std::vector<SubgroupRep> out;
    for (std::size_t i = 0; i < cls.size(); ++i) {
        if (cls[i].order() == h.order()) continue;
        bool maximal = true;
        for (std::size_t j = 0; j < cls.size() && maximal; ++j) {
            const std::size_t oj = cls[j].order();
            if (oj == h.order() || oj <= cls[i].order() || oj % cls[i].order() != 0) continue;
            if (contained_up_to_conjugacy(cls[i], trans[i], cls[j], trans[j])) maximal = false;
        }
        if (maximal) out.push_back(cls[i]);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Level lattice

LevelLattice build_level_lattice(int n, const LatticeOptions& opt) {
    const SubgroupRep g = full_group(n);
    ConjugationGroup x(g);
    LatticeOptions o = opt;
    o.require_minus_identity = true;
    std::vector<SubgroupRep> all = subgroup_classes(x, o);

    LevelLattice lat;
    lat.modulus = n;
    lat.all_minus_identity_classes = all.size();
    struct Item {
        SubgroupRep rep;
        std::string key;
    };
    std::vector<Item> items;
    for (const SubgroupRep& h : all) {
        if (!h.det_surjective()) continue;
        SubgroupRep c = canonical_conjugate(h);
        std::string key = format_class_key(c);
        items.push_back({std::move(c), std::move(key)});
    }
    std::sort(items.begin(), items.end(), [](const Item& a, const Item& b) {
        if (a.rep.order() != b.rep.order()) return a.rep.order() > b.rep.order();
        return a.key < b.key;
    });
    const std::size_t m = items.size();
    std::vector<std::vector<uint32_t>> trans(m), dist(m);
    for (std::size_t i = 0; i < m; ++i) {
        lat.classes.push_back(items[i].rep);
        lat.keys.push_back(items[i].key);
        trans[i] = x.conjugating_transversal(items[i].rep, x.normalizer(items[i].rep));
        dist[i] = x.distribution(items[i].rep);
    }

    // over[i][j]: class i lies in a conjugate of class j (j strictly larger).
    std::vector<std::vector<char>> over(m, std::vector<char>(m, 0));
    for (std::size_t i = 0; i < m; ++i) {
        const SubgroupRep& k = lat.classes[i];
        for (std::size_t j = 0; j < m; ++j) {
            const SubgroupRep& h = lat.classes[j];
            if (h.order() <= k.order() || h.order() % k.order() != 0) continue;
            bool fits = true;
            for (std::size_t c = 0; c < dist[i].size() && fits; ++c) fits = dist[i][c] <= dist[j][c];
            if (fits && contained_up_to_conjugacy(k, trans[i], h, trans[j])) over[i][j] = 1;
        }
    }
    lat.parents.assign(m, {});
    for (std::size_t i = 0; i < m; ++i) {
        std::vector<std::size_t> up;
        for (std::size_t j = 0; j < m; ++j)
            if (over[i][j]) up.push_back(j);
        for (std::size_t j : up) {
            bool direct = true;
            for (std::size_t mid : up)
                if (over[mid][j]) {
                    direct = false;
                    break;
                }
            if (direct) lat.parents[i].push_back(static_cast<int>(j));
        }
    }
    return lat;
}

// ---------------------------------------------------------------------------
// Walk

const char* to_string(NodeStatus s) {
    switch (s) {
    case NodeStatus::Passed: return "passed";
    case NodeStatus::Refuted: return "refuted";
    case NodeStatus::FilteredOut: return "filtered";
    }
    return "?";
}

namespace {

constexpr const char* kCheckpointMagic = "cdx-checkpoint";
constexpr int kCheckpointVersion = 1;

NodeStatus parse_status(const std::string& s) {
    if (s == "passed") return NodeStatus::Passed;
    if (s == "refuted") return NodeStatus::Refuted;
    throw CorruptCheckpoint("unknown status '" + s + "'");
}

std::vector<std::string> split_tabs(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == '\t') {
            out.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    out.push_back(cur);
    return out;
}

} // namespace

std::vector<CheckpointEntry> load_checkpoint(const std::string& path, int modulus) {
    std::ifstream in(path, std::ios::binary);
    if (!in) return {};
    std::stringstream buf;
    buf << in.rdbuf();
    const std::string text = buf.str();
    if (text.empty()) return {};
    if (text.back() != '\n') throw CorruptCheckpoint(path + ": truncated last line");
    std::istringstream lines(text);
    std::string line;
    std::getline(lines, line);
    const std::vector<std::string> head = split_tabs(line);
    if (head.size() != 3 || head[0] != kCheckpointMagic) throw CorruptCheckpoint(path + ": bad header");
    if (head[1] != std::to_string(kCheckpointVersion))
        throw VersionMismatch(path + ": checkpoint version " + head[1]);
    if (head[2] != std::to_string(modulus))
        throw CorruptCheckpoint(path + ": checkpoint is for level " + head[2]);
    std::vector<CheckpointEntry> out;
    while (std::getline(lines, line)) {
        const std::vector<std::string> f = split_tabs(line);
        if (f.size() != 3 || f[1].empty() || f[2].empty()) throw CorruptCheckpoint(path + ": malformed line");
        out.push_back({parse_status(f[0]), f[1], f[2]});
    }
    return out;
}

void append_checkpoint(const std::string& path, int modulus, const std::vector<CheckpointEntry>& entries) {
    bool fresh = true;
    {
        std::ifstream in(path, std::ios::binary | std::ios::ate);
        if (in && in.tellg() > 0) fresh = false;
    }
    std::ofstream out(path, std::ios::binary | std::ios::app);
    if (!out) throw ConstraintViolation("cannot write checkpoint " + path);
    if (fresh) out << kCheckpointMagic << '\t' << kCheckpointVersion << '\t' << modulus << '\n';
    for (const CheckpointEntry& e : entries) out << to_string(e.status) << '\t' << e.key << '\t' << e.encoding << '\n';
    out.flush();
}

std::vector<LatticeNode> WalkResult::emitted() const {
    std::vector<LatticeNode> out;
    for (const LatticeNode& n : nodes)
        if (n.status == NodeStatus::Passed) out.push_back(n);
    return out;
}

WalkResult pruned_walk(const LevelLattice& lat, const Predicate& predicate, const WalkConfig& config) {
    enum class St { Unknown, Passed, Refuted, Pruned, Filtered };
    const std::size_t m = lat.classes.size();
    std::vector<St> st(m, St::Unknown);

    std::unordered_map<std::string, std::size_t> by_key;
    for (std::size_t i = 0; i < m; ++i) by_key.emplace(lat.keys[i], i);
    if (!config.checkpoint_path.empty()) {
        for (const CheckpointEntry& e : load_checkpoint(config.checkpoint_path, lat.modulus)) {
            auto it = by_key.find(e.key);
            if (it == by_key.end() || lat.classes[it->second].encode() != e.encoding)
                throw CorruptCheckpoint("checkpoint class " + e.key + " is not in the lattice");
            st[it->second] = e.status == NodeStatus::Passed ? St::Passed : St::Refuted;
        }
    }

    WalkResult res;
    long budget = config.stop_after;
    std::size_t i = 0;
    while (i < m && !res.interrupted) {
        std::size_t j = i;
        const std::size_t idx = lat.classes[i].index();
        while (j < m && lat.classes[j].index() == idx) ++j;
        std::vector<std::size_t> todo;
        for (std::size_t c = i; c < j; ++c) {
            if (config.max_index > 0 && static_cast<long>(idx) > config.max_index) {
                st[c] = St::Filtered;
                continue;
            }
            bool ready = true;
            for (int p : lat.parents[c]) ready = ready && st[static_cast<std::size_t>(p)] == St::Passed;
            if (!ready) {
                st[c] = St::Pruned;
                continue;
            }
            if (st[c] == St::Unknown) todo.push_back(c);
        }
        if (budget >= 0 && static_cast<long>(todo.size()) > budget) {
            todo.resize(static_cast<std::size_t>(budget));
            res.interrupted = true;
        }
        std::vector<char> verdict(todo.size(), 0);
        std::atomic<std::size_t> next{0};
        auto work = [&] {
            for (std::size_t t; (t = next.fetch_add(1)) < todo.size();)
                verdict[t] = predicate(lat.classes[todo[t]]) ? 1 : 0;
        };
        const unsigned w = std::max(1u, std::min<unsigned>(config.workers, static_cast<unsigned>(todo.size())));
        if (w <= 1) {
            work();
        } else {
            std::vector<std::thread> pool;
            for (unsigned k = 0; k < w; ++k) pool.emplace_back(work);
            for (auto& th : pool) th.join();
        }
        std::vector<CheckpointEntry> fresh;
        for (std::size_t t = 0; t < todo.size(); ++t) {
            const std::size_t c = todo[t];
            st[c] = verdict[t] ? St::Passed : St::Refuted;
            fresh.push_back({verdict[t] ? NodeStatus::Passed : NodeStatus::Refuted, lat.keys[c],
                             lat.classes[c].encode()});
        }
        if (budget >= 0) budget -= static_cast<long>(todo.size());
        if (!config.checkpoint_path.empty() && !fresh.empty())
            append_checkpoint(config.checkpoint_path, lat.modulus, fresh);
        if (res.interrupted) {
            // Leave unevaluated nodes of this batch as unknown.
            for (std::size_t c = i; c < j; ++c)
                if (st[c] == St::Pruned || st[c] == St::Filtered) st[c] = St::Unknown;
            break;
        }
        i = j;
    }

    for (std::size_t c = 0; c < m; ++c) {
        switch (st[c]) {
        case St::Passed:
        case St::Refuted: {
            LatticeNode node;
            node.subgroup = lat.classes[c];
            node.key = lat.keys[c];
            for (int p : lat.parents[c]) node.parent_keys.push_back(lat.keys[static_cast<std::size_t>(p)]);
            node.status = st[c] == St::Passed ? NodeStatus::Passed : NodeStatus::Refuted;
            if (st[c] == St::Passed)
                ++res.passed;
            else
                ++res.refuted;
            res.nodes.push_back(std::move(node));
            break;
        }
        case St::Pruned: ++res.pruned; break;
        case St::Filtered: ++res.filtered; break;
        case St::Unknown: break;
        }
    }

    // Monotonicity spot check: a few children of refuted nodes must also fail.
    if (!res.interrupted && config.spot_checks > 0) {
        int done = 0;
        for (std::size_t c = 0; c < m && done < config.spot_checks; ++c) {
            if (st[c] != St::Refuted) continue;
            ++done;
            int children = 0;
            for (std::size_t k = c + 1; k < m && children < 3; ++k) {
                const auto& ps = lat.parents[k];
                if (std::find(ps.begin(), ps.end(), static_cast<int>(c)) == ps.end()) continue;
                if (config.max_index > 0 && static_cast<long>(lat.classes[k].index()) > config.max_index) continue;
                ++children;
                if (predicate(lat.classes[k]))
                    res.diagnostics.push_back("monotonicity violation: " + lat.keys[k] + " passes below refuted " +
                                              lat.keys[c]);
            }
        }
    }
    return res;
}

WalkResult pruned_walk(int n, const Predicate& predicate, const WalkConfig& config) {
    if (group_order(n) > config.order_cap)
        throw OrderCapExceeded("GL2(Z/" + std::to_string(n) + ") exceeds the walk order cap");
    LatticeOptions opt;
    opt.exhaustive_cap = config.order_cap;
    return pruned_walk(build_level_lattice(n, opt), predicate, config);
}

} // namespace cdx
