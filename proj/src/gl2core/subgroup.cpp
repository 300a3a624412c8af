#include "cdx/subgroup.hpp"

#include <algorithm>
#include <cctype>
#include <limits>
#include <numeric>
#include <sstream>

#include "cdx/errors.hpp"

namespace cdx {

namespace {

std::vector<uint32_t> closure(const Gl2Context& ctx, const std::vector<uint32_t>& gens, std::size_t cap) {
    ElementMask seen(ctx.order());
    std::vector<uint32_t> out{ctx.identity()};
    seen.set(ctx.identity());
    for (std::size_t i = 0; i < out.size(); ++i) {
        for (uint32_t g : gens) {
            const uint32_t m = ctx.mul(out[i], g);
            if (seen.test(m)) continue;
            seen.set(m);
            out.push_back(m);
            if (out.size() > cap)
                throw OrderCapExceeded("subgroup exceeds " + std::to_string(cap) + " elements");
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<uint32_t> greedy_generators(const Gl2Context& ctx, const std::vector<uint32_t>& elems) {
    std::vector<uint32_t> gens;
    ElementMask span(ctx.order());
    span.set(ctx.identity());
    std::vector<uint32_t> spanned{ctx.identity()};
    for (uint32_t e : elems) {
        if (span.test(e)) continue;
        gens.push_back(e);
        // Re-close: every spanned element times every generator.
        for (std::size_t i = 0; i < spanned.size(); ++i) {
            for (uint32_t g : gens) {
                const uint32_t m = ctx.mul(spanned[i], g);
                if (span.test(m)) continue;
                span.set(m);
                spanned.push_back(m);
            }
        }
    }
    return gens;
}

long long crt_pair(long long r1, long long m1, long long r2, long long m2) {
    // m1, m2 coprime.
    long long t = static_cast<long long>(mod_reduce((r2 - r1) % m2 * inverse_mod(m1 % m2, static_cast<int>(m2)),
                                                     static_cast<int>(m2)));
    return r1 + m1 * t;
}

Mat2 lift_matrix(const Mat2& a, int m, int n) {
    // Split n = n1 * q with n1 supported on the primes of m, gcd(q, m) = 1.
    int n1 = 1, q = n;
    for (int p : prime_divisors(m)) {
        while (q % p == 0) {
            q /= p;
            n1 *= p;
        }
    }
    if (q == 1) return Mat2{a.a, a.b, a.c, a.d};
    auto one = [&](int x, int target) { return static_cast<int>(crt_pair(x, n1, target, q)); };
    return make_mat(one(a.a, 1), one(a.b, 0), one(a.c, 0), one(a.d, 1), n);
}

uint32_t reduce_index(const Gl2Context& from, uint32_t i, const Gl2Context& to) {
    const Mat2& m = from.mat(i);
    const int r = to.modulus();
    return static_cast<uint32_t>(to.index_of(Mat2{m.a % r, m.b % r, m.c % r, m.d % r}));
}

} // namespace

SubgroupRep SubgroupRep::generate(std::shared_ptr<const Gl2Context> ctx, std::vector<uint32_t> gens,
                                  std::size_t cap) {
    SubgroupRep h;
    h.elems_ = closure(*ctx, gens, cap);
    h.ctx_ = std::move(ctx);
    h.gens_ = std::move(gens);
    h.finish();
    return h;
}

SubgroupRep SubgroupRep::from_elements(std::shared_ptr<const Gl2Context> ctx, std::vector<uint32_t> elems,
                                       std::vector<uint32_t> gens) {
    SubgroupRep h;
    h.ctx_ = std::move(ctx);
    h.elems_ = std::move(elems);
    h.gens_ = std::move(gens);
    h.finish();
    return h;
}

SubgroupRep SubgroupRep::from_elements(std::shared_ptr<const Gl2Context> ctx, std::vector<uint32_t> elems) {
    std::vector<uint32_t> gens = greedy_generators(*ctx, elems);
    return from_elements(std::move(ctx), std::move(elems), std::move(gens));
}

void SubgroupRep::finish() {
    const Gl2Context& ctx = *ctx_;
    const int n = ctx.modulus();
    mask_ = ElementMask(ctx.order());
    for (uint32_t e : elems_) mask_.set(e);
    contains_minus_identity_ = mask_.test(ctx.minus_identity());

    std::vector<char> dets(static_cast<std::size_t>(n), 0);
    int hit = 0, units = 0;
    for (int u = 0; u < n; ++u) units += is_unit_mod(u, n) ? 1 : 0;
    for (uint32_t e : elems_) {
        const int d = ctx.det(e);
        if (!dets[d]) {
            dets[d] = 1;
            ++hit;
        }
    }
    det_surjective_ = (hit == units);

    // Drop one prime at a time while H stays a full preimage.
    int m = n;
    bool changed = true;
    while (changed && m > 1) {
        changed = false;
        for (int p : prime_divisors(m)) {
            const int r = m / p;
            const std::size_t r4 = static_cast<std::size_t>(r) * r * r * r;
            std::vector<char> seen(r4, 0);
            std::size_t image = 0;
            for (uint32_t e : elems_) {
                const Mat2& x = ctx.mat(e);
                const std::size_t code = ((static_cast<std::size_t>(x.a % r) * r + x.b % r) * r + x.c % r) * r + x.d % r;
                if (!seen[code]) {
                    seen[code] = 1;
                    ++image;
                }
            }
            if (image * (group_order(n) / group_order(r)) == elems_.size()) {
                m = r;
                changed = true;
                break;
            }
        }
    }
    level_ = m;
}

bool SubgroupRep::contains(const Mat2& m) const {
    const int n = modulus();
    const int32_t i = ctx_->index_of(make_mat(m.a, m.b, m.c, m.d, n));
    return i >= 0 && mask_.test(static_cast<uint32_t>(i));
}

std::string SubgroupRep::encode() const {
    std::ostringstream os;
    os << modulus();
    for (uint32_t g : gens_) os << ';' << ctx_->format(g);
    return os.str();
}

std::vector<Mat2> SubgroupRep::generator_matrices() const {
    std::vector<Mat2> out;
    for (uint32_t g : gens_) out.push_back(ctx_->mat(g));
    return out;
}

SubgroupRep generate_subgroup(const std::vector<Mat2>& gens, int n, std::size_t cap) {
    auto ctx = Gl2Context::get(n);
    std::vector<uint32_t> idx;
    for (const Mat2& g : gens) idx.push_back(ctx->index_checked(g));
    return SubgroupRep::generate(ctx, std::move(idx), cap);
}

SubgroupRep parse_subgroup(const std::string& text) {
    std::vector<std::string> parts;
    {
        std::string cur;
        for (char ch : text) {
            if (ch == ';') {
                parts.push_back(cur);
                cur.clear();
            } else if (!std::isspace(static_cast<unsigned char>(ch))) {
                cur.push_back(ch);
            }
        }
        parts.push_back(cur);
    }
    auto to_int = [&](const std::string& s) -> long long {
        if (s.empty()) throw ParseError("empty field in '" + text + "'");
        std::size_t pos = 0;
        long long v = 0;
        try {
            v = std::stoll(s, &pos);
        } catch (const std::exception&) {
            throw ParseError("not an integer: '" + s + "'");
        }
        if (pos != s.size()) throw ParseError("not an integer: '" + s + "'");
        return v;
    };
    const long long n = to_int(parts[0]);
    if (n < 1 || n > Gl2Context::kMaxModulus) throw ParseError("bad modulus in '" + text + "'");
    std::vector<Mat2> gens;
    for (std::size_t i = 1; i < parts.size(); ++i) {
        if (parts[i].empty() && i + 1 == parts.size()) break;  // trailing ';'
        std::vector<long long> v;
        std::string cur;
        for (char ch : parts[i] + ",") {
            if (ch == ',') {
                v.push_back(to_int(cur));
                cur.clear();
            } else {
                cur.push_back(ch);
            }
        }
        if (v.size() != 4) throw ParseError("generator needs four entries: '" + parts[i] + "'");
        const int ni = static_cast<int>(n);
        gens.push_back(make_mat(v[0], v[1], v[2], v[3], ni));
    }
    return generate_subgroup(gens, static_cast<int>(n));
}

SubgroupRep full_group(int n) {
    auto ctx = Gl2Context::get(n);
    return SubgroupRep::from_elements(ctx, ctx->all_elements(), ctx->generators());
}

SubgroupRep trivial_group(int n) {
    auto ctx = Gl2Context::get(n);
    return SubgroupRep::from_elements(ctx, {ctx->identity()}, {});
}

SubgroupRep sl2_subgroup(int n) {
    auto ctx = Gl2Context::get(n);
    std::vector<uint32_t> gens{ctx->index_checked(Mat2{1, 1 % n, 0, 1 % n}),
                               ctx->index_checked(make_mat(0, -1, 1, 0, n))};
    return SubgroupRep::generate(ctx, gens);
}

SubgroupRep minus_identity_group(int n) {
    auto ctx = Gl2Context::get(n);
    return SubgroupRep::generate(ctx, {ctx->minus_identity()});
}

SubgroupRep borel_subgroup(int n, int m) {
    if (m == 0) m = n;
    if (n % m != 0) throw NotADivisor(std::to_string(m) + " does not divide " + std::to_string(n));
    auto ctx = Gl2Context::get(n);
    std::vector<uint32_t> elems;
    for (uint32_t e : ctx->all_elements())
        if (ctx->mat(e).c % m == 0) elems.push_back(e);
    return SubgroupRep::from_elements(ctx, std::move(elems));
}

bool is_det_surjective(const SubgroupRep& h) { return h.det_surjective(); }
bool contains_minus_identity(const SubgroupRep& h) { return h.contains_minus_identity(); }
int level_of(const SubgroupRep& h) { return h.level(); }

SubgroupRep reduce_subgroup(const SubgroupRep& h, int m) {
    const int n = h.modulus();
    if (m < 1 || n % m != 0) throw NotADivisor(std::to_string(m) + " does not divide " + std::to_string(n));
    if (m == n) return h;
    auto to = Gl2Context::get(m);
    std::vector<char> seen(to->order(), 0);
    std::vector<uint32_t> elems;
    for (uint32_t e : h.elements()) {
        const uint32_t r = reduce_index(h.context(), e, *to);
        if (!seen[r]) {
            seen[r] = 1;
            elems.push_back(r);
        }
    }
    std::sort(elems.begin(), elems.end());
    std::vector<uint32_t> gens;
    for (uint32_t g : h.generators()) {
        const uint32_t r = reduce_index(h.context(), g, *to);
        if (r != to->identity() && std::find(gens.begin(), gens.end(), r) == gens.end()) gens.push_back(r);
    }
    return SubgroupRep::from_elements(to, std::move(elems), std::move(gens));
}

SubgroupRep lift_subgroup(const SubgroupRep& h, int n) {
    const int m = h.modulus();
    if (n < 1 || n % m != 0) throw NotAMultiple(std::to_string(n) + " is not a multiple of " + std::to_string(m));
    if (m == n) return h;
    auto to = Gl2Context::get(n);
    std::vector<uint32_t> elems, kernel;
    for (uint32_t e : to->all_elements()) {
        const uint32_t r = reduce_index(*to, e, h.context());
        if (h.contains(r)) elems.push_back(e);
        if (r == h.context().identity()) kernel.push_back(e);
    }
    std::vector<uint32_t> gens;
    for (uint32_t g : h.generators()) gens.push_back(to->index_checked(lift_matrix(h.context().mat(g), m, n)));
    for (uint32_t k : greedy_generators(*to, kernel)) gens.push_back(k);
    return SubgroupRep::from_elements(to, std::move(elems), std::move(gens));
}

SubgroupRep conjugate_subgroup(const SubgroupRep& h, uint32_t g) {
    const Gl2Context& ctx = h.context();
    std::vector<uint32_t> elems, gens;
    elems.reserve(h.order());
    for (uint32_t e : h.elements()) elems.push_back(ctx.conjugate(g, e));
    std::sort(elems.begin(), elems.end());
    for (uint32_t e : h.generators()) gens.push_back(ctx.conjugate(g, e));
    return SubgroupRep::from_elements(h.context_ptr(), std::move(elems), std::move(gens));
}

SubgroupRep normalizer(const SubgroupRep& h) {
    const Gl2Context& ctx = h.context();
    std::vector<uint32_t> elems;
    for (uint32_t x : ctx.all_elements()) {
        bool ok = true;
        for (uint32_t g : h.generators()) {
            if (!h.contains(ctx.conjugate(x, g))) {
                ok = false;
                break;
            }
        }
        if (ok) elems.push_back(x);
    }
    return SubgroupRep::from_elements(h.context_ptr(), std::move(elems));
}

std::vector<uint32_t> sl2_part(const SubgroupRep& h) {
    std::vector<uint32_t> out;
    for (uint32_t e : h.elements())
        if (h.context().det(e) == 1 % h.modulus()) out.push_back(e);
    return out;
}

std::vector<uint32_t> class_distribution(const SubgroupRep& h) {
    const ClassTable& t = h.context().classes();
    std::vector<uint32_t> dist(t.reps.size(), 0);
    for (uint32_t e : h.elements()) ++dist[static_cast<std::size_t>(t.class_of[e])];
    return dist;
}

std::optional<uint32_t> are_conjugate(const SubgroupRep& h1, const SubgroupRep& h2) {
    if (h1.modulus() != h2.modulus()) throw ModulusMismatch("are_conjugate");
    const Gl2Context& ctx = h1.context();
    if (h1.order() != h2.order() || h1.det_surjective() != h2.det_surjective() ||
        h1.contains_minus_identity() != h2.contains_minus_identity() || h1.level() != h2.level())
        return std::nullopt;
    if (h1.elements() == h2.elements()) return ctx.identity();
    const std::vector<uint32_t> d1 = class_distribution(h1);
    if (d1 != class_distribution(h2)) return std::nullopt;

    const ClassTable& t = ctx.classes();
    std::vector<uint32_t> gens = h1.generators();
    if (gens.empty()) return ctx.identity();
    // Anchor on the generator whose image candidates are fewest.
    std::size_t best = 0;
    unsigned long long best_cost = std::numeric_limits<unsigned long long>::max();
    for (std::size_t i = 0; i < gens.size(); ++i) {
        const auto k = static_cast<std::size_t>(t.class_of[gens[i]]);
        const unsigned long long cost =
            static_cast<unsigned long long>(d1[k]) * (ctx.order() / t.sizes[k]);
        if (cost < best_cost) {
            best_cost = cost;
            best = i;
        }
    }
    std::swap(gens[0], gens[best]);
    const uint32_t v1 = gens[0];
    const int k = t.class_of[v1];
    const std::vector<uint32_t>& cent = ctx.rep_centralizer(k);
    const uint32_t back = ctx.inv(t.conj[v1]);
    for (uint32_t w : h2.elements()) {
        if (t.class_of[w] != k) continue;
        const uint32_t cw = t.conj[w];
        for (uint32_t c : cent) {
            const uint32_t x = ctx.mul(ctx.mul(cw, c), back);
            bool ok = true;
            for (std::size_t i = 1; i < gens.size() && ok; ++i) ok = h2.contains(ctx.conjugate(x, gens[i]));
            if (ok) return x;
        }
    }
    return std::nullopt;
}

SubgroupRep canonical_conjugate(const SubgroupRep& h) {
    const Gl2Context& ctx = h.context();
    const SubgroupRep nh = normalizer(h);
    ElementMask seen(ctx.order());
    std::vector<uint32_t> best, cur(h.order());
    for (uint32_t x : ctx.all_elements()) {
        if (seen.test(x)) continue;
        for (uint32_t y : nh.elements()) seen.set(ctx.mul(x, y));
        for (std::size_t i = 0; i < h.order(); ++i) cur[i] = ctx.conjugate(x, h.elements()[i]);
        std::sort(cur.begin(), cur.end());
        if (best.empty() || cur < best) best = cur;
    }
    return SubgroupRep::from_elements(h.context_ptr(), std::move(best));
}

std::string canonical_class_key(const SubgroupRep& h) { return format_class_key(canonical_conjugate(h)); }

std::string format_class_key(const SubgroupRep& c) {
    std::ostringstream os;
    os << c.modulus() << ':' << c.order();
    for (uint32_t g : c.generators()) os << ':' << c.context().format(g);
    return os.str();
}

CosetTable::CosetTable(std::shared_ptr<const Gl2Context> ctx, const std::vector<uint32_t>& subgroup_elems,
                       Ambient ambient, const std::vector<Mat2>& actors, std::size_t cap)
    : ctx_(std::move(ctx)), ambient_(ambient), sub_mask_(ctx_->order()) {
    const Gl2Context& c = *ctx_;
    for (uint32_t e : subgroup_elems) sub_mask_.set(e);
    coset_of_.assign(c.order(), -1);
    const int one = 1 % c.modulus();
    for (uint32_t g : c.all_elements()) {
        if (ambient_ == Ambient::SL2 && c.det(g) != one) continue;
        if (coset_of_[g] >= 0) continue;
        const int j = static_cast<int>(reps_.size());
        reps_.push_back(g);
        if (reps_.size() > cap) throw OrderCapExceeded("coset count exceeds cap");
        for (uint32_t s : subgroup_elems) coset_of_[c.mul(s, g)] = j;
    }
    for (const Mat2& a : actors) {
        const uint32_t ai = c.index_checked(a);
        if (ambient_ == Ambient::SL2 && c.det(ai) != one)
            throw ConstraintViolation("actor outside SL2");
        std::vector<int> perm(reps_.size());
        for (std::size_t i = 0; i < reps_.size(); ++i) perm[i] = coset_of_[c.mul(reps_[i], ai)];
        perms_.push_back(std::move(perm));
    }
}

bool CosetTable::conjugate_in_subgroup(std::size_t i, uint32_t a) const {
    return sub_mask_.test(ctx_->conjugate(reps_[i], a));
}

CosetTable right_coset_action(const SubgroupRep& h, CosetTable::Ambient ambient, const std::vector<Mat2>& actors) {
    if (ambient == CosetTable::Ambient::SL2) {
        for (uint32_t e : h.elements())
            if (h.context().det(e) != 1 % h.modulus())
                throw ConstraintViolation("subgroup not contained in SL2");
    }
    return CosetTable(h.context_ptr(), h.elements(), ambient, actors);
}

} // namespace cdx
