#include "cdx/gl2.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <numeric>
#include <sstream>

#include "cdx/errors.hpp"

namespace cdx {

int mod_reduce(long long x, int n) {
    long long r = x % n;
    if (r < 0) r += n;
    return static_cast<int>(r);
}

Mat2 make_mat(long long a, long long b, long long c, long long d, int n) {
    return Mat2{mod_reduce(a, n), mod_reduce(b, n), mod_reduce(c, n), mod_reduce(d, n)};
}

Mat2 mat_mul(const Mat2& x, const Mat2& y, int n) {
    return Mat2{(x.a * y.a + x.b * y.c) % n, (x.a * y.b + x.b * y.d) % n,
                (x.c * y.a + x.d * y.c) % n, (x.c * y.b + x.d * y.d) % n};
}

int mat_det(const Mat2& x, int n) {
    return mod_reduce(static_cast<long long>(x.a) * x.d - static_cast<long long>(x.b) * x.c, n);
}

int mat_trace(const Mat2& x, int n) { return (x.a + x.d) % n; }

Mat2 mat_identity(int n) { return make_mat(1, 0, 0, 1, n); }

bool is_unit_mod(long long x, int n) { return std::gcd(mod_reduce(x, n), n) == 1; }

int inverse_mod(long long x, int n) {
    long long a = mod_reduce(x, n), m = n;
    long long u = 1, v = 0;
    while (m != 0) {
        long long q = a / m;
        a -= q * m;
        std::swap(a, m);
        u -= q * v;
        std::swap(u, v);
    }
    if (a != 1 && n != 1) throw NonUnitDeterminant(std::to_string(x) + " mod " + std::to_string(n));
    return mod_reduce(u, n);
}

Mat2 mat_inverse(const Mat2& x, int n) {
    int det = mat_det(x, n);
    if (!is_unit_mod(det, n))
        throw NonUnitDeterminant("det " + std::to_string(det) + " mod " + std::to_string(n));
    long long di = inverse_mod(det, n);
    return make_mat(di * x.d, -di * x.b, -di * x.c, di * x.a, n);
}

Mat2 mat_pow(Mat2 x, unsigned long long k, int n) {
    Mat2 r = mat_identity(n);
    while (k) {
        if (k & 1) r = mat_mul(r, x, n);
        x = mat_mul(x, x, n);
        k >>= 1;
    }
    return r;
}

unsigned long long element_order(const Mat2& x, int n) {
    if (!is_unit_mod(mat_det(x, n), n)) throw NonUnitDeterminant("element_order");
    const Mat2 id = mat_identity(n);
    Mat2 y = x;
    unsigned long long k = 1;
    while (!(y == id)) {
        y = mat_mul(y, x, n);
        ++k;
    }
    return k;
}

std::vector<int> prime_divisors(int n) {
    std::vector<int> out;
    for (int p = 2; p * p <= n; ++p) {
        if (n % p == 0) {
            out.push_back(p);
            while (n % p == 0) n /= p;
        }
    }
    if (n > 1) out.push_back(n);
    return out;
}

unsigned long long group_order(int n) {
    unsigned long long r = 1;
    for (int i = 0; i < 4; ++i) r *= static_cast<unsigned long long>(n);
    for (int p : prime_divisors(n)) {
        unsigned long long q = static_cast<unsigned long long>(p);
        r = r / (q * q * q) * (q - 1) * (q * q - 1);
    }
    return r;
}

unsigned long long sl2_order(int n) {
    unsigned long long r = 1;
    for (int i = 0; i < 3; ++i) r *= static_cast<unsigned long long>(n);
    for (int p : prime_divisors(n)) {
        unsigned long long q = static_cast<unsigned long long>(p);
        r = r / (q * q) * (q * q - 1);
    }
    return r;
}

ClassTable build_class_table(const Gl2Context& ctx, const std::vector<uint32_t>& elems,
                             const std::vector<uint32_t>& gens) {
    ClassTable t;
    t.class_of.assign(ctx.order(), -1);
    t.conj.assign(ctx.order(), 0);
    std::vector<uint32_t> ginv(gens.size());
    for (std::size_t i = 0; i < gens.size(); ++i) ginv[i] = ctx.inv(gens[i]);
    std::vector<uint32_t> queue;
    for (uint32_t e : elems) {
        if (t.class_of[e] >= 0) continue;
        const int32_t k = static_cast<int32_t>(t.reps.size());
        t.reps.push_back(e);
        t.class_of[e] = k;
        t.conj[e] = ctx.identity();
        queue.assign(1, e);
        for (std::size_t qi = 0; qi < queue.size(); ++qi) {
            const uint32_t y = queue[qi];
            for (std::size_t gi = 0; gi < gens.size(); ++gi) {
                const uint32_t z = ctx.mul(ctx.mul(gens[gi], y), ginv[gi]);
                if (t.class_of[z] >= 0) continue;
                t.class_of[z] = k;
                t.conj[z] = ctx.mul(gens[gi], t.conj[y]);
                queue.push_back(z);
            }
        }
        t.sizes.push_back(static_cast<uint32_t>(queue.size()));
    }
    return t;
}

std::shared_ptr<const Gl2Context> Gl2Context::get(int n) {
    if (n < 1) throw ConstraintViolation("modulus must be positive");
    if (n > kMaxModulus || group_order(n) > kDefaultAmbientCap)
        throw OrderCapExceeded("GL2(Z/" + std::to_string(n) + ") exceeds the ambient cap");
    static std::mutex mu;
    static std::map<int, std::shared_ptr<const Gl2Context>> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(n);
    if (it != cache.end()) return it->second;
    std::shared_ptr<const Gl2Context> ctx(new Gl2Context(n));
    cache.emplace(n, ctx);
    return ctx;
}

Gl2Context::Gl2Context(int n) : n_(n) {
    const std::size_t n4 = static_cast<std::size_t>(n) * n * n * n;
    index_of_code_.assign(n4, -1);
    mats_.reserve(group_order(n));
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
            for (int c = 0; c < n; ++c)
                for (int d = 0; d < n; ++d) {
                    Mat2 m{a, b, c, d};
                    if (!is_unit_mod(mat_det(m, n), n)) continue;
                    index_of_code_[code(m)] = static_cast<int32_t>(mats_.size());
                    mats_.push_back(m);
                }
    all_.resize(mats_.size());
    std::iota(all_.begin(), all_.end(), 0u);
    inv_.resize(mats_.size());
    det_.resize(mats_.size());
    for (uint32_t i = 0; i < mats_.size(); ++i) {
        inv_[i] = static_cast<uint32_t>(index_of(mat_inverse(mats_[i], n)));
        det_[i] = mat_det(mats_[i], n);
    }
    identity_ = static_cast<uint32_t>(index_of(mat_identity(n)));
    minus_identity_ = static_cast<uint32_t>(index_of(make_mat(-1, 0, 0, -1, n)));

    // T and S generate SL2(Z/NZ); diagonal matrices diag(1, u) add the units.
    gens_.push_back(static_cast<uint32_t>(index_of(make_mat(1, 1, 0, 1, n))));
    gens_.push_back(static_cast<uint32_t>(index_of(make_mat(0, -1, 1, 0, n))));
    std::vector<char> reached(static_cast<std::size_t>(n), 0);
    reached.at(static_cast<std::size_t>(1 % n)) = 1;
    for (int u = 1; u < n; ++u) {
        if (!is_unit_mod(u, n) || reached[u]) continue;
        gens_.push_back(static_cast<uint32_t>(index_of(make_mat(1, 0, 0, u, n))));
        // Rebuild the unit subgroup generated so far.
        std::vector<int> frontier;
        for (int v = 0; v < n; ++v)
            if (reached[v]) frontier.push_back(v);
        for (std::size_t i = 0; i < frontier.size(); ++i) {
            int w = static_cast<int>(static_cast<long long>(frontier[i]) * u % n);
            if (!reached[w]) {
                reached[w] = 1;
                frontier.push_back(w);
            }
        }
    }
    std::sort(gens_.begin(), gens_.end());
    gens_.erase(std::unique(gens_.begin(), gens_.end()), gens_.end());
}

uint32_t Gl2Context::index_checked(const Mat2& m) const {
    Mat2 r = make_mat(m.a, m.b, m.c, m.d, n_);
    int32_t i = index_of(r);
    if (i < 0) throw NonUnitDeterminant("matrix " + std::to_string(r.a) + "," + std::to_string(r.b) + "," +
                                        std::to_string(r.c) + "," + std::to_string(r.d) + " mod " +
                                        std::to_string(n_));
    return static_cast<uint32_t>(i);
}

const ClassTable& Gl2Context::classes() const {
    std::call_once(classes_once_, [this] {
        classes_ = std::make_unique<ClassTable>(build_class_table(*this, all_, gens_));
        centralizers_.resize(classes_->reps.size());
    });
    return *classes_;
}

const std::vector<uint32_t>& Gl2Context::rep_centralizer(int k) const {
    const ClassTable& t = classes();
    std::lock_guard<std::mutex> lock(cent_mutex_);
    auto& slot = centralizers_[static_cast<std::size_t>(k)];
    if (!slot) {
        auto c = std::make_unique<std::vector<uint32_t>>();
        const uint32_t r = t.reps[static_cast<std::size_t>(k)];
        for (uint32_t x : all_)
            if (mul(x, r) == mul(r, x)) c->push_back(x);
        slot = std::move(c);
    }
    return *slot;
}

std::string Gl2Context::format(uint32_t i) const {
    const Mat2& m = mats_[i];
    std::ostringstream os;
    os << m.a << ',' << m.b << ',' << m.c << ',' << m.d;
    return os.str();
}

} // namespace cdx
