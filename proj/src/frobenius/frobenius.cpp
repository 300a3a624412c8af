#include "cdx/frobenius.hpp"

#include <gmpxx.h>

#include <cmath>
#include <fstream>
#include <numeric>

#include "cdx/csv.hpp"
#include "cdx/errors.hpp"

namespace cdx {

namespace {

mpz_class discriminant_of(const WeierstrassCurve& e) {
    const mpz_class a1 = e.a1, a2 = e.a2, a3 = e.a3, a4 = e.a4, a6 = e.a6;
    const mpz_class b2 = a1 * a1 + 4 * a2;
    const mpz_class b4 = 2 * a4 + a1 * a3;
    const mpz_class b6 = a3 * a3 + 4 * a6;
    const mpz_class b8 = a1 * a1 * a6 + 4 * a2 * a6 - a1 * a3 * a4 + a2 * a3 * a3 - a4 * a4;
    return -b2 * b2 * b8 - 8 * b4 * b4 * b4 - 27 * b6 * b6 + 9 * b2 * b4 * b6;
}

long mod_p(long x, long p) {
    long r = x % p;
    return r < 0 ? r + p : r;
}

bool is_prime(long n) {
    if (n < 2) return false;
    for (long d = 2; d * d <= n; ++d)
        if (n % d == 0) return false;
    return true;
}

} // namespace

std::string discriminant_string(const WeierstrassCurve& e) { return discriminant_of(e).get_str(); }

bool has_good_reduction(const WeierstrassCurve& e, long p) {
    const mpz_class d = discriminant_of(e);
    return mpz_divisible_ui_p(d.get_mpz_t(), static_cast<unsigned long>(p)) == 0;
}

long ec_point_count(const WeierstrassCurve& e, long p) {
    if (!is_prime(p)) throw BadPrime(std::to_string(p) + " is not prime");
    if (!has_good_reduction(e, p)) throw BadReduction("bad reduction at " + std::to_string(p));
    const long a1 = mod_p(e.a1, p), a2 = mod_p(e.a2, p), a3 = mod_p(e.a3, p), a4 = mod_p(e.a4, p),
               a6 = mod_p(e.a6, p);
    long count = 1;
    if (p <= 3) {
        for (long x = 0; x < p; ++x)
            for (long y = 0; y < p; ++y) {
                const long lhs = y * y + a1 * x * y + a3 * y;
                const long rhs = x * x * x + a2 * x * x + a4 * x + a6;
                count += mod_p(lhs - rhs, p) == 0 ? 1 : 0;
            }
        return count;
    }
    // (2y + a1 x + a3)^2 = 4x^3 + b2 x^2 + 2 b4 x + b6.
    const long b2 = mod_p(a1 * a1 + 4 * a2, p), b4 = mod_p(2 * a4 + a1 * a3, p), b6 = mod_p(a3 * a3 + 4 * a6, p);
    std::vector<signed char> chi(static_cast<std::size_t>(p), -1);
    chi[0] = 0;
    for (long y = 1; y < p; ++y) chi[static_cast<std::size_t>(y * y % p)] = 1;
    for (long x = 0; x < p; ++x) {
        const long r = mod_p(((4 * x + b2) % p * x % p + 2 * b4) % p * x + b6, p);
        count += 1 + chi[static_cast<std::size_t>(r)];
    }
    return count;
}

long ec_ap(const WeierstrassCurve& e, long p) { return p + 1 - ec_point_count(e, p); }

long TraceWeightTable::class_total() const {
    long s = 0;
    for (const auto& t : entries) s += t.h;
    return s;
}

long TraceWeightTable::mass12() const {
    long s = 0;
    for (const auto& t : entries) s += 12 * t.h / t.w;
    return s;
}

long class_number(long disc) {
    if (disc >= 0 || mod_p(disc, 4) > 1) throw InvalidDiscriminantData("not a negative discriminant");
    const long d = -disc;
    long h = 0;
    for (long a = 1; 3 * a * a <= d; ++a) {
        for (long b = -a + 1; b <= a; ++b) {
            if (mod_p(b - disc, 2) != 0) continue;
            const long num = b * b + d;
            if (num % (4 * a) != 0) continue;
            const long c = num / (4 * a);
            if (c < a) continue;
            if (b < 0 && a == c) continue;
            if (std::gcd(std::gcd(a, std::labs(b)), c) != 1) continue;
            ++h;
        }
    }
    return h;
}

int unit_count(long disc) { return disc == -3 ? 6 : disc == -4 ? 4 : 2; }

TraceWeightTable hurwitz_weights(long p) {
    if (p <= 3) throw UnsupportedPrime("weight tables need p > 3");
    if (!is_prime(p)) throw BadPrime(std::to_string(p) + " is not prime");
    TraceWeightTable t;
    t.p = p;
    for (long a = 0; a * a < 4 * p; ++a) {
        const long d0 = a * a - 4 * p;
        for (long b = 1; b * b <= -d0; ++b) {
            if (d0 % (b * b) != 0) continue;
            const long disc = d0 / (b * b);
            if (mod_p(disc, 4) > 1) continue;
            const long h = class_number(disc);
            for (long s : {a, -a}) {
                t.entries.push_back({s, b, disc, h, unit_count(disc)});
                if (a == 0) break;
            }
        }
    }
    return t;
}

FrobeniusClass duke_toth_matrix(long a, long b, long disc, long p, int n) {
    if (b <= 0 || disc >= 0 || mod_p(disc, 4) > 1 || a * a - 4 * p != b * b * disc)
        throw InvalidDiscriminantData("a^2 - 4p != b^2 disc for a=" + std::to_string(a) + " b=" +
                                      std::to_string(b) + " disc=" + std::to_string(disc));
    if (n > 1 && p % n == 0) throw BadPrime("p divides N");
    const long delta = mod_p(disc, 4);
    FrobeniusClass out;
    out.modulus = n;
    out.rep = make_mat((a + b * delta) / 2, b, b * (disc - delta) / 4, (a - b * delta) / 2, n);
    out.trace = mat_trace(out.rep, n);
    out.det = mat_det(out.rep, n);
    if (out.trace != mod_reduce(a, n) || out.det != mod_reduce(p, n))
        throw InternalInconsistency("Frobenius matrix has wrong characteristic polynomial");
    return out;
}

long frobenius_conductor_part(const WeierstrassCurve& e, long p, int n) {
    long b = 1;
    for (int ell : prime_divisors(n)) {
        int ex = 0;
        for (int t = n; t % ell == 0; t /= ell) ++ex;
        // The matrix entries halve multiples of b, so at 2 one extra level matters.
        const int j = scalar_depth(e, p, ell, ell == 2 ? ex + 1 : ex);
        for (int i = 0; i < j; ++i) b *= ell;
    }
    return b;
}

FrobeniusClass duke_toth_for_curve(const WeierstrassCurve& e, long p, int n) {
    const long a = ec_ap(e, p);
    const long b = frobenius_conductor_part(e, p, n);
    return duke_toth_matrix(a, b, (a * a - 4 * p) / (b * b), p, n);
}

long fixed_cosets(const CosetTable& table, const FrobeniusClass& a) {
    if (table.ambient() != CosetTable::Ambient::GL2) throw ConstraintViolation("fixed_cosets needs a GL2 coset table");
    if (a.modulus != table.context().modulus()) throw ModulusMismatch("fixed_cosets");
    const uint32_t idx = table.context().index_checked(a.rep);
    long count = 0;
    for (std::size_t i = 0; i < table.size(); ++i) count += table.conjugate_in_subgroup(i, idx) ? 1 : 0;
    return count;
}

FrobeniusLevelContext::FrobeniusLevelContext(int n) : n_(n), ctx_(Gl2Context::get(n)) {}

const std::vector<std::pair<int, long>>& FrobeniusLevelContext::class_weights(long p) const {
    if (p <= 3 || !is_prime(p) || (n_ > 1 && p % n_ == 0) || std::gcd(p, static_cast<long>(n_)) != 1)
        throw BadPrime("prime " + std::to_string(p) + " is not usable at level " + std::to_string(n_));
    std::lock_guard<std::mutex> lock(mu_);
    auto& slot = weights_[p];
    if (!slot) {
        const ClassTable& t = ctx_->classes();
        std::map<int, long> acc;
        for (const TraceWeightEntry& e : hurwitz_weights(p).entries) {
            const FrobeniusClass f = duke_toth_matrix(e.a, e.b, e.disc, p, n_);
            acc[t.class_of[ctx_->index_checked(f.rep)]] += 12 * e.h / e.w;
        }
        slot = std::make_unique<std::vector<std::pair<int, long>>>(acc.begin(), acc.end());
    }
    return *slot;
}

void FrobeniusLevelContext::warm(const std::vector<long>& primes) const {
    for (long p : primes) class_weights(p);
}

long FrobeniusLevelContext::point_count(const SubgroupRep& h, long p) const {
    return point_count(h, ModularCurveData(h), p);
}

long FrobeniusLevelContext::point_count(const SubgroupRep& h, const ModularCurveData& data, long p) const {
    if (h.modulus() != n_) throw ModulusMismatch("point_count: subgroup modulus differs from context");
    if (!h.det_surjective() || !h.contains_minus_identity())
        throw ConstraintViolation("point counts need a det-surjective subgroup containing -I");
    const std::vector<std::pair<int, long>>& w = class_weights(p);
    const ClassTable& t = ctx_->classes();
    const std::vector<uint32_t> dist = class_distribution(h);
    const long index = static_cast<long>(h.index());
    long total = 0;
    for (const auto& [k, w12] : w) {
        const long num = index * static_cast<long>(dist[static_cast<std::size_t>(k)]);
        const long size = static_cast<long>(t.sizes[static_cast<std::size_t>(k)]);
        if (num % size != 0) throw InternalInconsistency("fixed coset count is not integral");
        total += w12 * (num / size);
    }
    if (total % 12 != 0) throw InternalInconsistency("weighted point count is not integral");
    const long count = total / 12 + data.rational_cusps(p);
    if (count < 0) throw InternalInconsistency("negative point count");
    return count;
}

long FrobeniusLevelContext::ap(const SubgroupRep& h, long p) const { return p + 1 - point_count(h, p); }

long FrobeniusLevelContext::ap(const SubgroupRep& h, const ModularCurveData& data, long p) const {
    return p + 1 - point_count(h, data, p);
}

namespace {

const FrobeniusLevelContext& shared_context(int n) {
    static std::mutex mu;
    static std::map<int, std::unique_ptr<FrobeniusLevelContext>> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto& slot = cache[n];
    if (!slot) slot = std::make_unique<FrobeniusLevelContext>(n);
    return *slot;
}

} // namespace

long point_count_XH(const SubgroupRep& h, long p) { return shared_context(h.modulus()).point_count(h, p); }

long ap_jacobian(const SubgroupRep& h, long p) { return p + 1 - point_count_XH(h, p); }

void ApCache::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) return;
    std::string line;
    if (!std::getline(in, line)) return;
    if (split_csv_line(line) != std::vector<std::string>{"key", "p", "ap"})
        throw MissingHeader(path + ": expected header key,p,ap");
    std::map<std::pair<std::string, long>, long> loaded;
    long lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        const std::vector<std::string> f = split_csv_line(line);
        if (f.size() != 3) throw MalformedRow(path + ":" + std::to_string(lineno));
        try {
            std::size_t u1 = 0, u2 = 0;
            const long p = std::stol(f[1], &u1);
            const long ap = std::stol(f[2], &u2);
            if (u1 != f[1].size() || u2 != f[2].size()) throw std::invalid_argument("trailing");
            loaded[{f[0], p}] = ap;
        } catch (const std::logic_error&) {
            throw NonIntegerField(path + ":" + std::to_string(lineno));
        }
    }
    std::lock_guard<std::mutex> lock(mu_);
    for (auto& kv : loaded) values_.insert(kv);
}

void ApCache::save(const std::string& path) const {
    std::lock_guard<std::mutex> lock(mu_);
    std::ofstream out(path, std::ios::trunc);
    out << "key,p,ap\n";
    for (const auto& [k, v] : values_) out << csv_field(k.first) << ',' << k.second << ',' << v << '\n';
}

bool ApCache::get(const std::string& key, long p, long& ap) const {
    std::lock_guard<std::mutex> lock(mu_);
    auto it = values_.find({key, p});
    if (it == values_.end()) return false;
    ap = it->second;
    return true;
}

void ApCache::put(const std::string& key, long p, long ap) {
    std::lock_guard<std::mutex> lock(mu_);
    values_[{key, p}] = ap;
}

std::size_t ApCache::size() const {
    std::lock_guard<std::mutex> lock(mu_);
    return values_.size();
}

} // namespace cdx
