// Frobenius on N-torsion from an explicit basis of E[ell^e] over an extension
// of F_p, plus the scalar-action test on E[ell^j].
#include <map>
#include <numeric>
#include <optional>

#include "cdx/errors.hpp"
#include "cdx/frobenius.hpp"
#include "ffield.hpp"

namespace cdx {

namespace {

using ff::Ext;
using ff::Fp;
using ff::FpPoly;
using ff::i64;
using ff::PolyRing;

struct ShortModel {
    i64 A = 0, B = 0;
};

// y^2 = x^3 - 27 c4 x - 54 c6, isomorphic to E over F_p for p >= 5.
ShortModel short_model(const WeierstrassCurve& e, const Fp& k) {
    const i64 a1 = k.from(e.a1), a2 = k.from(e.a2), a3 = k.from(e.a3), a4 = k.from(e.a4), a6 = k.from(e.a6);
    const i64 b2 = k.add(k.mul(a1, a1), k.mul(4, a2));
    const i64 b4 = k.add(k.mul(2, a4), k.mul(a1, a3));
    const i64 b6 = k.add(k.mul(a3, a3), k.mul(4, a6));
    const i64 c4 = k.sub(k.mul(b2, b2), k.mul(24, b4));
    const i64 c6 = k.sub(k.sub(k.mul(36, k.mul(b2, b4)), k.mul(b2, k.mul(b2, b2))), k.mul(216, b6));
    return {k.neg(k.mul(27, c4)), k.neg(k.mul(54, c6))};
}

// f_n = psi_n for odd n and psi_n / (2y) for even n, as polynomials in x.
class DivisionPolys {
public:
    DivisionPolys(const Fp& k, ShortModel m) : k_(k), r_(k_), m_(m) {
        cubic_ = {m.B, m.A, 0, 1};
        r_.trim(cubic_);
        four_cubic_ = r_.scale(cubic_, 4);
        f2sq_ = r_.mul(four_cubic_, four_cubic_);
    }

    const FpPoly& cubic() const { return cubic_; }
    // (2y)^2 as a polynomial in x.
    const FpPoly& four_cubic() const { return four_cubic_; }
    const PolyRing<Fp>& ring() const { return r_; }

    const FpPoly& f(int n) {
        auto it = memo_.find(n);
        if (it != memo_.end()) return it->second;
        FpPoly v;
        const i64 A = m_.A, B = m_.B;
        auto c = [&](i64 x) { return k_.from(x); };
        if (n == 0) {
            v = {};
        } else if (n == 1 || n == 2) {
            v = r_.constant(1);
        } else if (n == 3) {
            v = {k_.neg(k_.mul(A, A)), c(12 * B), c(6 * A), 0, 3};
        } else if (n == 4) {
            v = {k_.neg(k_.add(k_.mul(8, k_.mul(B, B)), k_.mul(A, k_.mul(A, A)))),
                 k_.neg(k_.mul(4, k_.mul(A, B))),
                 k_.neg(k_.mul(5, k_.mul(A, A))),
                 c(20 * B),
                 c(5 * A),
                 0,
                 1};
            v = r_.scale(v, 2);
        } else if (n % 2 == 1) {
            const int m = (n - 1) / 2;
            FpPoly t1 = r_.mul(f(m + 2), cube(f(m)));
            FpPoly t2 = r_.mul(f(m - 1), cube(f(m + 1)));
            if (m % 2 == 0)
                t1 = r_.mul(t1, f2sq_);
            else
                t2 = r_.mul(t2, f2sq_);
            v = r_.sub(t1, t2);
        } else {
            const int m = n / 2;
            FpPoly fm1 = f(m - 1), fp1 = f(m + 1);
            v = r_.mul(f(m), r_.sub(r_.mul(f(m + 2), r_.mul(fm1, fm1)), r_.mul(f(m - 2), r_.mul(fp1, fp1))));
        }
        r_.trim(v);
        return memo_.emplace(n, std::move(v)).first->second;
    }

    // Monic polynomial whose roots are the x-coordinates of E[n] minus O.
    FpPoly torsion_x(int n) {
        if (n == 1) return r_.constant(1);
        FpPoly g = n % 2 == 1 ? f(n) : r_.mul(cubic_, f(n));
        return r_.monic(g);
    }
    // x-coordinates of points of exact order ell^e.
    FpPoly primitive_x(int ell, int e) {
        int m = 1;
        for (int i = 1; i < e; ++i) m *= ell;
        return r_.monic(r_.div_exact(torsion_x(m * ell), torsion_x(m)));
    }
    // psi_u^2 and psi_{u+1} psi_{u-1}, in x only.
    FpPoly psi_sq(int u) {
        FpPoly s = r_.mul(f(u), f(u));
        return u % 2 == 0 ? r_.mul(s, four_cubic_) : s;
    }
    FpPoly psi_neighbours(int u) {
        FpPoly s = r_.mul(f(u + 1), f(u - 1));
        return u % 2 == 1 ? r_.mul(s, four_cubic_) : s;
    }

private:
    FpPoly cube(const FpPoly& a) const { return r_.mul(a, r_.mul(a, a)); }

    Fp k_;
    PolyRing<Fp> r_;
    ShortModel m_;
    FpPoly cubic_, four_cubic_, f2sq_;
    std::map<int, FpPoly> memo_;
};

// K[u]/(u^2 - n) for a non-square n of K.
class Quad {
public:
    using KE = Ext::E;
    struct E {
        KE c0, c1;
        friend bool operator==(const E&, const E&) = default;
    };

    Quad(const Ext& k, std::mt19937_64& rng) : k_(k) {
        do n_ = k_.random(rng);
        while (k_.is_zero(n_) || k_.is_square(n_));
        w_ = k_.pow(n_, mpz_class((static_cast<long>(k_.base().p()) - 1) / 2));
    }

    const Ext& base() const { return k_; }
    E lift(const KE& a) const { return {a, k_.zero()}; }
    E add(const E& a, const E& b) const { return {k_.add(a.c0, b.c0), k_.add(a.c1, b.c1)}; }
    E sub(const E& a, const E& b) const { return {k_.sub(a.c0, b.c0), k_.sub(a.c1, b.c1)}; }
    E neg(const E& a) const { return {k_.neg(a.c0), k_.neg(a.c1)}; }
    E mul(const E& a, const E& b) const {
        return {k_.add(k_.mul(a.c0, b.c0), k_.mul(n_, k_.mul(a.c1, b.c1))),
                k_.add(k_.mul(a.c0, b.c1), k_.mul(a.c1, b.c0))};
    }
    E inv(const E& a) const {
        const KE norm = k_.sub(k_.mul(a.c0, a.c0), k_.mul(n_, k_.mul(a.c1, a.c1)));
        const KE ni = k_.inv(norm);
        return {k_.mul(a.c0, ni), k_.neg(k_.mul(a.c1, ni))};
    }
    bool is_zero(const E& a) const { return k_.is_zero(a.c0) && k_.is_zero(a.c1); }
    E frob(const E& a) const { return {k_.frob(a.c0), k_.mul(k_.frob(a.c1), w_)}; }
    E sqrt(const KE& r, std::mt19937_64& rng) const {
        KE s;
        if (ff::sqrt_in(k_, r, s, rng)) return {s, k_.zero()};
        if (!ff::sqrt_in(k_, k_.mul(r, k_.inv(n_)), s, rng)) throw InternalInconsistency("no square root in Quad");
        return {k_.zero(), s};
    }

private:
    const Ext& k_;
    KE n_, w_;
};

struct Point {
    Quad::E x, y;
    bool inf = false;
    friend bool operator==(const Point& a, const Point& b) {
        if (a.inf || b.inf) return a.inf == b.inf;
        return a.x == b.x && a.y == b.y;
    }
};

class Curve {
public:
    Curve(const Quad& f, i64 A, i64 B) : f_(f), A_(f.lift(f.base().from(A))), B_(f.lift(f.base().from(B))) {}

    Point add(const Point& p, const Point& q) const {
        if (p.inf) return q;
        if (q.inf) return p;
        Quad::E lambda;
        if (p.x == q.x) {
            if (f_.is_zero(f_.add(p.y, q.y))) return Point{{}, {}, true};
            const Quad::E x2 = f_.mul(p.x, p.x);
            const Quad::E three = f_.lift(f_.base().from(3)), two = f_.lift(f_.base().from(2));
            lambda = f_.mul(f_.add(f_.mul(three, x2), A_), f_.inv(f_.mul(two, p.y)));
        } else {
            lambda = f_.mul(f_.sub(q.y, p.y), f_.inv(f_.sub(q.x, p.x)));
        }
        Quad::E x3 = f_.sub(f_.sub(f_.mul(lambda, lambda), p.x), q.x);
        Quad::E y3 = f_.sub(f_.mul(lambda, f_.sub(p.x, x3)), p.y);
        return Point{x3, y3, false};
    }
    Point mul(long k, Point p) const {
        Point r{{}, {}, true};
        while (k > 0) {
            if (k & 1) r = add(r, p);
            p = add(p, p);
            k >>= 1;
        }
        return r;
    }
    Point frob(const Point& p) const {
        if (p.inf) return p;
        return Point{f_.frob(p.x), f_.frob(p.y), false};
    }
    bool on_curve(const Point& p) const {
        if (p.inf) return true;
        Quad::E lhs = f_.mul(p.y, p.y);
        Quad::E rhs = f_.add(f_.add(f_.mul(p.x, f_.mul(p.x, p.x)), f_.mul(A_, p.x)), B_);
        return lhs == rhs;
    }

private:
    const Quad& f_;
    Quad::E A_, B_;
};

// Is q outside the cyclic group generated by r (r of order ell)?
bool independent_mod_ell(const Curve& c, const Point& r, const Point& q, int ell) {
    Point m{{}, {}, true};
    for (int k = 0; k < ell; ++k) {
        if (m == q) return false;
        m = c.add(m, r);
    }
    return true;
}

// Coordinates (i, j) of target = i P + j Q, with P, Q a basis of E[m].
std::pair<int, int> coordinates(const Curve& c, const Point& p, const Point& q, int m, const Point& target) {
    Point row{{}, {}, true};
    for (int i = 0; i < m; ++i) {
        Point cur = row;
        for (int j = 0; j < m; ++j) {
            if (cur == target) return {i, j};
            cur = c.add(cur, q);
        }
        row = c.add(row, p);
    }
    throw InternalInconsistency("Frobenius image is not in the span of the torsion basis");
}

struct LocalMatrix {
    long a, b, c, d;  // [[a, b], [c, d]] mod m
};

LocalMatrix frobenius_prime_power(const Fp& k, const ShortModel& model, int ell, int e, std::mt19937_64& rng) {
    int m = 1;
    for (int i = 0; i < e; ++i) m *= ell;
    DivisionPolys dp(k, model);
    const PolyRing<Fp>& ring = dp.ring();
    const FpPoly phi = dp.primitive_x(ell, e);
    const std::vector<FpPoly> factors = ff::factor_squarefree(k, phi, rng);

    // Point over K[u] with the given x in K.
    auto lift_point = [&](const Quad& q, const Ext::E& x) {
        const Ext& K = q.base();
        const Ext::E rhs = K.add(K.add(K.mul(x, K.mul(x, x)), K.mul(K.from(model.A), x)), K.from(model.B));
        return Point{q.lift(x), q.sqrt(rhs, rng), false};
    };

    // A cyclic vector P: basis (P, pi P), and pi^2 P read off in that basis.
    for (const FpPoly& f : factors) {
        Ext K(k, f);
        Quad q(K, rng);
        Curve c(q, model.A, model.B);
        const Point p = lift_point(q, K.gen());
        const Point fp = c.frob(p);
        if (!independent_mod_ell(c, c.mul(m / ell, p), c.mul(m / ell, fp), ell)) continue;
        const auto [alpha, beta] = coordinates(c, p, fp, m, c.frob(fp));
        return {0, alpha, 1, beta};
    }

    // Frobenius is scalar mod ell: collect points over one field holding all
    // of E[ell^e] and pick any two independent ones.
    int degree = 1;
    for (const FpPoly& f : factors) degree = std::lcm(degree, ring.deg(f));
    if (degree > 48) throw OracleCapExceeded("torsion field degree " + std::to_string(degree));
    FpPoly g;
    for (const FpPoly& f : factors)
        if (ring.deg(f) == degree) g = f;
    if (g.empty()) g = ff::random_irreducible(k, degree, rng);
    Ext K(k, g);
    Quad q(K, rng);
    Curve c(q, model.A, model.B);
    std::optional<Point> p, qq;
    for (const FpPoly& f : factors) {
        for (const Ext::E& x : ff::roots_in(K, f, rng)) {
            Point pt = lift_point(q, x);
            if (!p) {
                p = pt;
            } else if (independent_mod_ell(c, c.mul(m / ell, *p), c.mul(m / ell, pt), ell)) {
                qq = pt;
                break;
            }
        }
        if (qq) break;
    }
    if (!qq) throw InternalInconsistency("no torsion basis found");
    const auto [a, b] = coordinates(c, *p, *qq, m, c.frob(*p));
    const auto [cc, d] = coordinates(c, *p, *qq, m, c.frob(*qq));
    return {a, cc, b, d};
}

long crt(long r1, long m1, long r2, long m2) {
    // m1, m2 coprime.
    for (long x = r2; x < m1 * m2; x += m2)
        if (x % m1 == r1) return x;
    throw InternalInconsistency("CRT failed");
}

std::vector<std::pair<int, int>> prime_power_parts(int n) {
    std::vector<std::pair<int, int>> out;
    for (int ell : prime_divisors(n)) {
        int e = 0;
        for (int t = n; t % ell == 0; t /= ell) ++e;
        out.emplace_back(ell, e);
    }
    return out;
}

} // namespace

FrobeniusClass torsion_frobenius(const WeierstrassCurve& e, long p, int n, const OracleLimits& limits) {
    if (n > limits.max_modulus || p > limits.max_prime)
        throw OracleCapExceeded("torsion oracle limited to N <= " + std::to_string(limits.max_modulus) +
                                ", p <= " + std::to_string(limits.max_prime));
    if (p < 5) throw UnsupportedPrime("torsion oracle needs p >= 5");
    if (n % p == 0) throw BadPrime(std::to_string(p) + " divides " + std::to_string(n));
    if (!has_good_reduction(e, p)) throw BadReduction("bad reduction at " + std::to_string(p));
    FrobeniusClass out;
    out.modulus = n;
    out.rep = mat_identity(n);
    if (n == 1) {
        out.det = 0;
        out.trace = 0;
        return out;
    }
    Fp k(p);
    const ShortModel model = short_model(e, k);
    std::mt19937_64 rng(0x5eed0000u ^ static_cast<unsigned long long>(p * 1000003 + n) ^
                        static_cast<unsigned long long>(e.a4 * 7919 + e.a6 * 104729 + e.a1 + 3 * e.a2 + 5 * e.a3));
    long a = 0, b = 0, c = 0, d = 0, mod = 1;
    for (const auto& [ell, ex] : prime_power_parts(n)) {
        int m = 1;
        for (int i = 0; i < ex; ++i) m *= ell;
        const LocalMatrix lm = frobenius_prime_power(k, model, ell, ex, rng);
        a = crt(a, mod, lm.a % m, m);
        b = crt(b, mod, lm.b % m, m);
        c = crt(c, mod, lm.c % m, m);
        d = crt(d, mod, lm.d % m, m);
        mod *= m;
    }
    out.rep = make_mat(a, b, c, d, n);
    out.trace = mat_trace(out.rep, n);
    out.det = mat_det(out.rep, n);
    if (out.det != mod_reduce(p, n)) throw InternalInconsistency("torsion Frobenius has det != p");
    return out;
}

int scalar_depth(const WeierstrassCurve& e, long p, int ell, int max_j) {
    if (p < 5) throw UnsupportedPrime("scalar test needs p >= 5");
    if (ell == p) throw BadPrime("ell equals p");
    if (!has_good_reduction(e, p)) throw BadReduction("bad reduction at " + std::to_string(p));
    Fp k(p);
    DivisionPolys dp(k, short_model(e, k));
    const PolyRing<Fp>& r = dp.ring();
    int depth = 0;
    int m = 1;
    for (int j = 1; j <= max_j; ++j) {
        m *= ell;
        const FpPoly g = dp.torsion_x(m);
        const FpPoly xp = r.powmod(r.x(), mpz_class(p), g);
        bool scalar = false;
        for (int u = 1; 2 * u <= m || u == 1; ++u) {
            if (u % ell == 0) continue;
            const FpPoly s = r.mod(dp.psi_sq(u), g);
            const FpPoly phi = r.sub(r.mul(r.x(), dp.psi_sq(u)), dp.psi_neighbours(u));
            if (r.mod(r.sub(r.mul(xp, s), phi), g).empty()) {
                scalar = true;
                break;
            }
        }
        if (!scalar) break;
        depth = j;
    }
    return depth;
}

} // namespace cdx
