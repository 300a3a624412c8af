#include "ffield.hpp"

#include <algorithm>

namespace cdx::ff {

namespace {

mpz_class power(i64 p, int d) {
    mpz_class q = 1;
    for (int i = 0; i < d; ++i) q *= static_cast<long>(p);
    return q;
}

FpPoly random_poly(const Fp& k, int below, std::mt19937_64& rng) {
    FpPoly a(static_cast<std::size_t>(std::max(below, 1)));
    for (auto& c : a) c = k.random(rng);
    PolyRing<Fp>(k).trim(a);
    return a;
}

void equal_degree(const Fp& k, const FpPoly& g, int d, std::mt19937_64& rng, std::vector<FpPoly>& out) {
    PolyRing<Fp> r(k);
    if (r.deg(g) == d) {
        out.push_back(g);
        return;
    }
    const mpz_class e = (power(k.p(), d) - 1) / 2;
    for (;;) {
        FpPoly a = random_poly(k, r.deg(g), rng);
        if (r.deg(a) < 1) continue;
        FpPoly b = r.sub(r.powmod(a, e, g), r.constant(1));
        FpPoly c = r.gcd(g, b);
        if (r.deg(c) > 0 && r.deg(c) < r.deg(g)) {
            equal_degree(k, c, d, rng, out);
            equal_degree(k, r.monic(r.div_exact(g, c)), d, rng, out);
            return;
        }
    }
}

} // namespace

std::vector<FpPoly> factor_squarefree(const Fp& k, const FpPoly& f0, std::mt19937_64& rng) {
    PolyRing<Fp> r(k);
    FpPoly f = r.monic(f0);
    std::vector<FpPoly> out;
    if (r.deg(f) < 1) return out;
    const mpz_class p(static_cast<long>(k.p()));
    FpPoly h = r.mod(r.x(), f);
    for (int i = 1; 2 * i <= r.deg(f); ++i) {
        h = r.powmod(h, p, f);
        FpPoly g = r.gcd(f, r.sub(h, r.x()));
        if (r.deg(g) > 0) {
            equal_degree(k, g, i, rng, out);
            f = r.monic(r.div_exact(f, g));
            h = r.mod(h, f);
        }
    }
    if (r.deg(f) > 0) out.push_back(f);
    std::sort(out.begin(), out.end(), [](const FpPoly& a, const FpPoly& b) {
        if (a.size() != b.size()) return a.size() < b.size();
        return std::lexicographical_compare(a.rbegin(), a.rend(), b.rbegin(), b.rend());
    });
    return out;
}

bool is_irreducible(const Fp& k, const FpPoly& g) {
    PolyRing<Fp> r(k);
    const int d = r.deg(g);
    if (d < 1) return false;
    if (d == 1) return true;
    const mpz_class p(static_cast<long>(k.p()));
    std::vector<FpPoly> powers{r.mod(r.x(), g)};
    for (int i = 1; i <= d; ++i) powers.push_back(r.powmod(powers.back(), p, g));
    if (powers[static_cast<std::size_t>(d)] != r.mod(r.x(), g)) return false;
    int n = d;
    for (int q = 2; q <= n; ++q) {
        if (n % q != 0) continue;
        while (n % q == 0) n /= q;
        FpPoly c = r.gcd(g, r.sub(powers[static_cast<std::size_t>(d / q)], r.x()));
        if (r.deg(c) > 0) return false;
    }
    return true;
}

FpPoly random_irreducible(const Fp& k, int degree, std::mt19937_64& rng) {
    for (;;) {
        FpPoly g = random_poly(k, degree, rng);
        g.resize(static_cast<std::size_t>(degree) + 1, 0);
        g.back() = 1;
        if (is_irreducible(k, g)) return g;
    }
}

bool sqrt_in(const Ext& f, const Ext::E& a, Ext::E& out, std::mt19937_64& rng) {
    if (f.is_zero(a)) {
        out = f.zero();
        return true;
    }
    if (!f.is_square(a)) return false;
    // Cipolla: (t + w)^((q+1)/2) in F[w]/(w^2 - (t^2 - a)).
    Ext::E t, w2;
    do {
        t = f.random(rng);
        w2 = f.sub(f.mul(t, t), a);
    } while (f.is_zero(w2) || f.is_square(w2));
    using Pair = std::pair<Ext::E, Ext::E>;
    auto mul = [&](const Pair& x, const Pair& y) {
        return Pair{f.add(f.mul(x.first, y.first), f.mul(w2, f.mul(x.second, y.second))),
                    f.add(f.mul(x.first, y.second), f.mul(x.second, y.first))};
    };
    const mpz_class e = (f.size() + 1) / 2;
    Pair r{f.one(), f.zero()}, b{t, f.one()};
    const std::size_t bits = mpz_sizeinbase(e.get_mpz_t(), 2);
    for (std::size_t i = bits; i-- > 0;) {
        r = mul(r, r);
        if (mpz_tstbit(e.get_mpz_t(), i)) r = mul(r, b);
    }
    if (!f.is_zero(r.second) || !f.eq(f.mul(r.first, r.first), a))
        throw InternalInconsistency("square root failed");
    out = r.first;
    return true;
}

std::vector<Ext::E> roots_in(const Ext& f, const FpPoly& h, std::mt19937_64& rng, std::size_t limit) {
    PolyRing<Ext> r(f);
    using P = PolyRing<Ext>::P;
    P top;
    for (i64 c : h) top.push_back(f.from(c));
    r.trim(top);
    top = r.monic(top);
    const mpz_class e = (f.size() - 1) / 2;
    std::vector<Ext::E> out;
    std::vector<P> stack{top};
    while (!stack.empty() && (limit == 0 || out.size() < limit)) {
        P g = std::move(stack.back());
        stack.pop_back();
        if (r.deg(g) < 1) continue;
        if (r.deg(g) == 1) {
            out.push_back(f.neg(f.mul(g[0], f.inv(g[1]))));
            continue;
        }
        for (;;) {
            P lin{f.random(rng), f.one()};
            P w = r.sub(r.powmod(lin, e, g), r.constant(f.one()));
            P c = r.gcd(g, w);
            if (r.deg(c) > 0 && r.deg(c) < r.deg(g)) {
                P rest = r.monic(r.div_exact(g, c));
                // Smaller half on top so single roots surface quickly.
                if (r.deg(c) <= r.deg(rest)) {
                    stack.push_back(std::move(rest));
                    stack.push_back(std::move(c));
                } else {
                    stack.push_back(std::move(c));
                    stack.push_back(std::move(rest));
                }
                break;
            }
        }
    }
    return out;
}

} // namespace cdx::ff
