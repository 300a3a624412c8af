// Finite fields F_p and F_p[X]/(g), and polynomials over either.
#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <random>
#include <utility>
#include <vector>

#include "cdx/errors.hpp"

namespace cdx::ff {

using i64 = std::int64_t;

class Fp {
public:
    using E = i64;
    explicit Fp(i64 p) : p_(p) {}
    i64 p() const { return p_; }
    E zero() const { return 0; }
    E one() const { return 1 % p_; }
    E from(i64 x) const {
        x %= p_;
        return x < 0 ? x + p_ : x;
    }
    E add(E a, E b) const { return (a + b) % p_; }
    E sub(E a, E b) const { return (a - b + p_) % p_; }
    E neg(E a) const { return a == 0 ? 0 : p_ - a; }
    E mul(E a, E b) const { return a * b % p_; }
    E pow(E a, unsigned long long e) const {
        E r = one();
        while (e) {
            if (e & 1) r = mul(r, a);
            a = mul(a, a);
            e >>= 1;
        }
        return r;
    }
    E inv(E a) const {
        if (a == 0) throw InternalInconsistency("inverse of zero in F_p");
        return pow(a, static_cast<unsigned long long>(p_ - 2));
    }
    bool is_zero(E a) const { return a == 0; }
    bool eq(E a, E b) const { return a == b; }
    template <class R> E random(R& rng) const { return std::uniform_int_distribution<i64>(0, p_ - 1)(rng); }
    mpz_class size() const { return mpz_class(static_cast<long>(p_)); }

private:
    i64 p_;
};

// Dense polynomials over a field F, low degree first, no trailing zeros.
template <class F>
class PolyRing {
public:
    using E = typename F::E;
    using P = std::vector<E>;

    explicit PolyRing(const F& f) : f_(f) {}
    const F& field() const { return f_; }

    void trim(P& a) const {
        while (!a.empty() && f_.is_zero(a.back())) a.pop_back();
    }
    int deg(const P& a) const { return static_cast<int>(a.size()) - 1; }
    P constant(E c) const {
        P r{c};
        trim(r);
        return r;
    }
    P x() const { return P{f_.zero(), f_.one()}; }

    P add(const P& a, const P& b) const {
        P r(std::max(a.size(), b.size()), f_.zero());
        for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i];
        for (std::size_t i = 0; i < b.size(); ++i) r[i] = f_.add(r[i], b[i]);
        trim(r);
        return r;
    }
    P sub(const P& a, const P& b) const {
        P r(std::max(a.size(), b.size()), f_.zero());
        for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i];
        for (std::size_t i = 0; i < b.size(); ++i) r[i] = f_.sub(r[i], b[i]);
        trim(r);
        return r;
    }
    P scale(const P& a, E c) const {
        P r(a.size(), f_.zero());
        for (std::size_t i = 0; i < a.size(); ++i) r[i] = f_.mul(a[i], c);
        trim(r);
        return r;
    }
    P mul(const P& a, const P& b) const {
        if (a.empty() || b.empty()) return {};
        P r(a.size() + b.size() - 1, f_.zero());
        for (std::size_t i = 0; i < a.size(); ++i) {
            if (f_.is_zero(a[i])) continue;
            for (std::size_t j = 0; j < b.size(); ++j) r[i + j] = f_.add(r[i + j], f_.mul(a[i], b[j]));
        }
        trim(r);
        return r;
    }
    void divmod(const P& a, const P& b, P& q, P& r) const {
        if (b.empty()) throw InternalInconsistency("polynomial division by zero");
        r = a;
        trim(r);
        q.assign(r.size() >= b.size() ? r.size() - b.size() + 1 : 0, f_.zero());
        const E lead_inv = f_.inv(b.back());
        while (r.size() >= b.size() && !r.empty()) {
            const std::size_t shift = r.size() - b.size();
            const E c = f_.mul(r.back(), lead_inv);
            q[shift] = c;
            for (std::size_t j = 0; j < b.size(); ++j) r[shift + j] = f_.sub(r[shift + j], f_.mul(c, b[j]));
            trim(r);
        }
        trim(q);
    }
    P mod(const P& a, const P& b) const {
        P q, r;
        divmod(a, b, q, r);
        return r;
    }
    P div_exact(const P& a, const P& b) const {
        P q, r;
        divmod(a, b, q, r);
        if (!r.empty()) throw InternalInconsistency("inexact polynomial division");
        return q;
    }
    P monic(const P& a) const { return a.empty() ? a : scale(a, f_.inv(a.back())); }
    P gcd(P a, P b) const {
        while (!b.empty()) {
            P r = mod(a, b);
            a = std::move(b);
            b = std::move(r);
        }
        return monic(a);
    }
    P mulmod(const P& a, const P& b, const P& m) const { return mod(mul(a, b), m); }
    P powmod(P base, const mpz_class& e, const P& m) const {
        P r = mod(constant(f_.one()), m);
        base = mod(base, m);
        const std::size_t bits = mpz_sizeinbase(e.get_mpz_t(), 2);
        for (std::size_t i = bits; i-- > 0;) {
            r = mulmod(r, r, m);
            if (mpz_tstbit(e.get_mpz_t(), i)) r = mulmod(r, base, m);
        }
        return r;
    }
    E eval(const P& a, E x) const {
        E r = f_.zero();
        for (std::size_t i = a.size(); i-- > 0;) r = f_.add(f_.mul(r, x), a[i]);
        return r;
    }

private:
    const F& f_;
};

using FpPoly = std::vector<i64>;

// F_p[X]/(g) for monic irreducible g.
class Ext {
public:
    using E = FpPoly;

    Ext(const Ext&) = delete;
    Ext& operator=(const Ext&) = delete;
    Ext(const Fp& k, FpPoly g) : k_(k), ring_(k_), g_(std::move(g)) {
        q_ = 1;
        for (int i = 0; i < degree(); ++i) q_ *= static_cast<long>(k_.p());
    }
    int degree() const { return static_cast<int>(g_.size()) - 1; }
    const Fp& base() const { return k_; }
    const mpz_class& size() const { return q_; }

    E zero() const { return {}; }
    E one() const { return ring_.constant(1); }
    E from(i64 c) const { return ring_.constant(k_.from(c)); }
    E gen() const { return ring_.mod(ring_.x(), g_); }
    E add(const E& a, const E& b) const { return ring_.add(a, b); }
    E sub(const E& a, const E& b) const { return ring_.sub(a, b); }
    E neg(const E& a) const { return ring_.sub({}, a); }
    E mul(const E& a, const E& b) const { return ring_.mulmod(a, b, g_); }
    E inv(const E& a) const {
        if (a.empty()) throw InternalInconsistency("inverse of zero in extension field");
        // Extended Euclid: s*a + t*g = 1.
        FpPoly r0 = g_, r1 = a, s0, s1 = ring_.constant(1);
        while (!r1.empty()) {
            FpPoly q, r;
            ring_.divmod(r0, r1, q, r);
            FpPoly s = ring_.sub(s0, ring_.mul(q, s1));
            r0 = std::move(r1);
            r1 = std::move(r);
            s0 = std::move(s1);
            s1 = std::move(s);
        }
        if (r0.size() != 1) throw InternalInconsistency("modulus is not irreducible");
        return ring_.mod(ring_.scale(s0, k_.inv(r0[0])), g_);
    }
    E pow(const E& a, const mpz_class& e) const { return ring_.powmod(a, e, g_); }
    E frob(const E& a) const { return pow(a, mpz_class(static_cast<long>(k_.p()))); }
    bool is_zero(const E& a) const { return a.empty(); }
    bool eq(const E& a, const E& b) const { return a == b; }
    bool is_square(const E& a) const {
        if (a.empty()) return true;
        return pow(a, (q_ - 1) / 2) == one();
    }
    template <class R> E random(R& rng) const {
        E r(static_cast<std::size_t>(degree()));
        for (auto& c : r) c = k_.random(rng);
        ring_.trim(r);
        return r;
    }

private:
    Fp k_;
    PolyRing<Fp> ring_;
    FpPoly g_;
    mpz_class q_;
};

// Irreducible factors of a squarefree polynomial over F_p (p odd), sorted by
// degree and then coefficients.
std::vector<FpPoly> factor_squarefree(const Fp& k, const FpPoly& f, std::mt19937_64& rng);
bool is_irreducible(const Fp& k, const FpPoly& g);
FpPoly random_irreducible(const Fp& k, int degree, std::mt19937_64& rng);
// A square root in F (p odd), or nothing when a is a non-square.
bool sqrt_in(const Ext& f, const Ext::E& a, Ext::E& out, std::mt19937_64& rng);
// Roots in `f` of a polynomial over F_p that splits there into distinct
// linear factors. With `limit` > 0, stops after that many roots.
std::vector<Ext::E> roots_in(const Ext& f, const FpPoly& h, std::mt19937_64& rng, std::size_t limit = 0);

} // namespace cdx::ff
