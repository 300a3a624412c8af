#include <numeric>

#include "cdx/errors.hpp"
#include "cdx/invariants.hpp"
#include "doctest.h"

using namespace cdx;

namespace {

int kronecker_minus(int d, int p) {
    // (-d / p) for d in {1, 3}, p prime.
    if (p == 2) return d == 1 ? 0 : -1;
    if (p == 3 && d == 3) return 0;
    const int residue = (p - d % p) % p;
    int x = 1;
    for (int k = 0; k < (p - 1) / 2; ++k) x = x * residue % p;
    return x == 1 ? 1 : -1;
}

CurveInvariants classical_gamma0(int n) {
    CurveInvariants c;
    c.level = n;
    long mu = n;
    int nu2 = 1, nu3 = 1;
    for (int p : prime_divisors(n)) {
        mu = mu / p * (p + 1);
        nu2 *= 1 + kronecker_minus(1, p);
        nu3 *= 1 + kronecker_minus(3, p);
    }
    if (n % 4 == 0) nu2 = 0;
    if (n % 9 == 0) nu3 = 0;
    int cusps = 0;
    for (int d = 1; d <= n; ++d) {
        if (n % d) continue;
        const int g = std::gcd(d, n / d);
        int phi = 0;
        for (int k = 1; k <= g; ++k) phi += std::gcd(k, g) == 1 ? 1 : 0;
        cusps += phi;
    }
    c.index = mu;
    c.nu2 = nu2;
    c.nu3 = nu3;
    c.cusps = cusps;
    c.genus = static_cast<int>(1 + (mu - 3 * nu2 - 4 * nu3 - 6 * cusps) / 12);
    return c;
}

SubgroupRep level7_index168() {
    // {±diag(1, d)}: H ∩ SL2 = {±I} and det is onto.
    return generate_subgroup({make_mat(-1, 0, 0, -1, 7), make_mat(1, 0, 0, 3, 7)}, 7);
}

} // namespace

TEST_CASE("full group") {
    for (int n : {1, 2, 6, 11}) {
        const CurveInvariants c = curve_invariants(full_group(n));
        CHECK(c == CurveInvariants{1, 1, 1, 1, 1, 0});
        CHECK(rational_cusp_count(full_group(n), 13) == 1);
    }
}

TEST_CASE("classical Gamma0 examples") {
    CHECK(psl2_index(borel_subgroup(11)) == 12);
    CHECK(psl2_index(borel_subgroup(6)) == 12);
    CHECK(elliptic_point_counts(borel_subgroup(11)) == std::pair<int, int>{0, 0});
    CHECK(elliptic_point_counts(borel_subgroup(13)) == std::pair<int, int>{2, 2});
    CHECK(cusp_count(borel_subgroup(11)) == 2);
    CHECK(cusp_count(borel_subgroup(12)) == 6);
    CHECK(genus(borel_subgroup(11)) == 1);
    CHECK(genus(level7_index168()) == 3);
    CHECK(psl2_index(level7_index168()) == 168);
}

TEST_CASE("Gamma0 family matches closed forms up to 30") {
    for (int n = 2; n <= 30; ++n) {
        CAPTURE(n);
        const CurveInvariants c = curve_invariants(borel_subgroup(n));
        CHECK(c == classical_gamma0(n));
    }
}

TEST_CASE("genus identity and bounds on small lifts") {
    for (int n : {4, 6, 9, 10}) {
        const CurveInvariants c = curve_invariants(borel_subgroup(n));
        CHECK(12 * (c.genus - 1) == c.index - 3 * c.nu2 - 4 * c.nu3 - 6 * c.cusps);
        CHECK(c.nu2 <= c.index);
        CHECK(c.nu3 <= c.index);
        CHECK(c.cusps <= c.index);
        // Lifting changes neither the invariants nor the level.
        const CurveInvariants l = curve_invariants(lift_subgroup(borel_subgroup(n), 2 * n));
        CHECK(l == c);
    }
}

TEST_CASE("rational cusps") {
    const SubgroupRep b11 = borel_subgroup(11);
    CHECK(rational_cusp_count(b11, 7) == 2);
    CHECK(rational_cusp_count(b11, 23) == 2);
    CHECK_THROWS_AS(rational_cusp_count(b11, 11), BadPrime);
    for (int n : {5, 6, 8, 9, 12}) {
        const SubgroupRep b = borel_subgroup(n);
        const ModularCurveData data(b);
        for (long p : {5L, 7L, 11L, 13L, 17L, 19L, 23L, 29L, 31L, 37L}) {
            if (std::gcd(p, static_cast<long>(n)) != 1) continue;
            const int r = data.rational_cusps(p);
            CHECK(r <= data.invariants().cusps);
            if (p % n == 1) CHECK(r == data.invariants().cusps);
        }
    }
    // Level-7 genus-3 curve: 24 cusps, all fixed when p = 1 mod 7.
    const ModularCurveData x7(level7_index168());
    CHECK(x7.invariants().cusps == 24);
    CHECK(x7.rational_cusps(29) == 24);
}

TEST_CASE("preconditions") {
    CHECK_THROWS_AS(curve_invariants(sl2_subgroup(5)), ConstraintViolation);
    CHECK_THROWS_AS(curve_invariants(generate_subgroup({make_mat(1, 0, 0, 2, 5)}, 5)), ConstraintViolation);
}
