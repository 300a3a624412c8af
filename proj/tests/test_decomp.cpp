#include <doctest.h>

#include <random>

#include "cdx/decomp.hpp"
#include "cdx/errors.hpp"
#include "cdx/frobenius.hpp"
#include "cdx/lattice.hpp"

using namespace cdx;

namespace {

const std::vector<CurveRecord>& fixture() {
    static const std::vector<CurveRecord> db = load_curve_csv("fixtures/ec.csv");
    return db;
}

IntMatrix to_mpz(const std::vector<std::vector<long>>& a) {
    IntMatrix m;
    for (const auto& r : a) {
        m.emplace_back();
        for (long x : r) m.back().emplace_back(x);
    }
    return m;
}

// Cofactor expansion, independent of the elimination code.
mpz_class det_cofactor(const IntMatrix& a) {
    const std::size_t n = a.size();
    if (n == 0) return 1;
    if (n == 1) return a[0][0];
    mpz_class s = 0;
    for (std::size_t c = 0; c < n; ++c) {
        IntMatrix minor;
        for (std::size_t r = 1; r < n; ++r) {
            minor.emplace_back();
            for (std::size_t k = 0; k < n; ++k)
                if (k != c) minor.back().push_back(a[r][k]);
        }
        const mpz_class t = a[0][c] * det_cofactor(minor);
        s += (c % 2 == 0) ? t : mpz_class(-t);
    }
    return s;
}

// x = adj(A) v / det(A).
RatVector adjugate_solve(const IntMatrix& a, const IntVector& v) {
    const std::size_t n = a.size();
    const mpz_class d = det_cofactor(a);
    RatVector x(n);
    for (std::size_t i = 0; i < n; ++i) {
        mpq_class s = 0;
        for (std::size_t j = 0; j < n; ++j) {
            IntMatrix minor;
            for (std::size_t r = 0; r < n; ++r) {
                if (r == j) continue;
                minor.emplace_back();
                for (std::size_t k = 0; k < n; ++k)
                    if (k != i) minor.back().push_back(a[r][k]);
            }
            mpq_class cof(det_cofactor(minor));
            if ((i + j) % 2) cof = -cof;
            s += cof * mpq_class(v[j]);
        }
        x[i] = s / mpq_class(d);
        x[i].canonicalize();
    }
    return x;
}

std::vector<CurveRecord> pool_for(int n) { return curves_for_level(fixture(), n); }

} // namespace

TEST_CASE("solve_exact small cases") {
    const std::vector<std::vector<long>> id{{1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
    CHECK(solve_exact(id, {4, -7, 2}) == RatVector{4, -7, 2});
    CHECK(solve_exact(std::vector<std::vector<long>>{{2}}, {3}) == RatVector{mpq_class(3, 2)});
    CHECK(solve_exact(std::vector<std::vector<long>>{}, {}).empty());
    CHECK_THROWS_AS(solve_exact(std::vector<std::vector<long>>{{1, 2}, {2, 4}}, {1, 1}), SingularMatrix);
    CHECK_THROWS_AS(solve_exact(std::vector<std::vector<long>>{{0}}, {1}), SingularMatrix);
    // Needs a row swap.
    CHECK(solve_exact(std::vector<std::vector<long>>{{0, 1}, {1, 0}}, {5, 6}) == RatVector{6, 5});
}

TEST_CASE("solve_exact agrees with the adjugate formula") {
    std::mt19937_64 rng(11);
    std::uniform_int_distribution<long> coef(-9, 9);
    int done = 0;
    while (done < 200) {
        const std::size_t n = 1 + rng() % 4;
        IntMatrix a(n, IntVector(n));
        IntVector v(n);
        for (auto& r : a)
            for (auto& x : r) x = coef(rng);
        for (auto& x : v) x = coef(rng);
        if (det_cofactor(a) == 0) {
            CHECK_THROWS_AS(solve_exact(a, v), SingularMatrix);
            continue;
        }
        CHECK(determinant(a) == det_cofactor(a));
        CHECK(solve_exact(a, v) == adjugate_solve(a, v));
        ++done;
    }
}

TEST_CASE("solve_exact round trip up to 8x8") {
    std::mt19937_64 rng(5);
    std::uniform_int_distribution<long> coef(-50, 50);
    int done = 0;
    while (done < 1000) {
        const std::size_t n = 1 + rng() % 8;
        IntMatrix a(n, IntVector(n));
        IntVector v(n);
        for (auto& r : a)
            for (auto& x : r) x = coef(rng);
        for (auto& x : v) x = coef(rng);
        if (determinant(a) == 0) continue;
        const RatVector x = solve_exact(a, v);
        for (std::size_t i = 0; i < n; ++i) {
            mpq_class s = 0;
            for (std::size_t j = 0; j < n; ++j) s += mpq_class(a[i][j]) * x[j];
            CHECK(s == mpq_class(v[i]));
        }
        ++done;
    }
}

TEST_CASE("select_primes") {
    auto c11 = pool_for(11);
    std::vector<CurveRecord> one{c11[0]};
    auto sel = select_primes(one, 11);
    CHECK(sel.primes == std::vector<long>{5});
    CHECK(sel.matrix == std::vector<std::vector<long>>{{1}});
    CHECK(sel.inverse[0][0] == 1);
    CHECK(sel.extra_primes == std::vector<long>{7, 13, 17});

    auto empty = select_primes({}, 11);
    CHECK(empty.size() == 0);
    CHECK(empty.primes.empty());

    // 11a1..11a3 are isogenous; only 11a1 survives.
    auto s11 = select_primes(c11, 11);
    CHECK(s11.size() == 5);
    CHECK(s11.curves[0].label == "11a1");
    std::vector<CurveRecord> dup{c11[0], c11[0], c11[1]};
    dup[1].label = "11zz";
    CHECK(select_primes(dup, 11).size() == 1);

    for (int n : {10, 14, 15, 28}) {
        auto s = select_primes(pool_for(n), n);
        const std::size_t m = s.size();
        CHECK(s.matrix.size() == m);
        CHECK(std::is_sorted(s.primes.begin(), s.primes.end()));
        for (long p : s.primes) CHECK(admissible_prime(p, n));
        CHECK(determinant(to_mpz(s.matrix)) != 0);
        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t j = 0; j < m; ++j) {
                mpq_class t = 0;
                for (std::size_t k = 0; k < m; ++k) t += s.matrix[i][k] * s.inverse[k][j];
                CHECK(t == (i == j ? 1 : 0));
            }
    }

    SelectOptions tight;
    tight.bound = 5;
    CHECK_THROWS_AS(select_primes(pool_for(14), 14, tight), InsufficientPrimes);
}

TEST_CASE("test_cd examples") {
    auto full = full_group(11);
    auto sel11 = select_primes(pool_for(11), 11);
    auto triv = test_cd(full, sel11, curve_invariants(full));
    CHECK(triv.status == CdStatus::TriviallyCD);
    CHECK(triv.e.empty());

    auto g0 = borel_subgroup(11);
    auto c = test_cd(g0, sel11, curve_invariants(g0));
    REQUIRE(c.status == CdStatus::CandidateCD);
    REQUIRE(c.labels[0] == "11a1");
    CHECK(c.e == std::vector<long>{1, 0, 0, 0, 0});
    auto j = certificate_json(c);
    CHECK(j["status"] == "CandidateCD");
    CHECK(j["e"]["11a1"] == 1);
    CHECK(j["primes"].size() == 5);

    auto g23 = borel_subgroup(23);
    auto inv23 = curve_invariants(g23);
    CHECK(inv23.genus == 2);
    auto c23 = test_cd(g23, select_primes(pool_for(23), 23), inv23);
    CHECK(c23.status == CdStatus::Refuted);
    CHECK(c23.witness.kind == WitnessKind::EmptyPool);
    CHECK(certificate_json(c23)["witness"]["kind"] == "EmptyPool");

    auto g28 = borel_subgroup(28);
    auto c28 = test_cd(g28, select_primes(pool_for(28), 28), curve_invariants(g28));
    CHECK(c28.status == CdStatus::CandidateCD);
    long sum = 0;
    for (long x : c28.e) sum += x;
    CHECK(sum == 2);
}

TEST_CASE("witness order is fixed") {
    auto c11 = pool_for(11);
    auto sel = select_primes(c11, 11);
    auto g0 = borel_subgroup(11);
    CurveInvariants inv = curve_invariants(g0);
    // Fake Jacobian traces to drive each branch.
    auto half = [&](const SubgroupRep&, long p) {
        return p == sel.primes[0] ? sel.matrix[0][0] + 1 : 0L;
    };
    auto c = test_cd(g0, sel, inv, half);
    CHECK(c.status == CdStatus::Refuted);
    CHECK((c.witness.kind == WitnessKind::NonIntegralEntry || c.witness.kind == WitnessKind::NegativeEntry));

    // Twice the true traces: e = 2 at 11a1, genus sum 2 != 1.
    auto twice = [](const SubgroupRep& h, long p) { return 2 * ap_jacobian(h, p); };
    auto c2 = test_cd(g0, sel, inv, twice);
    CHECK(c2.witness.kind == WitnessKind::GenusSumMismatch);
    CHECK(c2.witness.sum == 2);
    CHECK(c2.witness.genus == 1);

    inv.genus = 2;
    auto c3 = test_cd(g0, sel, inv, twice);
    CHECK(c3.status == CdStatus::CandidateCD);

    // Agrees on the selection primes only.
    std::vector<long> sel_primes = sel.primes;
    auto off = [&](const SubgroupRep& h, long p) {
        const bool used = std::find(sel_primes.begin(), sel_primes.end(), p) != sel_primes.end();
        return ap_jacobian(h, p) + (used ? 0 : 1);
    };
    auto c4 = test_cd(g0, sel, curve_invariants(g0), off);
    CHECK(c4.witness.kind == WitnessKind::ExtraPrimeMismatch);
    CHECK(c4.witness.prime == sel.extra_primes[0]);
    CHECK(c4.witness.lhs == c4.witness.rhs + 1);
}

TEST_CASE("verify_candidate") {
    auto sel = select_primes(pool_for(11), 11);
    auto g0 = borel_subgroup(11);
    auto c = test_cd(g0, sel, curve_invariants(g0));
    auto rep = verify_candidate(g0, c.e, sel, 100);
    CHECK(rep.ok());
    CHECK(rep.heuristic);
    CHECK(rep.checked.front() == 5);
    CHECK(rep.checked.back() == 97);

    std::vector<long> bad = c.e;
    bad[0] = 0;
    bad[1] = 1;
    auto rep2 = verify_candidate(g0, bad, sel, 100);
    REQUIRE(!rep2.ok());
    // First admissible prime where the traces of the two classes differ.
    long first = 0;
    for (long p = 5; p <= 100 && !first; ++p)
        if (admissible_prime(p, 11) && ec_ap(sel.curves[0].coeffs, p) != ec_ap(sel.curves[1].coeffs, p)) first = p;
    CHECK(rep2.violations[0].prime == first);

    const long top = *std::max_element(sel.primes.begin(), sel.primes.end());
    auto rep3 = verify_candidate(g0, c.e, sel, top - 1);
    for (long p : rep3.checked) CHECK(p <= top - 1);
}

TEST_CASE("certificates are conjugation invariant and refutations are sound") {
    for (int n : {6, 7, 8, 10}) {
        auto sel = select_primes(pool_for(n), n);
        auto lat = build_level_lattice(n);
        std::mt19937_64 rng(static_cast<unsigned long>(n));
        const auto& ctx = lat.classes[0].context();
        for (const auto& h : lat.classes) {
            const auto inv = curve_invariants(h);
            const auto c = test_cd(h, sel, inv);
            const uint32_t g = static_cast<uint32_t>(rng() % ctx.order());
            const auto hc = conjugate_subgroup(h, g);
            if (hc.det_surjective()) {
                const auto c2 = test_cd(hc, sel, curve_invariants(hc));
                CHECK(certificate_json(c) == certificate_json(c2));
            }
            if (c.status == CdStatus::CandidateCD) {
                long s = 0;
                for (long x : c.e) s += x;
                CHECK(s == inv.genus);
            }
            const bool solver_stage = c.status == CdStatus::Refuted && c.witness.kind != WitnessKind::EmptyPool;
            if (solver_stage && sel.size() <= 3 && inv.genus <= 4) {
                std::vector<long> v;
                for (long p : sel.primes) v.push_back(ap_jacobian(h, p));
                for (long p : sel.extra_primes) v.push_back(ap_jacobian(h, p));
                // Every e in [0, g]^m violates the square or extra system.
                const std::size_t m = sel.size();
                std::vector<long> e(m, 0);
                bool found = false;
                while (true) {
                    bool ok = true;
                    for (std::size_t i = 0; i < m && ok; ++i) {
                        long r = 0;
                        for (std::size_t j = 0; j < m; ++j) r += sel.matrix[i][j] * e[j];
                        ok = r == v[i];
                    }
                    for (std::size_t k = 0; k < sel.extra_primes.size() && ok; ++k) {
                        long r = 0;
                        for (std::size_t j = 0; j < m; ++j) r += sel.extra_rows[k][j] * e[j];
                        ok = r == v[m + k];
                    }
                    long s = 0;
                    for (long x : e) s += x;
                    found = found || (ok && s == inv.genus);
                    std::size_t i = 0;
                    while (i < m && e[i] == inv.genus) e[i++] = 0;
                    if (i == m) break;
                    ++e[i];
                }
                CHECK(!found);
            }
        }
    }
}

TEST_CASE("sampled monotonicity along the lattice") {
    for (int n : {6, 8, 9, 10}) {
        auto sel = select_primes(pool_for(n), n);
        auto lat = build_level_lattice(n);
        std::vector<DecompositionCertificate> certs;
        for (const auto& h : lat.classes) certs.push_back(test_cd(h, sel, curve_invariants(h)));
        int pairs = 0;
        for (std::size_t k = 0; k < lat.classes.size(); ++k)
            for (int parent : lat.parents[k]) {
                const auto& ck = certs[k];
                const auto& ch = certs[static_cast<std::size_t>(parent)];
                ++pairs;
                if (ch.status == CdStatus::Refuted) CHECK(ck.status == CdStatus::Refuted);
                if (ch.status == CdStatus::CandidateCD && ck.status == CdStatus::CandidateCD)
                    for (std::size_t i = 0; i < ch.e.size(); ++i) CHECK(ch.e[i] <= ck.e[i]);
            }
        CHECK(pairs > 0);
    }
}
