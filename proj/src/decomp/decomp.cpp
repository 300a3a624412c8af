#include "cdx/decomp.hpp"

#include <algorithm>
#include <map>

#include "cdx/errors.hpp"
#include "cdx/frobenius.hpp"

namespace cdx {

namespace {

bool is_prime(long n) {
    if (n < 2) return false;
    for (long d = 2; d * d <= n; ++d)
        if (n % d == 0) return false;
    return true;
}

// Bareiss elimination on the augmented matrix [A | rhs...] in place, with row
// pivoting. Returns the sign-corrected determinant of A; zero when singular.
mpz_class bareiss(IntMatrix& m, std::size_t n) {
    mpz_class prev = 1;
    int sign = 1;
    const std::size_t cols = n == 0 ? 0 : m[0].size();
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t piv = k;
        while (piv < n && m[piv][k] == 0) ++piv;
        if (piv == n) return 0;
        if (piv != k) {
            std::swap(m[piv], m[k]);
            sign = -sign;
        }
        for (std::size_t i = k + 1; i < n; ++i) {
            for (std::size_t j = k + 1; j < cols; ++j) {
                mpz_class t = m[i][j] * m[k][k] - m[i][k] * m[k][j];
                mpz_divexact(t.get_mpz_t(), t.get_mpz_t(), prev.get_mpz_t());
                m[i][j] = t;
            }
            m[i][k] = 0;
        }
        prev = m[k][k];
    }
    return n == 0 ? mpz_class(1) : mpz_class(sign * m[n - 1][n - 1]);
}

long default_ap(const SubgroupRep& h, long p) { return ap_jacobian(h, p); }

} // namespace

mpz_class determinant(const IntMatrix& a) {
    IntMatrix m = a;
    for (const auto& row : m)
        if (row.size() != m.size()) throw ConstraintViolation("determinant of a non-square matrix");
    return bareiss(m, m.size());
}

RatVector solve_exact(const IntMatrix& a, const IntVector& v) {
    const std::size_t n = a.size();
    if (v.size() != n) throw ConstraintViolation("solve_exact: dimension mismatch");
    IntMatrix m(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (a[i].size() != n) throw ConstraintViolation("solve_exact: matrix is not square");
        m[i] = a[i];
        m[i].push_back(v[i]);
    }
    if (bareiss(m, n) == 0) throw SingularMatrix("matrix of size " + std::to_string(n) + " is singular");
    RatVector x(n);
    for (std::size_t k = n; k-- > 0;) {
        mpq_class s(m[k][n]);
        for (std::size_t j = k + 1; j < n; ++j) s -= mpq_class(m[k][j]) * x[j];
        x[k] = s / mpq_class(m[k][k]);
        x[k].canonicalize();
    }
    for (std::size_t i = 0; i < n; ++i) {
        mpq_class s = 0;
        for (std::size_t j = 0; j < n; ++j) s += mpq_class(a[i][j]) * x[j];
        if (s != mpq_class(v[i])) throw InternalInconsistency("solve_exact: residual check failed");
    }
    return x;
}

RatVector solve_exact(const std::vector<std::vector<long>>& a, const std::vector<long>& v) {
    IntMatrix m;
    for (const auto& row : a) {
        m.emplace_back();
        for (long x : row) m.back().emplace_back(x);
    }
    IntVector w;
    for (long x : v) w.emplace_back(x);
    return solve_exact(m, w);
}

bool admissible_prime(long p, int n) { return p >= 5 && is_prime(p) && n % p != 0; }

std::vector<CurveRecord> dedup_by_ap(const std::vector<CurveRecord>& curves, int n, long bound, ApCache* cache) {
    std::vector<long> primes;
    for (long p = 5; p <= bound; ++p)
        if (admissible_prime(p, n)) primes.push_back(p);
    std::vector<CurveRecord> sorted = curves;
    std::stable_sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) { return a.label < b.label; });
    const auto rows = ap_rows(sorted, primes, cache);
    std::map<std::vector<long>, std::size_t> first;
    std::vector<CurveRecord> out;
    for (std::size_t j = 0; j < sorted.size(); ++j) {
        std::vector<long> col;
        for (const auto& r : rows) col.push_back(r[j]);
        if (first.emplace(col, j).second) out.push_back(sorted[j]);
    }
    return out;
}

PrimeSelection select_primes(const std::vector<CurveRecord>& curves, int n, const SelectOptions& opt, ApCache* cache) {
    PrimeSelection sel;
    sel.modulus = n;
    sel.curves = dedup_by_ap(curves, n, opt.dedup_bound, cache);
    const std::size_t m = sel.curves.size();

    // Echelon basis over Q of the rows accepted so far; pivot column per row.
    std::vector<std::vector<mpq_class>> basis;
    std::vector<std::size_t> pivots;
    long p = 4;
    while (basis.size() < m) {
        ++p;
        if (p > opt.bound)
            throw InsufficientPrimes("rank " + std::to_string(basis.size()) + " of " + std::to_string(m) +
                                     " reached with primes up to " + std::to_string(opt.bound));
        if (!admissible_prime(p, n)) continue;
        const std::vector<long> row = ap_rows(sel.curves, {p}, cache)[0];
        std::vector<mpq_class> r(row.begin(), row.end());
        for (std::size_t b = 0; b < basis.size(); ++b) {
            const mpq_class f = r[pivots[b]];
            if (f == 0) continue;
            for (std::size_t j = 0; j < m; ++j) r[j] -= f * basis[b][j];
        }
        std::size_t piv = 0;
        while (piv < m && r[piv] == 0) ++piv;
        if (piv == m) continue;
        const mpq_class lead = r[piv];
        for (auto& x : r) x /= lead;
        for (auto& b : basis) {
            const mpq_class f = b[piv];
            if (f == 0) continue;
            for (std::size_t j = 0; j < m; ++j) b[j] -= f * r[j];
        }
        basis.push_back(std::move(r));
        pivots.push_back(piv);
        sel.primes.push_back(p);
        sel.matrix.push_back(row);
    }

    sel.inverse.assign(m, std::vector<mpq_class>(m));
    for (std::size_t c = 0; c < m; ++c) {
        std::vector<long> unit(m, 0);
        unit[c] = 1;
        const RatVector col = solve_exact(sel.matrix, unit);
        for (std::size_t r = 0; r < m; ++r) sel.inverse[r][c] = col[r];
    }

    long q = sel.primes.empty() ? 4 : sel.primes.back();
    while (static_cast<int>(sel.extra_primes.size()) < opt.extra) {
        ++q;
        if (!admissible_prime(q, n)) continue;
        sel.extra_primes.push_back(q);
        sel.extra_rows.push_back(ap_rows(sel.curves, {q}, cache)[0]);
    }
    return sel;
}

std::string to_string(CdStatus s) {
    switch (s) {
    case CdStatus::TriviallyCD: return "TriviallyCD";
    case CdStatus::CandidateCD: return "CandidateCD";
    case CdStatus::Refuted: return "Refuted";
    }
    return "?";
}

std::string to_string(WitnessKind k) {
    switch (k) {
    case WitnessKind::None: return "None";
    case WitnessKind::NonIntegralEntry: return "NonIntegralEntry";
    case WitnessKind::NegativeEntry: return "NegativeEntry";
    case WitnessKind::GenusSumMismatch: return "GenusSumMismatch";
    case WitnessKind::ExtraPrimeMismatch: return "ExtraPrimeMismatch";
    case WitnessKind::EmptyPool: return "EmptyPool";
    }
    return "?";
}

DecompositionCertificate test_cd(const SubgroupRep& h, const PrimeSelection& sel, const CurveInvariants& inv,
                                 const JacobianAp& ap_in) {
    const JacobianAp ap = ap_in ? ap_in : JacobianAp(default_ap);
    DecompositionCertificate c;
    for (const auto& r : sel.curves) c.labels.push_back(r.label);
    c.primes = sel.primes;
    c.extra_primes = sel.extra_primes;
    const long g = inv.genus;
    if (g == 0) {
        c.status = CdStatus::TriviallyCD;
        return c;
    }
    c.status = CdStatus::Refuted;
    if (sel.size() == 0) {
        c.witness.kind = WitnessKind::EmptyPool;
        c.witness.genus = g;
        return c;
    }
    std::vector<long> v;
    for (long p : sel.primes) v.push_back(ap(h, p));
    const RatVector x = solve_exact(sel.matrix, v);

    for (std::size_t i = 0; i < x.size(); ++i)
        if (x[i].get_den() != 1) {
            c.witness.kind = WitnessKind::NonIntegralEntry;
            c.witness.index = static_cast<long>(i);
            c.witness.value = x[i];
            return c;
        }
    for (std::size_t i = 0; i < x.size(); ++i)
        if (x[i] < 0) {
            c.witness.kind = WitnessKind::NegativeEntry;
            c.witness.index = static_cast<long>(i);
            c.witness.value = x[i];
            return c;
        }
    std::vector<long> e;
    long sum = 0;
    for (const auto& xi : x) {
        const mpz_class z = xi.get_num();
        if (!z.fits_slong_p()) throw InternalInconsistency("multiplicity out of range");
        e.push_back(z.get_si());
        sum += e.back();
    }
    if (sum != g) {
        c.witness.kind = WitnessKind::GenusSumMismatch;
        c.witness.sum = sum;
        c.witness.genus = g;
        return c;
    }
    for (std::size_t k = 0; k < sel.extra_primes.size(); ++k) {
        const long lhs = ap(h, sel.extra_primes[k]);
        long rhs = 0;
        for (std::size_t j = 0; j < e.size(); ++j) rhs += e[j] * sel.extra_rows[k][j];
        if (lhs != rhs) {
            c.witness.kind = WitnessKind::ExtraPrimeMismatch;
            c.witness.prime = sel.extra_primes[k];
            c.witness.lhs = lhs;
            c.witness.rhs = rhs;
            return c;
        }
    }
    c.status = CdStatus::CandidateCD;
    c.e = std::move(e);
    return c;
}

nlohmann::json certificate_json(const DecompositionCertificate& c) {
    nlohmann::json j;
    j["status"] = to_string(c.status);
    nlohmann::json e = nlohmann::json::object();
    if (c.status == CdStatus::CandidateCD)
        for (std::size_t i = 0; i < c.e.size(); ++i) e[c.labels[i]] = c.e[i];
    j["e"] = e;
    j["primes"] = c.primes;
    j["extra_primes"] = c.extra_primes;
    nlohmann::json w = nlohmann::json::object();
    const Witness& t = c.witness;
    if (c.status == CdStatus::Refuted) {
        w["kind"] = to_string(t.kind);
        switch (t.kind) {
        case WitnessKind::NonIntegralEntry:
        case WitnessKind::NegativeEntry:
            w["index"] = t.index;
            w["label"] = c.labels.at(static_cast<std::size_t>(t.index));
            w["value"] = t.value.get_str();
            break;
        case WitnessKind::GenusSumMismatch:
            w["sum"] = t.sum;
            w["genus"] = t.genus;
            break;
        case WitnessKind::ExtraPrimeMismatch:
            w["p"] = t.prime;
            w["lhs"] = t.lhs;
            w["rhs"] = t.rhs;
            break;
        case WitnessKind::EmptyPool:
            w["genus"] = t.genus;
            break;
        case WitnessKind::None:
            break;
        }
    }
    j["witness"] = w;
    return j;
}

ConsistencyReport verify_candidate(const SubgroupRep& h, const std::vector<long>& e, const PrimeSelection& sel,
                                   long bound, const JacobianAp& ap_in, ApCache* cache) {
    if (e.size() != sel.size()) throw ConstraintViolation("multiplicity vector does not match the pool");
    const JacobianAp ap = ap_in ? ap_in : JacobianAp(default_ap);
    ConsistencyReport rep;
    rep.bound = bound;
    for (long p = 5; p <= bound; ++p) {
        if (!admissible_prime(p, sel.modulus)) continue;
        const std::vector<long> row = ap_rows(sel.curves, {p}, cache)[0];
        long rhs = 0;
        for (std::size_t j = 0; j < e.size(); ++j) rhs += e[j] * row[j];
        const long lhs = ap(h, p);
        rep.checked.push_back(p);
        if (lhs != rhs) rep.violations.push_back({p, lhs, rhs});
    }
    return rep;
}

} // namespace cdx
