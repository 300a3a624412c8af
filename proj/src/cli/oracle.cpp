#include <numeric>
#include <random>

#include "cdx/cli.hpp"
#include "cdx/ecdb.hpp"
#include "cdx/lattice.hpp"

namespace cdx {

namespace {

bool is_prime(long n) {
    if (n < 2) return false;
    for (long d = 2; d * d <= n; ++d)
        if (n % d == 0) return false;
    return true;
}

int class_index(const FrobeniusClass& f) {
    auto ctx = Gl2Context::get(f.modulus);
    return ctx->classes().class_of[ctx->index_checked(f.rep)];
}

std::string describe(const WeierstrassCurve& e) {
    return "[" + std::to_string(e.a4) + "," + std::to_string(e.a6) + "]";
}

} // namespace

OracleReport run_oracle(const OracleOptions& opt) {
    OracleReport r;
    std::vector<long> primes;
    for (long p = 5; p <= opt.max_prime; ++p)
        if (is_prime(p)) primes.push_back(p);

    std::mt19937_64 rng(opt.seed);
    if (!primes.empty() && opt.max_level >= 2) {
        int attempts = 0;
        while (r.samples < opt.samples && attempts++ < 100 * opt.samples) {
            const int n = 2 + static_cast<int>(rng() % static_cast<unsigned>(opt.max_level - 1));
            const long p = primes[rng() % primes.size()];
            if (std::gcd(p, static_cast<long>(n)) != 1) continue;
            const WeierstrassCurve e{0, 0, 0, static_cast<long>(rng() % static_cast<unsigned long>(p)),
                                     static_cast<long>(rng() % static_cast<unsigned long>(p))};
            if (!has_good_reduction(e, p)) continue;
            ++r.samples;
            const long a = ec_ap(e, p);
            const long b = frobenius_conductor_part(e, p, n);
            const FrobeniusClass fast = duke_toth_matrix(opt.negate_trace ? -a : a, b, (a * a - 4 * p) / (b * b), p, n);
            OracleLimits lim;
            lim.max_modulus = std::max(10, opt.max_level);
            lim.max_prime = std::max(50L, opt.max_prime);
            const FrobeniusClass slow = torsion_frobenius(e, p, n, lim);
            if (class_index(fast) != class_index(slow)) {
                ++r.matrix_mismatches;
                r.failures.push_back("matrix: E=" + describe(e) + " p=" + std::to_string(p) + " N=" + std::to_string(n));
            }
        }
    }

    std::vector<CurveRecord> db;
    if (opt.max_level >= 2 && !primes.empty()) db = load_curve_csv(opt.curves_path);
    for (int n = 2; n <= opt.max_level && !primes.empty(); ++n) {
        const LevelLattice lat = build_level_lattice(n);
        const std::vector<CurveRecord> pool = curves_for_level(db, n);
        for (const SubgroupRep& h : lat.classes) {
            const ModularCurveData data(h);
            const int g = data.invariants().genus;
            if (g > 1) continue;
            std::vector<long> traces;
            std::vector<long> good;
            for (long p : primes) {
                if (n % p == 0) continue;
                good.push_back(p);
                traces.push_back(p + 1 - point_count_XH(h, p));
            }
            if (g == 0) {
                for (std::size_t i = 0; i < good.size(); ++i) {
                    ++r.genus0_checks;
                    if (traces[i] != 0) {
                        ++r.genus0_failures;
                        r.failures.push_back("genus 0: " + h.encode() + " p=" + std::to_string(good[i]));
                    }
                }
                continue;
            }
            ++r.genus1_checks;
            bool matched = false;
            for (const CurveRecord& c : pool) {
                bool same = true;
                for (std::size_t i = 0; i < good.size() && same; ++i) same = ec_ap(c.coeffs, good[i]) == traces[i];
                matched = matched || same;
            }
            if (!matched) {
                ++r.genus1_failures;
                r.failures.push_back("genus 1: no pool curve matches " + h.encode());
            }
        }
    }
    return r;
}

} // namespace cdx
