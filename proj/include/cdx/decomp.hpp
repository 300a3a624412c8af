#pragma once

#include <gmpxx.h>

#include <functional>
#include <json.hpp>
#include <string>
#include <vector>

#include "cdx/ecdb.hpp"
#include "cdx/invariants.hpp"

namespace cdx {

using IntMatrix = std::vector<std::vector<mpz_class>>;
using IntVector = std::vector<mpz_class>;
using RatVector = std::vector<mpq_class>;

// Unique solution of A e = v by Bareiss elimination; re-checked exactly.
// Throws SingularMatrix.
RatVector solve_exact(const IntMatrix& a, const IntVector& v);
RatVector solve_exact(const std::vector<std::vector<long>>& a, const std::vector<long>& v);
mpz_class determinant(const IntMatrix& a);

// Admissible for level N: prime, p >= 5, p does not divide N.
bool admissible_prime(long p, int n);

// Keeps the least label among records sharing an a_p vector over the
// admissible primes up to `bound`. Output sorted by label.
std::vector<CurveRecord> dedup_by_ap(const std::vector<CurveRecord>& curves, int n, long bound, ApCache* cache = nullptr);

struct PrimeSelection {
    int modulus = 1;
    std::vector<CurveRecord> curves;
    std::vector<long> primes;
    // matrix[i][j] = a_{primes[i]}(curves[j])
    std::vector<std::vector<long>> matrix;
    std::vector<std::vector<mpq_class>> inverse;
    std::vector<long> extra_primes;
    std::vector<std::vector<long>> extra_rows;

    std::size_t size() const { return curves.size(); }
};

struct SelectOptions {
    long bound = 8192;
    int extra = 3;
    // Primes used to decide a_p-vector equality before selection.
    long dedup_bound = 200;
};

// Deduplicates `curves`, then scans admissible primes in increasing order,
// keeping a prime when its a_p row raises the rank. Throws
// InsufficientPrimes when the bound is reached first.
PrimeSelection select_primes(const std::vector<CurveRecord>& curves, int n, const SelectOptions& opt = {},
                             ApCache* cache = nullptr);

enum class CdStatus { TriviallyCD, CandidateCD, Refuted };
std::string to_string(CdStatus s);

enum class WitnessKind { None, NonIntegralEntry, NegativeEntry, GenusSumMismatch, ExtraPrimeMismatch, EmptyPool };
std::string to_string(WitnessKind k);

struct Witness {
    WitnessKind kind = WitnessKind::None;
    long index = -1;
    mpq_class value;
    long sum = 0;
    long genus = 0;
    long prime = 0;
    long lhs = 0;
    long rhs = 0;
};

struct DecompositionCertificate {
    CdStatus status = CdStatus::Refuted;
    std::vector<long> e;
    std::vector<std::string> labels;
    std::vector<long> primes;
    std::vector<long> extra_primes;
    Witness witness;
};

// a_p(J_H); defaults to the point-count formula.
using JacobianAp = std::function<long(const SubgroupRep&, long)>;

DecompositionCertificate test_cd(const SubgroupRep& h, const PrimeSelection& sel, const CurveInvariants& inv,
                                 const JacobianAp& ap = {});

nlohmann::json certificate_json(const DecompositionCertificate& c);

struct ConsistencyReport {
    // Heuristic: agreement of traces up to the bound, not a proof.
    bool heuristic = true;
    long bound = 0;
    std::vector<long> checked;
    struct Violation {
        long prime;
        long lhs;
        long rhs;
    };
    std::vector<Violation> violations;

    bool ok() const { return violations.empty(); }
};

ConsistencyReport verify_candidate(const SubgroupRep& h, const std::vector<long>& e, const PrimeSelection& sel,
                                   long bound, const JacobianAp& ap = {}, ApCache* cache = nullptr);

} // namespace cdx
