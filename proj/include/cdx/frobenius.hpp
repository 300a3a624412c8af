#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <utility>
#include <vector>

#include "cdx/invariants.hpp"
#include "cdx/subgroup.hpp"

namespace cdx {

struct WeierstrassCurve {
    long a1 = 0, a2 = 0, a3 = 0, a4 = 0, a6 = 0;

    friend bool operator==(const WeierstrassCurve&, const WeierstrassCurve&) = default;
};

// Discriminant of the model. Returned as a decimal string to avoid overflow.
std::string discriminant_string(const WeierstrassCurve& e);
bool has_good_reduction(const WeierstrassCurve& e, long p);

// #E(F_p) including the point at infinity. Throws BadReduction.
long ec_point_count(const WeierstrassCurve& e, long p);
long ec_ap(const WeierstrassCurve& e, long p);

struct FrobeniusClass {
    int modulus = 1;
    Mat2 rep;
    int trace = 0;
    int det = 0;
};

// One (trace, order) pair: a^2 - 4p = b^2 disc, with h(disc) curves, each
// with |Aut| = w(disc). Weight of the entry is h / w.
struct TraceWeightEntry {
    long a = 0;
    long b = 1;
    long disc = 0;
    long h = 0;
    int w = 2;
};

struct TraceWeightTable {
    long p = 0;
    std::vector<TraceWeightEntry> entries;

    // Sum of h: number of F_p-isomorphism classes of elliptic curves.
    long class_total() const;
    // Sum of 12 h / w; equals 12 p.
    long mass12() const;
};

// Primitive reduced binary quadratic forms of discriminant disc < 0.
long class_number(long disc);
// Unit count of the quadratic order of discriminant disc.
int unit_count(long disc);
TraceWeightTable hurwitz_weights(long p);

FrobeniusClass duke_toth_matrix(long a, long b, long disc, long p, int n);

struct OracleLimits {
    int max_modulus = 10;
    long max_prime = 50;
};

// Frobenius on E[N] computed from an explicit torsion basis over an
// extension of F_p. Slow; for validation only. Requires p >= 5.
FrobeniusClass torsion_frobenius(const WeierstrassCurve& e, long p, int n, const OracleLimits& limits = {});

// Largest j <= max_j such that Frobenius acts on E[ell^j] as a scalar,
// decided by x-coordinate tests against division polynomials.
int scalar_depth(const WeierstrassCurve& e, long p, int ell, int max_j);

// The part of b (with a^2 - 4p = b^2 disc, b the index of Z[Frobenius] in
// End(E)) supported on primes dividing n, read off scalar depths.
long frobenius_conductor_part(const WeierstrassCurve& e, long p, int n);
// duke_toth_matrix for E, with b from frobenius_conductor_part.
FrobeniusClass duke_toth_for_curve(const WeierstrassCurve& e, long p, int n);

// #{cosets H g : g A g^-1 in H} over the full GL2 coset table of H.
long fixed_cosets(const CosetTable& table, const FrobeniusClass& a);

// Per-level Frobenius data: for each good prime p, the weight 12 h / w of
// every conjugacy class of GL2(Z/NZ) met by Frobenius. Built once per prime
// under a lock; read-only afterwards.
class FrobeniusLevelContext {
public:
    explicit FrobeniusLevelContext(int n);

    int modulus() const { return n_; }
    // (class index, weight12) pairs.
    const std::vector<std::pair<int, long>>& class_weights(long p) const;
    void warm(const std::vector<long>& primes) const;

    long point_count(const SubgroupRep& h, long p) const;
    long point_count(const SubgroupRep& h, const ModularCurveData& data, long p) const;
    long ap(const SubgroupRep& h, long p) const;
    long ap(const SubgroupRep& h, const ModularCurveData& data, long p) const;

private:
    int n_;
    std::shared_ptr<const Gl2Context> ctx_;
    mutable std::mutex mu_;
    mutable std::map<long, std::unique_ptr<std::vector<std::pair<int, long>>>> weights_;
};

// #X_H(F_p) for p > 3, p not dividing N. H must be det-surjective with -I.
long point_count_XH(const SubgroupRep& h, long p);
long ap_jacobian(const SubgroupRep& h, long p);

// In-memory a_p cache keyed by (curve label or class key, p), persisted as
// CSV `key,p,ap`.
class ApCache {
public:
    void load(const std::string& path);
    void save(const std::string& path) const;
    bool get(const std::string& key, long p, long& ap) const;
    void put(const std::string& key, long p, long ap);
    std::size_t size() const;

private:
    mutable std::mutex mu_;
    std::map<std::pair<std::string, long>, long> values_;
};

} // namespace cdx
