#pragma once

#include <utility>
#include <vector>

#include "cdx/subgroup.hpp"

namespace cdx {

struct CurveInvariants {
    int level = 1;
    long index = 1;
    int nu2 = 0;
    int nu3 = 0;
    int cusps = 1;
    int genus = 0;

    friend bool operator==(const CurveInvariants&, const CurveInvariants&) = default;
};

// How Frobenius at p permutes cusp representatives s (cosets of H ∩ SL2):
// s -> h s D with det h = det(D)^-1. The default is D = diag(1, p).
enum class CuspAction { RightDiag1p, RightDiagp1 };

// Geometric data of X_H computed once from the SL2 coset space of H ∩ SL2.
class ModularCurveData {
public:
    explicit ModularCurveData(const SubgroupRep& h, CuspAction action = CuspAction::RightDiag1p);

    const CurveInvariants& invariants() const { return inv_; }
    // Number of cusps fixed by Frobenius at p; throws BadPrime when p | N.
    int rational_cusps(long p) const;

private:
    CurveInvariants inv_;
    int modulus_ = 1;
    // Indexed by p mod N; -1 for non-units.
    std::vector<int> rational_by_residue_;
};

long psl2_index(const SubgroupRep& h);
std::pair<int, int> elliptic_point_counts(const SubgroupRep& h);
int cusp_count(const SubgroupRep& h);
int genus(const SubgroupRep& h);
CurveInvariants curve_invariants(const SubgroupRep& h);
int rational_cusp_count(const SubgroupRep& h, long p);

} // namespace cdx
