#include "cdx/invariants.hpp"

#include <numeric>

#include "cdx/errors.hpp"

namespace cdx {

namespace {

void check_constraints(const SubgroupRep& h) {
    if (!h.det_surjective()) throw ConstraintViolation("subgroup is not det-surjective");
    if (!h.contains_minus_identity()) throw ConstraintViolation("subgroup does not contain -I");
}

// Cusp id for every coset: orbits of right multiplication by T.
std::vector<int> cusp_orbits(const std::vector<int>& t_perm, int& count) {
    std::vector<int> id(t_perm.size(), -1);
    count = 0;
    for (std::size_t i = 0; i < t_perm.size(); ++i) {
        if (id[i] >= 0) continue;
        for (int j = static_cast<int>(i); id[j] < 0; j = t_perm[j]) id[j] = count;
        ++count;
    }
    return id;
}

} // namespace

ModularCurveData::ModularCurveData(const SubgroupRep& h, CuspAction action) : modulus_(h.modulus()) {
    check_constraints(h);
    const int n = h.modulus();
    rational_by_residue_.assign(static_cast<std::size_t>(n), -1);
    if (n == 1) {
        inv_ = CurveInvariants{1, 1, 1, 1, 1, 0};
        rational_by_residue_[0] = 1;
        return;
    }
    const Gl2Context& ctx = h.context();
    const std::vector<uint32_t> gamma = sl2_part(h);
    const Mat2 s = make_mat(0, -1, 1, 0, n);
    const Mat2 m = make_mat(0, -1, 1, 1, n);
    const Mat2 t = make_mat(1, 1, 0, 1, n);
    CosetTable table(h.context_ptr(), gamma, CosetTable::Ambient::SL2, {s, m, t});

    const long index = static_cast<long>(table.size());
    if (static_cast<unsigned long long>(index) * h.order() != group_order(n))
        throw InternalInconsistency("GL2 and SL2 indices disagree");

    int nu2 = 0, nu3 = 0;
    for (std::size_t i = 0; i < table.size(); ++i) {
        nu2 += table.permutation(0)[i] == static_cast<int>(i) ? 1 : 0;
        nu3 += table.permutation(1)[i] == static_cast<int>(i) ? 1 : 0;
    }
    int cusps = 0;
    const std::vector<int> cusp_of = cusp_orbits(table.permutation(2), cusps);

    const long twelve_g = 12 + index - 3L * nu2 - 4L * nu3 - 6L * cusps;
    if (twelve_g % 12 != 0 || twelve_g < 0)
        throw InternalInconsistency("genus formula is not a nonnegative integer");
    inv_ = CurveInvariants{h.level(), index, nu2, nu3, cusps, static_cast<int>(twelve_g / 12)};

    // One representative coset per cusp.
    std::vector<int> cusp_rep(static_cast<std::size_t>(cusps), -1);
    for (std::size_t i = 0; i < cusp_of.size(); ++i)
        if (cusp_rep[cusp_of[i]] < 0) cusp_rep[cusp_of[i]] = static_cast<int>(i);

    // An element of H with each determinant.
    std::vector<int32_t> with_det(static_cast<std::size_t>(n), -1);
    for (uint32_t e : h.elements())
        if (with_det[ctx.det(e)] < 0) with_det[ctx.det(e)] = static_cast<int32_t>(e);

    for (int d = 1; d < n; ++d) {
        if (!is_unit_mod(d, n)) continue;
        const Mat2 dm = action == CuspAction::RightDiag1p ? make_mat(1, 0, 0, d, n) : make_mat(d, 0, 0, 1, n);
        const uint32_t di = ctx.index_checked(dm);
        const uint32_t h0 = static_cast<uint32_t>(with_det[inverse_mod(d, n)]);
        int fixed = 0;
        for (int c = 0; c < cusps; ++c) {
            const uint32_t rep = table.reps()[static_cast<std::size_t>(cusp_rep[c])];
            const uint32_t img = ctx.mul(ctx.mul(h0, rep), di);
            fixed += cusp_of[static_cast<std::size_t>(table.coset_of(img))] == c ? 1 : 0;
        }
        rational_by_residue_[d] = fixed;
    }
}

int ModularCurveData::rational_cusps(long p) const {
    if (modulus_ > 1 && std::gcd(p, static_cast<long>(modulus_)) != 1)
        throw BadPrime(std::to_string(p) + " divides " + std::to_string(modulus_));
    return rational_by_residue_[static_cast<std::size_t>(p % modulus_)];
}

long psl2_index(const SubgroupRep& h) {
    check_constraints(h);
    return static_cast<long>(h.index());
}

std::pair<int, int> elliptic_point_counts(const SubgroupRep& h) {
    const CurveInvariants inv = ModularCurveData(h).invariants();
    return {inv.nu2, inv.nu3};
}

int cusp_count(const SubgroupRep& h) { return ModularCurveData(h).invariants().cusps; }

int genus(const SubgroupRep& h) { return ModularCurveData(h).invariants().genus; }

CurveInvariants curve_invariants(const SubgroupRep& h) { return ModularCurveData(h).invariants(); }

int rational_cusp_count(const SubgroupRep& h, long p) { return ModularCurveData(h).rational_cusps(p); }

} // namespace cdx
