#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "cdx/gl2.hpp"

namespace cdx {

// Subgroups with more elements than this are refused.
inline constexpr std::size_t kElementCap = std::size_t{1} << 20;

// A subgroup of GL2(Z/NZ), materialized as a sorted list of element indices
// of its ambient context together with the generators it was built from.
// Immutable once built.
class SubgroupRep {
public:
    SubgroupRep() = default;

    // Closure of `gens`. Throws OrderCapExceeded past `cap` elements.
    static SubgroupRep generate(std::shared_ptr<const Gl2Context> ctx, std::vector<uint32_t> gens,
                                std::size_t cap = kElementCap);
    // Wraps an already closed, sorted element list.
    static SubgroupRep from_elements(std::shared_ptr<const Gl2Context> ctx, std::vector<uint32_t> elems,
                                     std::vector<uint32_t> gens);
    // Greedy generating set read off the sorted element list.
    static SubgroupRep from_elements(std::shared_ptr<const Gl2Context> ctx, std::vector<uint32_t> elems);

    const Gl2Context& context() const { return *ctx_; }
    const std::shared_ptr<const Gl2Context>& context_ptr() const { return ctx_; }
    int modulus() const { return ctx_->modulus(); }
    const std::vector<uint32_t>& generators() const { return gens_; }
    const std::vector<uint32_t>& elements() const { return elems_; }
    const ElementMask& mask() const { return mask_; }
    bool contains(uint32_t i) const { return mask_.test(i); }
    bool contains(const Mat2& m) const;
    std::size_t order() const { return elems_.size(); }
    std::size_t index() const { return ctx_->order() / elems_.size(); }
    bool det_surjective() const { return det_surjective_; }
    bool contains_minus_identity() const { return contains_minus_identity_; }
    int level() const { return level_; }
    bool valid() const { return static_cast<bool>(ctx_); }

    // `N;a,b,c,d;...`
    std::string encode() const;
    std::vector<Mat2> generator_matrices() const;

    friend bool operator==(const SubgroupRep& x, const SubgroupRep& y) {
        return x.modulus() == y.modulus() && x.elems_ == y.elems_;
    }

private:
    void finish();

    std::shared_ptr<const Gl2Context> ctx_;
    std::vector<uint32_t> gens_;
    std::vector<uint32_t> elems_;
    ElementMask mask_;
    bool det_surjective_ = false;
    bool contains_minus_identity_ = false;
    int level_ = 1;
};

SubgroupRep generate_subgroup(const std::vector<Mat2>& gens, int n, std::size_t cap = kElementCap);
SubgroupRep parse_subgroup(const std::string& text);
SubgroupRep full_group(int n);
SubgroupRep trivial_group(int n);
SubgroupRep sl2_subgroup(int n);
SubgroupRep minus_identity_group(int n);
// Preimage of the upper-triangular matrices mod m inside GL2(Z/NZ).
SubgroupRep borel_subgroup(int n, int m = 0);

bool is_det_surjective(const SubgroupRep& h);
bool contains_minus_identity(const SubgroupRep& h);
int level_of(const SubgroupRep& h);
SubgroupRep reduce_subgroup(const SubgroupRep& h, int m);
SubgroupRep lift_subgroup(const SubgroupRep& h, int n);
SubgroupRep conjugate_subgroup(const SubgroupRep& h, uint32_t g);
// {g : g h g^-1 in H for all h in H}, computed inside the ambient group.
SubgroupRep normalizer(const SubgroupRep& h);
// H ∩ SL2 as a sorted element list.
std::vector<uint32_t> sl2_part(const SubgroupRep& h);

// Number of elements of H in each conjugacy class of the ambient group.
std::vector<uint32_t> class_distribution(const SubgroupRep& h);

std::optional<uint32_t> are_conjugate(const SubgroupRep& h1, const SubgroupRep& h2);
std::string canonical_class_key(const SubgroupRep& h);
// Key text for a subgroup that is already its own canonical conjugate.
std::string format_class_key(const SubgroupRep& canonical);
// The lexicographically least conjugate (by sorted element list).
SubgroupRep canonical_conjugate(const SubgroupRep& h);

// Right cosets H g of H in an ambient group (the full group or SL2).
class CosetTable {
public:
    enum class Ambient { GL2, SL2 };

    CosetTable(std::shared_ptr<const Gl2Context> ctx, const std::vector<uint32_t>& subgroup_elems,
               Ambient ambient, const std::vector<Mat2>& actors, std::size_t cap = kElementCap);

    std::size_t size() const { return reps_.size(); }
    const std::vector<uint32_t>& reps() const { return reps_; }
    int coset_of(uint32_t g) const { return coset_of_[g]; }
    // Permutation for the k-th registered actor: i -> coset of reps[i] * A.
    const std::vector<int>& permutation(std::size_t k) const { return perms_[k]; }
    // rep_i * A * rep_i^-1 in the subgroup?
    bool conjugate_in_subgroup(std::size_t i, uint32_t a) const;
    Ambient ambient() const { return ambient_; }
    const Gl2Context& context() const { return *ctx_; }

private:
    std::shared_ptr<const Gl2Context> ctx_;
    Ambient ambient_;
    ElementMask sub_mask_;
    std::vector<uint32_t> reps_;
    std::vector<int> coset_of_;
    std::vector<std::vector<int>> perms_;
};

CosetTable right_coset_action(const SubgroupRep& h, CosetTable::Ambient ambient, const std::vector<Mat2>& actors);

} // namespace cdx
