#pragma once

#include <cstdint>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

namespace cdx {

// A 2x2 matrix over Z/NZ, row-major [[a, b], [c, d]], entries in [0, N).
struct Mat2 {
    int a = 0, b = 0, c = 0, d = 0;

    friend bool operator==(const Mat2&, const Mat2&) = default;
};

int mod_reduce(long long x, int n);
Mat2 make_mat(long long a, long long b, long long c, long long d, int n);
Mat2 mat_mul(const Mat2& x, const Mat2& y, int n);
int mat_det(const Mat2& x, int n);
int mat_trace(const Mat2& x, int n);
Mat2 mat_identity(int n);
// Throws NonUnitDeterminant when gcd(det, n) > 1.
Mat2 mat_inverse(const Mat2& x, int n);
Mat2 mat_pow(Mat2 x, unsigned long long k, int n);
// Least k >= 1 with x^k = I. x must be invertible.
unsigned long long element_order(const Mat2& x, int n);
bool is_unit_mod(long long x, int n);
int inverse_mod(long long x, int n);

// |GL2(Z/NZ)|.
unsigned long long group_order(int n);
// |SL2(Z/NZ)|.
unsigned long long sl2_order(int n);
std::vector<int> prime_divisors(int n);

// Fixed-size bit set over the element indices of one ambient group.
class ElementMask {
public:
    ElementMask() = default;
    explicit ElementMask(std::size_t n) : words_((n + 63) / 64, 0) {}
    bool test(std::size_t i) const { return (words_[i >> 6] >> (i & 63)) & 1u; }
    void set(std::size_t i) { words_[i >> 6] |= (std::uint64_t{1} << (i & 63)); }
    void reset(std::size_t i) { words_[i >> 6] &= ~(std::uint64_t{1} << (i & 63)); }
    bool empty_storage() const { return words_.empty(); }
    friend bool operator==(const ElementMask&, const ElementMask&) = default;

private:
    std::vector<std::uint64_t> words_;
};

class Gl2Context;

// Conjugacy classes of elements for a group X given by its elements and
// generators. Tables are indexed by ambient element index; entries for
// elements outside X are -1.
struct ClassTable {
    std::vector<int32_t> class_of;
    std::vector<uint32_t> reps;
    std::vector<uint32_t> sizes;
    // conj[e] conjugates reps[class_of[e]] to e: conj[e]*rep*conj[e]^-1 == e.
    std::vector<uint32_t> conj;
};

ClassTable build_class_table(const Gl2Context& ctx, const std::vector<uint32_t>& elems,
                             const std::vector<uint32_t>& gens);

// Materialized GL2(Z/NZ). Elements are numbered in increasing row-major code
// order, so comparing indices compares matrices lexicographically.
class Gl2Context {
public:
    static constexpr int kMaxModulus = 64;
    static constexpr unsigned long long kDefaultAmbientCap = 1ull << 22;

    // Shared, cached per modulus. Throws OrderCapExceeded above the cap.
    static std::shared_ptr<const Gl2Context> get(int n);

    int modulus() const { return n_; }
    std::size_t order() const { return mats_.size(); }
    const Mat2& mat(uint32_t i) const { return mats_[i]; }
    uint32_t code(const Mat2& m) const {
        return ((static_cast<uint32_t>(m.a) * n_ + m.b) * n_ + m.c) * n_ + m.d;
    }
    // Index of a reduced matrix, or -1 when not invertible.
    int32_t index_of(const Mat2& m) const { return index_of_code_[code(m)]; }
    uint32_t index_checked(const Mat2& m) const;
    uint32_t mul(uint32_t x, uint32_t y) const {
        return static_cast<uint32_t>(index_of_code_[code(mat_mul(mats_[x], mats_[y], n_))]);
    }
    uint32_t inv(uint32_t x) const { return inv_[x]; }
    uint32_t conjugate(uint32_t g, uint32_t h) const { return mul(mul(g, h), inv_[g]); }
    int det(uint32_t x) const { return det_[x]; }
    uint32_t identity() const { return identity_; }
    uint32_t minus_identity() const { return minus_identity_; }
    const std::vector<uint32_t>& all_elements() const { return all_; }
    // A small generating set of the whole group.
    const std::vector<uint32_t>& generators() const { return gens_; }

    // Element conjugacy classes of the full group (lazy, thread-safe).
    const ClassTable& classes() const;
    // Centralizer of the representative of class k, sorted (lazy, thread-safe).
    const std::vector<uint32_t>& rep_centralizer(int k) const;

    std::string format(uint32_t i) const;

private:
    explicit Gl2Context(int n);

    int n_;
    std::vector<Mat2> mats_;
    std::vector<int32_t> index_of_code_;
    std::vector<uint32_t> inv_;
    std::vector<int> det_;
    std::vector<uint32_t> all_;
    std::vector<uint32_t> gens_;
    uint32_t identity_ = 0, minus_identity_ = 0;

    mutable std::once_flag classes_once_;
    mutable std::unique_ptr<ClassTable> classes_;
    mutable std::mutex cent_mutex_;
    mutable std::vector<std::unique_ptr<std::vector<uint32_t>>> centralizers_;
};

} // namespace cdx
