#pragma once

#include <algorithm>
#include <cstddef>
#include <vector>

#include "blz/common.hpp"

namespace blz {

inline constexpr std::size_t kWordBits = 64;

inline std::size_t words_for(std::size_t bits) { return (bits + 63) / 64; }

// mask covering the live bits of the last word of a row
inline u64 tail_mask(std::size_t bits) {
    std::size_t r = bits % 64;
    return r == 0 ? ~u64(0) : ((u64(1) << r) - 1);
}

// N x width bit matrix, row-major, LSB-first within each 64-bit word.
// Column j of row r sits at word j/64, bit j%64. Bits at column >= width in
// the final word of a row are kept zero; every mutator preserves that.
// The solver always runs with width a multiple of 64; odd widths exist so a
// harvested solution set can carry its exact column count through files.
class VectorBlock {
public:
    VectorBlock() = default;
    VectorBlock(std::size_t rows, std::size_t width)
        : rows_(rows), width_(width), rw_(words_for(width)), w_(rows * rw_, 0) {}

    std::size_t rows() const { return rows_; }
    std::size_t width() const { return width_; }
    std::size_t row_words() const { return rw_; }

    u64* row(std::size_t r) { return w_.data() + r * rw_; }
    const u64* row(std::size_t r) const { return w_.data() + r * rw_; }

    bool get(std::size_t r, std::size_t c) const {
        return (row(r)[c >> 6] >> (c & 63)) & 1u;
    }
    void set(std::size_t r, std::size_t c, bool v) {
        u64& w = row(r)[c >> 6];
        u64 m = u64(1) << (c & 63);
        w = v ? (w | m) : (w & ~m);
    }

    bool is_zero() const;
    bool column_is_zero(std::size_t c) const;
    void clear() { std::fill(w_.begin(), w_.end(), 0); }

    friend bool operator==(const VectorBlock&, const VectorBlock&) = default;

    static VectorBlock random(std::size_t rows, std::size_t width, Rng& rng);

private:
    std::size_t rows_ = 0, width_ = 0, rw_ = 0;
    std::vector<u64> w_;
};

// n x n bit matrix with the same packing as VectorBlock rows.
class SmallMat {
public:
    SmallMat() = default;
    explicit SmallMat(std::size_t n)
        : n_(n), rw_(words_for(n)), w_(n * rw_, 0) {}

    std::size_t n() const { return n_; }
    std::size_t row_words() const { return rw_; }

    u64* row(std::size_t r) { return w_.data() + r * rw_; }
    const u64* row(std::size_t r) const { return w_.data() + r * rw_; }

    bool get(std::size_t r, std::size_t c) const {
        return (row(r)[c >> 6] >> (c & 63)) & 1u;
    }
    void set(std::size_t r, std::size_t c, bool v) {
        u64& w = row(r)[c >> 6];
        u64 m = u64(1) << (c & 63);
        w = v ? (w | m) : (w & ~m);
    }

    bool is_zero() const;
    bool is_symmetric() const;

    friend bool operator==(const SmallMat&, const SmallMat&) = default;

    static SmallMat identity(std::size_t n);

private:
    std::size_t n_ = 0, rw_ = 0;
    std::vector<u64> w_;
};

// subset of {0..n-1} acting as a 0/1 diagonal matrix
class DiagMask {
public:
    DiagMask() = default;
    explicit DiagMask(std::size_t n) : n_(n), bits_(words_for(n), 0) {}

    std::size_t n() const { return n_; }
    const u64* words() const { return bits_.data(); }
    u64* words() { return bits_.data(); }

    bool test(std::size_t i) const { return (bits_[i >> 6] >> (i & 63)) & 1u; }
    void set(std::size_t i, bool v = true) {
        u64& w = bits_[i >> 6];
        u64 m = u64(1) << (i & 63);
        w = v ? (w | m) : (w & ~m);
    }

    std::size_t popcount() const;
    bool any() const;
    DiagMask complement() const;

    friend bool operator==(const DiagMask&, const DiagMask&) = default;

    static DiagMask none(std::size_t n) { return DiagMask(n); }
    static DiagMask full(std::size_t n);

private:
    std::size_t n_ = 0;
    std::vector<u64> bits_;
};

// a + b
VectorBlock block_xor(const VectorBlock& a, const VectorBlock& b);
SmallMat small_add(const SmallMat& a, const SmallMat& b);
void xor_inplace(VectorBlock& a, const VectorBlock& b);

// a^T b, an n x n matrix
SmallMat inner(const VectorBlock& a, const VectorBlock& b);

// a * m
VectorBlock mul_block_small(const VectorBlock& a, const SmallMat& m);

SmallMat small_mul(const SmallMat& a, const SmallMat& b);
SmallMat small_transpose(const SmallMat& a);

// x * d: keep columns selected by d
VectorBlock mask_apply(const VectorBlock& x, const DiagMask& d);
SmallMat mask_apply(const SmallMat& x, const DiagMask& d);
// d * s: keep rows selected by d
SmallMat mask_rows(const DiagMask& d, const SmallMat& s);

// d as an n x n matrix
SmallMat diag_mat(const DiagMask& d);

// [a | b]; both widths must be multiples of 64 so rows stay word-aligned
VectorBlock concat_columns(const VectorBlock& a, const VectorBlock& b);
// first k columns of a
VectorBlock take_columns(const VectorBlock& a, std::size_t k);

// transpose of a 64x64 bit tile in place
void transpose64(u64 a[64]);

} // namespace blz
