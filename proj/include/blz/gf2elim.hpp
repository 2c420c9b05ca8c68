#pragma once

#include <cstddef>
#include <vector>

#include "blz/bitblock.hpp"

namespace blz {

// Rectangular GF(2) matrix held as packed bit rows; the workhorse behind
// rank checks, kernel harvesting and solution extraction. Sizes here are
// modest (a few thousand bits a side), so no parallel kernels.
struct BitMatrix {
    std::size_t rows = 0, cols = 0, rw = 0;
    std::vector<u64> w;

    BitMatrix() = default;
    BitMatrix(std::size_t r, std::size_t c)
        : rows(r), cols(c), rw(words_for(c)), w(r * rw, 0) {}

    u64* row(std::size_t r) { return w.data() + r * rw; }
    const u64* row(std::size_t r) const { return w.data() + r * rw; }

    bool get(std::size_t r, std::size_t c) const {
        return (row(r)[c >> 6] >> (c & 63)) & 1u;
    }
    void set(std::size_t r, std::size_t c, bool v) {
        u64& word = row(r)[c >> 6];
        u64 m = u64(1) << (c & 63);
        word = v ? (word | m) : (word & ~m);
    }

    bool row_is_zero(std::size_t r) const;
};

// columns of b become rows of the result
BitMatrix columns_of(const VectorBlock& b);
BitMatrix to_bitmatrix(const SmallMat& m);
// rows of m become columns of the result block
VectorBlock block_from_rows(const BitMatrix& m, std::size_t n_rows);

std::size_t gf2_rank(BitMatrix m); // destructive on the copy

// Incremental span tracker over a fixed ambient dimension. Vectors are added
// one at a time; each is either adopted as a generator or reported as a
// combination of the vectors added before it. Combination words index vectors
// by add order, so hold words_for(max_adds) words.
class Gf2Span {
public:
    Gf2Span(std::size_t dim, std::size_t max_adds);

    // true if v was independent of everything added so far; otherwise, when
    // dep is non-null, writes the combination of earlier adds that equals v
    bool add(const u64* v, u64* dep = nullptr);
    // expresses v over the adds made so far; false when v is outside the span
    bool express(const u64* v, u64* coeff) const;

    std::size_t rank() const { return rank_; }
    std::size_t adds() const { return adds_; }
    std::size_t dim() const { return dim_; }
    std::size_t comb_words() const { return cw_; }

private:
    std::size_t dim_, rw_, cw_;
    std::size_t rank_ = 0, adds_ = 0;
    // reduced generators, each paired with its combination over the adds
    std::vector<u64> vecs_, combs_;
    std::vector<std::size_t> pivot_; // leading bit of each reduced generator
};

} // namespace blz
