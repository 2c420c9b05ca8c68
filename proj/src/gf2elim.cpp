#include "blz/gf2elim.hpp"

#include <bit>

namespace blz {

namespace {

void xor_words(u64* dst, const u64* src, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i)
        dst[i] ^= src[i];
}

// index of the lowest set bit, or npos
std::size_t first_bit(const u64* v, std::size_t words) {
    for (std::size_t w = 0; w < words; ++w)
        if (v[w])
            return w * 64 + std::size_t(std::countr_zero(v[w]));
    return std::size_t(-1);
}

bool all_zero(const u64* v, std::size_t words) {
    for (std::size_t w = 0; w < words; ++w)
        if (v[w])
            return false;
    return true;
}

} // namespace

bool BitMatrix::row_is_zero(std::size_t r) const {
    return all_zero(row(r), rw);
}

BitMatrix columns_of(const VectorBlock& b) {
    BitMatrix m(b.width(), b.rows());
    for (std::size_t r = 0; r < b.rows(); ++r) {
        const u64* row = b.row(r);
        for (std::size_t w = 0; w < b.row_words(); ++w) {
            u64 bits = row[w];
            while (bits) {
                unsigned j = unsigned(std::countr_zero(bits));
                bits &= bits - 1;
                m.set(w * 64 + j, r, true);
            }
        }
    }
    return m;
}

BitMatrix to_bitmatrix(const SmallMat& s) {
    BitMatrix m(s.n(), s.n());
    for (std::size_t r = 0; r < s.n(); ++r)
        for (std::size_t w = 0; w < s.row_words(); ++w)
            m.row(r)[w] = s.row(r)[w];
    return m;
}

VectorBlock block_from_rows(const BitMatrix& m, std::size_t n_rows) {
    VectorBlock b(n_rows, m.rows);
    for (std::size_t r = 0; r < m.rows; ++r)
        for (std::size_t c = 0; c < m.cols && c < n_rows; ++c)
            if (m.get(r, c))
                b.set(c, r, true);
    return b;
}

std::size_t gf2_rank(BitMatrix m) {
    std::size_t rank = 0;
    for (std::size_t c = 0; c < m.cols && rank < m.rows; ++c) {
        std::size_t w = c >> 6;
        u64 bit = u64(1) << (c & 63);
        std::size_t piv = m.rows;
        for (std::size_t r = rank; r < m.rows; ++r)
            if (m.row(r)[w] & bit) {
                piv = r;
                break;
            }
        if (piv == m.rows)
            continue;
        if (piv != rank)
            for (std::size_t k = 0; k < m.rw; ++k)
                std::swap(m.row(rank)[k], m.row(piv)[k]);
        for (std::size_t r = 0; r < m.rows; ++r)
            if (r != rank && (m.row(r)[w] & bit))
                xor_words(m.row(r), m.row(rank), m.rw);
        ++rank;
    }
    return rank;
}

Gf2Span::Gf2Span(std::size_t dim, std::size_t max_adds)
    : dim_(dim), rw_(words_for(dim ? dim : 1)), cw_(words_for(max_adds ? max_adds : 1)) {
    vecs_.reserve(rw_ * std::min(dim, max_adds));
    combs_.reserve(cw_ * std::min(dim, max_adds));
}

bool Gf2Span::add(const u64* v, u64* dep) {
    std::vector<u64> vec(v, v + rw_);
    std::vector<u64> comb(cw_, 0);
    comb[adds_ >> 6] |= u64(1) << (adds_ & 63);
    for (std::size_t g = 0; g < rank_; ++g) {
        std::size_t p = pivot_[g];
        if ((vec[p >> 6] >> (p & 63)) & 1u) {
            xor_words(vec.data(), vecs_.data() + g * rw_, rw_);
            xor_words(comb.data(), combs_.data() + g * cw_, cw_);
        }
    }
    ++adds_;
    std::size_t p = first_bit(vec.data(), rw_);
    if (p == std::size_t(-1)) {
        if (dep) {
            // comb still includes the vector itself; strip it to express v
            // over the earlier adds only
            comb[(adds_ - 1) >> 6] ^= u64(1) << ((adds_ - 1) & 63);
            for (std::size_t w = 0; w < cw_; ++w)
                dep[w] = comb[w];
        }
        return false;
    }
    vecs_.insert(vecs_.end(), vec.begin(), vec.end());
    combs_.insert(combs_.end(), comb.begin(), comb.end());
    pivot_.push_back(p);
    ++rank_;
    return true;
}

bool Gf2Span::express(const u64* v, u64* coeff) const {
    std::vector<u64> vec(v, v + rw_);
    std::vector<u64> comb(cw_, 0);
    for (std::size_t g = 0; g < rank_; ++g) {
        std::size_t p = pivot_[g];
        if ((vec[p >> 6] >> (p & 63)) & 1u) {
            xor_words(vec.data(), vecs_.data() + g * rw_, rw_);
            xor_words(comb.data(), combs_.data() + g * cw_, cw_);
        }
    }
    if (!all_zero(vec.data(), rw_))
        return false;
    for (std::size_t w = 0; w < cw_; ++w)
        coeff[w] = comb[w];
    return true;
}

} // namespace blz
