#include "blz/bitblock.hpp"

#include <bit>
#include <cstdint>

namespace blz {

namespace {

void xor_words(u64* dst, const u64* src, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i)
        dst[i] ^= src[i];
}

} // namespace

bool VectorBlock::is_zero() const {
    for (u64 w : w_)
        if (w)
            return false;
    return true;
}

bool VectorBlock::column_is_zero(std::size_t c) const {
    for (std::size_t r = 0; r < rows_; ++r)
        if (get(r, c))
            return false;
    return true;
}

VectorBlock VectorBlock::random(std::size_t rows, std::size_t width, Rng& rng) {
    VectorBlock b(rows, width);
    u64 tm = tail_mask(width);
    for (std::size_t r = 0; r < rows; ++r) {
        u64* w = b.row(r);
        for (std::size_t i = 0; i < b.rw_; ++i)
            w[i] = rng.next();
        w[b.rw_ - 1] &= tm;
    }
    return b;
}

bool SmallMat::is_zero() const {
    for (u64 w : w_)
        if (w)
            return false;
    return true;
}

bool SmallMat::is_symmetric() const {
    return *this == small_transpose(*this);
}

SmallMat SmallMat::identity(std::size_t n) {
    SmallMat m(n);
    for (std::size_t i = 0; i < n; ++i)
        m.set(i, i, true);
    return m;
}

std::size_t DiagMask::popcount() const {
    std::size_t c = 0;
    for (u64 w : bits_)
        c += std::popcount(w);
    return c;
}

bool DiagMask::any() const {
    for (u64 w : bits_)
        if (w)
            return true;
    return false;
}

DiagMask DiagMask::complement() const {
    DiagMask d(n_);
    for (std::size_t i = 0; i < bits_.size(); ++i)
        d.bits_[i] = ~bits_[i];
    d.bits_.back() &= tail_mask(n_);
    return d;
}

DiagMask DiagMask::full(std::size_t n) {
    return DiagMask(n).complement();
}

VectorBlock block_xor(const VectorBlock& a, const VectorBlock& b) {
    VectorBlock r = a;
    xor_inplace(r, b);
    return r;
}

void xor_inplace(VectorBlock& a, const VectorBlock& b) {
    if (a.rows() != b.rows() || a.width() != b.width())
        throw dimension_error("block_xor: shape mismatch");
    const std::size_t total = a.rows() * a.row_words();
    u64* pa = a.rows() ? a.row(0) : nullptr;
    const u64* pb = b.rows() ? b.row(0) : nullptr;
#pragma omp parallel for if (total >= (std::size_t(1) << 16))
    for (std::int64_t i = 0; i < std::int64_t(total); ++i)
        pa[i] ^= pb[i];
}

SmallMat small_add(const SmallMat& a, const SmallMat& b) {
    if (a.n() != b.n())
        throw dimension_error("small_add: size mismatch");
    SmallMat r = a;
    for (std::size_t i = 0; i < a.n(); ++i)
        xor_words(r.row(i), b.row(i), a.row_words());
    return r;
}

SmallMat inner(const VectorBlock& a, const VectorBlock& b) {
    if (a.rows() != b.rows() || a.width() != b.width())
        throw dimension_error("inner: shape mismatch");
    const std::size_t n = a.width();
    const std::size_t rw = a.row_words();
    const std::int64_t rows = std::int64_t(a.rows());
    SmallMat res(n);
#pragma omp parallel if (rows >= 4096)
    {
        SmallMat loc(n);
#pragma omp for nowait
        for (std::int64_t r = 0; r < rows; ++r) {
            const u64* ar = a.row(std::size_t(r));
            const u64* br = b.row(std::size_t(r));
            for (std::size_t w = 0; w < rw; ++w) {
                u64 bits = ar[w];
                while (bits) {
                    unsigned j = unsigned(std::countr_zero(bits));
                    bits &= bits - 1;
                    xor_words(loc.row(w * 64 + j), br, rw);
                }
            }
        }
#pragma omp critical
        {
            for (std::size_t i = 0; i < n; ++i)
                xor_words(res.row(i), loc.row(i), rw);
        }
    }
    return res;
}

namespace {

// out_row ^= sum of m rows named by the set bits of a_row. Fallback path and
// also the table builder's definition of correctness.
inline void accum_row_direct(u64* out, const u64* a_row, const SmallMat& m,
                             std::size_t rw) {
    for (std::size_t w = 0; w < rw; ++w) {
        u64 bits = a_row[w];
        while (bits) {
            unsigned j = unsigned(std::countr_zero(bits));
            bits &= bits - 1;
            xor_words(out, m.row(w * 64 + j), rw);
        }
    }
}

} // namespace

VectorBlock mul_block_small(const VectorBlock& a, const SmallMat& m) {
    if (a.width() != m.n())
        throw dimension_error("mul_block_small: width mismatch");
    const std::size_t n = m.n();
    const std::size_t rw = m.row_words();
    const std::int64_t rows = std::int64_t(a.rows());
    VectorBlock out(a.rows(), n);
    if (rows < 48) {
        for (std::int64_t r = 0; r < rows; ++r)
            accum_row_direct(out.row(std::size_t(r)), a.row(std::size_t(r)), m,
                             rw);
        return out;
    }
    // 8-bit slice tables: one 256-entry XOR cache per byte position
    const std::size_t nb = (n + 7) / 8;
    std::vector<u64> tab(nb * 256 * rw, 0);
    for (std::size_t pb = 0; pb < nb; ++pb) {
        u64* base = tab.data() + pb * 256 * rw;
        for (unsigned v = 1; v < 256; ++v) {
            unsigned j = unsigned(std::countr_zero(v));
            std::size_t src_row = pb * 8 + j;
            u64* dst = base + std::size_t(v) * rw;
            const u64* prev = base + std::size_t(v ^ (1u << j)) * rw;
            for (std::size_t k = 0; k < rw; ++k)
                dst[k] = prev[k];
            if (src_row < n)
                xor_words(dst, m.row(src_row), rw);
        }
    }
#pragma omp parallel for if (rows >= 4096)
    for (std::int64_t r = 0; r < rows; ++r) {
        const u64* ar = a.row(std::size_t(r));
        u64* orow = out.row(std::size_t(r));
        for (std::size_t pb = 0; pb < nb; ++pb) {
            u64 byte = (ar[pb >> 3] >> (8 * (pb & 7))) & 0xff;
            if (byte)
                xor_words(orow, tab.data() + (pb * 256 + byte) * rw, rw);
        }
    }
    return out;
}

SmallMat small_mul(const SmallMat& a, const SmallMat& b) {
    if (a.n() != b.n())
        throw dimension_error("small_mul: size mismatch");
    SmallMat r(a.n());
    for (std::size_t i = 0; i < a.n(); ++i)
        accum_row_direct(r.row(i), a.row(i), b, a.row_words());
    return r;
}

SmallMat small_transpose(const SmallMat& a) {
    const std::size_t n = a.n();
    const std::size_t rw = a.row_words();
    SmallMat t(n);
    u64 buf[64];
    for (std::size_t ti = 0; ti < rw; ++ti) {
        for (std::size_t tj = 0; tj < rw; ++tj) {
            for (std::size_t k = 0; k < 64; ++k) {
                std::size_t r = tj * 64 + k;
                buf[k] = r < n ? a.row(r)[ti] : 0;
            }
            transpose64(buf);
            for (std::size_t k = 0; k < 64; ++k) {
                std::size_t r = ti * 64 + k;
                if (r < n)
                    t.row(r)[tj] = buf[k];
            }
        }
    }
    return t;
}

VectorBlock mask_apply(const VectorBlock& x, const DiagMask& d) {
    if (x.width() != d.n())
        throw dimension_error("mask_apply: width mismatch");
    VectorBlock r = x;
    const std::size_t rw = r.row_words();
    const u64* dw = d.words();
    const std::int64_t rows = std::int64_t(r.rows());
#pragma omp parallel for if (rows >= 8192)
    for (std::int64_t i = 0; i < rows; ++i) {
        u64* row = r.row(std::size_t(i));
        for (std::size_t w = 0; w < rw; ++w)
            row[w] &= dw[w];
    }
    return r;
}

SmallMat mask_apply(const SmallMat& x, const DiagMask& d) {
    if (x.n() != d.n())
        throw dimension_error("mask_apply: size mismatch");
    SmallMat r = x;
    const u64* dw = d.words();
    for (std::size_t i = 0; i < r.n(); ++i)
        for (std::size_t w = 0; w < r.row_words(); ++w)
            r.row(i)[w] &= dw[w];
    return r;
}

SmallMat mask_rows(const DiagMask& d, const SmallMat& s) {
    if (s.n() != d.n())
        throw dimension_error("mask_rows: size mismatch");
    SmallMat r(s.n());
    for (std::size_t i = 0; i < s.n(); ++i)
        if (d.test(i))
            for (std::size_t w = 0; w < s.row_words(); ++w)
                r.row(i)[w] = s.row(i)[w];
    return r;
}

SmallMat diag_mat(const DiagMask& d) {
    SmallMat r(d.n());
    for (std::size_t i = 0; i < d.n(); ++i)
        if (d.test(i))
            r.row(i)[i >> 6] = u64(1) << (i & 63);
    return r;
}

VectorBlock concat_columns(const VectorBlock& a, const VectorBlock& b) {
    if (a.rows() != b.rows())
        throw dimension_error("concat_columns: row mismatch");
    if (a.width() % 64 || b.width() % 64)
        throw dimension_error("concat_columns: widths must be word-aligned");
    VectorBlock r(a.rows(), a.width() + b.width());
    for (std::size_t i = 0; i < r.rows(); ++i) {
        u64* dst = r.row(i);
        const u64* ra = a.row(i);
        const u64* rb = b.row(i);
        for (std::size_t w = 0; w < a.row_words(); ++w) dst[w] = ra[w];
        for (std::size_t w = 0; w < b.row_words(); ++w) dst[a.row_words() + w] = rb[w];
    }
    return r;
}

VectorBlock take_columns(const VectorBlock& a, std::size_t k) {
    if (k > a.width())
        throw dimension_error("take_columns: too wide");
    VectorBlock r(a.rows(), k);
    const u64 tm = tail_mask(k);
    for (std::size_t i = 0; i < a.rows(); ++i) {
        u64* dst = r.row(i);
        const u64* src = a.row(i);
        for (std::size_t w = 0; w < r.row_words(); ++w) dst[w] = src[w];
        if (k % 64) dst[r.row_words() - 1] &= tm;
    }
    return r;
}

void transpose64(u64 a[64]) {
    u64 m = 0x00000000ffffffffull;
    for (unsigned j = 32; j; j >>= 1, m ^= m << j) {
        for (unsigned k = 0; k < 64; k = (k + j + 1) & ~j) {
            u64 t = ((a[k] >> j) ^ a[k + j]) & m;
            a[k] ^= t << j;
            a[k + j] ^= t;
        }
    }
}

} // namespace blz
