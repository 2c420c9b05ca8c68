#include "ref/ref.hpp"

#include <cassert>

namespace blz::ref {

Bits make_bits(std::size_t rows, std::size_t cols) {
    return Bits(rows, std::vector<u8>(cols, 0));
}

Bits to_bits(const VectorBlock& b) {
    Bits r = make_bits(b.rows(), b.width());
    for (std::size_t i = 0; i < b.rows(); ++i)
        for (std::size_t j = 0; j < b.width(); ++j)
            r[i][j] = b.get(i, j);
    return r;
}

Bits to_bits(const SmallMat& m) {
    Bits r = make_bits(m.n(), m.n());
    for (std::size_t i = 0; i < m.n(); ++i)
        for (std::size_t j = 0; j < m.n(); ++j)
            r[i][j] = m.get(i, j);
    return r;
}

VectorBlock block_from_bits(const Bits& b, std::size_t width) {
    VectorBlock r(b.size(), width);
    for (std::size_t i = 0; i < b.size(); ++i)
        for (std::size_t j = 0; j < b[i].size(); ++j)
            if (b[i][j])
                r.set(i, j, true);
    return r;
}

SmallMat small_from_bits(const Bits& b) {
    SmallMat r(b.size());
    for (std::size_t i = 0; i < b.size(); ++i)
        for (std::size_t j = 0; j < b[i].size(); ++j)
            if (b[i][j])
                r.set(i, j, true);
    return r;
}

Bits dense_from_sparse(const SparseMatrix& m) {
    Bits r = make_bits(m.n1, m.n2);
    for (std::size_t i = 0; i < m.n1; ++i)
        for (u64 k = m.row_ptr[i]; k < m.row_ptr[i + 1]; ++k)
            r[i][m.col_idx[k]] = 1;
    return r;
}

Bits add(const Bits& a, const Bits& b) {
    assert(a.size() == b.size());
    Bits r = a;
    for (std::size_t i = 0; i < a.size(); ++i) {
        assert(a[i].size() == b[i].size());
        for (std::size_t j = 0; j < a[i].size(); ++j)
            r[i][j] = a[i][j] ^ b[i][j];
    }
    return r;
}

Bits mul(const Bits& a, const Bits& b) {
    std::size_t n = a.size(), k = b.size(), m = k ? b[0].size() : 0;
    Bits r = make_bits(n, m);
    for (std::size_t i = 0; i < n; ++i) {
        assert(a[i].size() == k);
        for (std::size_t t = 0; t < k; ++t)
            if (a[i][t])
                for (std::size_t j = 0; j < m; ++j)
                    r[i][j] ^= b[t][j];
    }
    return r;
}

Bits transpose(const Bits& a) {
    std::size_t n = a.size(), m = n ? a[0].size() : 0;
    Bits r = make_bits(m, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < m; ++j)
            r[j][i] = a[i][j];
    return r;
}

bool equal(const Bits& a, const Bits& b) {
    return a == b;
}

std::size_t rank(Bits m) {
    std::size_t rows = m.size(), cols = rows ? m[0].size() : 0;
    std::size_t r = 0;
    for (std::size_t c = 0; c < cols && r < rows; ++c) {
        std::size_t piv = rows;
        for (std::size_t i = r; i < rows; ++i)
            if (m[i][c]) {
                piv = i;
                break;
            }
        if (piv == rows)
            continue;
        std::swap(m[r], m[piv]);
        for (std::size_t i = 0; i < rows; ++i)
            if (i != r && m[i][c])
                for (std::size_t j = c; j < cols; ++j)
                    m[i][j] ^= m[r][j];
        ++r;
    }
    return r;
}

Bits left_nullspace(const Bits& m) {
    // eliminate [m^T's columns...] the schoolbook way: reduce rows of
    // [m | I] over the row space; rows whose m-part vanishes give the basis
    std::size_t rows = m.size(), cols = rows ? m[0].size() : 0;
    Bits work = m;
    Bits id = make_bits(rows, rows);
    for (std::size_t i = 0; i < rows; ++i)
        id[i][i] = 1;
    std::size_t r = 0;
    for (std::size_t c = 0; c < cols && r < rows; ++c) {
        std::size_t piv = rows;
        for (std::size_t i = r; i < rows; ++i)
            if (work[i][c]) {
                piv = i;
                break;
            }
        if (piv == rows)
            continue;
        std::swap(work[r], work[piv]);
        std::swap(id[r], id[piv]);
        for (std::size_t i = 0; i < rows; ++i)
            if (i != r && work[i][c]) {
                for (std::size_t j = 0; j < cols; ++j)
                    work[i][j] ^= work[r][j];
                for (std::size_t j = 0; j < rows; ++j)
                    id[i][j] ^= id[r][j];
            }
        ++r;
    }
    Bits basis;
    for (std::size_t i = r; i < rows; ++i)
        basis.push_back(id[i]);
    return basis;
}

Bits apply_mmt(const SparseMatrix& m, const Bits& b) {
    Bits d = dense_from_sparse(m);
    return mul(d, mul(transpose(d), b));
}

namespace {

u32 fp_mul(u32 a, u32 b, u32 p) {
    return u32((u64(a) * b) % p);
}

u32 fp_pow(u32 a, u64 e, u32 p) {
    u32 r = 1 % p;
    while (e) {
        if (e & 1)
            r = fp_mul(r, a, p);
        a = fp_mul(a, a, p);
        e >>= 1;
    }
    return r;
}

u32 fp_inv(u32 a, u32 p) {
    return fp_pow(a, p - 2, p);
}

} // namespace

std::size_t fp_rank(FpMat m) {
    std::size_t r = 0;
    for (std::size_t c = 0; c < m.n && r < m.n; ++c) {
        std::size_t piv = m.n;
        for (std::size_t i = r; i < m.n; ++i)
            if (m.at(i, c) != 0) {
                piv = i;
                break;
            }
        if (piv == m.n)
            continue;
        for (std::size_t j = 0; j < m.n; ++j)
            std::swap(m.at(r, j), m.at(piv, j));
        u32 s = fp_inv(m.at(r, c), m.p);
        for (std::size_t j = 0; j < m.n; ++j)
            m.at(r, j) = fp_mul(m.at(r, j), s, m.p);
        for (std::size_t i = 0; i < m.n; ++i)
            if (i != r && m.at(i, c) != 0) {
                u32 f = m.at(i, c);
                for (std::size_t j = 0; j < m.n; ++j) {
                    u32 sub = fp_mul(f, m.at(r, j), m.p);
                    m.at(i, j) = (m.at(i, j) + m.p - sub) % m.p;
                }
            }
        ++r;
    }
    return r;
}

bool fp_solve(FpMat m, std::vector<u32> b, std::vector<u32>& x) {
    std::size_t n = m.n;
    std::vector<std::size_t> pivot_col;
    std::size_t r = 0;
    for (std::size_t c = 0; c < n && r < n; ++c) {
        std::size_t piv = n;
        for (std::size_t i = r; i < n; ++i)
            if (m.at(i, c) != 0) {
                piv = i;
                break;
            }
        if (piv == n)
            continue;
        for (std::size_t j = 0; j < n; ++j)
            std::swap(m.at(r, j), m.at(piv, j));
        std::swap(b[r], b[piv]);
        u32 s = fp_inv(m.at(r, c), m.p);
        for (std::size_t j = 0; j < n; ++j)
            m.at(r, j) = fp_mul(m.at(r, j), s, m.p);
        b[r] = fp_mul(b[r], s, m.p);
        for (std::size_t i = 0; i < n; ++i)
            if (i != r && m.at(i, c) != 0) {
                u32 f = m.at(i, c);
                for (std::size_t j = 0; j < n; ++j) {
                    u32 sub = fp_mul(f, m.at(r, j), m.p);
                    m.at(i, j) = (m.at(i, j) + m.p - sub) % m.p;
                }
                u32 sub = fp_mul(f, b[r], m.p);
                b[i] = (b[i] + m.p - sub) % m.p;
            }
        pivot_col.push_back(c);
        ++r;
    }
    for (std::size_t i = r; i < n; ++i)
        if (b[i] != 0)
            return false;
    x.assign(n, 0);
    for (std::size_t i = 0; i < r; ++i)
        x[pivot_col[i]] = b[i];
    return true;
}

} // namespace blz::ref
