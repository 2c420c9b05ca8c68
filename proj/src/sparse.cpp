#include "blz/sparse.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace blz {

void SparseMatrix::validate() const {
    if (row_ptr.size() != n1 + 1 || row_ptr[0] != 0)
        throw dimension_error("sparse: bad row_ptr");
    if (row_ptr[n1] != col_idx.size())
        throw dimension_error("sparse: row_ptr/nnz mismatch");
    for (std::size_t r = 0; r < n1; ++r) {
        if (row_ptr[r] > row_ptr[r + 1])
            throw dimension_error("sparse: row_ptr not monotone");
        for (u64 k = row_ptr[r]; k < row_ptr[r + 1]; ++k) {
            if (col_idx[k] >= n2)
                throw dimension_error("sparse: column out of range");
            if (k > row_ptr[r] && col_idx[k] <= col_idx[k - 1])
                throw dimension_error("sparse: columns not strictly increasing");
        }
    }
}

SparseMatrix gen_random(std::size_t n1, std::size_t n2, std::size_t row_weight,
                        u64 seed) {
    if (row_weight > n2)
        throw dimension_error("gen_random: row_weight exceeds n2");
    SparseMatrix m;
    m.n1 = n1;
    m.n2 = n2;
    m.row_ptr.assign(n1 + 1, 0);
    m.col_idx.reserve(n1 * row_weight);
    Rng rng(seed);
    std::vector<u32> row;
    for (std::size_t r = 0; r < n1; ++r) {
        row.clear();
        while (row.size() < row_weight) {
            u32 c = u32(rng.below(n2));
            if (std::find(row.begin(), row.end(), c) == row.end())
                row.push_back(c);
        }
        std::sort(row.begin(), row.end());
        m.col_idx.insert(m.col_idx.end(), row.begin(), row.end());
        m.row_ptr[r + 1] = m.col_idx.size();
    }
    return m;
}

namespace {

void put_u32(std::ostream& out, u32 v) {
    char b[4];
    for (int i = 0; i < 4; ++i)
        b[i] = char((v >> (8 * i)) & 0xff);
    out.write(b, 4);
}

void put_u64(std::ostream& out, u64 v) {
    char b[8];
    for (int i = 0; i < 8; ++i)
        b[i] = char((v >> (8 * i)) & 0xff);
    out.write(b, 8);
}

u32 get_u32(std::istream& in) {
    unsigned char b[4];
    if (!in.read(reinterpret_cast<char*>(b), 4))
        throw io_error("sparse: short file");
    u32 v = 0;
    for (int i = 0; i < 4; ++i)
        v |= u32(b[i]) << (8 * i);
    return v;
}

u64 get_u64(std::istream& in) {
    unsigned char b[8];
    if (!in.read(reinterpret_cast<char*>(b), 8))
        throw io_error("sparse: short file");
    u64 v = 0;
    for (int i = 0; i < 8; ++i)
        v |= u64(b[i]) << (8 * i);
    return v;
}

constexpr char kSparseMagic[4] = {'S', 'M', 'F', '2'};
constexpr char kBlockMagic[4] = {'V', 'B', 'L', 'K'};

} // namespace

void save_ascii(const SparseMatrix& m, std::ostream& out) {
    out << m.n1 << ' ' << m.n2 << ' ' << m.nnz() << '\n';
    for (std::size_t r = 0; r < m.n1; ++r)
        for (u64 k = m.row_ptr[r]; k < m.row_ptr[r + 1]; ++k)
            out << r << ' ' << m.col_idx[k] << '\n';
    if (!out)
        throw io_error("sparse: write failed");
}

void save_binary(const SparseMatrix& m, std::ostream& out) {
    out.write(kSparseMagic, 4);
    put_u64(out, m.n1);
    put_u64(out, m.n2);
    put_u64(out, m.nnz());
    for (u64 v : m.row_ptr)
        put_u64(out, v);
    for (u32 v : m.col_idx)
        put_u32(out, v);
    if (!out)
        throw io_error("sparse: write failed");
}

void save_ascii(const SparseMatrix& m, const std::string& path) {
    std::ofstream f(path, std::ios::binary);
    if (!f)
        throw io_error("sparse: cannot open " + path);
    save_ascii(m, f);
}

void save_binary(const SparseMatrix& m, const std::string& path) {
    std::ofstream f(path, std::ios::binary);
    if (!f)
        throw io_error("sparse: cannot open " + path);
    save_binary(m, f);
}

namespace {

SparseMatrix load_ascii_body(std::istream& in) {
    std::string header;
    if (!std::getline(in, header))
        throw io_error("sparse: missing header");
    std::istringstream hs(header);
    SparseMatrix m;
    std::size_t nnz = 0;
    if (!(hs >> m.n1 >> m.n2 >> nnz))
        throw io_error("sparse: malformed header");
    std::string tail;
    if (hs >> tail)
        throw io_error("sparse: malformed header");
    m.row_ptr.assign(m.n1 + 1, 0);
    m.col_idx.reserve(nnz);
    std::size_t prev_r = 0, prev_c = 0;
    bool first = true;
    for (std::size_t k = 0; k < nnz; ++k) {
        std::size_t r, c;
        if (!(in >> r >> c))
            throw io_error("sparse: truncated entry list");
        if (r >= m.n1 || c >= m.n2)
            throw io_error("sparse: entry out of range");
        if (!first) {
            if (r < prev_r || (r == prev_r && c < prev_c))
                throw io_error("sparse: entries not sorted");
            if (r == prev_r && c == prev_c)
                throw io_error("sparse: duplicate entry");
        }
        prev_r = r;
        prev_c = c;
        first = false;
        m.col_idx.push_back(u32(c));
        m.row_ptr[r + 1]++;
    }
    std::size_t extra_r, extra_c;
    if (in >> extra_r >> extra_c)
        throw io_error("sparse: trailing entries beyond nnz");
    for (std::size_t r = 0; r < m.n1; ++r)
        m.row_ptr[r + 1] += m.row_ptr[r];
    m.validate();
    return m;
}

SparseMatrix load_binary_body(std::istream& in) {
    SparseMatrix m;
    m.n1 = get_u64(in);
    m.n2 = get_u64(in);
    u64 nnz = get_u64(in);
    m.row_ptr.resize(m.n1 + 1);
    for (auto& v : m.row_ptr)
        v = get_u64(in);
    m.col_idx.resize(nnz);
    for (auto& v : m.col_idx)
        v = get_u32(in);
    char probe;
    if (in.read(&probe, 1))
        throw io_error("sparse: trailing bytes");
    m.validate();
    return m;
}

} // namespace

SparseMatrix load_matrix(std::istream& in) {
    char magic[4] = {0, 0, 0, 0};
    in.read(magic, 4);
    if (in.gcount() == 4 && std::equal(magic, magic + 4, kSparseMagic))
        return load_binary_body(in);
    // not binary: rewind and parse as text
    in.clear();
    in.seekg(0);
    return load_ascii_body(in);
}

SparseMatrix load_matrix(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f)
        throw io_error("sparse: cannot open " + path);
    try {
        return load_matrix(f);
    } catch (const dimension_error& e) {
        throw io_error("sparse: " + path + ": " + e.what());
    }
}

namespace {

void scatter_left(const SparseMatrix& m, const VectorBlock& v,
                  VectorBlock& out) {
    const std::size_t rw = v.row_words();
#ifdef _OPENMP
    if (m.nnz() * rw >= (std::size_t(1) << 18) && omp_get_max_threads() > 1) {
        const int threads = omp_get_max_threads();
        std::vector<std::vector<u64>> part(static_cast<std::size_t>(threads));
#pragma omp parallel
        {
            const int t = omp_get_thread_num();
            auto& loc = part[std::size_t(t)];
            loc.assign(m.n2 * rw, 0);
#pragma omp for nowait
            for (std::int64_t r = 0; r < std::int64_t(m.n1); ++r) {
                const u64* vr = v.row(std::size_t(r));
                for (u64 k = m.row_ptr[std::size_t(r)];
                     k < m.row_ptr[std::size_t(r) + 1]; ++k) {
                    u64* dst = loc.data() + std::size_t(m.col_idx[k]) * rw;
                    for (std::size_t i = 0; i < rw; ++i)
                        dst[i] ^= vr[i];
                }
            }
#pragma omp barrier
#pragma omp for
            for (std::int64_t c = 0; c < std::int64_t(m.n2); ++c) {
                u64* dst = out.row(std::size_t(c));
                for (auto& loc2 : part) {
                    const u64* src = loc2.data() + std::size_t(c) * rw;
                    for (std::size_t i = 0; i < rw; ++i)
                        dst[i] ^= src[i];
                }
            }
        }
        return;
    }
#endif
    for (std::size_t r = 0; r < m.n1; ++r) {
        const u64* vr = v.row(r);
        for (u64 k = m.row_ptr[r]; k < m.row_ptr[r + 1]; ++k) {
            u64* dst = out.row(m.col_idx[k]);
            for (std::size_t i = 0; i < rw; ++i)
                dst[i] ^= vr[i];
        }
    }
}

void gather_right(const SparseMatrix& m, const VectorBlock& u,
                  VectorBlock& out) {
    const std::size_t rw = u.row_words();
#pragma omp parallel for if (m.nnz() * rw >= (std::size_t(1) << 18))
    for (std::int64_t r = 0; r < std::int64_t(m.n1); ++r) {
        u64* dst = out.row(std::size_t(r));
        for (u64 k = m.row_ptr[std::size_t(r)];
             k < m.row_ptr[std::size_t(r) + 1]; ++k) {
            const u64* src = u.row(m.col_idx[k]);
            for (std::size_t i = 0; i < rw; ++i)
                dst[i] ^= src[i];
        }
    }
}

} // namespace

VectorBlock spmv_left(const SparseMatrix& m, const VectorBlock& v) {
    if (v.rows() != m.n1)
        throw dimension_error("spmv_left: row count mismatch");
    VectorBlock out(m.n2, v.width());
    scatter_left(m, v, out);
    return out;
}

VectorBlock spmv_right(const SparseMatrix& m, const VectorBlock& u) {
    if (u.rows() != m.n2)
        throw dimension_error("spmv_right: row count mismatch");
    VectorBlock out(m.n1, u.width());
    gather_right(m, u, out);
    return out;
}

void AOperator::apply(const VectorBlock& in, VectorBlock& out) {
    if (in.rows() != m_->n1)
        throw dimension_error("apply: shape mismatch");
    if (out.rows() != m_->n1 || out.width() != in.width())
        out = VectorBlock(m_->n1, in.width());
    else
        out.clear();
    if (scratch_.rows() != m_->n2 || scratch_.width() != in.width())
        scratch_ = VectorBlock(m_->n2, in.width());
    else
        scratch_.clear();
    scatter_left(*m_, in, scratch_);
    gather_right(*m_, scratch_, out);
    spmv_ += 2;
}

void save_block(const VectorBlock& b, const std::string& path) {
    if (b.width() == 0)
        throw dimension_error("save_block: zero width");
    std::ofstream f(path, std::ios::binary);
    if (!f)
        throw io_error("block: cannot open " + path);
    f.write(kBlockMagic, 4);
    put_u32(f, u32(b.rows()));
    put_u32(f, u32(b.width()));
    put_u32(f, 0); // reserved; pads the header to 16 bytes
    const std::size_t bpr = (b.width() + 7) / 8;
    std::vector<char> buf(bpr);
    for (std::size_t r = 0; r < b.rows(); ++r) {
        const u64* row = b.row(r);
        for (std::size_t k = 0; k < bpr; ++k)
            buf[k] = char((row[k >> 3] >> (8 * (k & 7))) & 0xff);
        f.write(buf.data(), std::streamsize(bpr));
    }
    if (!f)
        throw io_error("block: write failed");
}

VectorBlock load_block(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f)
        throw io_error("block: cannot open " + path);
    char magic[4] = {0, 0, 0, 0};
    f.read(magic, 4);
    if (f.gcount() != 4 || !std::equal(magic, magic + 4, kBlockMagic))
        throw io_error("block: bad magic");
    u32 rows = get_u32(f);
    u32 width = get_u32(f);
    get_u32(f); // reserved
    if (width == 0)
        throw io_error("block: zero width");
    VectorBlock b(rows, width);
    const std::size_t bpr = (width + 7) / 8;
    std::vector<unsigned char> buf(bpr);
    for (u32 r = 0; r < rows; ++r) {
        if (!f.read(reinterpret_cast<char*>(buf.data()), std::streamsize(bpr)))
            throw io_error("block: short file");
        u64* row = b.row(r);
        for (std::size_t k = 0; k < bpr; ++k)
            row[k >> 3] |= u64(buf[k]) << (8 * (k & 7));
        if ((row[b.row_words() - 1] & ~tail_mask(width)) != 0)
            throw io_error("block: padding bits set");
    }
    char probe;
    if (f.read(&probe, 1))
        throw io_error("block: trailing bytes");
    return b;
}

} // namespace blz
