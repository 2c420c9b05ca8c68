#include "blz/mesh.hpp"

#include <barrier>
#include <thread>

namespace blz {

MeshLayout plan_layout(std::size_t n1, std::size_t n2, std::size_t d) {
    if (d == 0) throw dimension_error("mesh side must be at least 1");
    MeshLayout l;
    l.d = d;
    l.n1 = n1;
    l.n2 = n2;
    std::size_t q = d * d;
    l.n1p = (n1 + q - 1) / q * q;
    l.n2p = (n2 + q - 1) / q * q;
    return l;
}

std::string CommStats::text() const {
    std::string out;
    for (const Step& s : steps) {
        out += "step=" + std::to_string(s.step) + " phase=1 bits=" +
               std::to_string(s.bits1) + " msgs=" + std::to_string(s.msgs1) + "\n";
        out += "step=" + std::to_string(s.step) + " phase=2 bits=" +
               std::to_string(s.bits2) + " msgs=" + std::to_string(s.msgs2) + "\n";
    }
    return out;
}

MeshAOperator::MeshAOperator(const SparseMatrix& m, std::size_t d)
    : layout_(plan_layout(m.n1, m.n2, d)) {
    // slice M into the d x d grid, local indices inside each block
    const std::size_t br = layout_.n1p / d, bc = layout_.n2p / d;
    blocks_.resize(d * d);
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < d; ++j) {
            Block& blk = blocks_[i * d + j];
            blk.row_ptr.assign(br + 1, 0);
            for (std::size_t lr = 0; lr < br; ++lr) {
                std::size_t r = i * br + lr;
                blk.row_ptr[lr] = blk.col_idx.size();
                if (r < m.n1)
                    for (std::size_t k = m.row_ptr[r]; k < m.row_ptr[r + 1]; ++k) {
                        u32 c = m.col_idx[k];
                        if (c >= j * bc && c < (j + 1) * bc)
                            blk.col_idx.push_back(static_cast<u32>(c - j * bc));
                    }
            }
            blk.row_ptr[br] = blk.col_idx.size();
        }
}

void MeshAOperator::apply(const VectorBlock& in, VectorBlock& out) {
    const std::size_t d = layout_.d;
    const std::size_t width = in.width();
    const std::size_t rw = in.row_words();
    const std::size_t br = layout_.n1p / d, bc = layout_.n2p / d;
    const std::size_t f1 = layout_.n1p / (d * d);

    if (in.rows() != layout_.n1) throw dimension_error("input rows do not match mesh layout");
    if (out.rows() != layout_.n1 || out.width() != width)
        out = VectorBlock(layout_.n1, width);
    out.clear();

    // one buffer per mesh row/column, plus per-worker partial products
    std::vector<VectorBlock> vrow(d), urow_part(d * d), ucol(d), wrow_part(d * d),
        wrow(d);
    for (std::size_t i = 0; i < d; ++i) {
        vrow[i] = VectorBlock(br, width);
        ucol[i] = VectorBlock(bc, width);
        wrow[i] = VectorBlock(br, width);
    }
    for (auto& b : urow_part) b = VectorBlock(bc, width);
    for (auto& b : wrow_part) b = VectorBlock(br, width);

    u64 local_barriers = 0;
    std::barrier gate(static_cast<std::ptrdiff_t>(d * d));
    auto sync = [&] { gate.arrive_and_wait(); };

    auto worker = [&](std::size_t i, std::size_t j) {
        // scatter: each worker contributes its owned slice of v to the
        // copy of block-row i that the whole mesh row works from
        MeshLayout::Range own = layout_.n1_rows(i, j);
        for (std::size_t r = own.lo; r < own.hi && r < layout_.n1; ++r)
            std::copy(in.row(r), in.row(r) + rw, vrow[i].row(r - i * br));
        sync();

        // first half-product: u^T = v^T M on the local block
        const Block& blk = blocks_[i * d + j];
        VectorBlock& up = urow_part[i * d + j];
        for (std::size_t lr = 0; lr < br; ++lr) {
            const u64* src = vrow[i].row(lr);
            for (std::size_t k = blk.row_ptr[lr]; k < blk.row_ptr[lr + 1]; ++k) {
                u64* dst = up.row(blk.col_idx[k]);
                for (std::size_t w = 0; w < rw; ++w) dst[w] ^= src[w];
            }
        }
        sync();

        // column exchange: reduce the d partials for column j, then every
        // worker in the column reads the result back
        if (i == 0) {
            VectorBlock& acc = ucol[j];
            acc.clear();
            for (std::size_t t = 0; t < d; ++t)
                xor_inplace(acc, urow_part[t * d + j]);
        }
        sync();

        // second half-product: w = M u on the local block
        VectorBlock& wp = wrow_part[i * d + j];
        for (std::size_t lr = 0; lr < br; ++lr) {
            u64* dst = wp.row(lr);
            for (std::size_t k = blk.row_ptr[lr]; k < blk.row_ptr[lr + 1]; ++k) {
                const u64* src = ucol[j].row(blk.col_idx[k]);
                for (std::size_t w = 0; w < rw; ++w) dst[w] ^= src[w];
            }
        }
        sync();

        // row exchange, then gather the owned slice into the output
        if (j == 0) {
            VectorBlock& acc = wrow[i];
            acc.clear();
            for (std::size_t t = 0; t < d; ++t) xor_inplace(acc, wrow_part[i * d + t]);
        }
        sync();
        for (std::size_t r = own.lo; r < own.hi && r < layout_.n1; ++r)
            std::copy(wrow[i].row(r - i * br), wrow[i].row(r - i * br) + rw,
                      out.row(r));
    };

    if (d == 1) {
        worker(0, 0);
        local_barriers = 5;
    } else {
        std::vector<std::thread> pool;
        pool.reserve(d * d);
        for (std::size_t i = 0; i < d; ++i)
            for (std::size_t j = 0; j < d; ++j) pool.emplace_back(worker, i, j);
        for (auto& t : pool) t.join();
        local_barriers = 5;
    }

    // exchange volume depends only on the layout and the block width:
    // per column, d-1 partial sends plus d-1 broadcast sends of bc rows
    CommStats::Step s;
    s.step = comm_.steps.size();
    s.msgs1 = 2 * d * (d - 1);
    s.bits1 = s.msgs1 * bc * width;
    s.msgs2 = 2 * d * (d - 1);
    s.bits2 = s.msgs2 * br * width;
    comm_.steps.push_back(s);
    comm_.barriers += local_barriers;
    spmv_ += 2;
}

} // namespace blz
