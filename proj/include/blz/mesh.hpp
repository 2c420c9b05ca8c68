#pragma once

// A d x d worker mesh computing A = M M^T as two half-products, with the
// fragment ownership and per-column/per-row exchange pattern used by the
// message-passing implementations, simulated with threads in one process.
// The measurable properties (who owns what, how many collective phases,
// how much data moves) match the distributed setting exactly; only the
// wire is missing.

#include <cstddef>
#include <string>
#include <vector>

#include "blz/operator.hpp"
#include "blz/sparse.hpp"

namespace blz {

struct MeshLayout {
    std::size_t d = 1;
    std::size_t n1 = 0, n2 = 0;   // matrix dimensions as given
    std::size_t n1p = 0, n2p = 0; // padded up to multiples of d*d

    struct Range {
        std::size_t lo = 0, hi = 0; // [lo, hi)
        std::size_t size() const { return hi - lo; }
    };

    // fragment of a length-n1 vector owned by worker (i, j)
    Range n1_rows(std::size_t i, std::size_t j) const {
        std::size_t f = n1p / (d * d);
        return {(d * i + j) * f, (d * i + j + 1) * f};
    }
    // fragment of a length-n2 vector owned by worker (i, j); note the
    // transposed indexing, which lines fragments up with mesh columns
    Range n2_rows(std::size_t i, std::size_t j) const {
        std::size_t f = n2p / (d * d);
        return {(d * j + i) * f, (d * j + i + 1) * f};
    }
    // matrix sub-block held by worker (i, j)
    Range block_rows(std::size_t i) const {
        return {i * (n1p / d), (i + 1) * (n1p / d)};
    }
    Range block_cols(std::size_t j) const {
        return {j * (n2p / d), (j + 1) * (n2p / d)};
    }
};

MeshLayout plan_layout(std::size_t n1, std::size_t n2, std::size_t d);

struct CommStats {
    struct Step {
        u64 step = 0;
        u64 bits1 = 0, msgs1 = 0; // column exchange after v^T M
        u64 bits2 = 0, msgs2 = 0; // row exchange after M u
    };
    std::vector<Step> steps;
    u64 barriers = 0;

    // two lines per step: "step=<i> phase=<1|2> bits=<v> msgs=<m>"
    std::string text() const;
};

class MeshAOperator final : public LinearOperator {
public:
    MeshAOperator(const SparseMatrix& m, std::size_t d);

    std::size_t dim() const override { return layout_.n1; }
    void apply(const VectorBlock& in, VectorBlock& out) override;
    u64 spmv_count() const override { return spmv_; }

    const MeshLayout& layout() const { return layout_; }
    const CommStats& comm() const { return comm_; }

private:
    // worker (i, j)'s slice of M in local coordinates
    struct Block {
        std::vector<std::size_t> row_ptr;
        std::vector<u32> col_idx;
    };

    MeshLayout layout_;
    std::vector<Block> blocks_; // indexed i * d + j
    CommStats comm_;
    u64 spmv_ = 0;
};

} // namespace blz
