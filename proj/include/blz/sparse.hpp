#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

#include "blz/bitblock.hpp"
#include "blz/operator.hpp"

namespace blz {

// n1 x n2 sparse GF(2) matrix in CSR form. col_idx strictly increases within
// each row; row_ptr has n1+1 entries with row_ptr[0] == 0.
struct SparseMatrix {
    std::size_t n1 = 0, n2 = 0;
    std::vector<u64> row_ptr;
    std::vector<u32> col_idx;

    std::size_t nnz() const { return col_idx.size(); }
    void validate() const; // throws dimension_error on a broken invariant
};

// exactly row_weight distinct sorted columns per row, reproducible from seed
SparseMatrix gen_random(std::size_t n1, std::size_t n2, std::size_t row_weight,
                        u64 seed);

// Text format: header line "n1 n2 nnz", then nnz lines "row col", zero-based,
// in strictly increasing (row, col) order. Binary format: magic "SMF2", then
// n1, n2, nnz as u64 little-endian, row_ptr, col_idx. load() sniffs the magic.
void save_ascii(const SparseMatrix& m, std::ostream& out);
void save_binary(const SparseMatrix& m, std::ostream& out);
void save_ascii(const SparseMatrix& m, const std::string& path);
void save_binary(const SparseMatrix& m, const std::string& path);
SparseMatrix load_matrix(std::istream& in);
SparseMatrix load_matrix(const std::string& path);

// u^T = v^T M: result has n2 rows; row c collects v rows r with M(r,c) = 1
VectorBlock spmv_left(const SparseMatrix& m, const VectorBlock& v);
// v = M u: result has n1 rows; row r collects u rows listed in row r of M
VectorBlock spmv_right(const SparseMatrix& m, const VectorBlock& u);

// A = M M^T as a black box: two sparse products per apply. Owns an n2-row
// scratch block, hence not reentrant per instance.
class AOperator final : public LinearOperator {
public:
    explicit AOperator(const SparseMatrix& m) : m_(&m) {}

    std::size_t dim() const override { return m_->n1; }
    // accepts any block width; the scratch resizes on a width change
    void apply(const VectorBlock& in, VectorBlock& out) override;
    u64 spmv_count() const override { return spmv_; }

private:
    const SparseMatrix* m_;
    VectorBlock scratch_;
    u64 spmv_ = 0;
};

// VectorBlock file format: magic "VBLK", u32 LE rows, u32 LE width, then
// rows * ceil(width/8) bytes, row-major, little-endian within each row.
void save_block(const VectorBlock& b, const std::string& path);
VectorBlock load_block(const std::string& path);

} // namespace blz
