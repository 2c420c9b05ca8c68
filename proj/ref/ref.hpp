#pragma once

// Naive bit-at-a-time reference implementations. These are the oracle side of
// the tests and the serial baseline in the kernel benchmark. Everything here
// favours obviousness over speed and shares no kernel code with the main
// library: dense 0/1 matrices, triple loops, schoolbook elimination.

#include <cstddef>
#include <vector>

#include "blz/bitblock.hpp"
#include "blz/sparse.hpp"

namespace blz::ref {

// dense 0/1 matrix, entry [r][c]
using Bits = std::vector<std::vector<u8>>;

Bits make_bits(std::size_t rows, std::size_t cols);
Bits to_bits(const VectorBlock& b);
Bits to_bits(const SmallMat& m);
VectorBlock block_from_bits(const Bits& b, std::size_t width);
SmallMat small_from_bits(const Bits& b);
Bits dense_from_sparse(const SparseMatrix& m);

Bits add(const Bits& a, const Bits& b);
Bits mul(const Bits& a, const Bits& b);
Bits transpose(const Bits& a);
bool equal(const Bits& a, const Bits& b);

std::size_t rank(Bits m);
// rows of the result form a basis of { x : x^T m = 0 }
Bits left_nullspace(const Bits& m);

// dense symmetric-operator product A = m m^T applied to b, all naive
Bits apply_mmt(const SparseMatrix& m, const Bits& b);

// F_p helpers for the scalar oracle; row-major n x n
struct FpMat {
    u32 p = 0;
    std::size_t n = 0;
    std::vector<u32> a;
    u32 at(std::size_t r, std::size_t c) const { return a[r * n + c]; }
    u32& at(std::size_t r, std::size_t c) { return a[r * n + c]; }
};

std::size_t fp_rank(FpMat m);
// solves m x = b by elimination; false when inconsistent
bool fp_solve(FpMat m, std::vector<u32> b, std::vector<u32>& x);

} // namespace blz::ref
