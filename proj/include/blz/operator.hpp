#pragma once

#include <cstddef>

#include "blz/bitblock.hpp"

namespace blz {

// Symmetric N x N GF(2) operator applied to N x width blocks. Implementations
// may keep scratch, so apply is not reentrant on one instance.
class LinearOperator {
public:
    virtual ~LinearOperator() = default;
    virtual std::size_t dim() const = 0;
    virtual void apply(const VectorBlock& in, VectorBlock& out) = 0;
    // sparse products consumed so far; 0 for operators not built from a matrix
    virtual u64 spmv_count() const { return 0; }
};

} // namespace blz
