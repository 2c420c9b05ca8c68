#pragma once

#include <cstddef>

#include "blz/bitblock.hpp"

namespace blz {

struct PivotResult {
    DiagMask d;      // selected column set
    SmallMat winv;   // symmetric; winv = d winv d; winv (d vtav d) = d
    std::size_t rank = 0;
};

// Symmetric Gaussian elimination over [vtav | I] selecting a maximal
// independent column set: priority indices first in ascending order, then the
// rest ascending, each column kept iff independent of the columns already
// kept. The right half ends up holding the inverse of the selected principal
// submatrix, zero on unselected rows and columns.
//
// A zero vtav returns rank 0 whatever the priority (termination signal).
// A priority index that cannot be selected raises priority_error; input that
// is not symmetric raises symmetry_error.
PivotResult choose_pivots(const SmallMat& vtav, const DiagMask& priority);

} // namespace blz
