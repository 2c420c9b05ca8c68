#include "blz/pivoting.hpp"

#include <string>
#include <vector>

namespace blz {

namespace {

bool is_zero(const SmallMat& m) {
    for (std::size_t i = 0; i < m.n(); ++i)
        for (std::size_t w = 0; w < m.row_words(); ++w)
            if (m.row(i)[w]) return false;
    return true;
}

} // namespace

PivotResult choose_pivots(const SmallMat& vtav, const DiagMask& priority) {
    const std::size_t n = vtav.n();
    if (priority.n() != n) throw dimension_error("priority mask size mismatch");
    if (!vtav.is_symmetric()) throw symmetry_error("pivot input not symmetric");

    PivotResult out{DiagMask(n), SmallMat(n), 0};
    if (is_zero(vtav)) return out; // nothing selectable: termination signal

    const std::size_t rw = vtav.row_words();
    // Work on [X | I] as two parallel row arrays. Row contents get swapped,
    // never the column order, so column c always means index c.
    std::vector<u64> x(n * rw), id(n * rw, 0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t w = 0; w < rw; ++w) x[i * rw + w] = vtav.row(i)[w];
        id[i * rw + (i >> 6)] = u64(1) << (i & 63);
    }

    // Candidate order: forced indices ascending, then the rest ascending.
    std::vector<u32> cols;
    cols.reserve(n);
    for (std::size_t i = 0; i < n; ++i)
        if (priority.test(i)) cols.push_back(static_cast<u32>(i));
    for (std::size_t i = 0; i < n; ++i)
        if (!priority.test(i)) cols.push_back(static_cast<u32>(i));

    auto swap_rows = [&](std::size_t a, std::size_t b) {
        if (a == b) return;
        for (std::size_t w = 0; w < rw; ++w) {
            std::swap(x[a * rw + w], x[b * rw + w]);
            std::swap(id[a * rw + w], id[b * rw + w]);
        }
    };
    auto add_row = [&](std::size_t dst, std::size_t src) {
        for (std::size_t w = 0; w < rw; ++w) {
            x[dst * rw + w] ^= x[src * rw + w];
            id[dst * rw + w] ^= id[src * rw + w];
        }
    };

    for (std::size_t i = 0; i < n; ++i) {
        const u32 c = cols[i];
        const std::size_t cw = c >> 6;
        const u64 cb = u64(1) << (c & 63);

        // Pivot on column c using a row from the not-yet-processed set.
        std::size_t piv = n;
        for (std::size_t j = i; j < n; ++j)
            if (x[cols[j] * rw + cw] & cb) {
                piv = j;
                break;
            }

        if (piv < n) {
            swap_rows(cols[i], cols[piv]);
            for (std::size_t r = 0; r < n; ++r)
                if (r != cols[i] && (x[r * rw + cw] & cb)) add_row(r, cols[i]);
            out.d.set(c);
            ++out.rank;
        } else {
            // Column c is dependent on the selected set. Clear the row that
            // still represents it (found through the identity half) so later
            // pivots never touch it.
            for (std::size_t j = i; j < n; ++j)
                if (id[cols[j] * rw + cw] & cb) {
                    piv = j;
                    break;
                }
            if (piv == n) throw verification_error("pivot bookkeeping lost a row");
            swap_rows(cols[i], cols[piv]);
            for (std::size_t r = 0; r < n; ++r)
                if (r != cols[i] && (id[r * rw + cw] & cb)) add_row(r, cols[i]);
            for (std::size_t w = 0; w < rw; ++w) {
                x[cols[i] * rw + w] = 0;
                id[cols[i] * rw + w] = 0;
            }
        }
    }

    for (std::size_t i = 0; i < n; ++i)
        if (priority.test(i) && !out.d.test(i))
            throw priority_error("forced index " + std::to_string(i) +
                                 " is dependent on the other forced indices");

    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t w = 0; w < rw; ++w) out.winv.row(i)[w] = id[i * rw + w];
    return out;
}

} // namespace blz
