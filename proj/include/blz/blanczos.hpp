#pragma once

#include <cstddef>
#include <memory>
#include <vector>

#include "blz/bitblock.hpp"
#include "blz/operator.hpp"
#include "blz/pivoting.hpp"
#include "blz/sparse.hpp"

namespace blz {

// ceil(N / (width - 0.764)) computed exactly in integers; the expected step
// count for a block iteration on an N-dimensional operator.
u64 expected_iterations(u64 n, u64 width);

struct SolveConfig {
    std::size_t width = 64; // multiple of 64
    u64 seed = 1;
    int verify_level = 0; // 0 none, 1 cheap per-step checks, 2 full audit
    u64 max_iters = 0;    // 0: expected_iterations + max(32, dim/(10*width))
};

enum class Status {
    Success,
    EmptyKernel,
    PivotFailure,
    IterationCapExceeded,
};

const char* to_string(Status s);

struct StepStat {
    u64 iter = 0;
    std::size_t rank = 0; // popcount of the step's selection mask
};

struct StepOutput {
    DiagMask d;
    SmallMat winv;
    SmallMat vtav;  // v^T A v
    SmallMat vtaav; // (Av)^T (Av)
    bool terminated = false;
};

struct IterationState {
    VectorBlock v, p, x;
    SmallMat acc_vv, acc_vp; // v0^T v_i and v0^T p_i
    DiagMask d_prev;
    u64 iter = 0;
    std::vector<StepStat> telemetry;
};

struct SolveReport {
    Status status = Status::Success;
    VectorBlock solutions; // width == number of reported columns
    u64 iterations = 0;
    u64 spmv = 0;       // sparse products inside the iteration loop
    u64 spmv_extra = 0; // setup, harvest and verification products
    u64 seed = 0;
    // inhomogeneous solves: per-column success flags, empty otherwise
    std::vector<u8> solved_columns;
    std::vector<StepStat> telemetry;
};

// Drives the block iteration dim(A)-side. Each step applies A once, selects
// the pivot set (forcing last step's leftovers first), and advances v, p, the
// running solution x and the v0-projection accumulators.
class BlockIteration {
public:
    // v0 is consumed as the starting block; its width fixes the block width.
    BlockIteration(LinearOperator& a, VectorBlock v0, const SolveConfig& cfg);
    ~BlockIteration();

    StepOutput step(); // throws priority_error / verification_error
    bool terminated() const { return terminated_; }
    u64 max_iters() const { return max_iters_; }
    // sparse products consumed by audit checks, so callers can keep them out
    // of the per-iteration accounting
    u64 audit_spmv() const { return audit_spmv_; }

    const IterationState& state() const { return st_; }

private:
    struct Audit; // verification bookkeeping, allocated at level >= 2

    void check_step(const StepOutput& out, const VectorBlock& t_a);
    void check_termination();

    LinearOperator& a_;
    SolveConfig cfg_;
    IterationState st_;
    u64 max_iters_ = 0;
    u64 audit_spmv_ = 0;
    bool terminated_ = false;
    std::unique_ptr<Audit> audit_;
};

// Left-kernel harvest: random y, v0 = A y, iterate to termination, then sift
// independent columns x with x^T m = 0 out of [x - y | v_m]. The operator
// must realize m m^T (serial or mesh); m itself is needed for the sift.
SolveReport solve_left_nullspace(LinearOperator& a, const SparseMatrix& m,
                                 const SolveConfig& cfg);
SolveReport solve_left_nullspace(const SparseMatrix& m, const SolveConfig& cfg);

// Solves A u = b column-wise for a block b of k <= width columns by packing b
// into v0 next to random columns. Per-column failures are flagged, not thrown.
SolveReport solve_inhomogeneous(LinearOperator& a, const VectorBlock& b,
                                const SolveConfig& cfg);

} // namespace blz
