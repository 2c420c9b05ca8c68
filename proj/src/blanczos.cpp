#include "blz/blanczos.hpp"

#include <algorithm>
#include <bit>
#include <cstring>
#include <string>

#include "blz/gf2elim.hpp"

namespace blz {

u64 expected_iterations(u64 n, u64 width) {
    if (width < 2) throw dimension_error("block width must exceed 1");
    // ceil(n / (width - 0.764)) without touching floating point: the quotient
    // lands exactly on an integer for some inputs and doubles round it wrong.
    u64 den = 1000 * width - 764;
    return (1000 * n + den - 1) / den;
}

const char* to_string(Status s) {
    switch (s) {
        case Status::Success: return "Success";
        case Status::EmptyKernel: return "EmptyKernel";
        case Status::PivotFailure: return "PivotFailure";
        case Status::IterationCapExceeded: return "IterationCapExceeded";
    }
    return "?";
}

// Everything retained purely to cross-examine the iteration at verify level 2.
struct BlockIteration::Audit {
    VectorBlock v0;
    Rng rng;

    struct Checkpoint {
        u64 iter;
        VectorBlock w;
    };
    std::vector<Checkpoint> recent; // last few w_j
    std::vector<Checkpoint> old;    // reservoir of earlier ones
    u64 evicted = 0;

    // full per-step history, kept only on small systems
    bool full_history = false;
    std::vector<VectorBlock> hist_w;
    std::vector<SmallMat> hist_winv;
    std::vector<DiagMask> hist_dc;

    explicit Audit(VectorBlock v0_, u64 seed)
        : v0(std::move(v0_)), rng(Rng(seed).fork(0xa0d17)) {}
};

BlockIteration::BlockIteration(LinearOperator& a, VectorBlock v0,
                               const SolveConfig& cfg)
    : a_(a), cfg_(cfg) {
    const std::size_t n = cfg.width;
    if (n == 0 || n % 64)
        throw dimension_error("block width must be a positive multiple of 64");
    if (v0.width() != n) throw dimension_error("starting block width mismatch");
    if (v0.rows() != a.dim()) throw dimension_error("starting block row mismatch");

    max_iters_ = cfg.max_iters
                     ? cfg.max_iters
                     : expected_iterations(a.dim(), n) +
                           std::max<u64>(32, a.dim() / (10 * n));

    st_.v = std::move(v0);
    st_.p = VectorBlock(a.dim(), n);
    st_.x = VectorBlock(a.dim(), n);
    st_.acc_vv = inner(st_.v, st_.v);
    st_.acc_vp = SmallMat(n);
    st_.d_prev = DiagMask::full(n); // nothing is owed to step 0

    if (cfg.verify_level >= 2) {
        audit_ = std::make_unique<Audit>(st_.v, cfg.seed);
        audit_->full_history = a.dim() <= 512;
    }
}

BlockIteration::~BlockIteration() = default;

void BlockIteration::check_step(const StepOutput& out, const VectorBlock& t_a) {
    const std::size_t n = cfg_.width;
    const SmallMat zero(n);

    if (cfg_.verify_level >= 1) {
        if (!out.vtav.is_symmetric() || !out.vtaav.is_symmetric())
            throw verification_error("Gram matrix not symmetric at step " +
                                     std::to_string(st_.iter));
        // partial-inverse contracts, re-stated on the live data
        if (!out.winv.is_symmetric())
            throw verification_error("partial inverse not symmetric");
        if (out.winv != mask_rows(out.d, mask_apply(out.winv, out.d)))
            throw verification_error("partial inverse leaks off the selection");
        SmallMat sel = mask_rows(out.d, mask_apply(out.vtav, out.d));
        if (small_mul(out.winv, sel) != diag_mat(out.d))
            throw verification_error("partial inverse does not invert the minor");
    }
    if (cfg_.verify_level < 2) return;

    // selected principal minor really is nonsingular
    if (gf2_rank(to_bitmatrix(mask_rows(out.d, mask_apply(out.vtav, out.d)))) !=
        out.d.popcount())
        throw verification_error("selected minor is singular at step " +
                                 std::to_string(st_.iter));

    // A-orthogonality against the retained window: w_j^T (A v_i) must vanish
    for (const auto* side : {&audit_->recent, &audit_->old})
        for (const auto& cp : *side)
            if (inner(cp.w, t_a) != zero)
                throw verification_error(
                    "orthogonality lost between steps " + std::to_string(cp.iter) +
                    " and " + std::to_string(st_.iter));

    if (!out.terminated) {
        // transition matrix of the accumulator recurrence must be invertible
        const DiagMask dc = out.d.complement();
        SmallMat c = small_mul(out.winv, small_add(mask_apply(out.vtaav, out.d),
                                                   mask_apply(out.vtav, dc)));
        SmallMat s11 = small_add(diag_mat(dc), c);
        SmallMat s21 = mask_apply(out.vtav, out.d);
        BitMatrix trans(2 * n, 2 * n);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) {
                if (s11.get(i, j)) trans.set(i, j, true);
                if (out.winv.get(i, j)) trans.set(i, n + j, true);
                if (s21.get(i, j)) trans.set(n + i, j, true);
                if (dc.test(i) && i == j) trans.set(n + i, n + j, true);
            }
        if (gf2_rank(trans) != 2 * n)
            throw verification_error("singular transition at step " +
                                     std::to_string(st_.iter));
    }

    if (audit_->full_history && !audit_->hist_w.empty()) {
        // the short p recurrence must agree with the full-history combination:
        // sum_j w_j winv_j (prod_{j<k<i} (1-d_k)) (vtav_i d_i) == p_i (vtav_i d_i)
        SmallMat tail = mask_apply(out.vtav, out.d);
        VectorBlock lhs(st_.v.rows(), n);
        DiagMask live = DiagMask::full(n); // running product of complements
        for (std::size_t j = audit_->hist_w.size(); j-- > 0;) {
            SmallMat cj = small_mul(mask_apply(audit_->hist_winv[j], live), tail);
            xor_inplace(lhs, mul_block_small(audit_->hist_w[j], cj));
            for (std::size_t w = 0; w < words_for(live.n()); ++w)
                live.words()[w] &= audit_->hist_dc[j].words()[w];
        }
        if (lhs != mul_block_small(st_.p, tail))
            throw verification_error("p recurrence diverged from full history at step " +
                                     std::to_string(st_.iter));
    }
}

void BlockIteration::check_termination() {
    // Two facts about E = A x - v0 follow from the update algebra and are
    // checked here: every selected block satisfies w_j^T E = 0, and E stays
    // inside the space spanned by the iteration. Note that E does NOT in
    // general lie inside the span of the final block alone: over GF(2) a
    // selected block can be self-orthogonal, so plain orthogonality to the
    // w_j cannot pin E's components along them. Instances where E leaves
    // <v_m> occur routinely and are not a defect.
    const SmallMat zero(cfg_.width);
    VectorBlock ax(st_.x.rows(), cfg_.width);
    u64 before = a_.spmv_count();
    a_.apply(st_.x, ax);
    audit_spmv_ += a_.spmv_count() - before;
    xor_inplace(ax, audit_->v0);

    for (const auto* side : {&audit_->recent, &audit_->old})
        for (const auto& cp : *side)
            if (inner(cp.w, ax) != zero)
                throw verification_error(
                    "terminal residual not orthogonal to the block selected at step " +
                    std::to_string(cp.iter));

    if (audit_->full_history) {
        VectorBlock span = st_.v;
        for (const auto& w : audit_->hist_w) span = concat_columns(span, w);
        std::size_t base = gf2_rank(columns_of(span));
        std::size_t with = gf2_rank(columns_of(concat_columns(span, ax)));
        if (with != base)
            throw verification_error("terminal residual left the iterated span");
    }
}

StepOutput BlockIteration::step() {
    if (terminated_) throw verification_error("stepping a finished iteration");
    const std::size_t n = cfg_.width;

    VectorBlock t_a(st_.v.rows(), n);
    a_.apply(st_.v, t_a);

    StepOutput out;
    out.vtav = inner(st_.v, t_a);
    out.vtaav = inner(t_a, t_a);

    PivotResult pr = choose_pivots(out.vtav, st_.d_prev.complement());
    out.d = pr.d;
    out.winv = pr.winv;
    out.terminated = !pr.d.any();

    check_step(out, t_a);
    st_.telemetry.push_back({st_.iter, pr.rank});

    if (out.terminated) {
        st_.iter++;
        terminated_ = true;
        if (audit_) check_termination();
        return out;
    }

    const DiagMask dc = out.d.complement();
    SmallMat c = small_mul(out.winv, small_add(mask_apply(out.vtaav, out.d),
                                               mask_apply(out.vtav, dc)));
    SmallMat vtav_d = mask_apply(out.vtav, out.d);

    // x uses the pre-update projection v0^T v_i
    xor_inplace(st_.x, mul_block_small(
                           st_.v, small_mul(out.winv, small_transpose(st_.acc_vv))));

    VectorBlock v_next = mask_apply(t_a, out.d);
    xor_inplace(v_next, mask_apply(st_.v, dc));
    xor_inplace(v_next, mul_block_small(st_.v, c));
    xor_inplace(v_next, mul_block_small(st_.p, vtav_d));

    VectorBlock p_next = mul_block_small(st_.v, out.winv);
    xor_inplace(p_next, mask_apply(st_.p, dc));

    // v0^T A v_i does not recur; its two nonzero cases get added explicitly
    SmallMat corr(n);
    if (st_.iter == 0)
        corr = vtav_d;
    else if (st_.iter == 1)
        corr = mask_rows(st_.d_prev.complement(), vtav_d);

    SmallMat acc_vv_next =
        small_add(small_add(small_mul(st_.acc_vv, small_add(diag_mat(dc), c)),
                            small_mul(st_.acc_vp, vtav_d)),
                  corr);
    SmallMat acc_vp_next = small_add(small_mul(st_.acc_vv, out.winv),
                                     small_mul(st_.acc_vp, diag_mat(dc)));

    if (audit_) {
        VectorBlock w = mask_apply(st_.v, out.d);
        if (audit_->full_history) {
            audit_->hist_w.push_back(w);
            audit_->hist_winv.push_back(out.winv);
            audit_->hist_dc.push_back(dc);
        }
        audit_->recent.push_back({st_.iter, std::move(w)});
        if (audit_->recent.size() > 3) {
            auto cp = std::move(audit_->recent.front());
            audit_->recent.erase(audit_->recent.begin());
            audit_->evicted++;
            if (audit_->old.size() < 4)
                audit_->old.push_back(std::move(cp));
            else if (u64 slot = audit_->rng.below(audit_->evicted); slot < 4)
                audit_->old[slot] = std::move(cp);
        }
    }

    st_.v = std::move(v_next);
    st_.p = std::move(p_next);
    st_.acc_vv = std::move(acc_vv_next);
    st_.acc_vp = std::move(acc_vp_next);
    st_.d_prev = out.d;
    st_.iter++;

    if (audit_) {
        if (inner(audit_->v0, st_.v) != st_.acc_vv)
            throw verification_error("v projection accumulator diverged at step " +
                                     std::to_string(st_.iter - 1));
        if (inner(audit_->v0, st_.p) != st_.acc_vp)
            throw verification_error("p projection accumulator diverged at step " +
                                     std::to_string(st_.iter - 1));
    }
    return out;
}

namespace {

// Runs the iteration to termination or failure; fills the loop bookkeeping
// fields of the report and returns true when the iteration terminated cleanly.
bool run_loop(BlockIteration& it, LinearOperator& a, SolveReport& rep) {
    u64 before = a.spmv_count();
    bool ok = true;
    try {
        while (!it.terminated() && it.state().iter < it.max_iters()) it.step();
        if (!it.terminated()) {
            rep.status = Status::IterationCapExceeded;
            ok = false;
        }
    } catch (const priority_error&) {
        rep.status = Status::PivotFailure;
        ok = false;
    }
    rep.iterations = it.state().iter;
    rep.spmv = a.spmv_count() - before - it.audit_spmv();
    rep.spmv_extra += it.audit_spmv();
    rep.telemetry = it.state().telemetry;
    return ok;
}

} // namespace

SolveReport solve_left_nullspace(LinearOperator& a, const SparseMatrix& m,
                                 const SolveConfig& cfg) {
    const std::size_t n = cfg.width;
    SolveReport rep;
    rep.seed = cfg.seed;
    if (n == 0 || n % 64)
        throw dimension_error("block width must be a positive multiple of 64");
    if (a.dim() != m.n1) throw dimension_error("operator does not match matrix");

    Rng rng = Rng(cfg.seed).fork(0x5eed);
    VectorBlock y = VectorBlock::random(m.n1, n, rng);
    VectorBlock v0(m.n1, n);
    u64 mark = a.spmv_count();
    a.apply(y, v0);
    rep.spmv_extra += a.spmv_count() - mark;

    BlockIteration it(a, std::move(v0), cfg);
    if (!run_loop(it, a, rep)) {
        rep.solutions = VectorBlock(m.n1, 0);
        return rep;
    }

    // Candidates: combinations z of [x - y | v_m] with z^T M = 0. The columns
    // of M^T Z that eliminate to zero name exactly those combinations.
    VectorBlock xy = block_xor(it.state().x, y);
    VectorBlock z = concat_columns(xy, it.state().v);
    VectorBlock mtz = spmv_left(m, z);
    rep.spmv_extra += 1;

    BitMatrix mtz_cols = columns_of(mtz);
    Gf2Span sieve(m.n2, 2 * n);
    std::vector<std::vector<u64>> kept;
    Gf2Span indep(m.n1, 2 * n);
    std::vector<u64> dep(sieve.comb_words());
    for (std::size_t j = 0; j < 2 * n; ++j) {
        std::fill(dep.begin(), dep.end(), 0);
        if (sieve.add(mtz_cols.row(j), dep.data())) continue;
        dep[j >> 6] |= u64(1) << (j & 63); // close the combination over itself
        // materialize the candidate z * dep one row-parity at a time
        std::vector<u64> cand(words_for(m.n1), 0);
        for (std::size_t r = 0; r < m.n1; ++r) {
            u64 acc = 0;
            const u64* zr = z.row(r);
            for (std::size_t w = 0; w < z.row_words(); ++w) acc ^= zr[w] & dep[w];
            if (std::popcount(acc) & 1) cand[r >> 6] |= u64(1) << (r & 63);
        }
        if (indep.add(cand.data())) kept.push_back(std::move(cand));
    }

    VectorBlock sols(m.n1, kept.size());
    for (std::size_t j = 0; j < kept.size(); ++j)
        for (std::size_t r = 0; r < m.n1; ++r)
            if ((kept[j][r >> 6] >> (r & 63)) & 1) sols.set(r, j, true);

    if (!kept.empty()) {
        // none of these can fail by construction; checking is cheap insurance
        VectorBlock probe = spmv_left(m, sols);
        rep.spmv_extra += 1;
        std::vector<std::size_t> good;
        for (std::size_t j = 0; j < sols.width(); ++j)
            if (probe.column_is_zero(j) && !sols.column_is_zero(j)) good.push_back(j);
        if (good.size() != sols.width()) {
            VectorBlock trimmed(m.n1, good.size());
            for (std::size_t j = 0; j < good.size(); ++j)
                for (std::size_t r = 0; r < m.n1; ++r)
                    if (sols.get(r, good[j])) trimmed.set(r, j, true);
            sols = std::move(trimmed);
        }
    }

    rep.solutions = std::move(sols);
    rep.status = rep.solutions.width() ? Status::Success : Status::EmptyKernel;
    return rep;
}

SolveReport solve_left_nullspace(const SparseMatrix& m, const SolveConfig& cfg) {
    AOperator a(m);
    return solve_left_nullspace(a, m, cfg);
}

SolveReport solve_inhomogeneous(LinearOperator& a, const VectorBlock& b,
                                const SolveConfig& cfg) {
    const std::size_t n = cfg.width;
    const std::size_t k = b.width();
    SolveReport rep;
    rep.seed = cfg.seed;
    if (n == 0 || n % 64)
        throw dimension_error("block width must be a positive multiple of 64");
    if (k > n) throw dimension_error("more right-hand sides than block columns");
    if (b.rows() != a.dim()) throw dimension_error("right-hand side row mismatch");

    // v0 = [b | random completion]
    Rng rng = Rng(cfg.seed).fork(0xb0);
    VectorBlock v0 = VectorBlock::random(a.dim(), n, rng);
    for (std::size_t r = 0; r < v0.rows(); ++r) {
        u64* dst = v0.row(r);
        for (std::size_t w = 0; w < words_for(k); ++w) {
            u64 keep = (w + 1 == words_for(k) && k % 64) ? ~tail_mask(k) : 0;
            dst[w] = (dst[w] & keep) | b.row(r)[w];
        }
    }

    BlockIteration it(a, v0, cfg); // keeps a copy of v0 for the residual
    if (!run_loop(it, a, rep)) {
        rep.solutions = VectorBlock(a.dim(), k);
        rep.solved_columns.assign(k, 0);
        return rep;
    }

    const VectorBlock& vm = it.state().v;
    const VectorBlock& x = it.state().x;

    VectorBlock e(a.dim(), n), f(a.dim(), n);
    u64 mark = a.spmv_count();
    a.apply(x, e);
    a.apply(vm, f);
    rep.spmv_extra += a.spmv_count() - mark;
    xor_inplace(e, v0);

    // A column j is solvable when its residual is a combination of the
    // columns of A v_m; columns with no such combination are heuristic
    // misses, reported individually rather than failing the whole call.
    BitMatrix e_cols = columns_of(e);
    BitMatrix f_cols = columns_of(f);
    Gf2Span fspan(a.dim(), n);
    for (std::size_t j = 0; j < n; ++j) fspan.add(f_cols.row(j));

    rep.solved_columns.assign(k, 0);
    SmallMat s(n); // column j holds the combination of v_m columns for b_j
    std::vector<u64> coeff(fspan.comb_words());
    std::vector<u64> resub(words_for(a.dim()));
    for (std::size_t j = 0; j < k; ++j) {
        std::fill(coeff.begin(), coeff.end(), 0);
        if (!fspan.express(e_cols.row(j), coeff.data())) continue; // reported, not fatal
        // re-substitute; a mismatch here is elimination bookkeeping gone wrong
        std::fill(resub.begin(), resub.end(), 0);
        for (std::size_t t = 0; t < n; ++t)
            if ((coeff[t >> 6] >> (t & 63)) & 1)
                for (std::size_t w = 0; w < resub.size(); ++w)
                    resub[w] ^= f_cols.row(t)[w];
        if (std::memcmp(resub.data(), e_cols.row(j), resub.size() * sizeof(u64)))
            throw residual_error("expressed residual does not reproduce column " +
                                 std::to_string(j));
        rep.solved_columns[j] = 1;
        for (std::size_t t = 0; t < n; ++t)
            if ((coeff[t >> 6] >> (t & 63)) & 1) s.set(t, j, true);
    }

    VectorBlock u_full = block_xor(x, mul_block_small(vm, s));
    VectorBlock sols = take_columns(u_full, k);
    for (std::size_t j = 0; j < k; ++j)
        if (!rep.solved_columns[j])
            for (std::size_t r = 0; r < sols.rows(); ++r) sols.set(r, j, false);

    if (k) {
        VectorBlock check(a.dim(), k);
        mark = a.spmv_count();
        a.apply(sols, check);
        rep.spmv_extra += a.spmv_count() - mark;
        for (std::size_t j = 0; j < k; ++j) {
            if (!rep.solved_columns[j]) continue;
            for (std::size_t r = 0; r < b.rows(); ++r)
                if (check.get(r, j) != b.get(r, j)) {
                    rep.solved_columns[j] = 0;
                    break;
                }
        }
    }

    rep.solutions = std::move(sols);
    rep.status = Status::Success;
    return rep;
}

} // namespace blz
