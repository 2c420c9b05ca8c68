#include "blz/cli.hpp"

#include <algorithm>
#include <chrono>
#include <iomanip>
#include <memory>
#include <ostream>
#include <vector>

#include "blz/blanczos.hpp"
#include "blz/gf2elim.hpp"
#include "blz/mesh.hpp"
#include "blz/scalar_lanczos.hpp"
#include "blz/sparse.hpp"

namespace blz {

namespace {

int status_exit(Status s) {
    switch (s) {
        case Status::Success: return exit_ok;
        case Status::EmptyKernel: return exit_empty_kernel;
        case Status::PivotFailure: return exit_pivot_failure;
        case Status::IterationCapExceeded: return exit_iteration_cap;
    }
    return exit_failed;
}

bool bad_run_config(const RunConfig& cfg, std::ostream& log) {
    if (cfg.width == 0 || cfg.width % 64) {
        log << "error=width must be a positive multiple of 64\n";
        return true;
    }
    if (cfg.mesh == 0) {
        log << "error=mesh side must be at least 1\n";
        return true;
    }
    if (cfg.verify_level < 0 || cfg.verify_level > 2) {
        log << "error=verify level must be 0, 1 or 2\n";
        return true;
    }
    return false;
}

std::unique_ptr<LinearOperator> make_operator(const SparseMatrix& m,
                                              std::size_t mesh_side) {
    if (mesh_side > 1)
        return std::make_unique<MeshAOperator>(m, mesh_side);
    return std::make_unique<AOperator>(m);
}

void print_report(const SolveReport& r, std::ostream& log) {
    log << "status=" << to_string(r.status) << '\n'
        << "iterations=" << r.iterations << '\n'
        << "spmv=" << r.spmv << '\n'
        << "spmv_extra=" << r.spmv_extra << '\n'
        << "solutions=" << r.solutions.width() << '\n'
        << "seed=" << r.seed << '\n';
}

// one bit at a time off a shared word buffer
struct BitDraw {
    Rng& rng;
    u64 cache = 0;
    unsigned left = 0;

    bool next() {
        if (left == 0) {
            cache = rng.next();
            left = 64;
        }
        bool b = cache & 1;
        cache >>= 1;
        --left;
        return b;
    }
};

} // namespace

int cmd_gen(std::size_t n1, std::size_t n2, std::size_t row_weight, u64 seed,
            const std::string& out, bool ascii, std::ostream& log) {
    if (out.empty()) {
        log << "error=gen needs an output path\n";
        return exit_failed;
    }
    SparseMatrix m;
    try {
        m = gen_random(n1, n2, row_weight, seed);
    } catch (const dimension_error& e) {
        log << "error=" << e.what() << '\n';
        return exit_failed;
    }
    try {
        if (ascii)
            save_ascii(m, out);
        else
            save_binary(m, out);
    } catch (const io_error& e) {
        log << "error=" << e.what() << '\n';
        return exit_io;
    }
    log << "n1=" << m.n1 << '\n'
        << "n2=" << m.n2 << '\n'
        << "nnz=" << m.nnz() << '\n'
        << "seed=" << seed << '\n'
        << "out=" << out << '\n';
    return exit_ok;
}

int cmd_solve(const RunConfig& cfg, std::ostream& log) {
    if (cfg.matrix.empty()) {
        log << "error=solve needs --matrix\n";
        return exit_failed;
    }
    if (bad_run_config(cfg, log)) return exit_failed;

    SparseMatrix m;
    try {
        m = load_matrix(cfg.matrix);
    } catch (const std::exception& e) {
        log << "error=" << e.what() << '\n';
        return exit_io;
    }

    SolveConfig scfg;
    scfg.width = cfg.width;
    scfg.seed = cfg.seed;
    scfg.verify_level = cfg.verify_level;
    scfg.max_iters = cfg.max_iters;

    SolveReport report;
    try {
        auto op = make_operator(m, cfg.mesh);
        report = solve_left_nullspace(*op, m, scfg);
    } catch (const std::exception& e) {
        log << "error=" << e.what() << '\n';
        return exit_failed;
    }

    print_report(report, log);
    if (report.status == Status::Success && !cfg.out.empty()) {
        try {
            save_block(report.solutions, cfg.out);
        } catch (const io_error& e) {
            log << "error=" << e.what() << '\n';
            return exit_io;
        }
        log << "out=" << cfg.out << '\n';
    }
    return status_exit(report.status);
}

int cmd_verify(const std::string& matrix, const std::string& solutions,
               std::ostream& log) {
    SparseMatrix m;
    VectorBlock x;
    try {
        m = load_matrix(matrix);
        x = load_block(solutions);
    } catch (const std::exception& e) {
        log << "error=" << e.what() << '\n';
        return exit_io;
    }
    if (x.rows() != m.n1) {
        log << "error=solution block has " << x.rows() << " rows, matrix has "
            << m.n1 << '\n';
        return exit_io;
    }
    if (x.width() == 0) {
        log << "error=solution block carries no columns\n";
        return exit_failed;
    }

    VectorBlock xtm = spmv_left(m, x);
    BitMatrix cols = columns_of(x);
    Gf2Span span(x.rows(), x.width());
    std::size_t good = 0;
    for (std::size_t c = 0; c < x.width(); ++c) {
        const char* reason = nullptr;
        if (x.column_is_zero(c))
            reason = "zero";
        else if (!span.add(cols.row(c)))
            reason = "dependent";
        else if (!xtm.column_is_zero(c))
            reason = "outside_kernel";
        if (reason)
            log << "bad_column=" << c << " reason=" << reason << '\n';
        else
            ++good;
    }
    log << "columns=" << x.width() << '\n' << "good=" << good << '\n';
    return good == x.width() ? exit_ok : exit_failed;
}

double mean_rank_defect(std::size_t n, std::size_t trials, u64 seed) {
    Rng rng(seed);
    BitDraw draw{rng};
    u64 total = 0;
    for (std::size_t t = 0; t < trials; ++t) {
        BitMatrix s(n, n);
        for (std::size_t r = 0; r < n; ++r)
            for (std::size_t c = r; c < n; ++c)
                if (draw.next()) {
                    s.set(r, c, true);
                    s.set(c, r, true);
                }
        total += n - gf2_rank(std::move(s));
    }
    return double(total) / double(trials);
}

int cmd_stats_rankdefect(std::size_t n, std::size_t trials, u64 seed,
                         std::ostream& log) {
    if (n == 0 || trials == 0) {
        log << "error=stats needs n >= 1 and trials >= 1\n";
        return exit_failed;
    }
    double mean = mean_rank_defect(n, trials, seed);
    log << "n=" << n << '\n'
        << "trials=" << trials << '\n'
        << "seed=" << seed << '\n'
        << "mean_defect=" << std::fixed << std::setprecision(6) << mean
        << '\n';
    return exit_ok;
}

int cmd_bench(const RunConfig& cfg, std::size_t reps, std::ostream& log) {
    if (reps == 0) {
        log << "error=bench needs at least one repetition (--trials)\n";
        return exit_failed;
    }
    if (cfg.matrix.empty()) {
        log << "error=bench needs --matrix\n";
        return exit_failed;
    }
    if (bad_run_config(cfg, log)) return exit_failed;

    SparseMatrix m;
    try {
        m = load_matrix(cfg.matrix);
    } catch (const std::exception& e) {
        log << "error=" << e.what() << '\n';
        return exit_io;
    }

    SolveConfig scfg;
    scfg.width = cfg.width;
    scfg.seed = cfg.seed;
    scfg.verify_level = cfg.verify_level;
    scfg.max_iters = cfg.max_iters;

    SolveReport report;
    double best_ms = 0;
    std::string comm_text;
    u64 comm_barriers = 0;
    for (std::size_t rep = 0; rep < reps; ++rep) {
        // fresh operator per rep so product and traffic counters start at zero
        auto op = make_operator(m, cfg.mesh);
        auto t0 = std::chrono::steady_clock::now();
        SolveReport r;
        try {
            r = solve_left_nullspace(*op, m, scfg);
        } catch (const std::exception& e) {
            log << "error=" << e.what() << '\n';
            return exit_failed;
        }
        auto t1 = std::chrono::steady_clock::now();
        double ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
        if (rep == 0 || ms < best_ms) best_ms = ms;
        if (rep == 0 && cfg.mesh > 1) {
            auto* mesh = static_cast<MeshAOperator*>(op.get());
            comm_text = mesh->comm().text();
            comm_barriers = mesh->comm().barriers;
        }
        report = std::move(r);
    }

    print_report(report, log);
    log << "reps=" << reps << '\n';
    // two products per step is structural; a drift here is a solver bug
    if (report.spmv != 2 * report.iterations) {
        log << "check=spmv_twice_per_iteration FAIL\n";
        return exit_failed;
    }
    log << "check=spmv_twice_per_iteration PASS\n";
    double per_iter =
        report.iterations ? best_ms / double(report.iterations) : best_ms;
    log << "ms_per_iter=" << std::fixed << std::setprecision(4) << per_iter
        << '\n';
    if (cfg.mesh > 1) {
        log << "barriers=" << comm_barriers << '\n';
        log << comm_text;
    }
    return status_exit(report.status);
}

int cmd_scalar(std::size_t n, std::size_t trials, u64 seed, std::ostream& log) {
    if (n == 0 || trials == 0) {
        log << "error=scalar needs n >= 1 and trials >= 1\n";
        return exit_failed;
    }
    for (u64 p : {u64(2), u64(65537)}) {
        BreakdownStats st = breakdown_demo(n, trials, p, seed);
        std::size_t early = 0;
        for (std::size_t i : st.breakdown_at)
            if (i < 10) ++early;
        log << "p=" << p << " trials=" << st.trials
            << " succeeded=" << st.succeeded
            << " breakdowns=" << st.breakdown_at.size()
            << " early_before_step_10=" << early << '\n';
    }
    return exit_ok;
}

} // namespace blz
