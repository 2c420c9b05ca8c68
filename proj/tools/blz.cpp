// blz: generate, solve, verify and benchmark sparse GF(2) left-kernel
// problems. Every command prints key=value lines on stdout; exit codes are
// 0 success, 1 usage or failed verification, 2 empty kernel, 3 pivot
// failure, 4 iteration cap exceeded, 5 I/O or format error.

#include <cstddef>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "blz/cli.hpp"

int main(int argc, char** argv) {
    CLI::App app{"sparse GF(2) left-kernel toolkit"};
    app.require_subcommand(1);

    std::size_t n1 = 0, n2 = 0, row_weight = 0, n = 0;
    blz::u64 trials = 0;
    bool ascii = false;
    blz::RunConfig cfg;

    auto* gen = app.add_subcommand("gen", "write a random sparse matrix");
    gen->add_option("n1", n1, "rows")->required();
    gen->add_option("n2", n2, "columns")->required();
    gen->add_option("row_weight", row_weight, "entries per row")->required();
    gen->add_option("--out", cfg.out, "output path")->required();
    gen->add_option("--seed", cfg.seed, "generator seed");
    gen->add_flag("--ascii", ascii, "text format instead of binary");

    auto* solve = app.add_subcommand("solve", "find left-kernel vectors");
    solve->add_option("--matrix", cfg.matrix, "matrix file")->required();
    solve->add_option("--out", cfg.out, "solutions output path");
    solve->add_option("--seed", cfg.seed, "starting-block seed");
    solve->add_option("--width", cfg.width, "block width, multiple of 64");
    solve->add_option("--mesh", cfg.mesh, "mesh side d; d*d workers");
    solve->add_option("--verify-level", cfg.verify_level,
                      "0 none, 1 per-step checks, 2 full audit");
    solve->add_option("--max-iters", cfg.max_iters,
                      "iteration cap; 0 picks the expected count");

    auto* verify = app.add_subcommand("verify", "check a solutions file");
    verify->add_option("--matrix", cfg.matrix, "matrix file")->required();
    verify->add_option("--out", cfg.out, "solutions file to check")->required();

    auto* stats =
        app.add_subcommand("stats", "rank defect of random symmetric matrices");
    stats->add_option("n", n, "matrix side")->required();
    stats->add_option("--trials", trials, "sample count")->default_val(10000);
    stats->add_option("--seed", cfg.seed, "sampling seed");

    auto* bench = app.add_subcommand("bench", "time repeated solves");
    bench->add_option("--matrix", cfg.matrix, "matrix file")->required();
    bench->add_option("--trials", trials, "repetitions")->default_val(1);
    bench->add_option("--seed", cfg.seed, "starting-block seed");
    bench->add_option("--width", cfg.width, "block width, multiple of 64");
    bench->add_option("--mesh", cfg.mesh, "mesh side d; d*d workers");
    bench->add_option("--max-iters", cfg.max_iters,
                      "iteration cap; 0 picks the expected count");

    auto* scalar = app.add_subcommand(
        "scalar", "scalar recurrence breakdown demonstration");
    scalar->add_option("n", n, "system size")->default_val(100);
    scalar->add_option("--trials", trials, "sample count")->default_val(100);
    scalar->add_option("--seed", cfg.seed, "sampling seed");

    CLI11_PARSE(app, argc, argv);

    if (gen->parsed())
        return blz::cmd_gen(n1, n2, row_weight, cfg.seed, cfg.out, ascii,
                            std::cout);
    if (solve->parsed()) return blz::cmd_solve(cfg, std::cout);
    if (verify->parsed()) return blz::cmd_verify(cfg.matrix, cfg.out, std::cout);
    if (stats->parsed())
        return blz::cmd_stats_rankdefect(n, trials, cfg.seed, std::cout);
    if (bench->parsed()) return blz::cmd_bench(cfg, trials, std::cout);
    if (scalar->parsed())
        return blz::cmd_scalar(n, trials, cfg.seed, std::cout);
    return blz::exit_failed;
}
