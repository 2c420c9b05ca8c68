#pragma once

// Command implementations behind the `blz` binary. They are plain functions
// over paths and streams so the test suite can drive them in-process; the
// binary itself only parses flags and dispatches here.

#include <cstddef>
#include <iosfwd>
#include <string>

#include "blz/common.hpp"

namespace blz {

// exit codes shared by the commands and the binary
inline constexpr int exit_ok = 0;
inline constexpr int exit_failed = 1; // usage errors and failed verification
inline constexpr int exit_empty_kernel = 2;
inline constexpr int exit_pivot_failure = 3;
inline constexpr int exit_iteration_cap = 4;
inline constexpr int exit_io = 5;

struct RunConfig {
    std::string matrix;
    std::string out;
    std::size_t width = 64;
    u64 seed = 1;
    int verify_level = 0;
    std::size_t mesh = 1;
    u64 max_iters = 0;
    u64 trials = 0;
};

int cmd_gen(std::size_t n1, std::size_t n2, std::size_t row_weight, u64 seed,
            const std::string& out, bool ascii, std::ostream& log);

// solves x^T M = 0, writes the solutions block to cfg.out on success and
// prints the report as key=value lines
int cmd_solve(const RunConfig& cfg, std::ostream& log);

// exit 0 iff every column is nonzero, the columns are independent, and
// x^T M = 0 holds for each; offenders are listed by index
int cmd_verify(const std::string& matrix, const std::string& solutions,
               std::ostream& log);

double mean_rank_defect(std::size_t n, std::size_t trials, u64 seed);
int cmd_stats_rankdefect(std::size_t n, std::size_t trials, u64 seed,
                         std::ostream& log);

// repeats the solve `reps` times, timing the iteration loop; prints comm
// traffic when running on a mesh
int cmd_bench(const RunConfig& cfg, std::size_t reps, std::ostream& log);

// runs the scalar recurrence demonstration over GF(2) and a large prime
int cmd_scalar(std::size_t n, std::size_t trials, u64 seed, std::ostream& log);

} // namespace blz
