#pragma once

// Standard (non-blocked) Lanczos over F_p. This exists as a cross-check
// oracle for the block solver and as a demonstrator of why plain Lanczos
// cannot run over GF(2): self-orthogonal vectors stop it almost at once.

#include <cstddef>
#include <vector>

#include "blz/common.hpp"

namespace blz {

struct field_error : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// raised when v^T A v = 0 with v != 0; carries the step it happened at
struct isotropic_breakdown : std::runtime_error {
    std::size_t index;
    explicit isotropic_breakdown(std::size_t i)
        : std::runtime_error("self-orthogonal vector at step " + std::to_string(i)),
          index(i) {}
};

// odd prime < 2^31, validated by trial division; elements live in [0, p)
class PrimeField {
public:
    explicit PrimeField(u64 p);
    u32 p() const { return p_; }

    u32 add(u32 a, u32 b) const;
    u32 sub(u32 a, u32 b) const;
    u32 mul(u32 a, u32 b) const;
    u32 inv(u32 a) const; // a != 0
    u32 neg(u32 a) const { return a ? p_ - a : 0; }

private:
    u32 p_;
};

// dense symmetric matrix over F_p, row-major
struct FpDense {
    std::size_t n = 0;
    std::vector<u32> a;

    FpDense() = default;
    explicit FpDense(std::size_t n_) : n(n_), a(n_ * n_, 0) {}
    u32 at(std::size_t r, std::size_t c) const { return a[r * n + c]; }
    u32& at(std::size_t r, std::size_t c) { return a[r * n + c]; }
};

struct ScalarResult {
    std::vector<u32> x;
    std::size_t iterations = 0; // steps that consumed a product by A
};

// Solves A x = b over F_p with the three-term recurrence, starting from
// v_0 = b. Throws isotropic_breakdown when the iteration hits a nonzero
// self-orthogonal vector. When trace is given, every nonzero v_i is
// appended to it (diagnostics and the orthogonality tests).
ScalarResult lanczos_solve(const FpDense& a, const std::vector<u32>& b, u64 p,
                           std::vector<std::vector<u32>>* trace = nullptr);

// Same recurrence with only "p >= 2 prime" assumed, so it can run over
// GF(2); this is the demonstration path, not the supported API.
ScalarResult lanczos_solve_raw(const FpDense& a, const std::vector<u32>& b, u64 p,
                               std::vector<std::vector<u32>>* trace = nullptr);

struct BreakdownStats {
    std::size_t trials = 0;
    std::size_t succeeded = 0;
    std::vector<std::size_t> breakdown_at; // one entry per failed trial
};

// Runs the scalar recurrence on `trials` random symmetric systems of size n
// over F_p and records where each run broke down. Documents the failure
// mode; no attempt is made to work around it.
BreakdownStats breakdown_demo(std::size_t n, std::size_t trials, u64 p, u64 seed);

} // namespace blz
