#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace blz {

using u8 = std::uint8_t;
using u32 = std::uint32_t;
using u64 = std::uint64_t;

struct io_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct dimension_error : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// choose_pivots got a non-symmetric Gram matrix
struct symmetry_error : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// a forced index could not be pivoted; aborts the whole solve
struct priority_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// an internal consistency check tripped (verify level 1/2)
struct verification_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// residual left the subspace it provably belongs to: a bug, not bad luck
struct residual_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// SplitMix64. All randomness in the library flows from one of these, seeded
// from the command line. Sub-streams come from fork(tag), which runs one extra
// mixing round over (state + tag*gamma) and never disturbs the parent.
// Constants: gamma 0x9e3779b97f4a7c15, mixers 0xbf58476d1ce4e5b9 and
// 0x94d049bb133111eb (the usual SplitMix64 set).
class Rng {
public:
    explicit Rng(u64 seed) : state_(seed) {}

    u64 next() {
        u64 z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    Rng fork(u64 tag) const {
        Rng t(state_ + tag * 0x9e3779b97f4a7c15ULL);
        return Rng(t.next());
    }

    // uniform in [0, bound), bound >= 1; rejection keeps it unbiased
    u64 below(u64 bound) {
        u64 threshold = (0 - bound) % bound;
        for (;;) {
            u64 r = next();
            if (r >= threshold)
                return r % bound;
        }
    }

    bool bit() { return next() & 1u; }

private:
    u64 state_;
};

} // namespace blz
