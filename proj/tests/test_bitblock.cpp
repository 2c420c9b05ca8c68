#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "blz/bitblock.hpp"
#include "ref/ref.hpp"

using namespace blz;

namespace {

SmallMat random_small(std::size_t n, Rng& rng) {
    SmallMat m(n);
    for (std::size_t r = 0; r < n; ++r) {
        for (std::size_t w = 0; w < m.row_words(); ++w)
            m.row(r)[w] = rng.next();
        m.row(r)[m.row_words() - 1] &= tail_mask(n);
    }
    return m;
}

DiagMask random_mask(std::size_t n, Rng& rng) {
    DiagMask d(n);
    for (std::size_t i = 0; i < n; ++i)
        d.set(i, rng.bit());
    return d;
}

// d as an n x n diagonal 0/1 matrix, for the oracle side
ref::Bits mask_bits(const DiagMask& d) {
    ref::Bits m = ref::make_bits(d.n(), d.n());
    for (std::size_t i = 0; i < d.n(); ++i)
        m[i][i] = d.test(i);
    return m;
}

} // namespace

TEST_CASE("xor, inner, mul agree with the naive oracle on random blocks") {
    Rng rng(0x1bb0);
    std::size_t cases = 0;
    // widths beyond one word get fewer rounds; the naive side is slow
    const struct { std::size_t n, rounds; } plan[] = {
        {64, 850}, {128, 120}, {192, 40},
    };
    for (auto [n, rounds] : plan) {
        for (std::size_t it = 0; it < rounds; ++it) {
            std::size_t rows = 1 + rng.below(32);
            VectorBlock a = VectorBlock::random(rows, n, rng);
            VectorBlock b = VectorBlock::random(rows, n, rng);
            SmallMat m = random_small(n, rng);

            REQUIRE(ref::to_bits(block_xor(a, b)) ==
                    ref::add(ref::to_bits(a), ref::to_bits(b)));
            REQUIRE(ref::to_bits(inner(a, b)) ==
                    ref::mul(ref::transpose(ref::to_bits(a)), ref::to_bits(b)));
            REQUIRE(ref::to_bits(mul_block_small(a, m)) ==
                    ref::mul(ref::to_bits(a), ref::to_bits(m)));
            ++cases;
        }
    }
    CHECK(cases >= 1000);
}

TEST_CASE("inner transpose symmetry: inner(a,b) == inner(b,a)^T") {
    Rng rng(0x1bb1);
    for (int it = 0; it < 200; ++it) {
        std::size_t rows = 1 + rng.below(100);
        VectorBlock a = VectorBlock::random(rows, 64, rng);
        VectorBlock b = VectorBlock::random(rows, 64, rng);
        CHECK(inner(a, b) == small_transpose(inner(b, a)));
    }
}

TEST_CASE("mul_block_small is associative with small_mul") {
    Rng rng(0x1bb2);
    for (int it = 0; it < 100; ++it) {
        std::size_t rows = 1 + rng.below(64);
        VectorBlock a = VectorBlock::random(rows, 64, rng);
        SmallMat m1 = random_small(64, rng);
        SmallMat m2 = random_small(64, rng);
        CHECK(mul_block_small(mul_block_small(a, m1), m2) ==
              mul_block_small(a, small_mul(m1, m2)));
    }
}

TEST_CASE("small ops agree with the oracle") {
    Rng rng(0x1bb3);
    for (std::size_t n : {64u, 128u}) {
        for (int it = 0; it < 50; ++it) {
            SmallMat a = random_small(n, rng);
            SmallMat b = random_small(n, rng);
            CHECK(ref::to_bits(small_mul(a, b)) ==
                  ref::mul(ref::to_bits(a), ref::to_bits(b)));
            CHECK(ref::to_bits(small_add(a, b)) ==
                  ref::add(ref::to_bits(a), ref::to_bits(b)));
            CHECK(ref::to_bits(small_transpose(a)) ==
                  ref::transpose(ref::to_bits(a)));
        }
    }
}

TEST_CASE("identity-pattern block: inner with itself is the identity") {
    VectorBlock e(64, 64);
    for (std::size_t i = 0; i < 64; ++i)
        e.set(i, i, true);
    CHECK(inner(e, e) == SmallMat::identity(64));
}

TEST_CASE("mul by identity and by zero") {
    Rng rng(0x1bb4);
    VectorBlock a = VectorBlock::random(33, 64, rng);
    CHECK(mul_block_small(a, SmallMat::identity(64)) == a);
    CHECK(mul_block_small(a, SmallMat(64)) == VectorBlock(33, 64));
    CHECK(block_xor(a, a) == VectorBlock(33, 64));
}

TEST_CASE("mask application matches diagonal-matrix products") {
    Rng rng(0x1bb5);
    for (int it = 0; it < 100; ++it) {
        std::size_t rows = 1 + rng.below(40);
        VectorBlock a = VectorBlock::random(rows, 64, rng);
        SmallMat s = random_small(64, rng);
        DiagMask d = random_mask(64, rng);
        CHECK(ref::to_bits(mask_apply(a, d)) ==
              ref::mul(ref::to_bits(a), mask_bits(d)));
        CHECK(ref::to_bits(mask_apply(s, d)) ==
              ref::mul(ref::to_bits(s), mask_bits(d)));
        CHECK(ref::to_bits(mask_rows(d, s)) ==
              ref::mul(mask_bits(d), ref::to_bits(s)));
    }
}

TEST_CASE("masks: complement, popcount, full, none") {
    Rng rng(0x1bb6);
    for (std::size_t n : {64u, 128u, 61u}) {
        DiagMask d = random_mask(n, rng);
        DiagMask c = d.complement();
        CHECK(d.popcount() + c.popcount() == n);
        for (std::size_t i = 0; i < n; ++i)
            CHECK(d.test(i) != c.test(i));
        CHECK(DiagMask::full(n).popcount() == n);
        CHECK(DiagMask::none(n).popcount() == 0);
        CHECK_FALSE(DiagMask::none(n).any());
        CHECK(DiagMask::full(n).complement() == DiagMask::none(n));
    }
}

TEST_CASE("transpose64 tile matches the naive transpose") {
    Rng rng(0x1bb7);
    for (int it = 0; it < 20; ++it) {
        u64 a[64], want[64] = {0};
        for (auto& w : a)
            w = rng.next();
        for (int r = 0; r < 64; ++r)
            for (int c = 0; c < 64; ++c)
                if ((a[r] >> c) & 1)
                    want[c] |= u64(1) << r;
        transpose64(a);
        for (int r = 0; r < 64; ++r)
            CHECK(a[r] == want[r]);
    }
}

TEST_CASE("odd widths keep tail bits clean through the ops") {
    Rng rng(0x1bb8);
    for (std::size_t n : {1u, 7u, 50u, 65u, 100u}) {
        VectorBlock a = VectorBlock::random(20, n, rng);
        VectorBlock b = VectorBlock::random(20, n, rng);
        for (std::size_t r = 0; r < a.rows(); ++r)
            CHECK((a.row(r)[a.row_words() - 1] & ~tail_mask(n)) == 0);
        VectorBlock x = block_xor(a, b);
        SmallMat g = inner(a, b);
        CHECK(ref::to_bits(x) == ref::add(ref::to_bits(a), ref::to_bits(b)));
        CHECK(ref::to_bits(g) ==
              ref::mul(ref::transpose(ref::to_bits(a)), ref::to_bits(b)));
    }
}
