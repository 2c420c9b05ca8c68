#include "blz/scalar_lanczos.hpp"

namespace blz {

namespace {

u32 fp_mul(u64 a, u64 b, u64 p) { return static_cast<u32>(a * b % p); }

u32 fp_add(u64 a, u64 b, u64 p) { return static_cast<u32>((a + b) % p); }

u32 fp_sub(u64 a, u64 b, u64 p) { return static_cast<u32>((a + p - b) % p); }

// extended Euclid; p need not be odd, only prime
u32 fp_inv(u64 a, u64 p) {
    long long t = 0, nt = 1;
    long long r = static_cast<long long>(p), nr = static_cast<long long>(a % p);
    while (nr) {
        long long q = r / nr;
        long long tmp = t - q * nt;
        t = nt;
        nt = tmp;
        tmp = r - q * nr;
        r = nr;
        nr = tmp;
    }
    if (r != 1) throw field_error("not invertible; modulus is not prime");
    if (t < 0) t += static_cast<long long>(p);
    return static_cast<u32>(t);
}

u32 fp_dot(const std::vector<u32>& a, const std::vector<u32>& b, u64 p) {
    u64 acc = 0;
    for (std::size_t i = 0; i < a.size(); ++i) acc = (acc + u64(a[i]) * b[i]) % p;
    return static_cast<u32>(acc);
}

std::vector<u32> fp_apply(const FpDense& m, const std::vector<u32>& v, u64 p) {
    std::vector<u32> out(m.n, 0);
    for (std::size_t r = 0; r < m.n; ++r) {
        u64 acc = 0;
        for (std::size_t c = 0; c < m.n; ++c) acc = (acc + u64(m.at(r, c)) * v[c]) % p;
        out[r] = static_cast<u32>(acc);
    }
    return out;
}

bool fp_is_zero(const std::vector<u32>& v) {
    for (u32 e : v)
        if (e) return false;
    return true;
}

ScalarResult run_recurrence(const FpDense& a, const std::vector<u32>& b, u64 p,
                            std::vector<std::vector<u32>>* trace) {
    const std::size_t n = a.n;
    if (b.size() != n) throw dimension_error("right-hand side length mismatch");
    for (std::size_t r = 0; r < n; ++r)
        for (std::size_t c = r + 1; c < n; ++c)
            if (a.at(r, c) != a.at(c, r))
                throw symmetry_error("matrix is not symmetric");
    for (u32 e : b)
        if (u64(e) >= p) throw field_error("entry out of field range");
    for (u32 e : a.a)
        if (u64(e) >= p) throw field_error("entry out of field range");

    ScalarResult res;
    res.x.assign(n, 0);
    std::vector<u32> v = b; // the starting vector is the right-hand side
    std::vector<u32> v_prev(n, 0);
    u32 vav_prev = 1; // never read before the second step

    for (std::size_t step = 0; step <= n + 1; ++step) {
        if (fp_is_zero(v)) return res;
        if (trace) trace->push_back(v);

        std::vector<u32> w = fp_apply(a, v, p);
        res.iterations++;
        u32 vav = fp_dot(v, w, p);
        if (vav == 0) throw isotropic_breakdown(step);
        u32 vav_inv = fp_inv(vav, p);

        u32 coef = fp_mul(fp_dot(v, b, p), vav_inv, p);
        for (std::size_t i = 0; i < n; ++i)
            res.x[i] = fp_add(res.x[i], fp_mul(coef, v[i], p), p);

        // v_next = A v - c1 v - c2 v_prev, the whole history that matters
        u32 c1 = fp_mul(fp_dot(w, w, p), vav_inv, p);
        u32 c2 = step ? fp_mul(vav, fp_inv(vav_prev, p), p) : 0;
        std::vector<u32> v_next(n);
        for (std::size_t i = 0; i < n; ++i) {
            u32 t = fp_sub(w[i], fp_mul(c1, v[i], p), p);
            v_next[i] = fp_sub(t, fp_mul(c2, v_prev[i], p), p);
        }
        v_prev = std::move(v);
        v = std::move(v_next);
        vav_prev = vav;
    }
    // n+1 A-orthogonal vectors with nonzero self-products cannot fit in
    // dimension n, so reaching this line means the arithmetic is broken
    throw verification_error("scalar recurrence failed to terminate");
}

} // namespace

PrimeField::PrimeField(u64 p) {
    if (p < 3 || p % 2 == 0) throw field_error("modulus must be an odd prime");
    if (p >= (u64(1) << 31)) throw field_error("modulus must be below 2^31");
    for (u64 d = 3; d * d <= p; d += 2)
        if (p % d == 0) throw field_error("modulus is composite");
    p_ = static_cast<u32>(p);
}

u32 PrimeField::add(u32 a, u32 b) const { return fp_add(a, b, p_); }
u32 PrimeField::sub(u32 a, u32 b) const { return fp_sub(a, b, p_); }
u32 PrimeField::mul(u32 a, u32 b) const { return fp_mul(a, b, p_); }
u32 PrimeField::inv(u32 a) const { return fp_inv(a, p_); }

ScalarResult lanczos_solve(const FpDense& a, const std::vector<u32>& b, u64 p,
                           std::vector<std::vector<u32>>* trace) {
    PrimeField f(p); // validates
    return run_recurrence(a, b, f.p(), trace);
}

ScalarResult lanczos_solve_raw(const FpDense& a, const std::vector<u32>& b, u64 p,
                               std::vector<std::vector<u32>>* trace) {
    if (p < 2) throw field_error("modulus must be at least 2");
    return run_recurrence(a, b, p, trace);
}

BreakdownStats breakdown_demo(std::size_t n, std::size_t trials, u64 p, u64 seed) {
    BreakdownStats stats;
    stats.trials = trials;
    Rng rng = Rng(seed).fork(0x5ca1a);
    for (std::size_t t = 0; t < trials; ++t) {
        FpDense a(n);
        for (std::size_t r = 0; r < n; ++r)
            for (std::size_t c = r; c < n; ++c)
                a.at(r, c) = a.at(c, r) = static_cast<u32>(rng.next() % p);
        std::vector<u32> b(n);
        for (auto& e : b) e = static_cast<u32>(rng.next() % p);
        try {
            lanczos_solve_raw(a, b, p);
            stats.succeeded++;
        } catch (const isotropic_breakdown& ib) {
            stats.breakdown_at.push_back(ib.index);
        }
    }
    return stats;
}

} // namespace blz
