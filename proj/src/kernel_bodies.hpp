#pragma once

// Per-element bodies shared by the serial and OpenMP kernels.

#include <algorithm>
#include <cstdint>
#include <cstring>
#include <cmath>
#include <limits>

#include "odfmix/kernels.hpp"
#include "odfmix/sphere.hpp"

namespace odfmix::kernels::detail {

// Members whose exponent exceeds the minimum by more than this contribute
// below 1e-17 relative and are skipped.
inline constexpr double kExpCutoff = 40.0;
// |h.q|^(2 kappa) below exp(-kPowerCutoff) is dropped from KDE sums.
inline constexpr double kPowerCutoff = 70.0;

// exp(-x) for x in [0, 700]. Branch-free so the loops below vectorize
// (quadratic-form exponents never exceed lambda_max): exp(-x) = 2^n exp(r) with |r| <= ln2/2 and a
// degree-13 Taylor polynomial (truncation below 2e-17 relative).
inline double exp_neg(double x) {
    constexpr double log2e = 1.4426950408889634;
    constexpr double ln2_hi = 6.93147180369123816490e-01;
    constexpr double ln2_lo = 1.90821492927058770002e-10;
    // adding 1.5 * 2^52 rounds to an integer held in the low mantissa bits
    constexpr double shifter = 6755399441055744.0;
    const double kd = -x * log2e + shifter;
    const double n = kd - shifter;
    const double r = (-x - n * ln2_hi) - n * ln2_lo;
    double p = 1.0 / 6227020800.0;
    p = p * r + 1.0 / 479001600.0;
    p = p * r + 1.0 / 39916800.0;
    p = p * r + 1.0 / 3628800.0;
    p = p * r + 1.0 / 362880.0;
    p = p * r + 1.0 / 40320.0;
    p = p * r + 1.0 / 5040.0;
    p = p * r + 1.0 / 720.0;
    p = p * r + 1.0 / 120.0;
    p = p * r + 1.0 / 24.0;
    p = p * r + 1.0 / 6.0;
    p = p * r + 0.5;
    p = p * r + 1.0;
    p = p * r + 1.0;
    std::uint64_t bits;
    std::memcpy(&bits, &kd, sizeof bits);
    bits = (bits << 52) + (1023ULL << 52);
    double scale;
    std::memcpy(&scale, &bits, sizeof scale);
    return p * scale;
}

inline double log_sb_one(const double* block, std::size_t members, const Packed10& A,
                         double* scratch) {
    const double* x0 = block;
    const double* x1 = block + members;
    const double* x2 = block + 2 * members;
    const double* x3 = block + 3 * members;
    for (std::size_t h = 0; h < members; ++h) {
        const double a = x0[h], b = x1[h], c = x2[h], d = x3[h];
        scratch[h] = a * (A[0] * a + A[4] * b + A[5] * c + A[6] * d) +
                     b * (A[1] * b + A[7] * c + A[8] * d) + c * (A[2] * c + A[9] * d) + A[3] * d * d;
    }
    double qmin = scratch[0];
    for (std::size_t h = 1; h < members; ++h) qmin = std::min(qmin, scratch[h]);
#pragma omp simd
    for (std::size_t h = 0; h < members; ++h) scratch[h] = exp_neg(scratch[h] - qmin);
    double s = 0.0;
    for (std::size_t h = 0; h < members; ++h) s += scratch[h];
    return -qmin + std::log(s);
}

inline double logsumexp_row(std::span<const std::vector<double>* const> columns,
                            std::span<const double> log_alpha, std::size_t i) {
    double mx = -std::numeric_limits<double>::infinity();
    for (std::size_t m = 0; m < columns.size(); ++m)
        mx = std::max(mx, log_alpha[m] + (*columns[m])[i]);
    if (!std::isfinite(mx)) return mx;
    double s = 0.0;
    for (std::size_t m = 0; m < columns.size(); ++m) s += std::exp(log_alpha[m] + (*columns[m])[i] - mx);
    return mx + std::log(s);
}

// t^kappa for t in [0, 1]. Half-integer kappa (up to 4096) uses a square
// root and binary powers, which vectorize; other kappa use exp(kappa log t).
struct PowerPlan {
    explicit PowerPlan(double k) : kappa(k) {
        const double twice = 2.0 * k;
        exact = twice == std::floor(twice) && twice >= 0.0 && twice <= 8192.0;
        if (exact) {
            const auto n = static_cast<unsigned>(twice);
            half = n & 1u;
            whole = n / 2;
        }
        // below this t the term is under exp(-kPowerCutoff) and is dropped
        t_cut = k > 0.0 ? std::exp(-kPowerCutoff / k) : 0.0;
    }
    double kappa;
    bool exact = false;
    bool half = false;
    unsigned whole = 0;
    double t_cut;
};

inline double power(double t, const PowerPlan& p) {
    if (!p.exact) return t > p.t_cut ? std::exp(p.kappa * std::log(t)) : 0.0;
    t = t > p.t_cut ? t : 0.0;
    double r = p.half ? std::sqrt(t) : 1.0;
    double b = t;
    for (unsigned e = p.whole; e != 0; e >>= 1) {
        if (e & 1u) r *= b;
        b *= b;
    }
    return r;
}

// Raises t[0..n) to plan.kappa in place, one vectorized pass per exponent bit.
inline void power_block(double* t, double* b, std::size_t n, const PowerPlan& plan) {
    if (!plan.exact) {
        for (std::size_t h = 0; h < n; ++h) t[h] = power(t[h], plan);
        return;
    }
    for (std::size_t h = 0; h < n; ++h) b[h] = t[h] > plan.t_cut ? t[h] : 0.0;
    if (plan.half)
        for (std::size_t h = 0; h < n; ++h) t[h] = std::sqrt(b[h]);
    else
        for (std::size_t h = 0; h < n; ++h) t[h] = 1.0;
    for (unsigned e = plan.whole; e != 0; e >>= 1) {
        if (e & 1u)
            for (std::size_t h = 0; h < n; ++h) t[h] *= b[h];
        if (e > 1u)
            for (std::size_t h = 0; h < n; ++h) b[h] *= b[h];
    }
}

inline constexpr std::size_t kPowerBlock = 256;

// sum over every center member h of |h . q|^(2 kappa)
inline double kde_power_one(const ClassPoints& centers, const Vec4& q, const PowerPlan& plan) {
    const std::size_t total = centers.points * centers.members;
    if (plan.kappa == 0.0) return static_cast<double>(total);
    const double* c = centers.data.data()->data();
    double t[kPowerBlock], b[kPowerBlock];
    double s = 0.0;
    for (std::size_t start = 0; start < total; start += kPowerBlock) {
        const std::size_t n = std::min(kPowerBlock, total - start);
        const double* cc = c + 4 * start;
        for (std::size_t h = 0; h < n; ++h) {
            const double d = cc[4 * h] * q[0] + cc[4 * h + 1] * q[1] + cc[4 * h + 2] * q[2] + cc[4 * h + 3] * q[3];
            t[h] = d * d;
        }
        power_block(t, b, n, plan);
#pragma omp simd reduction(+ : s)
        for (std::size_t h = 0; h < n; ++h) s += t[h];
    }
    return s;
}

// Leave-one-out sums for the doubling ladder kappa0 * 2^k, k < ladder <= 8:
// t^kappa0, then repeated squaring. Squares below 1e-200 are flushed to zero.
inline constexpr std::size_t kMaxLadder = 8;

inline void loo_power_one(const ClassPoints& points, const PowerPlan& plan, std::size_t ladder,
                          std::size_t i, double* out) {
    const Vec4& p = points.block(i)[0];
    const std::size_t m = points.members;
    const std::size_t total = points.points * m;
    const double* c = points.data.data()->data();
    double t[kPowerBlock], b[kPowerBlock];
    double acc[kMaxLadder] = {};
    auto run = [&](std::size_t from, std::size_t to) {
        for (std::size_t start = from; start < to; start += kPowerBlock) {
            const std::size_t n = std::min(kPowerBlock, to - start);
            const double* cc = c + 4 * start;
            for (std::size_t h = 0; h < n; ++h) {
                const double d = cc[4 * h] * p[0] + cc[4 * h + 1] * p[1] + cc[4 * h + 2] * p[2] + cc[4 * h + 3] * p[3];
                t[h] = d * d;
            }
            power_block(t, b, n, plan);
            for (std::size_t k = 0; k < ladder; ++k) {
                double s = 0.0;
#pragma omp simd reduction(+ : s)
                for (std::size_t h = 0; h < n; ++h) s += t[h];
                acc[k] += s;
                for (std::size_t h = 0; h < n; ++h) {
                    const double v = t[h] * t[h];
                    t[h] = v > 1e-200 ? v : 0.0;
                }
            }
        }
    };
    run(0, i * m);
    run((i + 1) * m, total);
    for (std::size_t k = 0; k < ladder; ++k) out[k] = acc[k];
}

// Separable Hopf-coordinate product Gauss-Legendre rule for F(lambda) with V = I.
// The azimuthal integrands depend on cos^2 only, so [0, 2pi) folds onto
// [0, pi/2] with weight 4.
struct HopfRule {
    explicit HopfRule(std::size_t nodes)
        : t(gauss_legendre(nodes, 0.0, 0.5 * 3.14159265358979323846)),
          p(gauss_legendre(nodes, 0.0, 0.5 * 3.14159265358979323846)),
          c2(nodes), s2(nodes) {
        for (double& w : p.weights) w *= 4.0;
        for (std::size_t i = 0; i < nodes; ++i) {
            const double c = std::cos(p.nodes[i]), s = std::sin(p.nodes[i]);
            c2[i] = c * c;
            s2[i] = s * s;
        }
    }
    GaussRule t, p;
    std::vector<double> c2, s2;

    double integrate(double l1, double l2, double l3, double l4) const {
        double total = 0.0;
        for (std::size_t a = 0; a < t.nodes.size(); ++a) {
            const double ct = std::cos(t.nodes[a]), st = std::sin(t.nodes[a]);
            const double cc = ct * ct, ss = st * st;
            double i1 = 0.0, i2 = 0.0;
            for (std::size_t b = 0; b < p.nodes.size(); ++b) {
                i1 += p.weights[b] * std::exp(-cc * (l1 * c2[b] + l2 * s2[b]));
                i2 += p.weights[b] * std::exp(-ss * (l3 * c2[b] + l4 * s2[b]));
            }
            total += t.weights[a] * ct * st * i1 * i2;
        }
        return total;
    }
};

}  // namespace odfmix::kernels::detail
