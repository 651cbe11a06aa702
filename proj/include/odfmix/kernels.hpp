#pragma once

// Data-parallel inner loops. Every kernel has a serial reference in
// kernels::serial and an OpenMP version in kernels::omp with the same
// signature; both produce bit-identical output because each output element is
// computed independently and reductions go through pairwise_sum().

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include "odfmix/quaternion.hpp"

namespace odfmix::kernels {

/// Symmetric 4x4 matrix packed as (a00, a11, a22, a33, 2a01, 2a02, 2a03,
/// 2a12, 2a13, 2a23), so that x^T A x = dot(packed, quadratic_features(x)).
using Packed10 = std::array<double, 10>;

Packed10 pack_quadratic(const Vec4& lambda, const std::array<Vec4, 4>& V);
Packed10 quadratic_features(const Vec4& x);

/// Coordinates of every member of every observation's equivalence class,
/// laid out [observation][coordinate][member].
struct ClassFeatures {
    std::size_t observations = 0;
    std::size_t members = 0;
    std::vector<double> data;

    const double* block(std::size_t i) const { return data.data() + i * 4 * members; }
    /// Stores member h of observation i.
    void set(std::size_t i, std::size_t h, const Vec4& x) {
        for (std::size_t c = 0; c < 4; ++c) data[(i * 4 + c) * members + h] = x[c];
    }
};

/// Equivalence classes of points, laid out [point][member] (4 doubles each).
struct ClassPoints {
    std::size_t points = 0;
    std::size_t members = 0;
    std::vector<Vec4> data;

    const Vec4* block(std::size_t i) const { return data.data() + i * members; }
};

/// Deterministic pairwise (cascade) summation.
double pairwise_sum(std::span<const double> values);

namespace serial {

/// out[i] = log_norm + log sum_h exp(-A(h)) over the members h of class i,
/// max-shifted.
void log_sb_column(const ClassFeatures& feats, const Packed10& A, double log_norm,
                   std::span<double> out);

/// out[i] = log sum_m exp(log_alpha[m] + columns[m][i]).
void mixture_rows(std::span<const std::vector<double>* const> columns,
                  std::span<const double> log_alpha, std::span<double> out);

/// out[q] = sum over all class members h of |h . query_q|^(2 kappa).
void kde_power_sums(const ClassPoints& centers, std::span<const Vec4> queries, double kappa,
                    std::span<double> out);

/// Leave-one-out power sums for a doubling kappa ladder kappas[0] * 2^k:
/// out[i * K + k] = sum_{l != i} sum_h |h_l . p_i|^(2 kappa_k), with p_i the
/// first member of class i. ladder <= 8.
void loo_power_sums(const ClassPoints& points, double kappa0, std::size_t ladder,
                    std::span<double> out);

/// out[t] = F(lambda) by Hopf-coordinate Gauss-Legendre quadrature, one
/// entry per lambda triple (lambda4 = 0).
void normalizer_values(std::span<const std::array<double, 3>> lambdas, std::size_t nodes,
                       std::span<double> out);

}  // namespace serial

namespace omp {

void log_sb_column(const ClassFeatures& feats, const Packed10& A, double log_norm,
                   std::span<double> out);
void mixture_rows(std::span<const std::vector<double>* const> columns,
                  std::span<const double> log_alpha, std::span<double> out);
void kde_power_sums(const ClassPoints& centers, std::span<const Vec4> queries, double kappa,
                    std::span<double> out);
void loo_power_sums(const ClassPoints& points, double kappa0, std::size_t ladder,
                    std::span<double> out);
void normalizer_values(std::span<const std::array<double, 3>> lambdas, std::size_t nodes,
                       std::span<double> out);

/// Threads OpenMP would use for a parallel region here (1 without OpenMP).
int max_threads();

}  // namespace omp

}  // namespace odfmix::kernels
