#pragma once

#include <cstddef>
#include <span>

namespace fdabs::kernels {

/// Kernel backend. Parallel uses OpenMP when compiled in; both backends
/// produce bitwise-identical results for any thread count (reductions are
/// summed over fixed-size blocks in a fixed order).
enum class Backend { Serial, Parallel };

Backend backend() noexcept;
void set_backend(Backend b) noexcept;

/// Loops shorter than this run serially even under the Parallel backend.
inline constexpr std::size_t parallel_grain = 8192;

/// Block length of the deterministic reductions.
inline constexpr std::size_t reduce_block = 1024;

/// dst[i] = sign(src[i]) |src[i]|^p
void signed_pow(std::span<const double> src, double p, std::span<double> dst);

/// sum_i w[i] * sign(u[i]) |u[i]|^p, blocked deterministic reduction.
double weighted_pow_sum(std::span<const double> w, std::span<const double> u,
                        double p);

/// sum_i w[i] * u[i]
double weighted_sum(std::span<const double> w, std::span<const double> u);

/// sum_i w[i] * u[i]^2
double weighted_square_sum(std::span<const double> w,
                           std::span<const double> u);

/// sum_i w[i] * a[i] * b[i]
double weighted_product_sum(std::span<const double> w,
                            std::span<const double> a,
                            std::span<const double> b);

double max_value(std::span<const double> v);
double min_value(std::span<const double> v);
double max_abs(std::span<const double> v);

// --- serial reference implementations (plain left-to-right loops); kept for
// --- testing the blocked/parallel versions against.
namespace serial_ref {
double weighted_pow_sum(std::span<const double> w, std::span<const double> u,
                        double p);
double weighted_sum(std::span<const double> w, std::span<const double> u);
double max_value(std::span<const double> v);
void signed_pow(std::span<const double> src, double p, std::span<double> dst);
} // namespace serial_ref

/// Coefficients of the conservative radial Laplacian on a uniform grid:
/// lap(w)_i = (face[i]*(w[i+1]-w[i]) - face[i-1]*(w[i]-w[i-1])) / cell[i]
/// with face[i] = r_{i+1/2}^{N-1}/h and cell[i] the cell measure
/// int r^{N-1} dr over the dual cell. face[-1] is absent (symmetry at r=0).
struct LaplacianCoeffs {
    std::span<const double> face;  // size M   (faces 1/2 .. M-1/2)
    std::span<const double> cell;  // size M+1 (dual-cell measures)
};

/// Residual of the backward-Euler system in the transformed variable
/// w = u^m (sign-extended):
///   F_i = w_i^{1/m} - dt lap(w)_i + dt w_i^{q/m} - b_i,  i = 0..M-1
/// and F_M = 0 (node M is pinned by the boundary condition).
/// Also writes u = w^{1/m} and phi = w^{q/m} for reuse by the caller.
void newton_residual(std::span<const double> w, std::span<const double> b,
                     const LaplacianCoeffs& lc, double dt, double inv_m,
                     double q_over_m, std::span<double> u,
                     std::span<double> phi, std::span<double> F);

/// Tridiagonal Jacobian of newton_residual with respect to w:
///   diag_i = (1/m)|w_i|^{1/m-1} + dt (face_i + face_{i-1})/cell_i
///            + dt (q/m)|w_i|^{q/m-1}
///   sub_i  = -dt face_{i-1}/cell_i,   sup_i = -dt face_i/cell_i
/// Row M is the identity. |w|^{p-1} terms are taken as 0 at w = 0
/// (their mathematical limit, since 1/m > 1 and q/m > 1).
void newton_jacobian(std::span<const double> w, const LaplacianCoeffs& lc,
                     double dt, double inv_m, double q_over_m,
                     std::span<double> sub, std::span<double> diag,
                     std::span<double> sup);

/// In-place Thomas solve of the tridiagonal system; diagonally dominant by
/// construction, no pivoting. Overwrites diag/rhs as scratch.
void thomas_solve(std::span<double> sub, std::span<double> diag,
                  std::span<double> sup, std::span<double> rhs,
                  std::span<double> x);

} // namespace fdabs::kernels
