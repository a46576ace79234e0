#pragma once

#include <vector>

#include "logsp/grid.hpp"

namespace logsp {

// Kernels sampled on the doubled grid so that circular convolution equals
// exact linear convolution of box-supported data. Origin cells carry the
// average of the kernel over the equal-area disc (radius h/sqrt(pi)),
// which preserves the cell integral through the singularity.
struct KernelTable {
  Grid2D grid;
  std::vector<double> log_samples;      // ln|x| on the (2n)x(2n) displacement grid
  std::vector<double> log_hat;          // transforms of the padded kernels
  std::vector<double> log1p_sq_hat;     // ln(1+|x|^2)
  std::vector<double> log1p_invsq_hat;  // ln(1+1/|x|^2)
  std::vector<double> inv_r_hat;        // 1/|x|
};

// Disc averages used for the origin cells; a = h/sqrt(pi).
double log_kernel_origin(double h);
double log1p_invsq_kernel_origin(double h);
double log1p_sq_kernel_origin(double h);
double inv_r_kernel_origin(double h);

KernelTable build_log_kernel(const Grid2D& g);

// Phi(x) = cell_area * sum_y ln|x-y| density(y), exact linear convolution.
Field2D log_potential(const Field2D& density, const KernelTable& K);

struct VFunctionals {
  double v0 = 0.0;  // double integral of ln|x-y| u^2 u^2
  double v1 = 0.0;  // kernel ln(1+|x-y|^2)
  double v2 = 0.0;  // kernel ln(1+1/|x-y|^2)
};

VFunctionals v_functionals(const Field2D& u, const KernelTable& K);

// Double integral of u^2(x) u^2(y) / |x-y|.
double singular_integral_D(const Field2D& u, const KernelTable& K);

// S - rho^2/2 where S is the discrete symmetrized-kernel double sum of
// (x-y).x / |x-y|^2 against u^2(x) u^2(y); vanishes identically.
double momentum_identity_check(const Field2D& u);

}  // namespace logsp
