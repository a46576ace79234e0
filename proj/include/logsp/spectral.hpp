#pragma once

#include <complex>
#include <span>
#include <vector>

#include "logsp/grid.hpp"

namespace logsp {

// Per-grid FFTW plans and scratch. Not thread-safe; use one instance per
// thread (workspace_for hands out thread-local instances). Plan creation
// is serialized internally since the FFTW planner is a global resource.
class SpectralWorkspace {
 public:
  explicit SpectralWorkspace(const Grid2D& g);
  ~SpectralWorkspace();
  SpectralWorkspace(const SpectralWorkspace&) = delete;
  SpectralWorkspace& operator=(const SpectralWorkspace&) = delete;

  const Grid2D& grid() const { return grid_; }

  // out = discrete Laplacian of in (multiply by -|k|^2 in Fourier space).
  void laplacian(std::span<const double> in, std::span<double> out);

  // axis 0 differentiates along the first (row) index.
  void derivative(std::span<const double> in, std::span<double> out, int axis);

  // integral of |grad f|^2 via Parseval.
  double grad_norm_sq(std::span<const double> in);

  // integral of f^2 via Parseval (consistency partner of integrate(f^2)).
  double l2_sq_via_hat(std::span<const double> in);

  // out = (I + tau*(-Laplacian) + tau*shift)^{-1} in, shift constant.
  void inverse_helmholtz(std::span<const double> in, std::span<double> out, double tau,
                         double shift = 0.0);

  // Translate f by (dx, dy) with spectral (trigonometric) accuracy.
  void translate(std::span<double> values, double dx, double dy);

  // Exact linear convolution of an n x n density with a kernel given by
  // its transform on the doubled (zero-padded) grid; out includes the
  // cell_area quadrature factor.
  void convolve(std::span<const double> density, std::span<const double> kernel_hat,
                std::span<double> out);

  // Transform of a (2n)x(2n) kernel sample array; returns the real part
  // of the r2c transform (exact for even kernels) of size 2n*(n+1).
  std::vector<double> kernel_hat(std::span<const double> samples_2n, double* max_imag = nullptr);

 private:
  Grid2D grid_;
  int n_;
  int np_;  // 2n
  double* re_n_ = nullptr;
  std::complex<double>* cx_n_ = nullptr;
  double* re_p_ = nullptr;
  std::complex<double>* cx_p_ = nullptr;
  void* plan_fwd_n_ = nullptr;
  void* plan_inv_n_ = nullptr;
  void* plan_fwd_p_ = nullptr;
  void* plan_inv_p_ = nullptr;
  std::vector<double> scratch_;
};

// Thread-local workspace keyed by (n, L); valid until thread exit.
SpectralWorkspace& workspace_for(const Grid2D& g);

Field2D laplacian(const Field2D& f);
double grad_norm_sq(const Field2D& f);

// Resample onto a finer grid (same L, larger power-of-two n) through the
// trigonometric interpolant.
Field2D fourier_upsample(const Field2D& f, int n_new);

}  // namespace logsp
