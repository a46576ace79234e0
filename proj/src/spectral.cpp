#include "logsp/spectral.hpp"

#include <fftw3.h>

#include <cmath>
#include <cstring>
#include <map>
#include <memory>
#include <mutex>

namespace logsp {

namespace {

std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

}  // namespace

SpectralWorkspace::SpectralWorkspace(const Grid2D& g) : grid_(g), n_(g.n), np_(2 * g.n) {
  std::lock_guard<std::mutex> lock(planner_mutex());
  re_n_ = fftw_alloc_real(static_cast<std::size_t>(n_) * n_);
  cx_n_ = reinterpret_cast<std::complex<double>*>(
      fftw_alloc_complex(static_cast<std::size_t>(n_) * (n_ / 2 + 1)));
  re_p_ = fftw_alloc_real(static_cast<std::size_t>(np_) * np_);
  cx_p_ = reinterpret_cast<std::complex<double>*>(
      fftw_alloc_complex(static_cast<std::size_t>(np_) * (np_ / 2 + 1)));
  plan_fwd_n_ = fftw_plan_dft_r2c_2d(n_, n_, re_n_, reinterpret_cast<fftw_complex*>(cx_n_),
                                     FFTW_ESTIMATE);
  plan_inv_n_ = fftw_plan_dft_c2r_2d(n_, n_, reinterpret_cast<fftw_complex*>(cx_n_), re_n_,
                                     FFTW_ESTIMATE);
  plan_fwd_p_ = fftw_plan_dft_r2c_2d(np_, np_, re_p_, reinterpret_cast<fftw_complex*>(cx_p_),
                                     FFTW_ESTIMATE);
  plan_inv_p_ = fftw_plan_dft_c2r_2d(np_, np_, reinterpret_cast<fftw_complex*>(cx_p_), re_p_,
                                     FFTW_ESTIMATE);
}

SpectralWorkspace::~SpectralWorkspace() {
  std::lock_guard<std::mutex> lock(planner_mutex());
  fftw_destroy_plan(static_cast<fftw_plan>(plan_fwd_n_));
  fftw_destroy_plan(static_cast<fftw_plan>(plan_inv_n_));
  fftw_destroy_plan(static_cast<fftw_plan>(plan_fwd_p_));
  fftw_destroy_plan(static_cast<fftw_plan>(plan_inv_p_));
  fftw_free(re_n_);
  fftw_free(cx_n_);
  fftw_free(re_p_);
  fftw_free(cx_p_);
}

void SpectralWorkspace::laplacian(std::span<const double> in, std::span<double> out) {
  const int n = n_;
  const int nc = n / 2 + 1;
  std::memcpy(re_n_, in.data(), sizeof(double) * in.size());
  fftw_execute(static_cast<fftw_plan>(plan_fwd_n_));
  const double norm = 1.0 / (static_cast<double>(n) * n);
  for (int i = 0; i < n; ++i) {
    const double ki = grid_.k[i];
    for (int j = 0; j < nc; ++j) {
      const double kj = grid_.k[j];
      cx_n_[static_cast<std::size_t>(i) * nc + j] *= -(ki * ki + kj * kj) * norm;
    }
  }
  fftw_execute(static_cast<fftw_plan>(plan_inv_n_));
  std::memcpy(out.data(), re_n_, sizeof(double) * out.size());
}

void SpectralWorkspace::derivative(std::span<const double> in, std::span<double> out, int axis) {
  const int n = n_;
  const int nc = n / 2 + 1;
  std::memcpy(re_n_, in.data(), sizeof(double) * in.size());
  fftw_execute(static_cast<fftw_plan>(plan_fwd_n_));
  const double norm = 1.0 / (static_cast<double>(n) * n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < nc; ++j) {
      const double k = (axis == 0) ? grid_.k[i] : grid_.k[j];
      // Nyquist mode carries no usable phase for odd derivatives.
      const bool nyq = (axis == 0) ? (i == n / 2) : (j == n / 2);
      std::complex<double>& c = cx_n_[static_cast<std::size_t>(i) * nc + j];
      c = nyq ? 0.0 : c * std::complex<double>(0.0, k * norm);
    }
  }
  fftw_execute(static_cast<fftw_plan>(plan_inv_n_));
  std::memcpy(out.data(), re_n_, sizeof(double) * out.size());
}

double SpectralWorkspace::grad_norm_sq(std::span<const double> in) {
  const int n = n_;
  const int nc = n / 2 + 1;
  std::memcpy(re_n_, in.data(), sizeof(double) * in.size());
  fftw_execute(static_cast<fftw_plan>(plan_fwd_n_));
  scratch_.resize(static_cast<std::size_t>(n) * nc);
  for (int i = 0; i < n; ++i) {
    const double ki = grid_.k[i];
    for (int j = 0; j < nc; ++j) {
      const double kj = grid_.k[j];
      const double w = (j == 0 || j == n / 2) ? 1.0 : 2.0;
      scratch_[static_cast<std::size_t>(i) * nc + j] =
          w * (ki * ki + kj * kj) * std::norm(cx_n_[static_cast<std::size_t>(i) * nc + j]);
    }
  }
  const double total = stable_sum(scratch_);
  return grid_.cell_area * total / (static_cast<double>(n) * n);
}

double SpectralWorkspace::l2_sq_via_hat(std::span<const double> in) {
  const int n = n_;
  const int nc = n / 2 + 1;
  std::memcpy(re_n_, in.data(), sizeof(double) * in.size());
  fftw_execute(static_cast<fftw_plan>(plan_fwd_n_));
  scratch_.resize(static_cast<std::size_t>(n) * nc);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < nc; ++j) {
      const double w = (j == 0 || j == n / 2) ? 1.0 : 2.0;
      scratch_[static_cast<std::size_t>(i) * nc + j] =
          w * std::norm(cx_n_[static_cast<std::size_t>(i) * nc + j]);
    }
  }
  const double total = stable_sum(scratch_);
  return grid_.cell_area * total / (static_cast<double>(n) * n);
}

void SpectralWorkspace::inverse_helmholtz(std::span<const double> in, std::span<double> out,
                                          double tau, double shift) {
  const int n = n_;
  const int nc = n / 2 + 1;
  std::memcpy(re_n_, in.data(), sizeof(double) * in.size());
  fftw_execute(static_cast<fftw_plan>(plan_fwd_n_));
  const double norm = 1.0 / (static_cast<double>(n) * n);
  for (int i = 0; i < n; ++i) {
    const double ki = grid_.k[i];
    for (int j = 0; j < nc; ++j) {
      const double kj = grid_.k[j];
      cx_n_[static_cast<std::size_t>(i) * nc + j] *=
          norm / (1.0 + tau * (ki * ki + kj * kj + shift));
    }
  }
  fftw_execute(static_cast<fftw_plan>(plan_inv_n_));
  std::memcpy(out.data(), re_n_, sizeof(double) * out.size());
}

void SpectralWorkspace::translate(std::span<double> values, double dx, double dy) {
  const int n = n_;
  const int nc = n / 2 + 1;
  std::memcpy(re_n_, values.data(), sizeof(double) * values.size());
  fftw_execute(static_cast<fftw_plan>(plan_fwd_n_));
  const double norm = 1.0 / (static_cast<double>(n) * n);
  for (int i = 0; i < n; ++i) {
    const double ki = grid_.k[i];
    // Nyquist phase must stay real for a real output field.
    const std::complex<double> pi_factor =
        (i == n / 2) ? std::complex<double>(std::cos(ki * dx), 0.0)
                     : std::exp(std::complex<double>(0.0, -ki * dx));
    for (int j = 0; j < nc; ++j) {
      const double kj = grid_.k[j];
      const std::complex<double> pj_factor =
          (j == n / 2) ? std::complex<double>(std::cos(kj * dy), 0.0)
                       : std::exp(std::complex<double>(0.0, -kj * dy));
      cx_n_[static_cast<std::size_t>(i) * nc + j] *= pi_factor * pj_factor * norm;
    }
  }
  fftw_execute(static_cast<fftw_plan>(plan_inv_n_));
  std::memcpy(values.data(), re_n_, sizeof(double) * values.size());
}

void SpectralWorkspace::convolve(std::span<const double> density,
                                 std::span<const double> kernel_hat, std::span<double> out) {
  const int n = n_;
  const int np = np_;
  const int npc = np / 2 + 1;
  std::memset(re_p_, 0, sizeof(double) * static_cast<std::size_t>(np) * np);
  for (int i = 0; i < n; ++i)
    std::memcpy(re_p_ + static_cast<std::size_t>(i) * np, density.data() + static_cast<std::size_t>(i) * n,
                sizeof(double) * n);
  fftw_execute(static_cast<fftw_plan>(plan_fwd_p_));
  const double scale = grid_.cell_area / (static_cast<double>(np) * np);
  const std::size_t m = static_cast<std::size_t>(np) * npc;
  for (std::size_t idx = 0; idx < m; ++idx) cx_p_[idx] *= kernel_hat[idx] * scale;
  fftw_execute(static_cast<fftw_plan>(plan_inv_p_));
  for (int i = 0; i < n; ++i)
    std::memcpy(out.data() + static_cast<std::size_t>(i) * n, re_p_ + static_cast<std::size_t>(i) * np,
                sizeof(double) * n);
}

std::vector<double> SpectralWorkspace::kernel_hat(std::span<const double> samples_2n,
                                                  double* max_imag) {
  const int np = np_;
  const int npc = np / 2 + 1;
  std::memcpy(re_p_, samples_2n.data(), sizeof(double) * samples_2n.size());
  fftw_execute(static_cast<fftw_plan>(plan_fwd_p_));
  std::vector<double> hat(static_cast<std::size_t>(np) * npc);
  double mi = 0.0;
  for (std::size_t idx = 0; idx < hat.size(); ++idx) {
    hat[idx] = cx_p_[idx].real();
    mi = std::max(mi, std::abs(cx_p_[idx].imag()));
  }
  if (max_imag) *max_imag = mi;
  return hat;
}

SpectralWorkspace& workspace_for(const Grid2D& g) {
  thread_local std::map<std::pair<int, double>, std::unique_ptr<SpectralWorkspace>> cache;
  auto key = std::make_pair(g.n, g.L);
  auto it = cache.find(key);
  if (it == cache.end())
    it = cache.emplace(key, std::make_unique<SpectralWorkspace>(g)).first;
  return *it->second;
}

Field2D laplacian(const Field2D& f) {
  SpectralWorkspace& ws = workspace_for(f.grid);
  std::vector<double> out(f.v.size());
  ws.laplacian(f.v, out);
  return wrap_field(f.grid, std::move(out));
}

double grad_norm_sq(const Field2D& f) { return workspace_for(f.grid).grad_norm_sq(f.v); }

Field2D fourier_upsample(const Field2D& f, int n_new) {
  const int n = f.grid.n;
  if (n_new < n) throw InvalidGridError("fourier_upsample requires n_new >= n");
  if (n_new == n) return f;
  Grid2D fine = make_grid(f.grid.L, n_new);
  const int nc = n / 2 + 1;
  const int nc_new = n_new / 2 + 1;

  fftw_complex* hat = fftw_alloc_complex(static_cast<std::size_t>(n) * nc);
  double* buf = fftw_alloc_real(static_cast<std::size_t>(n) * n);
  fftw_complex* hat_new = fftw_alloc_complex(static_cast<std::size_t>(n_new) * nc_new);
  double* buf_new = fftw_alloc_real(static_cast<std::size_t>(n_new) * n_new);
  fftw_plan pf, pb;
  {
    std::lock_guard<std::mutex> lock(planner_mutex());
    pf = fftw_plan_dft_r2c_2d(n, n, buf, hat, FFTW_ESTIMATE);
    pb = fftw_plan_dft_c2r_2d(n_new, n_new, hat_new, buf_new, FFTW_ESTIMATE);
  }
  std::memcpy(buf, f.v.data(), sizeof(double) * f.v.size());
  fftw_execute(pf);
  std::memset(hat_new, 0, sizeof(fftw_complex) * static_cast<std::size_t>(n_new) * nc_new);
  const double norm = 1.0 / (static_cast<double>(n) * n);
  for (int i = 0; i < n; ++i) {
    if (i == n / 2) continue;  // drop Nyquist; decayed fields carry none
    const int ii = (i < n / 2) ? i : i + (n_new - n);
    for (int j = 0; j < n / 2; ++j) {
      hat_new[static_cast<std::size_t>(ii) * nc_new + j][0] = hat[static_cast<std::size_t>(i) * nc + j][0] * norm;
      hat_new[static_cast<std::size_t>(ii) * nc_new + j][1] = hat[static_cast<std::size_t>(i) * nc + j][1] * norm;
    }
  }
  fftw_execute(pb);
  std::vector<double> out(buf_new, buf_new + static_cast<std::size_t>(n_new) * n_new);
  {
    std::lock_guard<std::mutex> lock(planner_mutex());
    fftw_destroy_plan(pf);
    fftw_destroy_plan(pb);
  }
  fftw_free(hat);
  fftw_free(buf);
  fftw_free(hat_new);
  fftw_free(buf_new);
  return wrap_field(fine, std::move(out));
}

}  // namespace logsp
