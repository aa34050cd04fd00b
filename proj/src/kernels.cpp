// SPDX-License-Identifier: Apache-2.0
#include "wavefocus/kernels.hpp"

#include <cmath>

#include <fftw3.h>

namespace wavefocus {

cplx greens_value(double k, double r) {
  if (!(r > 0.0)) {
    throw std::invalid_argument("greens_value: r must be positive");
  }
  const double kr = k * r;
  return cplx(std::cos(kr), std::sin(kr)) / (kFourPi * r);
}

cplx greens_ball_integral(double k, double radius) {
  if (!(radius > 0.0)) {
    throw std::invalid_argument("greens_ball_integral: radius must be positive");
  }
  if (k < 0.0) {
    throw std::invalid_argument("greens_ball_integral: k must be >= 0");
  }
  const double kR = k * radius;
  const double R2 = radius * radius;
  if (kR < 1e-3) {
    // (exp(ikR)(1-ikR) - 1)/k^2 expanded about kR = 0.
    return cplx(R2 * (0.5 - kR * kR / 8.0),
                radius * R2 * k * (1.0 / 3.0 - kR * kR / 30.0));
  }
  const cplx e = cplx(std::cos(kR), std::sin(kR));
  return (e * cplx(1.0, -kR) - 1.0) / (k * k);
}

double equivalent_ball_radius(double voxel_volume) {
  return std::cbrt(3.0 * voxel_volume / kFourPi);
}

// ---------------------------------------------------------------------------
// FFT workspace: circular convolution with the translation-invariant kernel
// on the box padded to twice the shape per axis.

struct FftWorkspace {
  int mx = 0, my = 0, mz = 0;
  Eigen::VectorXcd kernel_hat;
  mutable Eigen::VectorXcd buffer;
  fftw_plan forward = nullptr;
  fftw_plan inverse = nullptr;

  ~FftWorkspace() {
    if (forward) fftw_destroy_plan(forward);
    if (inverse) fftw_destroy_plan(inverse);
  }
};

namespace {

std::unique_ptr<FftWorkspace> build_fft_workspace(const DomainGrid& g,
                                                  double k) {
  auto ws = std::make_unique<FftWorkspace>();
  ws->mx = 2 * g.shape[0];
  ws->my = 2 * g.shape[1];
  ws->mz = 2 * g.shape[2];
  const long m = static_cast<long>(ws->mx) * ws->my * ws->mz;

  Eigen::VectorXcd kernel = Eigen::VectorXcd::Zero(m);
  const double V = g.voxel_volume;
  const cplx self = greens_ball_integral(k, equivalent_ball_radius(V));
  const auto at = [&](int ix, int iy, int iz) -> long {
    return ix + static_cast<long>(ws->mx) * (iy + static_cast<long>(ws->my) * iz);
  };
  for (int dz = -(g.shape[2] - 1); dz <= g.shape[2] - 1; ++dz) {
    const int wz = (dz + ws->mz) % ws->mz;
    for (int dy = -(g.shape[1] - 1); dy <= g.shape[1] - 1; ++dy) {
      const int wy = (dy + ws->my) % ws->my;
      for (int dx = -(g.shape[0] - 1); dx <= g.shape[0] - 1; ++dx) {
        const int wx = (dx + ws->mx) % ws->mx;
        cplx val;
        if (dx == 0 && dy == 0 && dz == 0) {
          val = self;
        } else {
          const double r = Vector3d(dx * g.spacing[0], dy * g.spacing[1],
                                    dz * g.spacing[2])
                               .norm();
          val = greens_value(k, r) * V;
        }
        kernel[at(wx, wy, wz)] = val;
      }
    }
  }

  ws->buffer.resize(m);
  ws->kernel_hat.resize(m);
  // fftw_plan_dft_3d wants the slowest dimension first; our linear layout has
  // x fastest, so the dims are (mz, my, mx).
  fftw_complex* buf = reinterpret_cast<fftw_complex*>(ws->buffer.data());
  ws->forward = fftw_plan_dft_3d(ws->mz, ws->my, ws->mx, buf, buf,
                                 FFTW_FORWARD, FFTW_ESTIMATE);
  ws->inverse = fftw_plan_dft_3d(ws->mz, ws->my, ws->mx, buf, buf,
                                 FFTW_BACKWARD, FFTW_ESTIMATE);
  if (!ws->forward || !ws->inverse) {
    throw std::runtime_error("volume potential: FFT planning failed");
  }

  ws->buffer = kernel;
  fftw_execute_dft(ws->forward, buf, buf);
  ws->kernel_hat = ws->buffer / static_cast<double>(m);
  return ws;
}

}  // namespace

VolumePotential::VolumePotential(DomainGridPtr grid, double k, ApplyMode mode)
    : grid_(std::move(grid)), k_(k) {
  if (!grid_) throw std::invalid_argument("volume potential: null grid");
  if (k_ < 0.0) throw std::invalid_argument("volume potential: k must be >= 0");
  if (mode == ApplyMode::Auto) {
    mode = grid_->masked_count() <= 3000 ? ApplyMode::Direct : ApplyMode::Fft;
  }
  mode_ = mode;
  if (mode_ == ApplyMode::Fft) {
    fft_ = build_fft_workspace(*grid_, k_);
  }
}

VolumePotential::~VolumePotential() = default;
VolumePotential::VolumePotential(VolumePotential&&) noexcept = default;
VolumePotential& VolumePotential::operator=(VolumePotential&&) noexcept =
    default;

ComplexField VolumePotential::apply(const ComplexField& h) const {
  require_field_on_grid(h, "apply_volume_potential");
  if (h.grid.get() != grid_.get() && !grids_equal(*h.grid, *grid_)) {
    throw std::invalid_argument("apply_volume_potential: grid mismatch");
  }
  const DomainGrid& g = *grid_;
  const int n = g.masked_count();
  ComplexField out = make_zero_field(h.grid);

  if (mode_ == ApplyMode::Direct) {
    const double V = g.voxel_volume;
    const cplx self = greens_ball_integral(k_, equivalent_ball_radius(V));
    for (int i = 0; i < n; ++i) {
      const Vector3d xi = g.centers.row(i).transpose();
      cplx acc = self * h.values[i];
      for (int j = 0; j < n; ++j) {
        if (j == i) continue;
        const double r = (xi - g.centers.row(j).transpose()).norm();
        const double kr = k_ * r;
        acc += cplx(std::cos(kr), std::sin(kr)) / (kFourPi * r) * V *
               h.values[j];
      }
      out.values[i] = acc;
    }
    return out;
  }

  const auto& ws = *fft_;
  ws.buffer.setZero();
  for (int l = 0; l < n; ++l) {
    const Vector3i idx = g.unravel(g.masked_cells[l]);
    const long p = idx[0] + static_cast<long>(ws.mx) *
                                (idx[1] + static_cast<long>(ws.my) * idx[2]);
    ws.buffer[p] = h.values[l];
  }
  fftw_complex* buf = reinterpret_cast<fftw_complex*>(ws.buffer.data());
  fftw_execute_dft(ws.forward, buf, buf);
  ws.buffer.array() *= ws.kernel_hat.array();
  fftw_execute_dft(ws.inverse, buf, buf);
  for (int l = 0; l < n; ++l) {
    const Vector3i idx = g.unravel(g.masked_cells[l]);
    const long p = idx[0] + static_cast<long>(ws.mx) *
                                (idx[1] + static_cast<long>(ws.my) * idx[2]);
    out.values[l] = ws.buffer[p];
  }
  return out;
}

ComplexField apply_volume_potential(const ComplexField& h, double k,
                                    ApplyMode mode) {
  require_field_on_grid(h, "apply_volume_potential");
  VolumePotential op(h.grid, k, mode);
  return op.apply(h);
}

Eigen::MatrixXcd greens_matrix(const DomainGrid& g, double k) {
  const int n = g.masked_count();
  Eigen::MatrixXcd G(n, n);
  const double V = g.voxel_volume;
  const cplx self = greens_ball_integral(k, equivalent_ball_radius(V));
  for (int i = 0; i < n; ++i) {
    G(i, i) = self;
    const Vector3d xi = g.centers.row(i).transpose();
    for (int j = 0; j < i; ++j) {
      const double r = (xi - g.centers.row(j).transpose()).norm();
      const cplx val = greens_value(k, r) * V;
      G(i, j) = val;
      G(j, i) = val;
    }
  }
  return G;
}

FarField far_field_map(SphereGridPtr sphere, double k, const ComplexField& h) {
  require_field_on_grid(h, "far_field_map");
  if (!sphere) throw std::invalid_argument("far_field_map: null sphere grid");
  FarField out;
  out.sphere = std::move(sphere);
  const int ndir = out.sphere->count();
  out.values.resize(ndir);
  const double scale = h.grid->voxel_volume / kFourPi;
  for (int j = 0; j < ndir; ++j) {
    const Vector3d beta = out.sphere->directions.row(j).transpose();
    const Eigen::VectorXd phase = h.grid->centers * (k * beta);
    cplx acc = 0.0;
    for (int l = 0; l < phase.size(); ++l) {
      // exp(-i k beta . x_l)
      acc += cplx(std::cos(phase[l]), -std::sin(phase[l])) * h.values[l];
    }
    out.values[j] = -scale * acc;
  }
  return out;
}

ComplexField far_field_adjoint(DomainGridPtr grid, double k, const FarField& f) {
  if (!grid) throw std::invalid_argument("far_field_adjoint: null grid");
  if (!f.sphere || f.values.size() != f.sphere->count()) {
    throw std::invalid_argument("far_field_adjoint: far field size mismatch");
  }
  ComplexField out = make_zero_field(std::move(grid));
  const int n = out.grid->masked_count();
  for (int j = 0; j < f.sphere->count(); ++j) {
    const Vector3d beta = f.sphere->directions.row(j).transpose();
    const Eigen::VectorXd phase = out.grid->centers * (k * beta);
    const cplx coef = -f.sphere->weights[j] / kFourPi * f.values[j];
    for (int l = 0; l < n; ++l) {
      out.values[l] += coef * cplx(std::cos(phase[l]), std::sin(phase[l]));
    }
  }
  return out;
}

Eigen::MatrixXcd far_field_operator_natural(const DomainGrid& grid,
                                            const SphereGrid& sphere,
                                            double k) {
  const int ndir = sphere.count();
  const int n = grid.masked_count();
  Eigen::MatrixXcd B(ndir, n);
  const double sqrtV = std::sqrt(grid.voxel_volume);
  for (int j = 0; j < ndir; ++j) {
    const Vector3d beta = sphere.directions.row(j).transpose();
    const Eigen::VectorXd phase = grid.centers * (k * beta);
    const double wj = -std::sqrt(sphere.weights[j]) * sqrtV / kFourPi;
    for (int l = 0; l < n; ++l) {
      B(j, l) = wj * cplx(std::cos(phase[l]), -std::sin(phase[l]));
    }
  }
  return B;
}

}  // namespace wavefocus
