// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <memory>

#include <Eigen/Core>

#include "wavefocus/fields.hpp"

namespace wavefocus {

// Outgoing point-source kernel g(r) = exp(i k r) / (4 pi r), r > 0.
cplx greens_value(double k, double r);

// Integral of the kernel over a ball of the given radius centered at the
// singularity: (exp(ikR)(1 - ikR) - 1) / k^2, with series evaluation for
// small kR; the k -> 0 limit is R^2 / 2.
cplx greens_ball_integral(double k, double radius);

// Radius of the ball with the same volume as one voxel; used to absorb the
// kernel singularity into the diagonal of the midpoint rule.
double equivalent_ball_radius(double voxel_volume);

enum class ApplyMode { Auto, Direct, Fft };

struct FftWorkspace;  // padded-box convolution state, defined in kernels.cpp

// (Gh)(x_i) = sum_j kernel(x_i - x_j) h_j * voxel_volume with the singular
// diagonal replaced by the equal-volume-ball integral.  The Fft path
// evaluates the identical sum by circular convolution on the padded box and
// must agree with Direct to 1e-10 relative.
class VolumePotential {
 public:
  VolumePotential(DomainGridPtr grid, double k, ApplyMode mode = ApplyMode::Auto);
  ~VolumePotential();
  VolumePotential(VolumePotential&&) noexcept;
  VolumePotential& operator=(VolumePotential&&) noexcept;
  VolumePotential(const VolumePotential&) = delete;
  VolumePotential& operator=(const VolumePotential&) = delete;

  ComplexField apply(const ComplexField& h) const;

  ApplyMode resolved_mode() const { return mode_; }
  double wavenumber() const { return k_; }
  const DomainGridPtr& grid() const { return grid_; }

 private:
  DomainGridPtr grid_;
  double k_ = 0.0;
  ApplyMode mode_ = ApplyMode::Direct;
  std::unique_ptr<FftWorkspace> fft_;
};

ComplexField apply_volume_potential(const ComplexField& h, double k,
                                    ApplyMode mode = ApplyMode::Auto);

// Dense matrix of the discretized volume potential on the masked voxels.
Eigen::MatrixXcd greens_matrix(const DomainGrid& grid, double k);

// Far-field map (Bh)(beta_j) = -(1/4pi) * sum_l exp(-i k beta_j . x_l) h_l V.
FarField far_field_map(SphereGridPtr sphere, double k, const ComplexField& h);

// Adjoint with respect to the voxel-volume and quadrature-weight inner
// products: (B* f)(x_l) = -(1/4pi) * sum_j w_j exp(+i k beta_j . x_l) f_j.
ComplexField far_field_adjoint(DomainGridPtr grid, double k, const FarField& f);

// Matrix of the far-field map between the Euclidean coordinates
// h_hat = sqrt(V) h and f_hat = sqrt(w) f, so that plain singular values of
// this matrix are the singular values of the weighted operator.
Eigen::MatrixXcd far_field_operator_natural(const DomainGrid& grid,
                                            const SphereGrid& sphere, double k);

}  // namespace wavefocus
