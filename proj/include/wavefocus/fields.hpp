// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Core>

#include "wavefocus/geometry.hpp"

namespace wavefocus {

// Complex-valued function sampled at the masked voxel centers of a grid.
// Norms and inner products carry the voxel volume, so they approximate the
// L2 norm over the domain.
struct ComplexField {
  DomainGridPtr grid;
  Eigen::VectorXcd values;
};

struct RealField {
  DomainGridPtr grid;
  Eigen::VectorXd values;
};

// Function on the unit sphere sampled at quadrature directions; norms carry
// the quadrature weights (discrete L2 over the sphere).
struct FarField {
  SphereGridPtr sphere;
  Eigen::VectorXcd values;
};

ComplexField make_zero_field(DomainGridPtr grid);
RealField make_zero_real_field(DomainGridPtr grid);
FarField make_zero_far_field(SphereGridPtr sphere);

void require_same_grid(const ComplexField& a, const ComplexField& b,
                       const char* where);
void require_field_on_grid(const ComplexField& f, const char* where);
void require_same_sphere(const FarField& a, const FarField& b,
                         const char* where);

double field_norm(const ComplexField& f);
cplx field_dot(const ComplexField& a, const ComplexField& b);  // conj(a).b

double far_norm(const FarField& f);
cplx far_dot(const FarField& a, const FarField& b);  // conj(a).b

// ||a - ref|| / ||ref||; requires ||ref|| > 0.
double relative_far_distance(const FarField& a, const FarField& ref);

// Incident plane wave u0(x) = exp(i k alpha.x) at the masked centers.
ComplexField incident_wave(DomainGridPtr grid, const WaveContext& ctx);

}  // namespace wavefocus
