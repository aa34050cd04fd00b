// SPDX-License-Identifier: Apache-2.0
#include "wavefocus/fields.hpp"

#include <cmath>

namespace wavefocus {

ComplexField make_zero_field(DomainGridPtr grid) {
  ComplexField f;
  f.grid = std::move(grid);
  f.values = Eigen::VectorXcd::Zero(f.grid->masked_count());
  return f;
}

RealField make_zero_real_field(DomainGridPtr grid) {
  RealField f;
  f.grid = std::move(grid);
  f.values = Eigen::VectorXd::Zero(f.grid->masked_count());
  return f;
}

FarField make_zero_far_field(SphereGridPtr sphere) {
  FarField f;
  f.sphere = std::move(sphere);
  f.values = Eigen::VectorXcd::Zero(f.sphere->count());
  return f;
}

void require_field_on_grid(const ComplexField& f, const char* where) {
  if (!f.grid || f.values.size() != f.grid->masked_count()) {
    throw std::invalid_argument(std::string(where) +
                                ": field/grid size mismatch");
  }
}

void require_same_grid(const ComplexField& a, const ComplexField& b,
                       const char* where) {
  require_field_on_grid(a, where);
  require_field_on_grid(b, where);
  if (a.grid.get() != b.grid.get() && !grids_equal(*a.grid, *b.grid)) {
    throw std::invalid_argument(std::string(where) +
                                ": fields live on different grids");
  }
}

void require_same_sphere(const FarField& a, const FarField& b,
                         const char* where) {
  if (!a.sphere || !b.sphere || a.values.size() != a.sphere->count() ||
      b.values.size() != b.sphere->count()) {
    throw std::invalid_argument(std::string(where) +
                                ": far field/sphere size mismatch");
  }
  if (a.sphere.get() != b.sphere.get() && !spheres_equal(*a.sphere, *b.sphere)) {
    throw std::invalid_argument(std::string(where) +
                                ": far fields live on different sphere grids");
  }
}

double field_norm(const ComplexField& f) {
  require_field_on_grid(f, "field_norm");
  return std::sqrt(f.grid->voxel_volume * f.values.squaredNorm());
}

cplx field_dot(const ComplexField& a, const ComplexField& b) {
  require_same_grid(a, b, "field_dot");
  return a.grid->voxel_volume * a.values.dot(b.values);
}

double far_norm(const FarField& f) {
  if (!f.sphere || f.values.size() != f.sphere->count()) {
    throw std::invalid_argument("far_norm: far field/sphere size mismatch");
  }
  return std::sqrt(
      (f.sphere->weights.array() * f.values.array().abs2()).sum());
}

cplx far_dot(const FarField& a, const FarField& b) {
  require_same_sphere(a, b, "far_dot");
  return (a.values.conjugate().array() * b.values.array() *
          a.sphere->weights.array().cast<cplx>())
      .sum();
}

double relative_far_distance(const FarField& a, const FarField& ref) {
  require_same_sphere(a, ref, "relative_far_distance");
  const double denom = far_norm(ref);
  if (!(denom > 0.0)) {
    throw std::invalid_argument("relative_far_distance: reference has zero norm");
  }
  FarField diff{a.sphere, a.values - ref.values};
  return far_norm(diff) / denom;
}

ComplexField incident_wave(DomainGridPtr grid, const WaveContext& ctx) {
  ComplexField u0;
  u0.grid = std::move(grid);
  const int n = u0.grid->masked_count();
  u0.values.resize(n);
  const Eigen::VectorXd phase = u0.grid->centers * (ctx.k * ctx.alpha);
  for (int l = 0; l < n; ++l) {
    u0.values[l] = cplx(std::cos(phase[l]), std::sin(phase[l]));
  }
  return u0;
}

}  // namespace wavefocus
