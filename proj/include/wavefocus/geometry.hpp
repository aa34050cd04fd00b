// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include <Eigen/Core>

#include "wavefocus/common.hpp"

namespace wavefocus {

using Eigen::Vector3d;
using Eigen::Vector3i;

// Nodes and weights for n-point Gauss-Legendre quadrature on [a, b].
struct GaussLegendreRule {
  Eigen::VectorXd nodes;
  Eigen::VectorXd weights;
};

GaussLegendreRule gauss_legendre(int n, double a = -1.0, double b = 1.0);

struct Box {
  Vector3d min = Vector3d::Zero();
  Vector3d max = Vector3d::Zero();

  Vector3d extent() const { return max - min; }
  double volume() const { return extent().prod(); }
};

// Support region selecting which voxels of the bounding box belong to the
// scatterer domain.
struct Region {
  enum class Kind { Box, Ball };

  Kind kind = Kind::Box;
  Vector3d center = Vector3d::Zero();
  double radius = 0.0;

  static Region box() { return Region{}; }
  static Region ball(const Vector3d& c, double r) {
    return Region{Kind::Ball, c, r};
  }
};

// Uniform voxel grid over a box.  Only voxels whose center lies in the
// support region are "masked" (kept); fields store values for masked voxels
// only, in row-major order with ix fastest.
struct DomainGrid {
  Box bounds;
  Vector3i shape = Vector3i::Zero();
  Vector3d spacing = Vector3d::Zero();
  double voxel_volume = 0.0;

  std::vector<std::uint8_t> mask;  // one entry per cell of the full box
  std::vector<int> masked_cells;   // linear cell index of each masked voxel
  Eigen::Matrix<double, Eigen::Dynamic, 3> centers;  // row per masked voxel

  int masked_count() const { return static_cast<int>(masked_cells.size()); }
  long total_cells() const {
    return static_cast<long>(shape[0]) * shape[1] * shape[2];
  }
  double masked_volume() const { return voxel_volume * masked_count(); }

  int ravel(int ix, int iy, int iz) const {
    return ix + shape[0] * (iy + shape[1] * iz);
  }
  Vector3i unravel(int cell) const {
    const int ix = cell % shape[0];
    const int iy = (cell / shape[0]) % shape[1];
    const int iz = cell / (shape[0] * shape[1]);
    return Vector3i(ix, iy, iz);
  }
  Vector3d cell_center(int ix, int iy, int iz) const {
    return bounds.min +
           Vector3d((ix + 0.5) * spacing[0], (iy + 0.5) * spacing[1],
                    (iz + 0.5) * spacing[2]);
  }
};

using DomainGridPtr = std::shared_ptr<const DomainGrid>;

DomainGridPtr build_domain_grid(const Box& bounds, const Vector3i& shape,
                                const Region& region);

// Assembles a grid from already-validated raw pieces (file loading path).
DomainGridPtr make_domain_grid_raw(const Vector3d& origin,
                                   const Vector3d& spacing,
                                   const Vector3i& shape,
                                   std::vector<std::uint8_t> mask);

bool grids_equal(const DomainGrid& a, const DomainGrid& b);

// Quadrature on the unit sphere: Gauss-Legendre in cos(theta) crossed with a
// uniform azimuthal rule.  Weights sum to 4*pi.  The (polar, azimuth) angles
// are kept alongside the unit directions so files round-trip exactly.
struct SphereGrid {
  Eigen::Matrix<double, Eigen::Dynamic, 3> directions;
  Eigen::VectorXd weights;
  Eigen::VectorXd polar;
  Eigen::VectorXd azimuth;

  int count() const { return static_cast<int>(weights.size()); }
};

using SphereGridPtr = std::shared_ptr<const SphereGrid>;

SphereGridPtr build_sphere_grid(int n_polar, int n_azimuthal);

SphereGridPtr make_sphere_grid_raw(const Eigen::VectorXd& polar,
                                   const Eigen::VectorXd& azimuth,
                                   const Eigen::VectorXd& weights);

bool spheres_equal(const SphereGrid& a, const SphereGrid& b);

// Fixed wavenumber and incident direction for one scattering experiment.
// The validating constructor is the normal entry point; default construction
// yields an unset context (k = 0) that every solver rejects.
struct WaveContext {
  double k = 0.0;
  Vector3d alpha = Vector3d::UnitZ();

  WaveContext() = default;
  WaveContext(double k_in, const Vector3d& alpha_in);
};

}  // namespace wavefocus
