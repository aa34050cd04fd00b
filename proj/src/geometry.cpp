// SPDX-License-Identifier: Apache-2.0
#include "wavefocus/geometry.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace wavefocus {

GaussLegendreRule gauss_legendre(int n, double a, double b) {
  if (n < 1) throw std::invalid_argument("gauss_legendre: need n >= 1");
  if (!(b > a)) throw std::invalid_argument("gauss_legendre: need b > a");

  GaussLegendreRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);

  const double xm = 0.5 * (b + a);
  const double xl = 0.5 * (b - a);
  const int m = (n + 1) / 2;
  const double eps = 3.0e-15;

  for (int i = 0; i < m; ++i) {
    // Chebyshev estimate of the i-th root, then Newton on P_n.
    double z = std::cos(kPi * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p1 = 1.0;
      double p2 = 0.0;
      for (int j = 0; j < n; ++j) {
        const double p3 = p2;
        p2 = p1;
        p1 = ((2.0 * j + 1.0) * z * p2 - j * p3) / (j + 1.0);
      }
      pp = n * (z * p1 - p2) / (z * z - 1.0);
      const double z1 = z;
      z = z1 - p1 / pp;
      if (std::abs(z - z1) <= eps) break;
    }
    rule.nodes[i] = xm - xl * z;
    rule.nodes[n - 1 - i] = xm + xl * z;
    rule.weights[i] = 2.0 * xl / ((1.0 - z * z) * pp * pp);
    rule.weights[n - 1 - i] = rule.weights[i];
  }
  return rule;
}

namespace {

void validate_box(const Box& bounds) {
  for (int d = 0; d < 3; ++d) {
    if (!(bounds.max[d] > bounds.min[d])) {
      throw std::invalid_argument("domain grid: degenerate box extent");
    }
    if (!std::isfinite(bounds.min[d]) || !std::isfinite(bounds.max[d])) {
      throw std::invalid_argument("domain grid: non-finite bounds");
    }
  }
}

void finalize_grid(DomainGrid& g) {
  g.voxel_volume = g.spacing.prod();
  g.masked_cells.clear();
  for (long cell = 0; cell < g.total_cells(); ++cell) {
    if (g.mask[cell]) g.masked_cells.push_back(static_cast<int>(cell));
  }
  g.centers.resize(g.masked_count(), 3);
  for (int l = 0; l < g.masked_count(); ++l) {
    const Vector3i idx = g.unravel(g.masked_cells[l]);
    g.centers.row(l) = g.cell_center(idx[0], idx[1], idx[2]).transpose();
  }
}

}  // namespace

DomainGridPtr build_domain_grid(const Box& bounds, const Vector3i& shape,
                                const Region& region) {
  validate_box(bounds);
  for (int d = 0; d < 3; ++d) {
    if (shape[d] < 2) {
      throw std::invalid_argument(
          "domain grid: every shape entry must be >= 2");
    }
  }

  auto g = std::make_shared<DomainGrid>();
  g->bounds = bounds;
  g->shape = shape;
  for (int d = 0; d < 3; ++d) {
    g->spacing[d] = (bounds.max[d] - bounds.min[d]) / shape[d];
  }

  if (region.kind == Region::Kind::Ball) {
    if (!(region.radius > 0.0)) {
      throw std::invalid_argument("domain grid: ball radius must be > 0");
    }
    for (int d = 0; d < 3; ++d) {
      const double slack = 1e-12 * (bounds.max[d] - bounds.min[d]);
      if (region.center[d] - region.radius < bounds.min[d] - slack ||
          region.center[d] + region.radius > bounds.max[d] + slack) {
        throw std::invalid_argument(
            "domain grid: ball region does not fit inside bounds");
      }
    }
  }

  g->mask.assign(g->total_cells(), 0);
  const double r2 = region.radius * region.radius;
  for (int iz = 0; iz < shape[2]; ++iz) {
    for (int iy = 0; iy < shape[1]; ++iy) {
      for (int ix = 0; ix < shape[0]; ++ix) {
        bool inside = true;
        if (region.kind == Region::Kind::Ball) {
          const Vector3d c = g->cell_center(ix, iy, iz);
          inside = (c - region.center).squaredNorm() <= r2;
        }
        if (inside) g->mask[g->ravel(ix, iy, iz)] = 1;
      }
    }
  }

  finalize_grid(*g);
  if (g->masked_count() == 0) {
    throw std::invalid_argument("domain grid: region masks no voxel");
  }
  return g;
}

DomainGridPtr make_domain_grid_raw(const Vector3d& origin,
                                   const Vector3d& spacing,
                                   const Vector3i& shape,
                                   std::vector<std::uint8_t> mask) {
  for (int d = 0; d < 3; ++d) {
    if (shape[d] < 2) {
      throw std::invalid_argument("domain grid: every shape entry must be >= 2");
    }
    if (!(spacing[d] > 0.0) || !std::isfinite(spacing[d])) {
      throw std::invalid_argument("domain grid: spacing must be positive");
    }
  }
  auto g = std::make_shared<DomainGrid>();
  g->shape = shape;
  g->spacing = spacing;
  g->bounds.min = origin;
  for (int d = 0; d < 3; ++d) {
    g->bounds.max[d] = origin[d] + spacing[d] * shape[d];
  }
  if (static_cast<long>(mask.size()) != g->total_cells()) {
    throw std::invalid_argument("domain grid: mask size mismatch");
  }
  g->mask = std::move(mask);
  finalize_grid(*g);
  if (g->masked_count() == 0) {
    throw std::invalid_argument("domain grid: region masks no voxel");
  }
  return g;
}

bool grids_equal(const DomainGrid& a, const DomainGrid& b) {
  if (a.shape != b.shape) return false;
  const double scale = a.bounds.extent().norm() + b.bounds.extent().norm();
  if ((a.bounds.min - b.bounds.min).norm() > 1e-12 * scale) return false;
  if ((a.spacing - b.spacing).norm() > 1e-12 * scale) return false;
  return a.mask == b.mask;
}

SphereGridPtr build_sphere_grid(int n_polar, int n_azimuthal) {
  if (n_polar < 2) {
    throw std::invalid_argument("sphere grid: need n_polar >= 2");
  }
  if (n_azimuthal < 4) {
    throw std::invalid_argument("sphere grid: need n_azimuthal >= 4");
  }

  const GaussLegendreRule rule = gauss_legendre(n_polar);
  auto s = std::make_shared<SphereGrid>();
  const int n = n_polar * n_azimuthal;
  s->directions.resize(n, 3);
  s->weights.resize(n);
  s->polar.resize(n);
  s->azimuth.resize(n);

  const double wphi = 2.0 * kPi / n_azimuthal;
  for (int i = 0; i < n_polar; ++i) {
    const double theta = std::acos(rule.nodes[i]);
    for (int m = 0; m < n_azimuthal; ++m) {
      const int j = i * n_azimuthal + m;
      const double phi = wphi * m;
      s->polar[j] = theta;
      s->azimuth[j] = phi;
      s->weights[j] = rule.weights[i] * wphi;
      const double st = std::sin(theta);
      s->directions.row(j) << st * std::cos(phi), st * std::sin(phi),
          std::cos(theta);
    }
  }
  return s;
}

SphereGridPtr make_sphere_grid_raw(const Eigen::VectorXd& polar,
                                   const Eigen::VectorXd& azimuth,
                                   const Eigen::VectorXd& weights) {
  const int n = static_cast<int>(weights.size());
  if (polar.size() != n || azimuth.size() != n || n == 0) {
    throw std::invalid_argument("sphere grid: inconsistent raw arrays");
  }
  auto s = std::make_shared<SphereGrid>();
  s->polar = polar;
  s->azimuth = azimuth;
  s->weights = weights;
  s->directions.resize(n, 3);
  for (int j = 0; j < n; ++j) {
    if (!(weights[j] > 0.0)) {
      throw std::invalid_argument("sphere grid: weights must be positive");
    }
    const double st = std::sin(polar[j]);
    s->directions.row(j) << st * std::cos(azimuth[j]),
        st * std::sin(azimuth[j]), std::cos(polar[j]);
  }
  return s;
}

bool spheres_equal(const SphereGrid& a, const SphereGrid& b) {
  if (a.count() != b.count()) return false;
  return (a.directions - b.directions).cwiseAbs().maxCoeff() <= 1e-9 &&
         (a.weights - b.weights).cwiseAbs().maxCoeff() <= 1e-9;
}

WaveContext::WaveContext(double k_in, const Vector3d& alpha_in)
    : k(k_in), alpha(alpha_in) {
  if (!(k > 0.0) || !std::isfinite(k)) {
    throw std::invalid_argument("wave context: wavenumber must be positive");
  }
  if (std::abs(alpha.norm() - 1.0) > 1e-14) {
    throw std::invalid_argument("wave context: incident direction must be unit");
  }
}

}  // namespace wavefocus
