// SPDX-License-Identifier: Apache-2.0
#include "wavefocus/partial_wave.hpp"

#include <cmath>

namespace wavefocus {

namespace {

// Partial-wave coefficients c_l = -j_l(ka) / h1_l(ka) for the Dirichlet
// condition on the sphere surface.
std::vector<cplx> dirichlet_coefficients(double radius, double k) {
  if (radius < 0.0) {
    throw std::invalid_argument("soft_sphere_amplitude: radius must be >= 0");
  }
  if (!(k > 0.0)) {
    throw std::invalid_argument("soft_sphere_amplitude: k must be positive");
  }
  const double x = k * radius;
  if (x >= 50.0) {
    throw std::invalid_argument(
        "soft_sphere_amplitude: series only supported for k*radius < 50");
  }
  if (x == 0.0) return {};

  const int lmax = static_cast<int>(std::ceil(x)) + 12;
  std::vector<cplx> c(lmax + 1);
  for (int l = 0; l <= lmax; ++l) {
    const double jl = std::sph_bessel(static_cast<unsigned>(l), x);
    const double yl = std::sph_neumann(static_cast<unsigned>(l), x);
    if (!std::isfinite(yl)) {
      // y_l has overflowed for this order; the remaining coefficients are
      // far below double precision.
      c[l] = 0.0;
      continue;
    }
    c[l] = -jl / cplx(jl, yl);
  }
  return c;
}

}  // namespace

cplx soft_sphere_amplitude_at(double radius, double k, double cos_theta) {
  const std::vector<cplx> c = dirichlet_coefficients(radius, k);
  if (c.empty()) return 0.0;

  cplx sum = 0.0;
  double pl_prev = 1.0;  // P_0
  double pl = cos_theta; // P_1
  for (int l = 0; l < static_cast<int>(c.size()); ++l) {
    const double p = (l == 0) ? pl_prev : (l == 1 ? pl : 0.0);
    double value = p;
    if (l >= 2) {
      const double next =
          ((2.0 * l - 1.0) * cos_theta * pl - (l - 1.0) * pl_prev) / l;
      pl_prev = pl;
      pl = next;
      value = next;
    }
    sum += (2.0 * l + 1.0) * c[l] * value;
  }
  return cplx(0.0, -1.0) / k * sum;
}

std::vector<cplx> soft_sphere_amplitude(double radius, double k,
                                        const std::vector<double>& angles) {
  std::vector<cplx> out;
  out.reserve(angles.size());
  for (const double theta : angles) {
    out.push_back(soft_sphere_amplitude_at(radius, k, std::cos(theta)));
  }
  return out;
}

double soft_sphere_truncation_tail(double radius, double k) {
  const std::vector<cplx> c = dirichlet_coefficients(radius, k);
  if (c.empty()) return 0.0;
  double lead = 0.0;
  for (std::size_t l = 0; l < c.size(); ++l) {
    lead = std::max(lead, (2.0 * l + 1.0) * std::abs(c[l]));
  }
  const std::size_t last = c.size() - 1;
  const double tail = (2.0 * last + 1.0) * std::abs(c[last]);
  return lead > 0.0 ? tail / lead : 0.0;
}

}  // namespace wavefocus
