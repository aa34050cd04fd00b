// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <vector>

#include "wavefocus/design.hpp"

namespace wavefocus {

// Small acoustically soft particles of one common radius, placed inside the
// design domain.  Construction enforces pair separation >= 4 * radius and a
// radius-to-mean-spacing ratio <= 0.2.
struct ParticleCloud {
  std::vector<Vector3d> positions;
  double radius = 0.0;
  double c0 = 0.0;  // capacitance per particle, 4 pi radius
  std::uint64_t seed = 0;
  double mean_spacing = -1.0;  // mean nearest-neighbor distance; -1 if M < 2

  int count() const { return static_cast<int>(positions.size()); }
};

struct SamplingOptions {
  double max_expected_count = 1e5;
  int max_tries_per_particle = 200;
  double min_separation_factor = 4.0;
};

// Mean nearest-neighbor distance over the positions; -1 if fewer than two.
double mean_nearest_neighbor_distance(const std::vector<Vector3d>& positions);

// Checks the cloud invariants (finite positions, pair separation >= 4 *
// radius, radius / mean spacing <= 0.2) and fills c0 and mean_spacing.
// Sampling calls this; file ingestion must call it too.
void finalize_cloud(ParticleCloud& cloud);

// Draws per-voxel Poisson counts with mean density * voxel_volume and places
// particles uniformly in their voxel, rejecting placements closer than the
// separation limit.  Deterministic for a fixed seed.
ParticleCloud sample_particles(const RealField& density, double radius,
                               std::uint64_t seed,
                               const SamplingOptions& options = {});

struct EnsembleSolution {
  Eigen::VectorXcd local_fields;
  FarField amplitude;
  double residual = 0.0;
};

struct FoldyLaxOptions {
  int max_count = 10000;        // dense-solve budget
  double residual_tol = 1e-10;  // certificate on the solved system
};

// Self-consistent point-scatterer system
//   u_j = u0(x_j) - c0 * sum_{m != j} g(x_j, x_m) u_m
// solved densely, with amplitude A(beta) = -(c0/4pi) sum_m e^{-ik beta.x_m} u_m.
EnsembleSolution foldy_lax_solve(const ParticleCloud& cloud,
                                 const WaveContext& ctx, SphereGridPtr sphere,
                                 const FoldyLaxOptions& options = {});

struct SeedRun {
  std::uint64_t seed = 0;
  int count = 0;
  double mean_spacing = -1.0;
  double solve_residual = 0.0;
  double distance = 0.0;  // this seed's amplitude vs the design prediction
};

struct RadiusRun {
  double radius = 0.0;
  double expected_count = 0.0;
  double volume_fraction = 0.0;   // count * (4pi/3) a^3 / vol(D)
  double mean_distance = 0.0;     // seed-averaged amplitude vs prediction
  std::vector<SeedRun> seeds;
};

struct EffectiveMediumReport {
  std::vector<RadiusRun> runs;     // radius a, then halved levels
  bool trend_nonincreasing = false;
  double capacitance_rel_err = 0.0;  // |c0 mean(N) - mean(q - q0)| / mean(q - q0)
};

// Samples clouds from the design's density at radius a (count scales as 1/a
// because N = (q - q0) / (4 pi a)), solves the point-scatterer system per
// seed, and compares the seed-averaged amplitude with B h_delta.  Repeats at
// halved radii to expose the effective-medium trend.
EffectiveMediumReport effective_medium_check(const DesignResult& design,
                                             double radius,
                                             const std::vector<std::uint64_t>& seeds,
                                             int radius_levels = 2);

// Core comparison used by both the report above and the file-driven path:
// sample at fixed density/radius per seed and compare with a prediction.
RadiusRun ensemble_distance(const RealField& number_density, double radius,
                            const std::vector<std::uint64_t>& seeds,
                            const WaveContext& ctx, const FarField& prediction,
                            std::vector<ParticleCloud>* out_clouds = nullptr,
                            std::vector<EnsembleSolution>* out_solutions = nullptr);

}  // namespace wavefocus
