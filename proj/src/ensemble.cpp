// SPDX-License-Identifier: Apache-2.0
#include "wavefocus/ensemble.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <random>
#include <string>
#include <unordered_map>

#include <Eigen/Dense>

#include "wavefocus/kernels.hpp"

namespace wavefocus {

namespace {

// Sparse cell list over particle positions for neighborhood queries.
class CellList {
 public:
  CellList(const Vector3d& origin, double cell_size)
      : origin_(origin), cell_(cell_size) {}

  void insert(const Vector3d& p, int id) { cells_[key_of(p)].push_back(id); }

  // Visits ids in every cell within Chebyshev distance `shell` of p's cell.
  template <typename Fn>
  void for_neighbors(const Vector3d& p, int shell, Fn&& fn) const {
    const auto c = coords_of(p);
    for (long dz = -shell; dz <= shell; ++dz) {
      for (long dy = -shell; dy <= shell; ++dy) {
        for (long dx = -shell; dx <= shell; ++dx) {
          const auto it = cells_.find(pack(c[0] + dx, c[1] + dy, c[2] + dz));
          if (it == cells_.end()) continue;
          for (const int id : it->second) fn(id);
        }
      }
    }
  }

  double cell_size() const { return cell_; }

 private:
  std::array<long, 3> coords_of(const Vector3d& p) const {
    return {static_cast<long>(std::floor((p[0] - origin_[0]) / cell_)),
            static_cast<long>(std::floor((p[1] - origin_[1]) / cell_)),
            static_cast<long>(std::floor((p[2] - origin_[2]) / cell_))};
  }
  static std::uint64_t pack(long x, long y, long z) {
    const std::uint64_t a = static_cast<std::uint64_t>(x + (1L << 20));
    const std::uint64_t b = static_cast<std::uint64_t>(y + (1L << 20));
    const std::uint64_t c = static_cast<std::uint64_t>(z + (1L << 20));
    return (a << 42) ^ (b << 21) ^ c;
  }
  std::uint64_t key_of(const Vector3d& p) const {
    const auto c = coords_of(p);
    return pack(c[0], c[1], c[2]);
  }

  Vector3d origin_;
  double cell_;
  std::unordered_map<std::uint64_t, std::vector<int>> cells_;
};

double brute_nearest(const std::vector<Vector3d>& pts, int i) {
  double best = std::numeric_limits<double>::infinity();
  for (int j = 0; j < static_cast<int>(pts.size()); ++j) {
    if (j == i) continue;
    best = std::min(best, (pts[i] - pts[j]).norm());
  }
  return best;
}

}  // namespace

double mean_nearest_neighbor_distance(const std::vector<Vector3d>& positions) {
  const int n = static_cast<int>(positions.size());
  if (n < 2) return -1.0;

  if (n <= 4000) {
    double acc = 0.0;
    for (int i = 0; i < n; ++i) acc += brute_nearest(positions, i);
    return acc / n;
  }

  Vector3d lo = positions[0];
  Vector3d hi = positions[0];
  for (const auto& p : positions) {
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  const double scale = (hi - lo).maxCoeff();
  if (!(scale > 0.0)) return 0.0;  // all points coincide

  // Cell edge near the expected spacing keeps the shell search local.
  const double cell = scale / std::cbrt(static_cast<double>(n));
  CellList list(lo, cell);
  for (int i = 0; i < n; ++i) list.insert(positions[i], i);

  double acc = 0.0;
  for (int i = 0; i < n; ++i) {
    double best = std::numeric_limits<double>::infinity();
    bool certified = false;
    for (int shell = 1; shell <= 64 && !certified; ++shell) {
      list.for_neighbors(positions[i], shell, [&](int j) {
        if (j == i) return;
        best = std::min(best, (positions[i] - positions[j]).norm());
      });
      // A neighbor is only the true nearest once the unscanned region starts
      // beyond it.
      certified = best <= (shell - 1) * cell;
    }
    acc += certified ? best : brute_nearest(positions, i);
  }
  return acc / n;
}

void finalize_cloud(ParticleCloud& cloud) {
  if (!(cloud.radius > 0.0) || !std::isfinite(cloud.radius)) {
    throw std::invalid_argument("particle cloud: radius must be positive");
  }
  if (cloud.positions.empty()) {
    throw std::invalid_argument("particle cloud: no particles");
  }
  for (const auto& p : cloud.positions) {
    if (!p.allFinite()) {
      throw std::invalid_argument("particle cloud: nonfinite position");
    }
  }

  const double min_sep = 4.0 * cloud.radius;
  const int n = cloud.count();
  CellList list(cloud.positions[0], min_sep);
  for (int i = 0; i < n; ++i) {
    bool ok = true;
    list.for_neighbors(cloud.positions[i], 1, [&](int j) {
      if (ok && (cloud.positions[i] - cloud.positions[j]).norm() < min_sep) {
        ok = false;
      }
    });
    if (!ok) {
      throw std::invalid_argument(
          "particle cloud: pair separation below 4 * radius");
    }
    list.insert(cloud.positions[i], i);
  }

  cloud.c0 = kFourPi * cloud.radius;
  cloud.mean_spacing = mean_nearest_neighbor_distance(cloud.positions);
  if (cloud.mean_spacing > 0.0 && cloud.radius / cloud.mean_spacing > 0.2) {
    throw std::invalid_argument(
        "particle cloud: radius-to-spacing ratio above 0.2 (a/d = " +
        std::to_string(cloud.radius / cloud.mean_spacing) + ")");
  }
}

ParticleCloud sample_particles(const RealField& density, double radius,
                               std::uint64_t seed,
                               const SamplingOptions& options) {
  if (!density.grid || density.values.size() != density.grid->masked_count()) {
    throw std::invalid_argument("sample_particles: density/grid size mismatch");
  }
  if (!(radius > 0.0)) {
    throw std::invalid_argument("sample_particles: radius must be positive");
  }
  const DomainGrid& g = *density.grid;
  const double V = g.voxel_volume;

  double expected = 0.0;
  for (int l = 0; l < g.masked_count(); ++l) {
    if (density.values[l] < 0.0) {
      throw std::invalid_argument(
          "sample_particles: density must be nonnegative");
    }
    expected += density.values[l] * V;
  }
  if (expected < 1.0) {
    throw std::invalid_argument(
        "sample_particles: expected particle count below 1");
  }
  if (expected > options.max_expected_count) {
    throw std::invalid_argument("sample_particles: expected particle count " +
                                std::to_string(expected) +
                                " exceeds the budget " +
                                std::to_string(options.max_expected_count));
  }

  const double min_sep = options.min_separation_factor * radius;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  ParticleCloud cloud;
  cloud.radius = radius;
  cloud.seed = seed;

  CellList occupancy(g.bounds.min, std::max(min_sep, 1e-300));
  for (int l = 0; l < g.masked_count(); ++l) {
    const double mean = density.values[l] * V;
    if (mean == 0.0) continue;
    std::poisson_distribution<int> pois(mean);
    const int want = pois(rng);
    const Vector3i idx = g.unravel(g.masked_cells[l]);
    const Vector3d lo =
        g.bounds.min + Vector3d(idx[0] * g.spacing[0], idx[1] * g.spacing[1],
                                idx[2] * g.spacing[2]);
    for (int p = 0; p < want; ++p) {
      bool placed = false;
      for (int attempt = 0; attempt < options.max_tries_per_particle;
           ++attempt) {
        const Vector3d pos =
            lo + Vector3d(unit(rng) * g.spacing[0], unit(rng) * g.spacing[1],
                          unit(rng) * g.spacing[2]);
        bool ok = true;
        occupancy.for_neighbors(pos, 1, [&](int j) {
          if (ok && (pos - cloud.positions[j]).norm() < min_sep) ok = false;
        });
        if (ok) {
          occupancy.insert(pos, cloud.count());
          cloud.positions.push_back(pos);
          placed = true;
          break;
        }
      }
      if (!placed) {
        throw std::runtime_error(
            "sample_particles: could not place a particle with separation " +
            std::to_string(min_sep) + " after " +
            std::to_string(options.max_tries_per_particle) + " tries");
      }
    }
  }

  if (cloud.positions.empty()) {
    throw std::runtime_error("sample_particles: drew an empty cloud");
  }
  finalize_cloud(cloud);
  return cloud;
}

EnsembleSolution foldy_lax_solve(const ParticleCloud& cloud,
                                 const WaveContext& ctx, SphereGridPtr sphere,
                                 const FoldyLaxOptions& options) {
  const int m = cloud.count();
  if (m < 1) throw std::invalid_argument("foldy_lax_solve: empty cloud");
  if (m > options.max_count) {
    throw std::invalid_argument("foldy_lax_solve: particle count " +
                                std::to_string(m) + " exceeds the budget " +
                                std::to_string(options.max_count));
  }
  if (!sphere) throw std::invalid_argument("foldy_lax_solve: null sphere grid");
  if (!(ctx.k > 0.0)) {
    throw std::invalid_argument("foldy_lax_solve: wave context is unset");
  }
  if (ctx.k * cloud.radius > 0.1) {
    throw std::invalid_argument(
        "foldy_lax_solve: k * radius must be <= 0.1 (small-particle regime)");
  }

  const double c0 = kFourPi * cloud.radius;
  Eigen::MatrixXcd A = Eigen::MatrixXcd::Identity(m, m);
  const double two_a = 2.0 * cloud.radius;
  for (int j = 0; j < m; ++j) {
    for (int i = j + 1; i < m; ++i) {
      const double r = (cloud.positions[i] - cloud.positions[j]).norm();
      if (r < two_a) {
        throw std::invalid_argument("foldy_lax_solve: overlapping particles");
      }
      const cplx val = c0 * greens_value(ctx.k, r);
      A(i, j) = val;
      A(j, i) = val;
    }
  }

  Eigen::VectorXcd b(m);
  for (int j = 0; j < m; ++j) {
    const double phase = ctx.k * ctx.alpha.dot(cloud.positions[j]);
    b[j] = cplx(std::cos(phase), std::sin(phase));
  }

  EnsembleSolution sol;
  Eigen::PartialPivLU<Eigen::MatrixXcd> lu(A);
  sol.local_fields = lu.solve(b);
  sol.residual = (A * sol.local_fields - b).norm() / b.norm();
  if (sol.residual > options.residual_tol) {
    throw SolveError("foldy_lax_solve: residual above certificate tolerance",
                     sol.residual, 0);
  }

  sol.amplitude.sphere = std::move(sphere);
  const int ndir = sol.amplitude.sphere->count();
  sol.amplitude.values.resize(ndir);
  const double scale = c0 / kFourPi;
  for (int d = 0; d < ndir; ++d) {
    const Vector3d beta = sol.amplitude.sphere->directions.row(d).transpose();
    cplx acc = 0.0;
    for (int j = 0; j < m; ++j) {
      const double phase = ctx.k * beta.dot(cloud.positions[j]);
      acc += cplx(std::cos(phase), -std::sin(phase)) * sol.local_fields[j];
    }
    sol.amplitude.values[d] = -scale * acc;
  }
  return sol;
}

RadiusRun ensemble_distance(const RealField& number_density, double radius,
                            const std::vector<std::uint64_t>& seeds,
                            const WaveContext& ctx, const FarField& prediction,
                            std::vector<ParticleCloud>* out_clouds,
                            std::vector<EnsembleSolution>* out_solutions) {
  if (seeds.empty()) {
    throw std::invalid_argument("ensemble_distance: need at least one seed");
  }
  RadiusRun run;
  run.radius = radius;
  const double V = number_density.grid->voxel_volume;
  run.expected_count = number_density.values.sum() * V;

  FarField mean_amp = make_zero_far_field(prediction.sphere);
  double count_acc = 0.0;
  for (const std::uint64_t seed : seeds) {
    const ParticleCloud cloud = sample_particles(number_density, radius, seed);
    const EnsembleSolution sol = foldy_lax_solve(cloud, ctx, prediction.sphere);
    SeedRun sr;
    sr.seed = seed;
    sr.count = cloud.count();
    sr.mean_spacing = cloud.mean_spacing;
    sr.solve_residual = sol.residual;
    sr.distance = relative_far_distance(sol.amplitude, prediction);
    run.seeds.push_back(sr);
    mean_amp.values += sol.amplitude.values;
    count_acc += cloud.count();
    if (out_clouds) out_clouds->push_back(cloud);
    if (out_solutions) out_solutions->push_back(sol);
  }
  mean_amp.values /= static_cast<double>(seeds.size());
  run.mean_distance = relative_far_distance(mean_amp, prediction);
  const double mean_count = count_acc / static_cast<double>(seeds.size());
  run.volume_fraction = mean_count * (kFourPi / 3.0) * radius * radius *
                        radius / number_density.grid->masked_volume();
  return run;
}

EffectiveMediumReport effective_medium_check(
    const DesignResult& design, double radius,
    const std::vector<std::uint64_t>& seeds, int radius_levels) {
  if (!(radius > 0.0)) {
    throw std::invalid_argument("effective_medium_check: radius must be > 0");
  }
  if (radius_levels < 1) {
    throw std::invalid_argument("effective_medium_check: need >= 1 level");
  }
  const int n = design.q_delta.field.grid->masked_count();
  if (design.q0.field.values.size() == n &&
      design.q0.field.values.cwiseAbs().maxCoeff() > 0.0) {
    throw std::invalid_argument(
        "effective_medium_check: only a homogeneous background is supported");
  }

  // The density at radius a is Re(q_delta) / (4 pi a): shrinking a at a fixed
  // potential raises the count as 1/a.
  Eigen::VectorXd p = design.q_delta.field.values.real();

  EffectiveMediumReport report;
  const double p_mean = p.sum() / n;
  if (p_mean != 0.0 && design.c0 > 0.0 &&
      design.density.number_density.values.size() == n) {
    // The stored density must reproduce the potential: c0 * N = q - q0.
    const double n_mean = design.density.number_density.values.sum() / n;
    report.capacitance_rel_err =
        std::abs(design.c0 * n_mean - p_mean) / std::abs(p_mean);
  }

  const double tiny = 1e-12 * std::max(p.cwiseAbs().maxCoeff(), 0.0);
  for (int l = 0; l < n; ++l) {
    if (p[l] < 0.0) {
      if (p[l] < -tiny) {
        throw std::invalid_argument(
            "effective_medium_check: design density is negative");
      }
      p[l] = 0.0;
    }
  }

  double a = radius;
  for (int level = 0; level < radius_levels; ++level, a *= 0.5) {
    RealField density_a;
    density_a.grid = design.q_delta.field.grid;
    density_a.values = p / (kFourPi * a);
    const double expected =
        density_a.values.sum() * density_a.grid->voxel_volume;
    if (expected < 1.0) {
      // Empty design at this radius: nothing to embed, distance vacuously 0.
      RadiusRun run;
      run.radius = a;
      run.expected_count = expected;
      report.runs.push_back(run);
      continue;
    }
    report.runs.push_back(ensemble_distance(density_a, a, seeds,
                                            design.context,
                                            design.predicted_amplitude));
  }

  report.trend_nonincreasing = true;
  for (std::size_t i = 1; i < report.runs.size(); ++i) {
    if (report.runs[i].mean_distance > report.runs[i - 1].mean_distance) {
      report.trend_nonincreasing = false;
    }
  }
  return report;
}

}  // namespace wavefocus
