// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <string>
#include <vector>

#include "wavefocus/forward.hpp"

namespace wavefocus {

struct RegularizationPolicy {
  enum class Mode { FixedLambda, Discrepancy };

  Mode mode = Mode::Discrepancy;
  double lambda = 0.0;          // FixedLambda only; must be > 0
  double lambda_floor = 1e-14;  // Discrepancy stops shrinking lambda here
};

struct DesignTarget {
  FarField f;
  double epsilon = 0.0;  // absolute L2(S^2) accuracy goal
  WaveContext context;
};

struct FitResult {
  ComplexField h;
  double lambda = 0.0;
  double residual = 0.0;  // ||f - Bh|| in the weighted sphere norm
  double h_norm = 0.0;    // ||h|| in the voxel-volume norm
  bool reached_target = false;
};

// Tikhonov-regularized least squares for B h ~ f, factored once so that
// many lambda values are cheap.  Exposed for regularization sweeps and
// ill-posedness diagnostics; fit_h is the policy-driven entry point.
class TikhonovSolver {
 public:
  TikhonovSolver(DomainGridPtr grid, SphereGridPtr sphere, double k);

  FitResult solve(const FarField& f, double lambda) const;
  double residual_at(const FarField& f, double lambda) const;

  const Eigen::VectorXd& singular_values() const { return sigma_; }
  const DomainGridPtr& grid() const { return grid_; }
  const SphereGridPtr& sphere() const { return sphere_; }

 private:
  Eigen::VectorXcd range_coefficients(const FarField& f,
                                      double* out_perp_sq) const;

  DomainGridPtr grid_;
  SphereGridPtr sphere_;
  double k_ = 0.0;
  Eigen::MatrixXcd u_;  // left singular vectors (weighted coordinates)
  Eigen::MatrixXcd v_;  // right singular vectors (volume coordinates)
  Eigen::VectorXd sigma_;
};

FitResult fit_h(const DesignTarget& target, DomainGridPtr grid,
                SphereGridPtr sphere, const RegularizationPolicy& reg);

// psi = u0 - G h.
ComplexField compute_psi(const ComplexField& h, const WaveContext& ctx,
                         const VolumePotential& op);

struct CutoffResult {
  ComplexField h_delta;
  ComplexField psi_delta;  // recomputed as u0 - G h_delta
  Potential q_delta;       // h_delta / psi_delta on kept voxels, 0 elsewhere
  double delta = 0.0;
  int cut_count = 0;
  double cut_fraction = 0.0;
  double min_kept_abs_psi_delta = 0.0;
  double max_abs_q = 0.0;
  // Lower-bound certificate |psi_delta| >= delta/2 on the kept voxels; when
  // false the caller must enlarge delta.
  bool bound_ok = false;
};

CutoffResult cutoff(const ComplexField& h, const ComplexField& psi,
                    double delta, const WaveContext& ctx,
                    const VolumePotential& op);

struct DeltaChoice {
  double delta = 0.0;
  CutoffResult cut;
  bool ladder_exhausted = false;
};

// Walks delta = 2^-20 .. 2^-3 from the small end and returns the first rung
// whose cutoff certificate holds; falls back to the coarsest rung with a
// warning when none does.
DeltaChoice choose_delta(const ComplexField& h, const ComplexField& psi,
                         const WaveContext& ctx, const VolumePotential& op);

struct DensityReport {
  RealField number_density;          // Re(q - q0) / c0
  RealField number_density_clipped;  // max(N, 0)
  int infeasible_count = 0;
  double infeasible_fraction = 0.0;
};

// Converts a designed potential into a particle number density per unit
// volume, with capacitance c0 per particle.  Voxels with negative density or
// residual imaginary part are reported, never silently dropped.
DensityReport density(const Potential& q_delta, const Potential& q0, double c0);

struct DesignOptions {
  double particle_radius = 0.0;          // 0 -> default 0.05 / k
  std::optional<ComplexField> q0;        // background potential; default zero
  ApplyMode apply_mode = ApplyMode::Auto;
};

struct DesignResult {
  WaveContext context;
  ComplexField h;        // fitted source before cutoff
  ComplexField h_delta;
  ComplexField psi;      // u0 - G h
  ComplexField psi_delta;
  Potential q_delta;
  Potential q0;
  FarField predicted_amplitude;  // B h_delta
  DensityReport density;

  double particle_radius = 0.0;
  double c0 = 0.0;
  double delta = 0.0;
  double lambda = 0.0;
  double epsilon = 0.0;
  double target_norm = 0.0;
  double residual_fit = 0.0;
  double residual_final = 0.0;
  double h_norm = 0.0;
  double cut_fraction = 0.0;
  int cut_count = 0;
  int infeasible_voxels = 0;
  bool fit_reached_target = false;
  bool within_two_eps = false;  // residual_final <= 2 max(epsilon, residual_fit)
  bool ladder_exhausted = false;
  std::vector<std::string> warnings;
};

DesignResult design(const DesignTarget& target, DomainGridPtr grid,
                    SphereGridPtr sphere, const RegularizationPolicy& reg,
                    const DesignOptions& options = {});

// Imports an existing potential as a completed design: h = q u with u the
// forward solution, so the construction identity q = h / psi holds exactly
// and the predicted amplitude is the potential's own far field.
DesignResult design_from_potential(const Potential& q, SphereGridPtr sphere,
                                   double particle_radius, double tol = 1e-10);

// Singular values of the far-field map in its natural (weighted) coordinates,
// in nonincreasing order.
Eigen::VectorXd far_field_singular_values(const DomainGrid& grid,
                                          const SphereGrid& sphere, double k);

}  // namespace wavefocus
