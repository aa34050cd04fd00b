// SPDX-License-Identifier: Apache-2.0
#include "wavefocus/design.hpp"

#include <cmath>

#include <Eigen/SVD>

namespace wavefocus {

TikhonovSolver::TikhonovSolver(DomainGridPtr grid, SphereGridPtr sphere,
                               double k)
    : grid_(std::move(grid)), sphere_(std::move(sphere)), k_(k) {
  if (!grid_ || !sphere_) {
    throw std::invalid_argument("tikhonov: null grid or sphere");
  }
  if (!(k_ > 0.0)) throw std::invalid_argument("tikhonov: k must be positive");

  const Eigen::MatrixXcd B = far_field_operator_natural(*grid_, *sphere_, k_);
  Eigen::BDCSVD<Eigen::MatrixXcd> svd(B,
                                      Eigen::ComputeThinU | Eigen::ComputeThinV);
  u_ = svd.matrixU();
  v_ = svd.matrixV();
  sigma_ = svd.singularValues();
}

Eigen::VectorXcd TikhonovSolver::range_coefficients(const FarField& f,
                                                    double* out_perp_sq) const {
  if (!f.sphere || f.values.size() != f.sphere->count() ||
      (f.sphere.get() != sphere_.get() && !spheres_equal(*f.sphere, *sphere_))) {
    throw std::invalid_argument("tikhonov: target on a different sphere grid");
  }
  const Eigen::VectorXcd f_hat =
      (sphere_->weights.array().sqrt().cast<cplx>() * f.values.array())
          .matrix();
  const Eigen::VectorXcd c = u_.adjoint() * f_hat;
  if (out_perp_sq) {
    *out_perp_sq = std::max(0.0, f_hat.squaredNorm() - c.squaredNorm());
  }
  return c;
}

FitResult TikhonovSolver::solve(const FarField& f, double lambda) const {
  if (!(lambda > 0.0)) {
    throw std::invalid_argument("tikhonov: lambda must be positive");
  }
  double perp_sq = 0.0;
  const Eigen::VectorXcd c = range_coefficients(f, &perp_sq);

  const Eigen::ArrayXd s = sigma_.array();
  const Eigen::ArrayXd filt = s / (s.square() + lambda);
  const Eigen::VectorXcd h_hat = v_ * (filt.cast<cplx>() * c.array()).matrix();

  FitResult result;
  result.lambda = lambda;
  result.h.grid = grid_;
  result.h.values = h_hat / std::sqrt(grid_->voxel_volume);
  result.h_norm = h_hat.norm();
  const Eigen::ArrayXd resid_filt = lambda / (s.square() + lambda);
  result.residual = std::sqrt(
      (resid_filt.square() * c.array().abs2()).sum() + perp_sq);
  return result;
}

double TikhonovSolver::residual_at(const FarField& f, double lambda) const {
  double perp_sq = 0.0;
  const Eigen::VectorXcd c = range_coefficients(f, &perp_sq);
  const Eigen::ArrayXd s = sigma_.array();
  const Eigen::ArrayXd resid_filt = lambda / (s.square() + lambda);
  return std::sqrt((resid_filt.square() * c.array().abs2()).sum() + perp_sq);
}

FitResult fit_h(const DesignTarget& target, DomainGridPtr grid,
                SphereGridPtr sphere, const RegularizationPolicy& reg) {
  if (!(target.epsilon > 0.0) && reg.mode == RegularizationPolicy::Mode::Discrepancy) {
    throw std::invalid_argument("fit_h: epsilon must be positive");
  }
  const TikhonovSolver solver(std::move(grid), std::move(sphere),
                              target.context.k);

  if (reg.mode == RegularizationPolicy::Mode::FixedLambda) {
    if (!(reg.lambda > 0.0)) {
      throw std::invalid_argument("fit_h: fixed lambda must be positive");
    }
    FitResult r = solver.solve(target.f, reg.lambda);
    r.reached_target = r.residual <= target.epsilon;
    return r;
  }

  const double eps = target.epsilon;
  const double floor = reg.lambda_floor;

  // Discrepancy principle: monotone residual(lambda), so bisect in log-lambda
  // for a residual in [eps/2, eps].  If even the floor cannot reach eps the
  // floor solution is returned with the achieved residual flagged.
  const double r_floor = solver.residual_at(target.f, floor);
  if (r_floor > eps) {
    FitResult r = solver.solve(target.f, floor);
    r.reached_target = false;
    return r;
  }

  double hi = std::max(solver.singular_values().size() > 0
                           ? solver.singular_values()[0] *
                                 solver.singular_values()[0]
                           : 1.0,
                       10.0 * floor);
  while (solver.residual_at(target.f, hi) < eps && hi < 1e30) hi *= 10.0;
  if (solver.residual_at(target.f, hi) <= eps) {
    // Even heavy regularization meets the goal (tiny or zero target).
    FitResult r = solver.solve(target.f, hi);
    r.reached_target = true;
    return r;
  }

  double lo = floor;
  for (int it = 0; it < 200; ++it) {
    const double mid = std::sqrt(lo * hi);
    const double r = solver.residual_at(target.f, mid);
    if (r > eps) {
      hi = mid;
    } else if (r < 0.5 * eps) {
      lo = mid;
    } else {
      FitResult out = solver.solve(target.f, mid);
      out.reached_target = true;
      return out;
    }
  }
  // The residual jumped across the band; the lo side still meets eps.
  FitResult out = solver.solve(target.f, lo);
  out.reached_target = true;
  return out;
}

ComplexField compute_psi(const ComplexField& h, const WaveContext& ctx,
                         const VolumePotential& op) {
  require_field_on_grid(h, "compute_psi");
  const ComplexField u0 = incident_wave(h.grid, ctx);
  ComplexField psi{h.grid, u0.values - op.apply(h).values};
  return psi;
}

CutoffResult cutoff(const ComplexField& h, const ComplexField& psi,
                    double delta, const WaveContext& ctx,
                    const VolumePotential& op) {
  require_same_grid(h, psi, "cutoff");
  if (!(delta > 0.0)) {
    throw std::invalid_argument("cutoff: delta must be positive");
  }

  const int n = h.grid->masked_count();
  CutoffResult result;
  result.delta = delta;
  result.h_delta.grid = h.grid;
  result.h_delta.values = h.values;

  std::vector<int> kept;
  kept.reserve(n);
  for (int l = 0; l < n; ++l) {
    if (std::abs(psi.values[l]) < delta) {
      result.h_delta.values[l] = 0.0;
      ++result.cut_count;
    } else {
      kept.push_back(l);
    }
  }
  result.cut_fraction = static_cast<double>(result.cut_count) / n;

  // The null set moved h, so the field psi must be recomputed before q is
  // formed; q keeps the original kept/cut split.
  if (result.cut_count == 0) {
    result.psi_delta = compute_psi(h, ctx, op);
  } else {
    result.psi_delta = compute_psi(result.h_delta, ctx, op);
  }

  result.q_delta.context = ctx;
  result.q_delta.field = make_zero_field(h.grid);

  double min_kept = std::numeric_limits<double>::infinity();
  for (const int l : kept) {
    min_kept = std::min(min_kept, std::abs(result.psi_delta.values[l]));
  }
  result.min_kept_abs_psi_delta = kept.empty() ? 0.0 : min_kept;
  result.bound_ok = kept.empty() || min_kept >= 0.5 * delta;
  if (!result.bound_ok) return result;

  for (const int l : kept) {
    result.q_delta.field.values[l] =
        result.h_delta.values[l] / result.psi_delta.values[l];
  }
  result.max_abs_q = result.q_delta.field.values.size() > 0
                         ? result.q_delta.field.values.cwiseAbs().maxCoeff()
                         : 0.0;
  return result;
}

DeltaChoice choose_delta(const ComplexField& h, const ComplexField& psi,
                         const WaveContext& ctx, const VolumePotential& op) {
  DeltaChoice choice;
  for (int m = 20; m >= 3; --m) {
    const double delta = std::ldexp(1.0, -m);
    CutoffResult r = cutoff(h, psi, delta, ctx, op);
    if (r.bound_ok) {
      choice.delta = delta;
      choice.cut = std::move(r);
      return choice;
    }
    if (m == 3) {
      choice.cut = std::move(r);
    }
  }
  choice.delta = std::ldexp(1.0, -3);
  choice.ladder_exhausted = true;
  return choice;
}

DensityReport density(const Potential& q_delta, const Potential& q0,
                      double c0) {
  require_same_grid(q_delta.field, q0.field, "density");
  if (!(c0 > 0.0)) {
    throw std::invalid_argument("density: capacitance must be positive");
  }

  const int n = q_delta.field.grid->masked_count();
  DensityReport report;
  report.number_density.grid = q_delta.field.grid;
  report.number_density_clipped.grid = q_delta.field.grid;
  report.number_density.values.resize(n);
  report.number_density_clipped.values.resize(n);

  const double max_q = n > 0 ? q_delta.field.values.cwiseAbs().maxCoeff() : 0.0;
  const double im_tol = 1e-8 * max_q;
  for (int l = 0; l < n; ++l) {
    const cplx p = q_delta.field.values[l] - q0.field.values[l];
    const double N = p.real() / c0;
    report.number_density.values[l] = N;
    report.number_density_clipped.values[l] = std::max(N, 0.0);
    if (N < 0.0 || std::abs(p.imag()) > im_tol) ++report.infeasible_count;
  }
  report.infeasible_fraction = static_cast<double>(report.infeasible_count) / n;
  return report;
}

DesignResult design(const DesignTarget& target, DomainGridPtr grid,
                    SphereGridPtr sphere, const RegularizationPolicy& reg,
                    const DesignOptions& options) {
  if (!grid || !sphere) throw std::invalid_argument("design: null grid/sphere");
  if (!(target.epsilon > 0.0)) {
    throw std::invalid_argument("design: epsilon must be positive");
  }

  const WaveContext ctx = target.context;
  DesignResult out;
  out.context = ctx;
  out.q_delta = Potential{make_zero_field(grid), ctx};
  out.q0 = Potential{make_zero_field(grid), ctx};

  out.epsilon = target.epsilon;
  out.target_norm = far_norm(target.f);
  out.particle_radius =
      options.particle_radius > 0.0 ? options.particle_radius : 0.05 / ctx.k;
  out.c0 = kFourPi * out.particle_radius;

  const FitResult fit = fit_h(target, grid, sphere, reg);
  out.h = fit.h;
  out.lambda = fit.lambda;
  out.residual_fit = fit.residual;
  out.h_norm = fit.h_norm;
  out.fit_reached_target = fit.reached_target;
  if (!fit.reached_target) {
    out.warnings.push_back(
        "fit: target unreachable at the lambda floor; achieved residual " +
        std::to_string(fit.residual));
  }

  const VolumePotential op(grid, ctx.k, options.apply_mode);
  out.psi = compute_psi(out.h, ctx, op);

  DeltaChoice choice = choose_delta(out.h, out.psi, ctx, op);
  out.delta = choice.delta;
  out.ladder_exhausted = choice.ladder_exhausted;
  if (choice.ladder_exhausted) {
    out.warnings.push_back(
        "cutoff: no ladder rung satisfied the |psi_delta| >= delta/2 bound; "
        "using the coarsest rung");
  }
  out.h_delta = std::move(choice.cut.h_delta);
  out.psi_delta = std::move(choice.cut.psi_delta);
  out.q_delta = std::move(choice.cut.q_delta);
  out.cut_fraction = choice.cut.cut_fraction;
  out.cut_count = choice.cut.cut_count;

  if (options.q0) {
    require_same_grid(*options.q0, out.h, "design");
    out.q0.field = *options.q0;
  }
  out.density = density(out.q_delta, out.q0, out.c0);
  out.infeasible_voxels = out.density.infeasible_count;

  out.predicted_amplitude = far_field_map(sphere, ctx.k, out.h_delta);
  FarField diff{sphere, target.f.values - out.predicted_amplitude.values};
  out.residual_final = far_norm(diff);
  out.within_two_eps =
      out.residual_final <= 2.0 * std::max(out.epsilon, out.residual_fit);
  if (!out.within_two_eps) {
    out.warnings.push_back(
        "design: final residual exceeds twice max(epsilon, fit residual)");
  }
  return out;
}

DesignResult design_from_potential(const Potential& q, SphereGridPtr sphere,
                                   double particle_radius, double tol) {
  require_field_on_grid(q.field, "design_from_potential");
  if (!(particle_radius > 0.0)) {
    throw std::invalid_argument(
        "design_from_potential: particle radius must be positive");
  }

  const DomainGridPtr grid = q.field.grid;
  const WaveContext ctx = q.context;
  const ScatteringSolution sol = solve_scattering(q, sphere, tol);

  DesignResult out;
  out.context = ctx;
  out.q_delta = Potential{q.field, ctx};
  out.q0 = Potential{make_zero_field(grid), ctx};
  out.particle_radius = particle_radius;
  out.c0 = kFourPi * particle_radius;

  out.h.grid = grid;
  out.h.values = q.field.values.cwiseProduct(sol.total_field.values);
  out.h_delta = out.h;
  out.psi = sol.total_field;
  out.psi_delta = sol.total_field;
  out.delta = std::max(sol.total_field.values.cwiseAbs().minCoeff(),
                       std::ldexp(1.0, -20));
  out.h_norm = field_norm(out.h);
  out.fit_reached_target = true;
  out.within_two_eps = true;

  out.density = density(out.q_delta, out.q0, out.c0);
  out.infeasible_voxels = out.density.infeasible_count;

  out.predicted_amplitude = far_field_map(std::move(sphere), ctx.k, out.h_delta);
  out.target_norm = far_norm(out.predicted_amplitude);
  return out;
}

Eigen::VectorXd far_field_singular_values(const DomainGrid& grid,
                                          const SphereGrid& sphere, double k) {
  const Eigen::MatrixXcd B = far_field_operator_natural(grid, sphere, k);
  Eigen::BDCSVD<Eigen::MatrixXcd> svd(B);
  return svd.singularValues();
}

}  // namespace wavefocus
