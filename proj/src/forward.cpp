// SPDX-License-Identifier: Apache-2.0
#include "wavefocus/forward.hpp"

#include <cmath>
#include <functional>

#include <Eigen/Dense>

namespace wavefocus {

namespace {

struct GmresResult {
  Eigen::VectorXcd x;
  double relative_residual = 0.0;
  int iterations = 0;
  bool converged = false;
};

// Restarted GMRES with modified Gram-Schmidt; matvec supplied by the caller.
GmresResult gmres(const std::function<Eigen::VectorXcd(const Eigen::VectorXcd&)>& matvec,
                  const Eigen::VectorXcd& b, double tol, int max_iterations,
                  int restart) {
  using Eigen::MatrixXcd;
  using Eigen::VectorXcd;

  GmresResult result;
  const double bnorm = b.norm();
  result.x = VectorXcd::Zero(b.size());
  if (bnorm == 0.0) {
    result.converged = true;
    return result;
  }

  const int m = std::min<int>(restart, static_cast<int>(b.size()));
  int total_iters = 0;

  while (total_iters < max_iterations) {
    VectorXcd r = b - matvec(result.x);
    double beta = r.norm();
    result.relative_residual = beta / bnorm;
    if (result.relative_residual <= tol) {
      result.converged = true;
      return result;
    }

    MatrixXcd V(b.size(), m + 1);
    MatrixXcd H = MatrixXcd::Zero(m + 1, m);
    VectorXcd g = VectorXcd::Zero(m + 1);
    std::vector<cplx> cs(m), sn(m);
    V.col(0) = r / beta;
    g[0] = beta;

    int j = 0;
    for (; j < m && total_iters < max_iterations; ++j, ++total_iters) {
      VectorXcd w = matvec(V.col(j));
      for (int i = 0; i <= j; ++i) {
        H(i, j) = V.col(i).dot(w);
        w -= H(i, j) * V.col(i);
      }
      H(j + 1, j) = w.norm();
      if (std::abs(H(j + 1, j)) > 0.0) {
        V.col(j + 1) = w / H(j + 1, j);
      }

      // Apply stored Givens rotations, then create a new one.
      for (int i = 0; i < j; ++i) {
        const cplx t = cs[i] * H(i, j) + sn[i] * H(i + 1, j);
        H(i + 1, j) = -std::conj(sn[i]) * H(i, j) + std::conj(cs[i]) * H(i + 1, j);
        H(i, j) = t;
      }
      const double denom =
          std::sqrt(std::norm(H(j, j)) + std::norm(H(j + 1, j)));
      if (denom == 0.0) {
        cs[j] = 1.0;
        sn[j] = 0.0;
      } else {
        cs[j] = std::conj(H(j, j)) / denom;
        sn[j] = std::conj(H(j + 1, j)) / denom;
      }
      H(j, j) = cs[j] * H(j, j) + sn[j] * H(j + 1, j);
      H(j + 1, j) = 0.0;
      g[j + 1] = -std::conj(sn[j]) * g[j];
      g[j] = cs[j] * g[j];

      result.relative_residual = std::abs(g[j + 1]) / bnorm;
      if (result.relative_residual <= tol) {
        ++j;
        break;
      }
    }

    // Solve the triangular system for the Krylov coefficients.
    VectorXcd y = VectorXcd::Zero(j);
    for (int i = j - 1; i >= 0; --i) {
      cplx acc = g[i];
      for (int l = i + 1; l < j; ++l) acc -= H(i, l) * y[l];
      y[i] = acc / H(i, i);
    }
    result.x += V.leftCols(j) * y;

    const double actual = (b - matvec(result.x)).norm() / bnorm;
    result.relative_residual = actual;
    result.iterations = total_iters;
    if (actual <= tol) {
      result.converged = true;
      return result;
    }
  }
  result.iterations = total_iters;
  return result;
}

}  // namespace

ScatteringSolution solve_scattering(const Potential& q, SphereGridPtr sphere,
                                    const SolverOptions& options) {
  require_field_on_grid(q.field, "solve_scattering");
  if (!sphere) throw std::invalid_argument("solve_scattering: null sphere grid");
  if (!(q.context.k > 0.0)) {
    throw std::invalid_argument("solve_scattering: wave context is unset");
  }
  if (!(options.tol > 0.0)) {
    throw std::invalid_argument("solve_scattering: tolerance must be positive");
  }

  const DomainGridPtr grid = q.field.grid;
  const int n = grid->masked_count();
  const double k = q.context.k;
  const ComplexField u0 = incident_wave(grid, q.context);

  ScatteringSolution sol;
  sol.total_field.grid = grid;

  const bool dense = !options.force_iterative && n <= options.dense_budget;
  if (dense) {
    Eigen::MatrixXcd A = greens_matrix(*grid, k);
    for (int j = 0; j < n; ++j) A.col(j) *= q.field.values[j];
    A.diagonal().array() += 1.0;

    Eigen::PartialPivLU<Eigen::MatrixXcd> lu(A);
    sol.total_field.values = lu.solve(u0.values);
    sol.residual =
        (A * sol.total_field.values - u0.values).norm() / u0.values.norm();
    sol.iterations = 0;
    sol.method = "dense_lu";
  } else {
    VolumePotential op(grid, k, options.apply_mode);
    ComplexField tmp = make_zero_field(grid);
    const auto matvec = [&](const Eigen::VectorXcd& v) -> Eigen::VectorXcd {
      tmp.values = q.field.values.cwiseProduct(v);
      return v + op.apply(tmp).values;
    };
    const GmresResult r = gmres(matvec, u0.values, options.tol,
                                options.max_iterations, options.restart);
    sol.total_field.values = r.x;
    sol.residual = r.relative_residual;
    sol.iterations = r.iterations;
    sol.method = "gmres_fft";
    if (!r.converged) {
      throw SolveError("solve_scattering: iteration did not reach tolerance",
                       r.relative_residual, r.iterations);
    }
  }

  if (sol.residual > options.tol) {
    throw SolveError("solve_scattering: residual above tolerance",
                     sol.residual, sol.iterations);
  }

  ComplexField qu{grid, q.field.values.cwiseProduct(sol.total_field.values)};
  sol.amplitude = far_field_map(std::move(sphere), k, qu);
  return sol;
}

ScatteringSolution solve_scattering(const Potential& q, SphereGridPtr sphere,
                                    double tol) {
  SolverOptions options;
  options.tol = tol;
  return solve_scattering(q, std::move(sphere), options);
}

FarField born_amplitude(const Potential& q, SphereGridPtr sphere) {
  require_field_on_grid(q.field, "born_amplitude");
  if (!(q.context.k > 0.0)) {
    throw std::invalid_argument("born_amplitude: wave context is unset");
  }
  const ComplexField u0 = incident_wave(q.field.grid, q.context);
  ComplexField qu0{q.field.grid, q.field.values.cwiseProduct(u0.values)};
  return far_field_map(std::move(sphere), q.context.k, qu0);
}

}  // namespace wavefocus
