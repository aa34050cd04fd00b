// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>

#include "wavefocus/kernels.hpp"

namespace wavefocus {

// Scattering potential q on a grid, tied to the experiment it was built for.
struct Potential {
  ComplexField field;
  WaveContext context;
};

struct SolverOptions {
  double tol = 1e-8;
  // Unknown counts up to this budget use a dense LU factorization; larger
  // systems fall back to restarted GMRES with the convolution-form kernel.
  int dense_budget = 10000;
  bool force_iterative = false;
  int max_iterations = 2000;
  int restart = 100;
  ApplyMode apply_mode = ApplyMode::Auto;
};

struct ScatteringSolution {
  ComplexField total_field;   // u with (I + G q) u = u0 on the masked voxels
  FarField amplitude;         // B(q u)
  double residual = 0.0;      // relative residual of the linear system
  int iterations = 0;         // 0 for the direct path
  std::string method;
};

ScatteringSolution solve_scattering(const Potential& q, SphereGridPtr sphere,
                                    const SolverOptions& options = {});
ScatteringSolution solve_scattering(const Potential& q, SphereGridPtr sphere,
                                    double tol);

// First-order amplitude B(q u0); exact for the same discretization as the
// full solve, so solve-vs-Born distances isolate multiple scattering.
FarField born_amplitude(const Potential& q, SphereGridPtr sphere);

}  // namespace wavefocus
