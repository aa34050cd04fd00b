// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <vector>

#include "wavefocus/common.hpp"

namespace wavefocus {

// Scattering amplitude of a sound-soft sphere for a unit plane wave, as a
// function of the angle between observation and incidence.  Series over
// partial waves with l_max = ceil(k*radius) + 12, valid for k*radius < 50;
// the k*radius -> 0 limit is -radius, uniformly in angle.
cplx soft_sphere_amplitude_at(double radius, double k, double cos_theta);

std::vector<cplx> soft_sphere_amplitude(double radius, double k,
                                        const std::vector<double>& angles);

// Magnitude of the last retained series term relative to the leading one;
// reported so tests can pin the truncation error.
double soft_sphere_truncation_tail(double radius, double k);

}  // namespace wavefocus
