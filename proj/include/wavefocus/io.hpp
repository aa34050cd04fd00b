// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>

#include "wavefocus/ensemble.hpp"
#include "wavefocus/fields.hpp"

namespace wavefocus {

// Shortest decimal that parses back to exactly the same double.
std::string format_double(double v);

// Strict full-token parse; throws ParseError on anything else.
double parse_double(std::string_view token, const std::string& what);

// Volumetric field files: a header line
//   wavefield v1 <nx> <ny> <nz> <xmin> <ymin> <zmin> <dx> <dy> <dz>
// followed by one `ix,iy,iz,re,im` row per masked voxel, ix fastest.
void write_field(const std::string& path, const ComplexField& field);
ComplexField read_field(const std::string& path);

// Same container with a zero imaginary part everywhere.
void write_real_field(const std::string& path, const RealField& field);
RealField read_real_field(const std::string& path);

// Far-field files: one `theta,phi,weight,re,im` row per direction.
void write_far_field(const std::string& path, const FarField& f);
FarField read_far_field(const std::string& path);

// Particle cloud files: `# particles M=<m> a=<a> seed=<s>` then x,y,z rows.
void write_cloud(const std::string& path, const ParticleCloud& cloud);
ParticleCloud read_cloud(const std::string& path);

// Whole-file text helpers; reading a missing file throws ParseError.
std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

}  // namespace wavefocus
