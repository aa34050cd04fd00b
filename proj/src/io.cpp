// SPDX-License-Identifier: Apache-2.0
#include "wavefocus/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <string_view>
#include <vector>

namespace wavefocus {

namespace {

// Splits on '\n', strips a trailing '\r' per line, drops the empty segment
// after a final newline.
std::vector<std::string_view> split_lines(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t end = text.find('\n', start);
    std::string_view line = (end == std::string_view::npos)
                                ? text.substr(start)
                                : text.substr(start, end - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    lines.push_back(line);
    if (end == std::string_view::npos) break;
    start = end + 1;
  }
  if (!lines.empty() && lines.back().empty()) lines.pop_back();
  return lines;
}

std::vector<std::string_view> split_on(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t end = line.find(sep, start);
    if (end == std::string_view::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, end - start));
    start = end + 1;
  }
}

long parse_long(std::string_view token, const std::string& what) {
  long v = 0;
  const auto res = std::from_chars(token.data(), token.data() + token.size(), v);
  if (res.ec != std::errc{} || res.ptr != token.data() + token.size()) {
    throw ParseError("invalid integer for " + what + ": '" +
                     std::string(token) + "'");
  }
  return v;
}

std::uint64_t parse_u64(std::string_view token, const std::string& what) {
  std::uint64_t v = 0;
  const auto res = std::from_chars(token.data(), token.data() + token.size(), v);
  if (res.ec != std::errc{} || res.ptr != token.data() + token.size()) {
    throw ParseError("invalid unsigned integer for " + what + ": '" +
                     std::string(token) + "'");
  }
  return v;
}

void require_finite_values(const Eigen::VectorXcd& values, const char* what) {
  for (Eigen::Index i = 0; i < values.size(); ++i) {
    if (!std::isfinite(values[i].real()) || !std::isfinite(values[i].imag())) {
      throw std::invalid_argument(std::string(what) +
                                  ": nonfinite value cannot be written");
    }
  }
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

double parse_double(std::string_view token, const std::string& what) {
  double v = 0.0;
  const auto res = std::from_chars(token.data(), token.data() + token.size(), v);
  if (res.ec != std::errc{} || res.ptr != token.data() + token.size() ||
      !std::isfinite(v)) {
    throw ParseError("invalid number for " + what + ": '" +
                     std::string(token) + "'");
  }
  return v;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot read file: " + path);
  std::string content((std::istreambuf_iterator<char>(in)),
                      std::istreambuf_iterator<char>());
  if (in.bad()) throw ParseError("cannot read file: " + path);
  return content;
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  out.flush();
  if (!out) throw std::runtime_error("write failed: " + path);
}

void write_field(const std::string& path, const ComplexField& field) {
  if (!field.grid || field.values.size() != field.grid->masked_count()) {
    throw std::invalid_argument("write_field: field/grid size mismatch");
  }
  require_finite_values(field.values, "write_field");
  const DomainGrid& g = *field.grid;

  std::string out;
  out.reserve(64 + 64 * static_cast<std::size_t>(g.masked_count()));
  out += "wavefield v1 ";
  out += std::to_string(g.shape[0]) + " " + std::to_string(g.shape[1]) + " " +
         std::to_string(g.shape[2]);
  for (int axis = 0; axis < 3; ++axis) {
    out += " " + format_double(g.bounds.min[axis]);
  }
  for (int axis = 0; axis < 3; ++axis) {
    out += " " + format_double(g.spacing[axis]);
  }
  out += "\n";
  for (int l = 0; l < g.masked_count(); ++l) {
    const Vector3i idx = g.unravel(g.masked_cells[l]);
    out += std::to_string(idx[0]) + "," + std::to_string(idx[1]) + "," +
           std::to_string(idx[2]) + "," + format_double(field.values[l].real()) +
           "," + format_double(field.values[l].imag()) + "\n";
  }
  write_text_file(path, out);
}

ComplexField read_field(const std::string& path) {
  const std::string text = read_text_file(path);
  const auto lines = split_lines(text);
  if (lines.empty()) throw ParseError(path + ": empty field file");

  const auto head = split_on(lines[0], ' ');
  if (head.size() != 11 || head[0] != "wavefield" || head[1] != "v1") {
    throw ParseError(path + ": bad field header '" + std::string(lines[0]) +
                     "'");
  }
  Vector3i shape;
  for (int axis = 0; axis < 3; ++axis) {
    const long n = parse_long(head[2 + axis], "grid shape");
    if (n < 1 || n > (1L << 20)) {
      throw ParseError(path + ": grid shape out of range");
    }
    shape[axis] = static_cast<int>(n);
  }
  Vector3d origin, spacing;
  for (int axis = 0; axis < 3; ++axis) {
    origin[axis] = parse_double(head[5 + axis], "grid origin");
    spacing[axis] = parse_double(head[8 + axis], "grid spacing");
    if (!(spacing[axis] > 0.0)) {
      throw ParseError(path + ": grid spacing must be positive");
    }
  }
  const long total = static_cast<long>(shape[0]) * shape[1] * shape[2];
  if (total > (1L << 27)) {
    throw ParseError(path + ": grid too large");
  }

  std::vector<std::uint8_t> mask(static_cast<std::size_t>(total), 0);
  std::vector<cplx> values;
  values.reserve(lines.size() - 1);
  long prev_cell = -1;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto cols = split_on(lines[i], ',');
    if (cols.size() != 5) {
      throw ParseError(path + ": line " + std::to_string(i + 1) +
                       ": expected ix,iy,iz,re,im");
    }
    Vector3i idx;
    for (int axis = 0; axis < 3; ++axis) {
      const long v = parse_long(cols[axis], "voxel index");
      if (v < 0 || v >= shape[axis]) {
        throw ParseError(path + ": line " + std::to_string(i + 1) +
                         ": voxel index out of range");
      }
      idx[axis] = static_cast<int>(v);
    }
    const long cell =
        idx[0] + static_cast<long>(shape[0]) * (idx[1] + static_cast<long>(shape[1]) * idx[2]);
    if (cell <= prev_cell) {
      throw ParseError(path + ": line " + std::to_string(i + 1) +
                       ": voxel rows must be strictly increasing, ix fastest");
    }
    prev_cell = cell;
    mask[static_cast<std::size_t>(cell)] = 1;
    values.emplace_back(parse_double(cols[3], "field value"),
                        parse_double(cols[4], "field value"));
  }
  if (values.empty()) throw ParseError(path + ": field file has no voxels");

  ComplexField field;
  field.grid = make_domain_grid_raw(origin, spacing, shape, std::move(mask));
  field.values.resize(static_cast<Eigen::Index>(values.size()));
  for (std::size_t l = 0; l < values.size(); ++l) {
    field.values[static_cast<Eigen::Index>(l)] = values[l];
  }
  return field;
}

void write_real_field(const std::string& path, const RealField& field) {
  ComplexField tmp;
  tmp.grid = field.grid;
  tmp.values = field.values.cast<cplx>();
  write_field(path, tmp);
}

RealField read_real_field(const std::string& path) {
  const ComplexField tmp = read_field(path);
  for (Eigen::Index l = 0; l < tmp.values.size(); ++l) {
    if (tmp.values[l].imag() != 0.0) {
      throw ParseError(path + ": expected a real-valued field");
    }
  }
  RealField field;
  field.grid = tmp.grid;
  field.values = tmp.values.real();
  return field;
}

void write_far_field(const std::string& path, const FarField& f) {
  if (!f.sphere || f.values.size() != f.sphere->count()) {
    throw std::invalid_argument("write_far_field: value/sphere size mismatch");
  }
  require_finite_values(f.values, "write_far_field");
  const SphereGrid& s = *f.sphere;

  std::string out;
  out.reserve(80 * static_cast<std::size_t>(s.count()));
  for (int j = 0; j < s.count(); ++j) {
    out += format_double(s.polar[j]) + "," + format_double(s.azimuth[j]) + "," +
           format_double(s.weights[j]) + "," + format_double(f.values[j].real()) +
           "," + format_double(f.values[j].imag()) + "\n";
  }
  write_text_file(path, out);
}

FarField read_far_field(const std::string& path) {
  const std::string text = read_text_file(path);
  const auto lines = split_lines(text);
  if (lines.empty()) throw ParseError(path + ": empty far-field file");
  if (lines.size() > (1u << 22)) throw ParseError(path + ": too many rows");

  const int n = static_cast<int>(lines.size());
  Eigen::VectorXd polar(n), azimuth(n), weights(n);
  Eigen::VectorXcd values(n);
  for (int j = 0; j < n; ++j) {
    const auto cols = split_on(lines[j], ',');
    if (cols.size() != 5) {
      throw ParseError(path + ": line " + std::to_string(j + 1) +
                       ": expected theta,phi,weight,re,im");
    }
    polar[j] = parse_double(cols[0], "polar angle");
    azimuth[j] = parse_double(cols[1], "azimuthal angle");
    weights[j] = parse_double(cols[2], "quadrature weight");
    if (!(weights[j] > 0.0)) {
      throw ParseError(path + ": line " + std::to_string(j + 1) +
                       ": quadrature weight must be positive");
    }
    values[j] = cplx(parse_double(cols[3], "far-field value"),
                     parse_double(cols[4], "far-field value"));
  }

  FarField f;
  f.sphere = make_sphere_grid_raw(polar, azimuth, weights);
  f.values = std::move(values);
  return f;
}

void write_cloud(const std::string& path, const ParticleCloud& cloud) {
  if (cloud.positions.empty()) {
    throw std::invalid_argument("write_cloud: empty cloud");
  }
  std::string out;
  out.reserve(64 + 64 * cloud.positions.size());
  out += "# particles M=" + std::to_string(cloud.count()) +
         " a=" + format_double(cloud.radius) +
         " seed=" + std::to_string(cloud.seed) + "\n";
  for (const auto& p : cloud.positions) {
    out += format_double(p[0]) + "," + format_double(p[1]) + "," +
           format_double(p[2]) + "\n";
  }
  write_text_file(path, out);
}

ParticleCloud read_cloud(const std::string& path) {
  const std::string text = read_text_file(path);
  const auto lines = split_lines(text);
  if (lines.empty()) throw ParseError(path + ": empty cloud file");

  const auto head = split_on(lines[0], ' ');
  if (head.size() != 5 || head[0] != "#" || head[1] != "particles" ||
      head[2].substr(0, 2) != "M=" || head[3].substr(0, 2) != "a=" ||
      head[4].substr(0, 5) != "seed=") {
    throw ParseError(path + ": bad cloud header '" + std::string(lines[0]) +
                     "'");
  }
  const long m = parse_long(head[2].substr(2), "particle count");
  const double a = parse_double(head[3].substr(2), "particle radius");
  const std::uint64_t seed = parse_u64(head[4].substr(5), "seed");
  if (m < 1 || m > (1L << 24)) {
    throw ParseError(path + ": particle count out of range");
  }
  if (static_cast<long>(lines.size()) - 1 != m) {
    throw ParseError(path + ": header says M=" + std::to_string(m) +
                     " but file has " + std::to_string(lines.size() - 1) +
                     " rows");
  }

  ParticleCloud cloud;
  cloud.radius = a;
  cloud.seed = seed;
  cloud.positions.reserve(static_cast<std::size_t>(m));
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto cols = split_on(lines[i], ',');
    if (cols.size() != 3) {
      throw ParseError(path + ": line " + std::to_string(i + 1) +
                       ": expected x,y,z");
    }
    cloud.positions.emplace_back(parse_double(cols[0], "position"),
                                 parse_double(cols[1], "position"),
                                 parse_double(cols[2], "position"));
  }
  try {
    finalize_cloud(cloud);
  } catch (const std::invalid_argument& e) {
    throw ParseError(path + ": " + e.what());
  }
  return cloud;
}

}  // namespace wavefocus
