// SPDX-License-Identifier: Apache-2.0
#include "wavefocus/cli.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "wavefocus/design.hpp"
#include "wavefocus/ensemble.hpp"
#include "wavefocus/io.hpp"

namespace wavefocus {

namespace {

using nlohmann::json;

const json& key_at(const json& obj, const std::string& key) {
  if (!obj.is_object() || !obj.contains(key)) {
    throw ParseError("config: missing key '" + key + "'");
  }
  return obj.at(key);
}

double num_at(const json& obj, const std::string& key) {
  const json& v = key_at(obj, key);
  if (!v.is_number()) throw ParseError("config: '" + key + "' must be a number");
  return v.get<double>();
}

double num_or(const json& obj, const std::string& key, double fallback) {
  if (!obj.is_object() || !obj.contains(key)) return fallback;
  return num_at(obj, key);
}

long int_at(const json& obj, const std::string& key) {
  const json& v = key_at(obj, key);
  if (!v.is_number_integer()) {
    throw ParseError("config: '" + key + "' must be an integer");
  }
  return v.get<long>();
}

std::uint64_t u64_at(const json& obj, const std::string& key) {
  const json& v = key_at(obj, key);
  if (!v.is_number_unsigned()) {
    throw ParseError("config: '" + key + "' must be a nonnegative integer");
  }
  return v.get<std::uint64_t>();
}

std::string string_at(const json& obj, const std::string& key) {
  const json& v = key_at(obj, key);
  if (!v.is_string()) throw ParseError("config: '" + key + "' must be a string");
  return v.get<std::string>();
}

std::string string_or(const json& obj, const std::string& key,
                      const std::string& fallback) {
  if (!obj.is_object() || !obj.contains(key)) return fallback;
  return string_at(obj, key);
}

bool bool_or(const json& obj, const std::string& key, bool fallback) {
  if (!obj.is_object() || !obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_boolean()) throw ParseError("config: '" + key + "' must be a bool");
  return v.get<bool>();
}

Vector3d vec3_at(const json& obj, const std::string& key) {
  const json& v = key_at(obj, key);
  if (!v.is_array() || v.size() != 3) {
    throw ParseError("config: '" + key + "' must be an array of 3 numbers");
  }
  Vector3d out;
  for (int i = 0; i < 3; ++i) {
    if (!v[i].is_number()) {
      throw ParseError("config: '" + key + "' must be an array of 3 numbers");
    }
    out[i] = v[i].get<double>();
  }
  return out;
}

Vector3i ivec3_at(const json& obj, const std::string& key) {
  const json& v = key_at(obj, key);
  if (!v.is_array() || v.size() != 3) {
    throw ParseError("config: '" + key + "' must be an array of 3 integers");
  }
  Vector3i out;
  for (int i = 0; i < 3; ++i) {
    if (!v[i].is_number_integer()) {
      throw ParseError("config: '" + key + "' must be an array of 3 integers");
    }
    out[i] = static_cast<int>(v[i].get<long>());
  }
  return out;
}

WaveContext parse_context(const json& config) {
  const double k = num_at(config, "k");
  if (!(k > 0.0) || !std::isfinite(k)) {
    throw ParseError("config: 'k' must be a positive finite number");
  }
  Vector3d alpha = Vector3d::UnitZ();
  if (config.contains("alpha")) {
    alpha = vec3_at(config, "alpha");
    const double n = alpha.norm();
    if (!(n > 0.0) || !std::isfinite(n)) {
      throw ParseError("config: 'alpha' must be a nonzero direction");
    }
    alpha /= n;
  }
  return WaveContext(k, alpha);
}

DomainGridPtr parse_grid(const json& config) {
  const json& g = key_at(config, "grid");
  const json& b = key_at(g, "box");
  Box box;
  box.min = vec3_at(b, "min");
  box.max = vec3_at(b, "max");
  const Vector3i shape = ivec3_at(g, "shape");

  Region region = Region::box();
  if (g.contains("region")) {
    const json& r = g.at("region");
    const std::string type = string_at(r, "type");
    if (type == "ball") {
      region = Region::ball(vec3_at(r, "center"), num_at(r, "radius"));
    } else if (type != "box") {
      throw ParseError("config: region type must be 'box' or 'ball'");
    }
  }
  return build_domain_grid(box, shape, region);
}

SphereGridPtr parse_sphere(const json& config) {
  const json& s = key_at(config, "sphere");
  return build_sphere_grid(static_cast<int>(int_at(s, "n_polar")),
                           static_cast<int>(int_at(s, "n_azimuthal")));
}

ApplyMode parse_apply_mode(const json& config) {
  const std::string mode = string_or(config, "apply_mode", "auto");
  if (mode == "auto") return ApplyMode::Auto;
  if (mode == "direct") return ApplyMode::Direct;
  if (mode == "fft") return ApplyMode::Fft;
  throw ParseError("config: apply_mode must be 'auto', 'direct', or 'fft'");
}

// Indicator-type targets on the sphere: a polar cap or an annulus about an
// axis, a far-field file, or the zero pattern.
FarField parse_target(const json& config, SphereGridPtr* sphere) {
  const json& t = key_at(config, "target");
  const std::string type = string_at(t, "type");

  if (type == "file") {
    if (config.contains("sphere")) {
      throw ParseError(
          "config: a far-field target file defines the sphere grid; remove "
          "'sphere'");
    }
    FarField f = read_far_field(string_at(t, "path"));
    *sphere = f.sphere;
    return f;
  }

  *sphere = parse_sphere(config);
  FarField f = make_zero_far_field(*sphere);
  if (type == "zero") return f;

  Vector3d axis = Vector3d::UnitZ();
  if (t.contains("axis")) {
    axis = vec3_at(t, "axis");
    const double n = axis.norm();
    if (!(n > 0.0)) throw ParseError("config: target axis must be nonzero");
    axis /= n;
  }
  const cplx amplitude(num_or(t, "amplitude_re", 1.0),
                       num_or(t, "amplitude_im", 0.0));

  double cos_outer = 0.0;
  double cos_inner = 1.0;
  if (type == "cap") {
    const double half = num_at(t, "half_angle_deg") * kPi / 180.0;
    if (!(half > 0.0) || half > kPi) {
      throw ParseError("config: cap half angle must be in (0, 180] degrees");
    }
    cos_outer = std::cos(half);
  } else if (type == "annulus") {
    const double inner = num_at(t, "inner_deg") * kPi / 180.0;
    const double outer = num_at(t, "outer_deg") * kPi / 180.0;
    if (!(inner >= 0.0) || !(outer > inner) || outer > kPi) {
      throw ParseError("config: annulus needs 0 <= inner < outer <= 180");
    }
    cos_inner = std::cos(inner);
    cos_outer = std::cos(outer);
  } else {
    throw ParseError("config: target type must be cap, annulus, zero, or file");
  }

  for (int j = 0; j < (*sphere)->count(); ++j) {
    const double c = (*sphere)->directions.row(j).dot(axis);
    if (c <= cos_inner + 1e-15 && c >= cos_outer - 1e-15) {
      f.values[j] = amplitude;
    }
  }
  return f;
}

double resolve_epsilon(const json& config, const FarField& f) {
  const bool has_abs = config.contains("epsilon");
  const bool has_rel = config.contains("epsilon_rel");
  if (has_abs == has_rel) {
    throw ParseError("config: give exactly one of 'epsilon' or 'epsilon_rel'");
  }
  double eps = 0.0;
  if (has_abs) {
    eps = num_at(config, "epsilon");
  } else {
    const double norm = far_norm(f);
    if (!(norm > 0.0)) {
      throw ParseError("config: 'epsilon_rel' needs a nonzero target");
    }
    eps = num_at(config, "epsilon_rel") * norm;
  }
  if (!(eps > 0.0) || !std::isfinite(eps)) {
    throw ParseError("config: accuracy goal must be positive and finite");
  }
  return eps;
}

RegularizationPolicy parse_regularization(const json& config) {
  RegularizationPolicy reg;
  if (!config.contains("regularization")) return reg;
  const json& r = config.at("regularization");
  const std::string mode = string_or(r, "mode", "discrepancy");
  if (mode == "fixed") {
    reg.mode = RegularizationPolicy::Mode::FixedLambda;
    reg.lambda = num_at(r, "lambda");
  } else if (mode != "discrepancy") {
    throw ParseError("config: regularization mode must be 'discrepancy' or 'fixed'");
  }
  return reg;
}

json context_json(const WaveContext& ctx) {
  return json{{"k", ctx.k}, {"alpha", {ctx.alpha[0], ctx.alpha[1], ctx.alpha[2]}}};
}

json shape_json(const DomainGrid& g) {
  return json::array({g.shape[0], g.shape[1], g.shape[2]});
}

void write_report(const std::string& out_dir, const json& report) {
  write_text_file(out_dir + "/report.json", report.dump(2) + "\n");
}

int run_design(const json& config, const std::string& out_dir,
               const CliOverrides&) {
  const WaveContext ctx = parse_context(config);
  DomainGridPtr grid = parse_grid(config);

  SphereGridPtr sphere;
  DesignTarget target;
  target.f = parse_target(config, &sphere);
  target.context = ctx;
  target.epsilon = resolve_epsilon(config, target.f);

  const RegularizationPolicy reg = parse_regularization(config);

  DesignOptions options;
  options.apply_mode = parse_apply_mode(config);
  options.particle_radius = num_or(config, "particle_radius", 0.0);
  if (config.contains("q0")) {
    const json& q0spec = config.at("q0");
    const std::string type = string_at(q0spec, "type");
    if (type == "constant") {
      ComplexField q0 = make_zero_field(grid);
      q0.values.setConstant(
          cplx(num_or(q0spec, "re", 0.0), num_or(q0spec, "im", 0.0)));
      options.q0 = std::move(q0);
    } else if (type == "file") {
      ComplexField q0 = read_field(string_at(q0spec, "path"));
      if (!grids_equal(*q0.grid, *grid)) {
        throw ParseError("config: background field grid does not match 'grid'");
      }
      q0.grid = grid;
      options.q0 = std::move(q0);
    } else if (type != "zero") {
      throw ParseError("config: q0 type must be zero, constant, or file");
    }
  }

  const DesignResult result = design(target, grid, sphere, reg, options);

  write_field(out_dir + "/q_delta.field", result.q_delta.field);
  write_field(out_dir + "/psi.field", result.psi);
  write_field(out_dir + "/psi_delta.field", result.psi_delta);
  write_field(out_dir + "/h_delta.field", result.h_delta);
  write_real_field(out_dir + "/density.field", result.density.number_density);
  write_real_field(out_dir + "/density_clipped.field",
                   result.density.number_density_clipped);
  write_far_field(out_dir + "/target_farfield.csv", target.f);
  write_far_field(out_dir + "/predicted_farfield.csv",
                  result.predicted_amplitude);

  const bool pass = result.residual_final <= 2.0 * result.epsilon;
  json report = {
      {"command", "design"},
      {"context", context_json(ctx)},
      {"grid_shape", shape_json(*grid)},
      {"masked_voxels", grid->masked_count()},
      {"directions", sphere->count()},
      {"epsilon", result.epsilon},
      {"target_norm", result.target_norm},
      {"lambda", result.lambda},
      {"residual_fit", result.residual_fit},
      {"residual_final", result.residual_final},
      {"fit_reached_target", result.fit_reached_target},
      {"pass", pass},
      {"delta", result.delta},
      {"cut_count", result.cut_count},
      {"cut_fraction", result.cut_fraction},
      {"ladder_exhausted", result.ladder_exhausted},
      {"h_norm", result.h_norm},
      {"particle_radius", result.particle_radius},
      {"c0", result.c0},
      {"infeasible_voxels", result.infeasible_voxels},
      {"infeasible_fraction", result.density.infeasible_fraction},
      {"warnings", result.warnings},
  };
  write_report(out_dir, report);
  return pass ? 0 : 1;
}

int run_forward(const json& config, const std::string& out_dir,
                const CliOverrides& overrides) {
  const WaveContext ctx = parse_context(config);
  Potential q;
  q.field = read_field(string_at(config, "q"));
  q.context = ctx;
  SphereGridPtr sphere = parse_sphere(config);

  SolverOptions options;
  options.tol = overrides.tol.value_or(num_or(config, "tol", options.tol));
  options.force_iterative = bool_or(config, "force_iterative", false);
  options.apply_mode = parse_apply_mode(config);
  if (!(options.tol > 0.0)) {
    throw ParseError("config: solver tolerance must be positive");
  }

  const ScatteringSolution sol = solve_scattering(q, sphere, options);

  write_field(out_dir + "/total_field.field", sol.total_field);
  write_far_field(out_dir + "/amplitude.csv", sol.amplitude);

  json report = {
      {"command", "forward"},
      {"context", context_json(ctx)},
      {"grid_shape", shape_json(*q.field.grid)},
      {"masked_voxels", q.field.grid->masked_count()},
      {"directions", sphere->count()},
      {"residual", sol.residual},
      {"iterations", sol.iterations},
      {"method", sol.method},
      {"tol", options.tol},
      {"amplitude_norm", far_norm(sol.amplitude)},
  };
  write_report(out_dir, report);
  return 0;
}

int run_verify(const json& config, const std::string& out_dir,
               const CliOverrides& overrides) {
  const WaveContext ctx = parse_context(config);
  Potential q;
  q.field = read_field(string_at(config, "q"));
  q.context = ctx;
  const FarField prediction = read_far_field(string_at(config, "prediction"));

  const double tol = overrides.tol.value_or(num_or(config, "tol", 0.05));
  if (!(tol > 0.0)) throw ParseError("config: 'tol' must be positive");
  const double solver_tol = num_or(config, "solver_tol", 1e-8);
  if (!(solver_tol > 0.0)) {
    throw ParseError("config: 'solver_tol' must be positive");
  }

  const ScatteringSolution sol =
      solve_scattering(q, prediction.sphere, solver_tol);

  FarField diff = sol.amplitude;
  diff.values -= prediction.values;
  const double base = far_norm(prediction);
  const double distance = base > 0.0 ? far_norm(diff) / base : far_norm(diff);
  const bool pass = distance <= tol;

  write_far_field(out_dir + "/amplitude.csv", sol.amplitude);
  json report = {
      {"command", "verify"},
      {"context", context_json(ctx)},
      {"grid_shape", shape_json(*q.field.grid)},
      {"masked_voxels", q.field.grid->masked_count()},
      {"directions", prediction.sphere->count()},
      {"solve_residual", sol.residual},
      {"iterations", sol.iterations},
      {"method", sol.method},
      {"prediction_norm", base},
      {"amplitude_norm", far_norm(sol.amplitude)},
      {"distance", distance},
      {"tol", tol},
      {"pass", pass},
  };
  write_report(out_dir, report);
  return pass ? 0 : 1;
}

int run_ensemble(const json& config, const std::string& out_dir,
                 const CliOverrides& overrides) {
  const WaveContext ctx = parse_context(config);
  const RealField density = read_real_field(string_at(config, "density"));
  const FarField prediction = read_far_field(string_at(config, "prediction"));
  const double radius = num_at(config, "radius");
  if (!(radius > 0.0)) throw ParseError("config: 'radius' must be positive");

  std::vector<std::uint64_t> seeds;
  if (config.contains("seeds")) {
    const json& s = config.at("seeds");
    if (!s.is_array() || s.empty()) {
      throw ParseError("config: 'seeds' must be a nonempty array");
    }
    for (const auto& v : s) {
      if (!v.is_number_unsigned()) {
        throw ParseError("config: seeds must be nonnegative integers");
      }
      seeds.push_back(v.get<std::uint64_t>());
    }
  } else {
    const long count = config.contains("seed_count")
                           ? int_at(config, "seed_count")
                           : 1;
    if (count < 1 || count > 4096) {
      throw ParseError("config: 'seed_count' must be in [1, 4096]");
    }
    const std::uint64_t base =
        config.contains("seed_base") ? u64_at(config, "seed_base") : 1;
    for (long i = 0; i < count; ++i) {
      seeds.push_back(base + static_cast<std::uint64_t>(i));
    }
  }
  if (overrides.seed) {
    const std::size_t count = seeds.size();
    seeds.clear();
    for (std::size_t i = 0; i < count; ++i) {
      seeds.push_back(*overrides.seed + i);
    }
  }

  std::vector<ParticleCloud> clouds;
  std::vector<EnsembleSolution> solutions;
  const RadiusRun run = ensemble_distance(density, radius, seeds, ctx,
                                          prediction, &clouds, &solutions);

  double count_mean = 0.0;
  double spacing_mean = 0.0;
  double residual_max = 0.0;
  json per_seed = json::array();
  for (std::size_t i = 0; i < run.seeds.size(); ++i) {
    const SeedRun& sr = run.seeds[i];
    count_mean += sr.count;
    spacing_mean += sr.mean_spacing;
    residual_max = std::max(residual_max, sr.solve_residual);
    per_seed.push_back({{"seed", sr.seed},
                        {"M", sr.count},
                        {"d_mean", sr.mean_spacing},
                        {"residual", sr.solve_residual},
                        {"distance", sr.distance}});
    write_cloud(out_dir + "/cloud_" + std::to_string(sr.seed) + ".csv",
                clouds[i]);
  }
  count_mean /= static_cast<double>(run.seeds.size());
  spacing_mean /= static_cast<double>(run.seeds.size());

  FarField mean_amp = make_zero_far_field(prediction.sphere);
  for (const EnsembleSolution& sol : solutions) {
    mean_amp.values += sol.amplitude.values;
  }
  mean_amp.values /= static_cast<double>(solutions.size());
  write_far_field(out_dir + "/mean_amplitude.csv", mean_amp);

  const bool has_tol = overrides.tol.has_value() || config.contains("tol");
  const double tol =
      overrides.tol.value_or(num_or(config, "tol", 0.0));
  if (has_tol && !(tol > 0.0)) {
    throw ParseError("config: 'tol' must be positive");
  }
  const bool pass = !has_tol || run.mean_distance <= tol;

  json report = {
      {"command", "ensemble"},
      {"context", context_json(ctx)},
      {"M", count_mean},
      {"a", radius},
      {"d_mean", spacing_mean},
      {"residual", residual_max},
      {"distance_to_design", run.mean_distance},
      {"expected_count", run.expected_count},
      {"volume_fraction", run.volume_fraction},
      {"per_seed", per_seed},
      {"pass", pass},
  };
  if (has_tol) report["tol"] = tol;
  write_report(out_dir, report);
  return pass ? 0 : 1;
}

int run_diagnose(const json& config, const std::string& out_dir,
                 const CliOverrides&) {
  const WaveContext ctx = parse_context(config);
  DomainGridPtr grid = parse_grid(config);
  SphereGridPtr sphere = parse_sphere(config);

  const long n = grid->masked_count();
  const long m = sphere->count();
  if (n > 32768 || m > 4096 || n * m > 40000000L) {
    throw ParseError("config: singular-value budget exceeded (" +
                     std::to_string(n) + " voxels x " + std::to_string(m) +
                     " directions)");
  }

  const Eigen::VectorXd sigma =
      far_field_singular_values(*grid, *sphere, ctx.k);

  std::string csv;
  csv.reserve(32 * static_cast<std::size_t>(sigma.size()));
  for (Eigen::Index i = 0; i < sigma.size(); ++i) {
    csv += std::to_string(i) + "," + format_double(sigma[i]) + "\n";
  }
  write_text_file(out_dir + "/singular_values.csv", csv);

  const double sigma_max = sigma.size() ? sigma[0] : 0.0;
  const double sigma_min = sigma.size() ? sigma[sigma.size() - 1] : 0.0;
  json report = {
      {"command", "diagnose"},
      {"context", context_json(ctx)},
      {"grid_shape", shape_json(*grid)},
      {"masked_voxels", grid->masked_count()},
      {"directions", sphere->count()},
      {"count", sigma.size()},
      {"sigma_max", sigma_max},
      {"sigma_min", sigma_min},
  };
  if (sigma_min > 0.0) {
    report["condition_number"] = sigma_max / sigma_min;
  } else {
    report["condition_number"] = nullptr;
  }
  write_report(out_dir, report);
  return 0;
}

void emit_error(const std::string& out_dir, const std::string& type,
                const std::string& message, int exit_code) {
  json err = {{"error", {{"type", type}, {"message", message}}},
              {"exit_code", exit_code}};
  const std::string text = err.dump(2) + "\n";
  std::fputs(text.c_str(), stderr);
  try {
    write_text_file(out_dir + "/error.json", text);
  } catch (...) {
    // stderr already carries the report; a read-only out dir must not mask it
  }
}

}  // namespace

int run_command(const std::string& command, const std::string& config_path,
                const std::string& out_dir, const CliOverrides& overrides) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);

  try {
    const json config = [&] {
      try {
        return json::parse(read_text_file(config_path));
      } catch (const json::exception& e) {
        throw ParseError(config_path + ": " + e.what());
      }
    }();
    if (config.contains("command") &&
        config.at("command").get<std::string>() != command) {
      throw ParseError("config names command '" +
                       config.at("command").get<std::string>() +
                       "' but '" + command + "' was invoked");
    }

    if (command == "design") return run_design(config, out_dir, overrides);
    if (command == "forward") return run_forward(config, out_dir, overrides);
    if (command == "verify") return run_verify(config, out_dir, overrides);
    if (command == "ensemble") return run_ensemble(config, out_dir, overrides);
    if (command == "diagnose") return run_diagnose(config, out_dir, overrides);
    throw ParseError("unknown command '" + command + "'");
  } catch (const ParseError& e) {
    emit_error(out_dir, "input", e.what(), 2);
    return 2;
  } catch (const std::invalid_argument& e) {
    emit_error(out_dir, "input", e.what(), 2);
    return 2;
  } catch (const json::exception& e) {
    emit_error(out_dir, "input", e.what(), 2);
    return 2;
  } catch (const SolveError& e) {
    emit_error(out_dir, "solve",
               std::string(e.what()) + " (achieved residual " +
                   format_double(e.achieved_residual) + ")",
               1);
    return 1;
  } catch (const std::exception& e) {
    emit_error(out_dir, "runtime", e.what(), 1);
    return 1;
  }
}

}  // namespace wavefocus
