// SPDX-License-Identifier: Apache-2.0
// Acceptance gate: one PASS/FAIL line per shipped guarantee.  Tolerances and
// wall-clock budgets are pinned here; any FAIL makes the binary exit nonzero.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include <json.hpp>

#include <wavefocus/cli.hpp>
#include <wavefocus/design.hpp>
#include <wavefocus/ensemble.hpp>
#include <wavefocus/fields.hpp>
#include <wavefocus/forward.hpp>
#include <wavefocus/geometry.hpp>
#include <wavefocus/io.hpp>
#include <wavefocus/kernels.hpp>
#include <wavefocus/partial_wave.hpp>

using namespace wavefocus;
namespace fs = std::filesystem;
using nlohmann::json;
using clock_type = std::chrono::steady_clock;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

int g_failures = 0;

std::string num(double v) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.3g", v);
  return buf;
}

void run_criterion(int index, const std::string& what, double budget_seconds,
                   const std::function<Outcome()>& body) {
  const auto t0 = clock_type::now();
  Outcome out;
  try {
    out = body();
  } catch (const std::exception& e) {
    out.pass = false;
    out.detail = std::string("exception: ") + e.what();
  }
  const double dt =
      std::chrono::duration<double>(clock_type::now() - t0).count();
  if (budget_seconds > 0.0 && dt > budget_seconds) {
    out.pass = false;
    out.detail += (out.detail.empty() ? "" : "; ") + std::string("over the ") +
                  num(budget_seconds) + " s budget";
  }
  std::printf("%s criterion %2d: %s (%s; %.2f s)\n", out.pass ? "PASS" : "FAIL",
              index, what.c_str(), out.detail.c_str(), dt);
  std::fflush(stdout);
  if (!out.pass) ++g_failures;
}

ComplexField random_field(DomainGridPtr g, std::uint64_t seed, double scale) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  ComplexField f = make_zero_field(g);
  for (Eigen::Index i = 0; i < f.values.size(); ++i)
    f.values[i] = scale * cplx(nd(rng), nd(rng));
  return f;
}

// Single-scattering far field of a constant ball of contrast q and radius R:
// amplitude depends only on mu = k |alpha - beta|.
cplx weak_ball_amplitude(double q, double R, double mu) {
  const double u = mu * R;
  if (u < 1e-4) {
    return cplx(-q * R * R * R / 3.0 * (1.0 - u * u / 10.0), 0.0);
  }
  return cplx(-q * (std::sin(u) - u * std::cos(u)) / (mu * mu * mu), 0.0);
}

bool files_equal(const std::string& a, const std::string& b) {
  return read_text_file(a) == read_text_file(b);
}

std::string fresh_dir(const std::string& name) {
  const fs::path p = fs::current_path() / "acceptance_tmp" / name;
  fs::remove_all(p);
  fs::create_directories(p);
  return p.string();
}

// ---------------------------------------------------------------------------

Outcome quadrature_identity() {
  const double k = 1.0;
  const double tol = 1e-8;
  auto s = build_sphere_grid(16, 32);
  std::mt19937_64 rng(2024);
  std::normal_distribution<double> nd;
  std::uniform_real_distribution<double> ur(0.1, 5.0);

  double worst = 0.0;
  int accepted = 0;
  while (accepted < 50) {
    Vector3d dir(nd(rng), nd(rng), nd(rng));
    if (dir.norm() < 1e-6) continue;
    dir.normalize();
    const double r = ur(rng);
    if (std::abs(std::sin(k * r)) < 0.05) continue;  // keep the identity O(1)
    const Vector3d x = r * dir;
    ++accepted;

    cplx acc(0.0, 0.0);
    for (int j = 0; j < s->count(); ++j) {
      const double phase = k * s->directions.row(j).dot(x);
      acc += s->weights[j] * std::exp(cplx(0.0, phase));
    }
    const double exact = kFourPi * std::sin(k * r) / (k * r);
    worst = std::max(worst, std::abs(acc - exact) / std::abs(exact));
  }
  return {worst <= tol, "50 points, k|x| <= 5, max rel err " + num(worst) +
                            " <= " + num(tol)};
}

Outcome weak_contrast_oracle() {
  const double rel_tol = 0.03;
  const double ratio_lo = 1.6, ratio_hi = 2.4;
  const double k = 1.0, R = 0.3;
  auto g = build_domain_grid(Box{{-0.3, -0.3, -0.3}, {0.3, 0.3, 0.3}},
                             {20, 20, 20}, Region::ball({0, 0, 0}, R));
  auto s = build_sphere_grid(8, 16);
  WaveContext ctx(k, {0, 0, 1});

  SolverOptions opt;
  opt.force_iterative = true;  // exercises the large-problem path
  opt.tol = 1e-10;

  auto solve_at = [&](double qv) {
    ComplexField qf = make_zero_field(g);
    qf.values.setConstant(qv);
    Potential q{qf, ctx};
    return std::pair<FarField, FarField>(solve_scattering(q, s, opt).amplitude,
                                         born_amplitude(q, s));
  };

  const auto [full1, born1] = solve_at(0.1);
  FarField analytic = make_zero_far_field(s);
  for (int j = 0; j < s->count(); ++j) {
    const double mu = k * (ctx.alpha - s->directions.row(j).transpose()).norm();
    analytic.values[j] = weak_ball_amplitude(0.1, R, mu);
  }
  const double rel = relative_far_distance(full1, analytic);

  FarField d1 = full1;
  d1.values -= born1.values;
  const double defect1 = far_norm(d1) / far_norm(born1);

  const auto [full2, born2] = solve_at(0.05);
  FarField d2 = full2;
  d2.values -= born2.values;
  const double defect2 = far_norm(d2) / far_norm(born2);
  const double ratio = defect1 / defect2;

  const bool pass =
      rel <= rel_tol && ratio >= ratio_lo && ratio <= ratio_hi;
  return {pass, "single-scattering distance " + num(rel) + " <= " +
                    num(rel_tol) + ", contrast-halving defect ratio " +
                    num(ratio) + " in [" + num(ratio_lo) + ", " +
                    num(ratio_hi) + "]"};
}

Outcome small_particle_series() {
  const double amp_tol = 0.02;
  const double energy_tol = 1e-8;
  const double k = 1.0, a = 0.01;

  ParticleCloud cloud;
  cloud.positions = {Vector3d::Zero()};
  cloud.radius = a;
  finalize_cloud(cloud);
  WaveContext ctx(k, {0, 0, 1});
  auto s = build_sphere_grid(8, 8);  // 64 observation directions
  const EnsembleSolution sol = foldy_lax_solve(cloud, ctx, s);

  double worst = 0.0;
  for (int j = 0; j < s->count(); ++j) {
    const double ct = s->directions.row(j).dot(ctx.alpha);
    const cplx oracle = soft_sphere_amplitude_at(a, k, ct);
    worst =
        std::max(worst, std::abs(sol.amplitude.values[j] - oracle) /
                            std::abs(oracle));
  }

  // energy balance of the series itself: total cross-section from |f|^2
  // equals (4 pi / k) Im f(forward)
  const GaussLegendreRule rule = gauss_legendre(200, -1.0, 1.0);
  double sigma = 0.0;
  for (int i = 0; i < rule.nodes.size(); ++i) {
    const cplx f = soft_sphere_amplitude_at(a, k, rule.nodes[i]);
    sigma += rule.weights[i] * std::norm(f);
  }
  sigma *= 2.0 * kPi;
  const double forward_im = soft_sphere_amplitude_at(a, k, 1.0).imag();
  const double balance =
      std::abs(sigma - kFourPi / k * forward_im) / sigma;

  const bool pass = worst <= amp_tol && balance <= energy_tol;
  return {pass, "64-direction amplitude err " + num(worst) + " <= " +
                    num(amp_tol) + ", energy balance " + num(balance) +
                    " <= " + num(energy_tol)};
}

Outcome reachable_target_fit() {
  const double k = 1.5;
  auto g = build_domain_grid(Box{{-0.5, -0.5, -0.5}, {0.5, 0.5, 0.5}},
                             {12, 12, 12}, Region::box());
  auto s = build_sphere_grid(8, 16);
  WaveContext ctx(k, {0, 0, 1});

  ComplexField hstar = random_field(g, 5, 1e-3);
  DesignTarget target;
  target.f = far_field_map(s, k, hstar);
  target.context = ctx;
  target.epsilon = 1e-3 * far_norm(target.f);

  const DesignResult res =
      design(target, g, s, RegularizationPolicy{}, DesignOptions{});
  const bool pass = res.fit_reached_target &&
                    res.residual_final <= 2.0 * res.epsilon &&
                    res.warnings.empty();
  return {pass, "reached=" + std::string(res.fit_reached_target ? "yes" : "no") +
                    ", final residual " + num(res.residual_final) +
                    " <= 2 epsilon = " + num(2.0 * res.epsilon)};
}

// Shared by criteria 5 and 6: a focusing design on a 16^3 ball.
const DesignResult& focusing_design() {
  static const DesignResult res = [] {
    const double k = 2.0;
    auto g = build_domain_grid(Box{{-0.5, -0.5, -0.5}, {0.5, 0.5, 0.5}},
                               {16, 16, 16}, Region::ball({0, 0, 0}, 0.45));
    auto s = build_sphere_grid(12, 24);
    WaveContext ctx(k, {0, 0, 1});

    FarField f = make_zero_far_field(s);
    const double cos_cap = std::cos(30.0 * kPi / 180.0);
    for (int j = 0; j < s->count(); ++j) {
      if (s->directions(j, 2) >= cos_cap) f.values[j] = 1.0;
    }
    DesignTarget target;
    target.f = f;
    target.context = ctx;
    target.epsilon = 0.35 * far_norm(f);
    return design(target, g, s, RegularizationPolicy{}, DesignOptions{});
  }();
  return res;
}

Outcome design_verifies_forward() {
  const double tol = 0.05;
  const DesignResult& res = focusing_design();
  const ScatteringSolution sol =
      solve_scattering(res.q_delta, res.predicted_amplitude.sphere, 1e-10);
  const double dist =
      relative_far_distance(sol.amplitude, res.predicted_amplitude);
  const bool pass = res.fit_reached_target && res.warnings.empty() &&
                    dist <= tol;
  return {pass, "fit reached=" +
                    std::string(res.fit_reached_target ? "yes" : "no") +
                    ", solve-vs-prediction distance " + num(dist) + " <= " +
                    num(tol)};
}

Outcome cutoff_certificate() {
  // (a) synthetic field with a known small-magnitude line
  auto g = build_domain_grid(Box{{-0.5, -0.5, 0.0}, {0.5, 0.5, 0.27}},
                             {33, 33, 9}, Region::box());
  WaveContext ctx(1.0, {0, 0, 1});
  VolumePotential op(g, ctx.k);
  ComplexField h = random_field(g, 19, 1e-3);
  ComplexField psi = make_zero_field(g);
  for (int l = 0; l < g->masked_count(); ++l) {
    const Vector3d x = g->centers.row(l);
    psi.values[l] = cplx(x[0], x[1]);
  }
  const double delta = 0.1;
  const CutoffResult cut = cutoff(h, psi, delta, ctx, op);

  int expected_cut = 0;
  for (int l = 0; l < g->masked_count(); ++l) {
    if (std::abs(psi.values[l]) < delta) ++expected_cut;
  }
  bool zeroed_ok = true;
  double max_h = 0.0;
  for (int l = 0; l < g->masked_count(); ++l) {
    max_h = std::max(max_h, std::abs(cut.h_delta.values[l]));
    if (std::abs(psi.values[l]) < delta) {
      zeroed_ok = zeroed_ok && cut.h_delta.values[l] == cplx(0.0, 0.0) &&
                  cut.q_delta.field.values[l] == cplx(0.0, 0.0);
    }
  }
  const bool synthetic_ok =
      cut.cut_count == expected_cut && zeroed_ok && cut.bound_ok &&
      cut.min_kept_abs_psi_delta >= 0.5 * delta &&
      cut.max_abs_q <= max_h / (0.5 * delta) + 1e-15;

  // (b) the focusing design's own certificate, recomputed from its fields
  const DesignResult& res = focusing_design();
  double min_kept = 1e300;
  double sup_q = 0.0;
  double max_hd = 0.0;
  for (Eigen::Index l = 0; l < res.q_delta.field.values.size(); ++l) {
    sup_q = std::max(sup_q, std::abs(res.q_delta.field.values[l]));
    max_hd = std::max(max_hd, std::abs(res.h_delta.values[l]));
    if (res.q_delta.field.values[l] != cplx(0.0, 0.0)) {
      min_kept = std::min(min_kept, std::abs(res.psi_delta.values[l]));
    }
  }
  const bool design_ok = !res.ladder_exhausted &&
                         min_kept >= 0.5 * res.delta &&
                         sup_q <= max_hd / (0.5 * res.delta) + 1e-15;

  const bool pass = synthetic_ok && design_ok;
  return {pass, "synthetic cut=" + std::to_string(cut.cut_count) +
                    " bound_ok=" + (cut.bound_ok ? "yes" : "no") +
                    ", design min kept |psi_delta| " + num(min_kept) +
                    " >= delta/2 = " + num(0.5 * res.delta) + ", sup|q| " +
                    num(sup_q)};
}

Outcome threshold_area_scaling() {
  const double slope_lo = 1.7, slope_hi = 2.2;
  const int n = 4096;
  const double cell = 1.0 / n;

  std::vector<double> log_delta, log_area;
  double worst_ratio = 0.0;
  for (int p = 4; p <= 8; ++p) {
    const double delta = std::ldexp(1.0, -p);
    const double d2 = delta * delta;
    long count = 0;
    for (int iy = 0; iy < n; ++iy) {
      const double y = -0.5 + (iy + 0.5) * cell;
      const double y2 = y * y;
      if (y2 >= d2) continue;  // |psi| >= delta on the whole row
      const double half = std::sqrt(d2 - y2);
      // per-row x range with x^2 + y^2 < delta^2; count centers directly
      const long lo = static_cast<long>(std::ceil((0.5 - half) / cell - 0.5));
      const long hi = static_cast<long>(std::floor((0.5 + half) / cell - 0.5));
      for (long ix = std::max(lo, 0L); ix <= std::min(hi, long(n - 1)); ++ix) {
        const double x = -0.5 + (ix + 0.5) * cell;
        if (x * x + y2 < d2) ++count;
      }
    }
    const double area = count * cell * cell;
    log_delta.push_back(std::log(delta));
    log_area.push_back(std::log(area));
    worst_ratio = std::max(worst_ratio, std::abs(area / (kPi * d2) - 1.0));
  }

  double mx = 0, my = 0;
  for (std::size_t i = 0; i < log_delta.size(); ++i) {
    mx += log_delta[i];
    my += log_area[i];
  }
  mx /= log_delta.size();
  my /= log_area.size();
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < log_delta.size(); ++i) {
    sxy += (log_delta[i] - mx) * (log_area[i] - my);
    sxx += (log_delta[i] - mx) * (log_delta[i] - mx);
  }
  const double slope = sxy / sxx;

  const bool pass =
      slope >= slope_lo && slope <= slope_hi && worst_ratio <= 0.1;
  return {pass, "area-vs-threshold slope " + num(slope) + " in [" +
                    num(slope_lo) + ", " + num(slope_hi) +
                    "], max deviation from the disc area " + num(worst_ratio)};
}

Outcome ill_posedness_and_monotonicity() {
  const double k = 1.5;
  auto g = build_domain_grid(Box{{-0.5, -0.5, -0.5}, {0.5, 0.5, 0.5}},
                             {16, 16, 16}, Region::box());
  auto s = build_sphere_grid(16, 32);
  TikhonovSolver tik(g, s, k);

  const Eigen::VectorXd& sigma = tik.singular_values();
  bool nonincreasing = true;
  for (Eigen::Index i = 1; i < sigma.size(); ++i) {
    if (sigma[i] > sigma[i - 1] * (1.0 + 1e-12)) nonincreasing = false;
  }
  const double sigma0 = sigma[0];
  const double sigma_min = sigma[sigma.size() - 1];
  const bool severe = sigma_min <= 1e-6 * sigma0;  // holds even at underflow

  FarField f = make_zero_far_field(s);
  std::mt19937_64 rng(77);
  std::normal_distribution<double> nd;
  for (Eigen::Index i = 0; i < f.values.size(); ++i)
    f.values[i] = cplx(nd(rng), nd(rng));

  bool residual_monotone = true;
  bool source_monotone = true;
  double prev_res = -1.0, prev_h = 1e300;
  for (double lam = 1e-10; lam <= 1.001e-2; lam *= 10.0) {
    const FitResult fit = tik.solve(f, lam);
    if (fit.residual < prev_res - 1e-12 * far_norm(f)) residual_monotone = false;
    if (fit.h_norm > prev_h + 1e-12 * (1.0 + prev_h)) source_monotone = false;
    prev_res = fit.residual;
    prev_h = fit.h_norm;
  }

  const bool pass =
      nonincreasing && severe && residual_monotone && source_monotone;
  return {pass, "sigma_min/sigma_max " +
                    num(sigma0 > 0 ? sigma_min / sigma0 : 0.0) +
                    " <= 1e-06 over 512 directions; residual nondecreasing=" +
                    (residual_monotone ? "yes" : "no") +
                    ", source norm nonincreasing=" +
                    (source_monotone ? "yes" : "no") + " across 1e-10..1e-2"};
}

Outcome particle_cloud_convergence() {
  const double dist_tol = 0.25;
  const double cap_tol = 1e-12;
  const double k = 5.0, a = 0.01;
  auto g = build_domain_grid(Box{{-0.5, -0.5, -0.5}, {0.5, 0.5, 0.5}},
                             {12, 12, 12}, Region::box());
  auto s = build_sphere_grid(12, 24);
  WaveContext ctx(k, {0, 0, 1});

  ComplexField qf = make_zero_field(g);
  qf.values.setConstant(2.4 * kPi);  // 60 expected particles at radius 0.01
  const DesignResult dres = design_from_potential(Potential{qf, ctx}, s, a);

  const EffectiveMediumReport rep = effective_medium_check(
      dres, a, {1, 2, 3, 4, 5, 6, 7, 8}, 2);

  bool residuals_ok = true;
  for (const RadiusRun& run : rep.runs) {
    for (const SeedRun& sr : run.seeds) {
      residuals_ok = residuals_ok && sr.solve_residual <= 1e-10;
    }
  }
  const bool vf_ok = rep.runs.size() == 2 &&
                     rep.runs[0].volume_fraction <= 0.01 &&
                     rep.runs[1].volume_fraction < rep.runs[0].volume_fraction;
  const bool pass = rep.runs.size() == 2 &&
                    rep.runs[0].mean_distance <= dist_tol &&
                    rep.trend_nonincreasing &&
                    rep.capacitance_rel_err <= cap_tol && residuals_ok &&
                    vf_ok;
  return {pass,
          "8-seed mean distance " + num(rep.runs[0].mean_distance) + " <= " +
              num(dist_tol) + ", halved radius " +
              num(rep.runs.size() == 2 ? rep.runs[1].mean_distance : -1.0) +
              ", trend nonincreasing=" +
              (rep.trend_nonincreasing ? "yes" : "no") +
              ", capacitance err " + num(rep.capacitance_rel_err)};
}

Outcome deterministic_artifacts() {
  const std::string dir = fresh_dir("inputs");

  // shared inputs
  const double k_design = 1.5;
  auto g6 = build_domain_grid(Box{{-0.5, -0.5, -0.5}, {0.5, 0.5, 0.5}},
                              {6, 6, 6}, Region::box());
  auto s6 = build_sphere_grid(6, 12);
  ComplexField hstar = random_field(g6, 7, 1e-3);
  write_far_field(dir + "/target.csv", far_field_map(s6, k_design, hstar));

  auto gball = build_domain_grid(Box{{-0.5, -0.5, -0.5}, {0.5, 0.5, 0.5}},
                                 {8, 8, 8}, Region::ball({0, 0, 0}, 0.45));
  ComplexField qconst = make_zero_field(gball);
  qconst.values.setConstant(0.3);
  write_field(dir + "/q.field", qconst);

  auto gu = build_domain_grid(Box{{0, 0, 0}, {1, 1, 1}}, {6, 6, 6},
                              Region::box());
  RealField dens{gu, Eigen::VectorXd::Constant(gu->masked_count(), 100.0)};
  write_real_field(dir + "/density.field", dens);
  auto spred = build_sphere_grid(6, 8);
  FarField pred = make_zero_far_field(spred);
  pred.values.setConstant(cplx(-0.1, 0.0));
  write_far_field(dir + "/pred.csv", pred);

  auto cfg = [&](const std::string& name, const json& j) {
    write_text_file(dir + "/" + name, j.dump(2) + "\n");
    return dir + "/" + name;
  };
  const std::string design_cfg = cfg(
      "design.json",
      {{"command", "design"},
       {"k", k_design},
       {"grid",
        {{"box", {{"min", {-0.5, -0.5, -0.5}}, {"max", {0.5, 0.5, 0.5}}}},
         {"shape", {6, 6, 6}}}},
       {"target", {{"type", "file"}, {"path", dir + "/target.csv"}}},
       {"epsilon_rel", 1e-3}});
  const std::string forward_cfg =
      cfg("forward.json", {{"command", "forward"},
                           {"k", 1.0},
                           {"q", dir + "/q.field"},
                           {"sphere", {{"n_polar", 6}, {"n_azimuthal", 8}}},
                           {"tol", 1e-10}});
  const std::string ensemble_cfg =
      cfg("ensemble.json", {{"command", "ensemble"},
                            {"k", 2.0},
                            {"density", dir + "/density.field"},
                            {"prediction", dir + "/pred.csv"},
                            {"radius", 1e-3},
                            {"seeds", {4, 5}}});
  const std::string diagnose_cfg = cfg(
      "diagnose.json",
      {{"command", "diagnose"},
       {"k", 1.0},
       {"grid",
        {{"box", {{"min", {-0.5, -0.5, -0.5}}, {"max", {0.5, 0.5, 0.5}}}},
         {"shape", {6, 6, 6}}}},
       {"sphere", {{"n_polar", 4}, {"n_azimuthal", 8}}}});

  struct Step {
    std::string command;
    std::string config;
    std::vector<std::string> artifacts;
  };
  std::vector<Step> steps = {
      {"design", design_cfg,
       {"report.json", "q_delta.field", "psi.field", "psi_delta.field",
        "h_delta.field", "density.field", "density_clipped.field",
        "target_farfield.csv", "predicted_farfield.csv"}},
      {"forward", forward_cfg,
       {"report.json", "total_field.field", "amplitude.csv"}},
      {"ensemble", ensemble_cfg,
       {"report.json", "mean_amplitude.csv", "cloud_4.csv", "cloud_5.csv"}},
      {"diagnose", diagnose_cfg, {"report.json", "singular_values.csv"}},
  };

  std::string mismatch;
  for (const Step& step : steps) {
    const std::string out1 = fresh_dir(step.command + "_1");
    const std::string out2 = fresh_dir(step.command + "_2");
    if (run_command(step.command, step.config, out1) != 0 ||
        run_command(step.command, step.config, out2) != 0) {
      return {false, step.command + " did not exit 0"};
    }
    for (const std::string& art : step.artifacts) {
      if (!files_equal(out1 + "/" + art, out2 + "/" + art)) {
        mismatch = step.command + "/" + art;
      }
    }
    if (step.command == "design") {
      // verify consumes the design artifacts; run it twice as well
      const std::string vcfg = cfg("verify.json",
                                   {{"command", "verify"},
                                    {"k", k_design},
                                    {"q", out1 + "/q_delta.field"},
                                    {"prediction",
                                     out1 + "/predicted_farfield.csv"},
                                    {"tol", 0.05}});
      const std::string v1 = fresh_dir("verify_1");
      const std::string v2 = fresh_dir("verify_2");
      if (run_command("verify", vcfg, v1) != 0 ||
          run_command("verify", vcfg, v2) != 0) {
        return {false, "verify did not exit 0"};
      }
      for (const std::string& art : {"report.json", "amplitude.csv"}) {
        if (!files_equal(v1 + "/" + art, v2 + "/" + art)) {
          mismatch = "verify/" + art;
        }
      }
    }
  }
  if (!mismatch.empty()) {
    return {false, "artifact differs between identical runs: " + mismatch};
  }

  // file formats round-trip byte for byte
  ComplexField cf = random_field(gball, 23, 1.0);
  write_field(dir + "/rt.field", cf);
  write_field(dir + "/rt2.field", read_field(dir + "/rt.field"));
  write_real_field(dir + "/rt_real.field", dens);
  write_real_field(dir + "/rt_real2.field",
                   read_real_field(dir + "/rt_real.field"));
  FarField ff = make_zero_far_field(spred);
  std::mt19937_64 rng(31);
  std::normal_distribution<double> nd;
  for (Eigen::Index i = 0; i < ff.values.size(); ++i)
    ff.values[i] = cplx(nd(rng), nd(rng));
  write_far_field(dir + "/rt.csv", ff);
  write_far_field(dir + "/rt2.csv", read_far_field(dir + "/rt.csv"));
  const ParticleCloud cloud = sample_particles(dens, 1e-3, 2);
  write_cloud(dir + "/rt_cloud.csv", cloud);
  write_cloud(dir + "/rt_cloud2.csv", read_cloud(dir + "/rt_cloud.csv"));

  const bool rt_ok = files_equal(dir + "/rt.field", dir + "/rt2.field") &&
                     files_equal(dir + "/rt_real.field",
                                 dir + "/rt_real2.field") &&
                     files_equal(dir + "/rt.csv", dir + "/rt2.csv") &&
                     files_equal(dir + "/rt_cloud.csv",
                                 dir + "/rt_cloud2.csv");
  if (!rt_ok) return {false, "a file format failed its byte round trip"};
  return {true,
          "5 commands x 2 runs byte-identical; 4 file formats round-trip"};
}

}  // namespace

int main() {
  std::printf("acceptance checks\n");

  run_criterion(1, "sphere quadrature reproduces the plane-wave integral", 1.0,
                quadrature_identity);
  run_criterion(2,
                "weak-contrast scattering matches the single-scattering "
                "oracle and scales with contrast",
                60.0, weak_contrast_oracle);
  run_criterion(3,
                "a small particle reproduces the spherical series and its "
                "energy balance",
                1.0, small_particle_series);
  run_criterion(4, "a reachable far-field target is met within twice the goal",
                120.0, reachable_target_fit);
  run_criterion(5, "the designed material reproduces its predicted far field",
                300.0, design_verifies_forward);
  run_criterion(6, "the small-field cutoff certifies its lower bound", 0.0,
                cutoff_certificate);
  run_criterion(7, "the area below a field threshold scales quadratically",
                60.0, threshold_area_scaling);
  run_criterion(8,
                "the far-field map is severely ill-posed and regularization "
                "is monotone",
                0.0, ill_posedness_and_monotonicity);
  run_criterion(9, "random particle clouds converge to the designed material",
                600.0, particle_cloud_convergence);
  run_criterion(10, "identical inputs produce byte-identical artifacts", 0.0,
                deterministic_artifacts);

  if (g_failures == 0) {
    std::printf("all criteria passed\n");
    return 0;
  }
  std::printf("%d criteria failed\n", g_failures);
  return 1;
}
