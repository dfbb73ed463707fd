// Command-line front end: configuration, orchestration, and reporting for
// the time-domain enclosure pipeline.  All outputs are deterministic given
// the config and seed (sorted-key JSON, fixed-format CSV, no timestamps).

#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "CLI11.hpp"
#include "json.hpp"

#include "enclosure/config.hpp"
#include "enclosure/geometry.hpp"
#include "enclosure/indicator.hpp"
#include "enclosure/obstacle.hpp"
#include "enclosure/potentials.hpp"
#include "enclosure/probe.hpp"
#include "enclosure/types.hpp"
#include "enclosure/verify.hpp"
#include "enclosure/wavesim.hpp"

namespace {

using enclosure::Ball;
using enclosure::DataMode;
using enclosure::IndicatorCurve;
using enclosure::ObstacleShape;
using enclosure::RunConfig;
using enclosure::Vec3;
using nlohmann::json;

struct CommonFlags {
  std::string config_path;
  std::string mode;
  double tau_min = 0.0;
  double tau_max = 0.0;
  int tau_count = 0;
  std::string out_dir;
  long long seed = -1;
  int threads = 0;
};

void add_common_flags(CLI::App* sub, CommonFlags* flags) {
  sub->add_option("--config", flags->config_path, "run configuration (JSON)")
      ->required();
  sub->add_option("--mode", flags->mode,
                  "data mode override: geometry | semianalytic | fdtd");
  sub->add_option("--tau-min", flags->tau_min, "tau window lower end");
  sub->add_option("--tau-max", flags->tau_max, "tau window upper end");
  sub->add_option("--tau-count", flags->tau_count, "tau sample count");
  sub->add_option("--out", flags->out_dir, "output directory override");
  sub->add_option("--seed", flags->seed, "seed override");
  sub->add_option("--threads", flags->threads, "thread count override");
}

RunConfig load_config(const CommonFlags& flags) {
  RunConfig cfg = enclosure::load_run_config(flags.config_path);
  if (!flags.mode.empty()) {
    cfg.mode = enclosure::data_mode_from_string(flags.mode);
  }
  if (flags.tau_min > 0.0) cfg.taus.tau_min = flags.tau_min;
  if (flags.tau_max > 0.0) cfg.taus.tau_max = flags.tau_max;
  if (flags.tau_count > 0) cfg.taus.count = flags.tau_count;
  if (!flags.out_dir.empty()) cfg.out_dir = flags.out_dir;
  if (flags.seed >= 0) cfg.seed = static_cast<unsigned>(flags.seed);
  if (flags.threads > 0) cfg.threads = flags.threads;
  cfg.validate();
#ifdef _OPENMP
  if (cfg.threads > 0) omp_set_num_threads(cfg.threads);
#endif
  std::filesystem::create_directories(cfg.out_dir);
  return cfg;
}

const ObstacleShape& require_obstacle(const RunConfig& cfg) {
  if (!cfg.obstacle) {
    throw enclosure::PreconditionError(
        "this command needs an obstacle in the configuration");
  }
  return *cfg.obstacle;
}

json vec_json(const Vec3& v) { return json::array({v.x(), v.y(), v.z()}); }

json tau_window_json(const RunConfig& cfg) {
  json j;
  j["min"] = cfg.taus.tau_min;
  j["max"] = cfg.taus.tau_max;
  j["count"] = cfg.taus.count;
  j["log"] = cfg.taus.log_spaced;
  return j;
}

void stamp_provenance(json& j, const RunConfig& cfg) {
  j["mode"] = enclosure::to_string(cfg.mode);
  j["tau_window"] = tau_window_json(cfg);
  j["seed"] = cfg.seed;
}

void write_report(const RunConfig& cfg, const std::string& name,
                  const json& j) {
  const std::string path = cfg.out_dir + "/" + name;
  enclosure::write_text_file(path, enclosure::canonical_dump(j) + "\n");
  std::printf("wrote %s\n", path.c_str());
}

// Recording time: configured, or derived from the geometric threshold so
// the reflected signal has a usable tail in the window.
double resolve_T(const RunConfig& cfg) {
  if (cfg.T > 0.0) return cfg.T;
  const ObstacleShape& D = require_obstacle(cfg);
  const enclosure::TimeThresholds th =
      enclosure::t_thresholds(D, cfg.source, cfg.receiver, 0.0);
  return th.rate_extraction + 2.3;
}

// Build the paired (obstacle, free) simulation configs on one shared grid.
std::pair<enclosure::SimulationConfig, enclosure::SimulationConfig>
paired_configs(const RunConfig& cfg) {
  enclosure::SimulationConfig sim;
  sim.h = cfg.h;
  sim.T = resolve_T(cfg);
  sim.cfl = cfg.cfl;
  sim.domain_halfwidth = cfg.domain_halfwidth;
  sim.source = cfg.source;
  sim.receiver = cfg.receiver;
  sim.obstacle = require_obstacle(cfg);
  sim.seed = cfg.seed;
  if (sim.domain_halfwidth <= 0.0) {
    sim.domain_halfwidth = enclosure::causal_halfwidth(sim);
  }
  enclosure::SimulationConfig free_cfg = sim;
  free_cfg.obstacle.reset();
  return {sim, free_cfg};
}

// Check the recording window against the geometric thresholds; hard error
// when the primary reflection cannot be recorded, warning when the scan
// threshold at shift s is marginal.
void check_recording_window(const RunConfig& cfg, double T) {
  const ObstacleShape& D = require_obstacle(cfg);
  const double s = cfg.shift > 0.0 ? cfg.shift : 0.0;
  const enclosure::TimeThresholds th =
      enclosure::t_thresholds(D, cfg.source, cfg.receiver, s);
  if (T < th.rate_extraction) {
    char buf[200];
    std::snprintf(buf, sizeof(buf),
                  "recording time violates the rate-extraction threshold: "
                  "T = %.4g < %.6g = min broken path minus ball radii",
                  T, th.rate_extraction);
    throw enclosure::PreconditionError(buf);
  }
  if (T < th.reflector_scan) {
    std::fprintf(stderr,
                 "warning: T = %.4g is below the worst-case scan threshold "
                 "%.6g at shift s = %.3g; marginal directions are flagged, "
                 "not resolved\n",
                 T, th.reflector_scan, s);
  }
}

enclosure::ReceiverTrace cached_trace(const RunConfig& cfg,
                                      const enclosure::SimulationConfig& sim) {
  namespace fs = std::filesystem;
  fs::create_directories(cfg.out_dir);
  const std::string key = enclosure::content_hash_hex(sim.canonical_json());
  const std::string path = cfg.out_dir + "/trace_" + key + ".bin";
  if (fs::exists(path)) {
    std::printf("reusing cached trace %s\n", path.c_str());
    return enclosure::load_trace(path);
  }
  std::printf("simulating (h = %.4g, T = %.4g, box halfwidth %.4g)...\n",
              sim.h, sim.T, sim.domain_halfwidth);
  const enclosure::ReceiverTrace trace = enclosure::simulate(sim);
  enclosure::save_trace(path, trace);
  std::printf("wrote %s\n", path.c_str());
  return trace;
}

std::pair<enclosure::ReceiverTrace, enclosure::ReceiverTrace> ensure_traces(
    const RunConfig& cfg) {
  auto sims = paired_configs(cfg);
  check_recording_window(cfg, sims.first.T);
  return {cached_trace(cfg, sims.first), cached_trace(cfg, sims.second)};
}

IndicatorCurve compute_indicator(const RunConfig& cfg) {
  const std::vector<double> taus = cfg.taus.values();
  if (cfg.mode == DataMode::semianalytic) {
    return enclosure::semianalytic_indicator(require_obstacle(cfg),
                                             cfg.source, cfg.receiver, taus);
  }
  if (cfg.mode == DataMode::fdtd) {
    auto traces = ensure_traces(cfg);
    return enclosure::fdtd_indicator(traces.first, traces.second, cfg.source,
                                     cfg.receiver, taus);
  }
  throw enclosure::PreconditionError(
      "geometry mode provides no indicator curve; run enclose, scan, or "
      "reconstruct-ball instead, or pick a data mode");
}

struct RateEstimate {
  double kappa = 0.0;  // c - eta - eta'
  double c = 0.0;
  std::optional<enclosure::DecayFit> fit;  // empty in geometry mode
};

RateEstimate estimate_rate(const RunConfig& cfg) {
  RateEstimate out;
  const double radii = cfg.source.radius + cfg.receiver.radius;
  if (cfg.mode == DataMode::geometry) {
    const enclosure::MinBrokenPath mb = enclosure::min_broken_path(
        require_obstacle(cfg), cfg.source.center, cfg.receiver.center);
    out.c = mb.c_min;
    out.kappa = mb.c_min - radii;
    return out;
  }
  const IndicatorCurve curve = compute_indicator(cfg);
  out.fit = enclosure::decay_fit_refined(curve, 4.0);
  out.kappa = out.fit->rate;
  out.c = out.kappa + radii;
  return out;
}

double default_delta_c(const RunConfig& cfg) {
  if (cfg.delta_c > 0.0) return cfg.delta_c;
  switch (cfg.mode) {
    case DataMode::geometry:
      return 5e-4;
    case DataMode::semianalytic:
      return 1e-3;
    case DataMode::fdtd:
      return 2e-2;
  }
  return 1e-3;
}

enclosure::RateProbe make_rate_probe(
    const RunConfig& cfg, double s,
    std::optional<std::pair<enclosure::ReceiverTrace,
                            enclosure::ReceiverTrace>>& traces) {
  const std::vector<double> taus = cfg.taus.values();
  switch (cfg.mode) {
    case DataMode::geometry:
      return enclosure::geometry_rate_probe(require_obstacle(cfg), cfg.source,
                                            cfg.receiver, s);
    case DataMode::semianalytic:
      return enclosure::semianalytic_rate_probe(
          require_obstacle(cfg), cfg.source, cfg.receiver, s, taus);
    case DataMode::fdtd:
      if (!traces) traces = ensure_traces(cfg);
      return enclosure::fdtd_rate_probe(traces->first, traces->second,
                                        cfg.source, cfg.receiver, s, taus);
  }
  throw enclosure::PreconditionError("unknown data mode");
}

struct ScanOutcome {
  enclosure::ScanResult scan;
  Vec3 omega = Vec3::Zero();
  Vec3 q = Vec3::Zero();
  Vec3 normal = Vec3::Zero();
  RateEstimate rate;
};

ScanOutcome run_scan(const RunConfig& cfg,
                     std::optional<std::pair<enclosure::ReceiverTrace,
                                             enclosure::ReceiverTrace>>&
                         traces) {
  if (!(cfg.shift > 0.0)) {
    throw enclosure::PreconditionError(
        "the reflector scan needs a receiver sub-ball shift: set \"shift\" "
        "in (0, receiver radius)");
  }
  ScanOutcome out;
  out.rate = estimate_rate(cfg);

  enclosure::ScanOptions opts;
  opts.c_total = out.rate.c;
  opts.s = cfg.shift;
  opts.omega_level = cfg.omega_level;
  opts.delta_c = default_delta_c(cfg);
  opts.refine_rounds = cfg.mode == DataMode::geometry ? 4 : 2;
  opts.taus = cfg.taus.values();

  const enclosure::RateProbe probe = make_rate_probe(cfg, cfg.shift, traces);
  out.scan = enclosure::scan_reflector(probe, cfg.source, cfg.receiver, opts);

  // Least-squares parabola refinement; two passes for noisy wave data.
  Vec3 omega = out.scan.omega_best;
  if (cfg.mode == DataMode::fdtd) {
    omega = enclosure::refine_direction_quadratic(probe, omega, 0.20);
    omega = enclosure::refine_direction_quadratic(probe, omega, 0.08);
  } else {
    omega = enclosure::refine_direction_quadratic(probe, omega, 0.06);
  }
  out.omega = omega;
  const Vec3 p = cfg.source.center, pp = cfg.receiver.center;
  const enclosure::SpheroidFrame frame(p, pp, out.rate.c);
  out.q = frame.point_from_second_focus(omega);
  out.normal = enclosure::extract_normal(out.q, p, pp);
  return out;
}

json rate_json(const RateEstimate& rate) {
  json j;
  j["kappa"] = rate.kappa;
  j["c"] = rate.c;
  if (rate.fit) {
    j["fit"] = {{"rate", rate.fit->rate},
                {"uncertainty", rate.fit->uncertainty},
                {"window_begin", rate.fit->window_begin},
                {"window_end", rate.fit->window_end},
                {"pointwise_spread", rate.fit->pointwise_spread},
                {"drift", rate.fit->drift}};
  } else {
    j["fit"] = "exact (geometry mode)";
  }
  return j;
}

json scan_json(const ScanOutcome& out) {
  json j;
  j["evaluated"] = out.scan.evaluated;
  j["hits"] = out.scan.hits.size();
  j["delta_c"] = out.scan.delta_c;
  j["clusters"] = json::array();
  for (const auto& rep : out.scan.clusters) {
    j["clusters"].push_back(vec_json(rep));
  }
  j["omega_best"] = vec_json(out.omega);
  j["c_omega_best"] = out.scan.c_omega_best;
  j["q"] = vec_json(out.q);
  j["normal"] = vec_json(out.normal);
  j["rate"] = rate_json(out.rate);
  return j;
}

// ---- subcommand implementations ----

int cmd_simulate(const RunConfig& cfg) {
  if (cfg.mode != DataMode::fdtd) {
    throw enclosure::PreconditionError(
        "simulate needs mode = fdtd (wave data is the only simulated mode)");
  }
  auto sims = paired_configs(cfg);
  check_recording_window(cfg, sims.first.T);
  const enclosure::ReceiverTrace obst = cached_trace(cfg, sims.first);
  const enclosure::ReceiverTrace free_run = cached_trace(cfg, sims.second);

  auto drift = [](const enclosure::ReceiverTrace& t) {
    double worst = 0.0;
    for (const double e : t.energy) {
      if (t.energy.front() > 0.0) {
        worst = std::max(worst, std::fabs(e / t.energy.front() - 1.0));
      }
    }
    return worst;
  };
  const enclosure::CausalityReport caus =
      enclosure::causality_report(obst, cfg.source, 2.0 * cfg.h);

  json j;
  stamp_provenance(j, cfg);
  j["grid"] = {{"h", obst.h},
               {"dt", obst.dt},
               {"T", obst.T},
               {"samples", obst.n_samples},
               {"receivers", obst.n_receivers()}};
  j["energy_drift"] = {{"obstacle", drift(obst)}, {"free", drift(free_run)}};
  j["causality_max_ratio"] = caus.max_ratio;
  j["trace_obstacle"] =
      "trace_" + enclosure::content_hash_hex(sims.first.canonical_json()) +
      ".bin";
  j["trace_free"] =
      "trace_" + enclosure::content_hash_hex(sims.second.canonical_json()) +
      ".bin";
  write_report(cfg, "simulate_report.json", j);
  return 0;
}

int cmd_indicator(const RunConfig& cfg) {
  const IndicatorCurve curve = compute_indicator(cfg);
  const std::string csv_path = cfg.out_dir + "/indicator.csv";
  enclosure::write_indicator_csv(csv_path, curve);
  std::printf("wrote %s\n", csv_path.c_str());

  const enclosure::DecayFit fit = enclosure::decay_fit(curve, 4.0);
  json j = json::parse(enclosure::fit_report_json(fit, curve));
  stamp_provenance(j, cfg);
  write_report(cfg, "indicator_fit.json", j);
  std::printf("decay rate %.6f (+- %.2g), window [%.3f, %.3f]\n", fit.rate,
              fit.uncertainty,
              curve.tau[static_cast<std::size_t>(fit.window_begin)],
              curve.tau[static_cast<std::size_t>(fit.window_end - 1)]);
  return 0;
}

int cmd_enclose(const RunConfig& cfg) {
  const RateEstimate rate = estimate_rate(cfg);
  const Vec3 p = cfg.source.center, pp = cfg.receiver.center;
  const enclosure::SpheroidFrame frame(p, pp, rate.c);

  json j;
  stamp_provenance(j, cfg);
  j["rate"] = rate_json(rate);
  j["spheroid"] = {{"focus_p", vec_json(p)},
                   {"focus_p_prime", vec_json(pp)},
                   {"c", rate.c},
                   {"center", vec_json(frame.center())},
                   {"focal_distance", frame.focal_distance()},
                   {"semi_major", frame.semi_major()},
                   {"semi_minor", frame.semi_minor()}};
  if (cfg.obstacle) {
    const enclosure::TimeThresholds th = enclosure::t_thresholds(
        *cfg.obstacle, cfg.source, cfg.receiver,
        cfg.shift > 0.0 ? cfg.shift : 0.0);
    j["t_thresholds"] = {{"rate_extraction", th.rate_extraction},
                         {"reflector_scan", th.reflector_scan}};
  }
  write_report(cfg, "enclose.json", j);
  std::printf("kappa = %.6f, c = %.6f, spheroid semi-axes %.6f / %.6f\n",
              rate.kappa, rate.c, frame.semi_major(), frame.semi_minor());
  return 0;
}

int cmd_scan(const RunConfig& cfg) {
  std::optional<std::pair<enclosure::ReceiverTrace, enclosure::ReceiverTrace>>
      traces;
  const ScanOutcome out = run_scan(cfg, traces);
  json j;
  stamp_provenance(j, cfg);
  j["shift"] = cfg.shift;
  j["scan"] = scan_json(out);
  write_report(cfg, "scan.json", j);
  std::printf(
      "scan: %zu hits in %zu cluster(s); q = (%.5f, %.5f, %.5f), "
      "normal = (%.5f, %.5f, %.5f)\n",
      out.scan.hits.size(), out.scan.clusters.size(), out.q.x(), out.q.y(),
      out.q.z(), out.normal.x(), out.normal.y(), out.normal.z());
  return 0;
}

std::pair<enclosure::CurvatureExtraction, ScanOutcome> run_curvature(
    const RunConfig& cfg) {
  if (!(cfg.shift > 0.0) || !(cfg.shift2 > 0.0) ||
      cfg.shift == cfg.shift2) {
    throw enclosure::PreconditionError(
        "curvature extraction needs two distinct shifts: set \"shift\" and "
        "\"shift2\" in (0, receiver radius)");
  }
  std::optional<std::pair<enclosure::ReceiverTrace, enclosure::ReceiverTrace>>
      traces;
  const ScanOutcome scan = run_scan(cfg, traces);
  const double s1 = cfg.shift, s2 = cfg.shift2;
  const std::vector<double> taus = cfg.taus.values();

  enclosure::CurvatureExtraction curv;
  switch (cfg.mode) {
    case DataMode::geometry:
      curv = enclosure::curvature_extract_geometry(
          require_obstacle(cfg), scan.q, cfg.source, cfg.receiver, s1, s2);
      break;
    case DataMode::semianalytic: {
      const IndicatorCurve c1 = enclosure::shifted_indicator_semianalytic(
          require_obstacle(cfg), cfg.source, cfg.receiver, scan.omega, s1,
          taus);
      const IndicatorCurve c2 = enclosure::shifted_indicator_semianalytic(
          require_obstacle(cfg), cfg.source, cfg.receiver, scan.omega, s2,
          taus);
      curv = enclosure::curvature_extract_curves(
          c1, c2, scan.q, cfg.source, cfg.receiver, scan.rate.kappa, s1, s2);
      break;
    }
    case DataMode::fdtd: {
      if (!traces) traces = ensure_traces(cfg);
      const IndicatorCurve c1 = enclosure::shifted_indicator_fdtd(
          traces->first, traces->second, cfg.source, cfg.receiver, scan.omega,
          s1, taus);
      const IndicatorCurve c2 = enclosure::shifted_indicator_fdtd(
          traces->first, traces->second, cfg.source, cfg.receiver, scan.omega,
          s2, taus);
      curv = enclosure::curvature_extract_curves(
          c1, c2, scan.q, cfg.source, cfg.receiver, scan.rate.kappa, s1, s2);
      break;
    }
  }
  return {curv, scan};
}

json curvature_json(const enclosure::CurvatureExtraction& curv) {
  json j;
  j["det1"] = curv.det1;
  j["det2"] = curv.det2;
  j["X1"] = curv.X1;
  j["gauss"] = curv.K;
  j["cond"] = curv.cond;
  return j;
}

int cmd_curvature(const RunConfig& cfg) {
  auto [curv, scan] = run_curvature(cfg);
  json j;
  stamp_provenance(j, cfg);
  j["shifts"] = {cfg.shift, cfg.shift2};
  j["q"] = vec_json(scan.q);
  j["normal"] = vec_json(scan.normal);
  j["curvature"] = curvature_json(curv);
  write_report(cfg, "curvature.json", j);
  std::printf("dets %.6f / %.6f -> X1 = %.6f, Gauss curvature K = %.6f\n",
              curv.det1, curv.det2, curv.X1, curv.K);
  return 0;
}

int cmd_reconstruct_ball(const RunConfig& cfg) {
  auto [curv, scan] = run_curvature(cfg);
  const enclosure::BallReconstruction ball = enclosure::reconstruct_ball(
      scan.q, scan.normal, curv, scan.rate.c, scan.rate.kappa);
  json j;
  stamp_provenance(j, cfg);
  j["q"] = vec_json(ball.q);
  j["normal"] = vec_json(ball.normal);
  j["center"] = vec_json(ball.center);
  j["radius"] = ball.radius;
  j["c"] = ball.c;
  j["kappa"] = ball.kappa;
  j["curvature"] = curvature_json(curv);
  write_report(cfg, "ball.json", j);
  std::printf("recovered ball: center (%.5f, %.5f, %.5f), radius %.5f\n",
              ball.center.x(), ball.center.y(), ball.center.z(),
              ball.radius);
  return 0;
}

int cmd_principal(const RunConfig& cfg) {
  if (!(cfg.shift > 0.0) || !(cfg.shift2 > 0.0) ||
      cfg.shift == cfg.shift2) {
    throw enclosure::PreconditionError(
        "the rotation scan needs two distinct shifts: set \"shift\" and "
        "\"shift2\" in (0, receiver radius)");
  }
  std::optional<std::pair<enclosure::ReceiverTrace, enclosure::ReceiverTrace>>
      traces;
  const ScanOutcome scan = run_scan(cfg, traces);

  enclosure::X1Probe probe;
  switch (cfg.mode) {
    case DataMode::geometry:
      probe = enclosure::geometry_x1_probe(require_obstacle(cfg), scan.q,
                                           cfg.source, cfg.receiver,
                                           cfg.shift, cfg.shift2);
      break;
    case DataMode::semianalytic:
      probe = enclosure::semianalytic_x1_probe(
          require_obstacle(cfg), scan.q, cfg.source, cfg.receiver, cfg.shift,
          cfg.shift2, cfg.taus.values());
      break;
    case DataMode::fdtd:
      throw enclosure::PreconditionError(
          "the rotation scan needs re-aimed source pairs, which wave traces "
          "for one pair cannot provide; use geometry or semianalytic mode");
  }
  const enclosure::PrincipalResult pr = enclosure::principal_directions(
      probe, scan.q, cfg.source.center, cfg.receiver.center,
      static_cast<int>(cfg.theta_count));

  json j;
  stamp_provenance(j, cfg);
  j["q"] = vec_json(scan.q);
  j["H"] = pr.H;
  j["k1"] = pr.k1;
  j["k2"] = pr.k2;
  j["dir1"] = vec_json(pr.dir1);
  j["dir2"] = vec_json(pr.dir2);
  j["isotropic"] = pr.isotropic;
  j["fourier"] = {{"A0", pr.A0}, {"A2", pr.A2}, {"B2", pr.B2}};
  j["theta"] = pr.theta;
  j["X1"] = pr.X1;
  write_report(cfg, "principal.json", j);
  if (pr.isotropic) {
    std::printf("isotropic contact: H = %.6f\n", pr.H);
  } else {
    std::printf("principal curvatures %.6f / %.6f, H = %.6f\n", pr.k1, pr.k2,
                pr.H);
  }
  return 0;
}

int cmd_verify(const std::string& out_dir, const std::string& work_dir,
               std::vector<int> criteria) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);
  const std::string cache =
      work_dir.empty() ? out_dir + "/verify-cache" : work_dir;

  if (criteria.empty()) {
    for (int i = 1; i <= enclosure::criterion_count(); ++i) {
      criteria.push_back(i);
    }
  }
  std::vector<enclosure::CriterionResult> results;
  std::printf(" #  %-24s result\n", "criterion");
  std::printf("--- ------------------------ ------\n");
  for (const int idx : criteria) {
    const enclosure::CriterionResult r = enclosure::run_criterion(idx, cache);
    std::printf("%2d  %-24s %s\n    %s\n", r.index, r.name.c_str(),
                r.pass ? "PASS" : "FAIL", r.detail.c_str());
    std::fflush(stdout);
    results.push_back(r);
  }
  const std::string report = enclosure::verify_report_json(results);
  enclosure::write_text_file(out_dir + "/verify_report.json", report + "\n");
  std::printf("wrote %s/verify_report.json\n", out_dir.c_str());

  int failed = 0;
  for (const auto& r : results) {
    if (!r.pass) ++failed;
  }
  const json rep = json::parse(report);
  if (rep.contains("determinant_variant_resolution")) {
    std::printf("determinant variant resolution: %s\n",
                rep["determinant_variant_resolution"]
                    .get<std::string>()
                    .c_str());
  }
  std::printf("overall: %s (%zu/%zu)\n", failed == 0 ? "PASS" : "FAIL",
              results.size() - static_cast<std::size_t>(failed),
              results.size());
  return failed == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Time-domain enclosure method for inverse acoustic obstacle "
      "scattering: wave simulation, indicator analysis, and geometry "
      "recovery from bistatic data"};
  app.require_subcommand(1);

  CommonFlags flags;
  auto* simulate = app.add_subcommand(
      "simulate", "run the paired obstacle/free wave simulations");
  auto* indicator = app.add_subcommand(
      "indicator", "compute the indicator curve I(tau) and its decay fit");
  auto* enclose = app.add_subcommand(
      "enclose", "estimate c and the enclosing spheroid parameters");
  auto* scan = app.add_subcommand(
      "scan", "direction scan for the first reflection point");
  auto* curvature = app.add_subcommand(
      "curvature", "two-shift curvature extraction at the contact point");
  auto* reconstruct = app.add_subcommand(
      "reconstruct-ball", "full pipeline: recover a spherical obstacle");
  auto* principal = app.add_subcommand(
      "principal", "rotation scan for principal curvatures and directions");
  for (CLI::App* sub : {simulate, indicator, enclose, scan, curvature,
                        reconstruct, principal}) {
    add_common_flags(sub, &flags);
  }

  auto* verify = app.add_subcommand(
      "verify", "run the cross-validation suite (oracle checks)");
  std::string verify_out = "out";
  std::string verify_work;
  std::vector<int> verify_criteria;
  verify->add_option("--out", verify_out, "report output directory");
  verify->add_option("--work-dir", verify_work,
                     "cache directory for wave traces");
  verify->add_option("--criterion", verify_criteria,
                     "run only these criteria (1-15; repeatable)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (verify->parsed()) {
      return cmd_verify(verify_out, verify_work, verify_criteria);
    }
    const RunConfig cfg = load_config(flags);
    if (simulate->parsed()) return cmd_simulate(cfg);
    if (indicator->parsed()) return cmd_indicator(cfg);
    if (enclose->parsed()) return cmd_enclose(cfg);
    if (scan->parsed()) return cmd_scan(cfg);
    if (curvature->parsed()) return cmd_curvature(cfg);
    if (reconstruct->parsed()) return cmd_reconstruct_ball(cfg);
    if (principal->parsed()) return cmd_principal(cfg);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 0;
}
