// pybind11 module exposing the main enclosure-method operations: shapes,
// broken-path geometry, indicator curves (semi-analytic and FDTD), decay
// fits, reflector scans, curvature extraction, and ball reconstruction.

#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "enclosure/config.hpp"
#include "enclosure/geometry.hpp"
#include "enclosure/indicator.hpp"
#include "enclosure/obstacle.hpp"
#include "enclosure/potentials.hpp"
#include "enclosure/probe.hpp"
#include "enclosure/types.hpp"
#include "enclosure/verify.hpp"
#include "enclosure/wavesim.hpp"

namespace py = pybind11;
using namespace enclosure;

PYBIND11_MODULE(_core, m) {
  m.doc() =
      "Time-domain enclosure method for inverse acoustic obstacle "
      "scattering (bistatic data)";

  py::register_exception<PreconditionError>(m, "PreconditionError",
                                            PyExc_ValueError);
  py::register_exception<NumericError>(m, "NumericError",
                                       PyExc_ArithmeticError);

  py::class_<Ball>(m, "Ball")
      .def(py::init<>())
      .def(py::init([](const Vec3& center, double radius) {
             Ball b;
             b.center = center;
             b.radius = radius;
             return b;
           }),
           py::arg("center"), py::arg("radius"))
      .def_readwrite("center", &Ball::center)
      .def_readwrite("radius", &Ball::radius)
      .def("__repr__", [](const Ball& b) {
        char buf[120];
        std::snprintf(buf, sizeof(buf), "Ball(center=(%g, %g, %g), radius=%g)",
                      b.center.x(), b.center.y(), b.center.z(), b.radius);
        return std::string(buf);
      });

  py::class_<ObstacleShape>(m, "ObstacleShape")
      .def_static("sphere", &ObstacleShape::make_sphere, py::arg("center"),
                  py::arg("radius"))
      .def_static("ellipsoid", &ObstacleShape::make_ellipsoid,
                  py::arg("center"), py::arg("semiaxes"),
                  py::arg("orientation") = Mat3(Mat3::Identity()))
      .def_static(
          "mesh_sphere",
          [](const Vec3& center, double radius, int level) {
            return ObstacleShape::make_mesh(
                make_sphere_mesh(center, radius, level));
          },
          py::arg("center"), py::arg("radius"), py::arg("level"))
      .def("contains", &ObstacleShape::contains)
      .def("project", &ObstacleShape::project)
      .def("outward_normal", &ObstacleShape::outward_normal)
      .def("surface_distance", &ObstacleShape::surface_distance)
      .def_property_readonly("volume", &ObstacleShape::volume)
      .def_property_readonly("diameter", &ObstacleShape::diameter)
      .def("curvature_at", [](const ObstacleShape& D, const Vec3& q) {
        const auto info = D.curvature_at(q);
        return py::make_tuple(info.gauss, info.mean);
      });

  py::class_<SpheroidFrame>(m, "SpheroidFrame")
      .def(py::init<const Vec3&, const Vec3&, double>(), py::arg("p"),
           py::arg("p_prime"), py::arg("c"))
      .def_property_readonly("center", &SpheroidFrame::center)
      .def_property_readonly("focal_distance", &SpheroidFrame::focal_distance)
      .def_property_readonly("semi_major", &SpheroidFrame::semi_major)
      .def_property_readonly("semi_minor", &SpheroidFrame::semi_minor)
      .def("point_from_second_focus", &SpheroidFrame::point_from_second_focus,
           py::arg("omega"));

  py::class_<Reflector>(m, "Reflector")
      .def_readonly("q", &Reflector::q)
      .def_readonly("nu", &Reflector::nu)
      .def_readonly("phi", &Reflector::phi);

  py::class_<MinBrokenPath>(m, "MinBrokenPath")
      .def_readonly("c_min", &MinBrokenPath::c_min)
      .def_property_readonly("reflectors", [](const MinBrokenPath& mb) {
        return mb.reflectors.points;
      });

  m.def("min_broken_path", &min_broken_path, py::arg("obstacle"),
        py::arg("p"), py::arg("p_prime"), py::arg("level") = 5,
        "Global minimum of |p-x| + |x-p'| over the obstacle boundary, with "
        "the attaining reflectors");
  m.def("min_over_triple_surfaces", &min_over_triple_surfaces,
        py::arg("obstacle"), py::arg("source"), py::arg("receiver"),
        py::arg("level") = 5);

  py::class_<TimeThresholds>(m, "TimeThresholds")
      .def_readonly("rate_extraction", &TimeThresholds::rate_extraction)
      .def_readonly("reflector_scan", &TimeThresholds::reflector_scan);
  m.def("t_thresholds", &t_thresholds, py::arg("obstacle"), py::arg("source"),
        py::arg("receiver"), py::arg("shift") = 0.0,
        py::arg("omega_level") = 4);

  py::class_<LogScaled>(m, "LogScaled")
      .def_readonly("log_abs", &LogScaled::log_abs)
      .def_readonly("sign", &LogScaled::sign)
      .def("value", &LogScaled::value)
      .def("__float__", &LogScaled::value);

  py::class_<IndicatorCurve>(m, "IndicatorCurve")
      .def_readonly("tau", &IndicatorCurve::tau)
      .def_readonly("noise_floor", &IndicatorCurve::noise_floor)
      .def_readonly("source", &IndicatorCurve::source)
      .def_property_readonly("values",
                             [](const IndicatorCurve& c) {
                               std::vector<double> out;
                               out.reserve(c.value.size());
                               for (const auto& v : c.value) {
                                 out.push_back(v.value());
                               }
                               return out;
                             })
      .def_property_readonly("log_abs", [](const IndicatorCurve& c) {
        std::vector<double> out;
        out.reserve(c.value.size());
        for (const auto& v : c.value) out.push_back(v.log_abs);
        return out;
      });

  m.def(
      "semianalytic_indicator",
      [](const ObstacleShape& D, const Ball& B, const Ball& Bp,
         const std::vector<double>& taus, double rel_tol) {
        JOptions opts;
        opts.rel_tol = rel_tol;
        return semianalytic_indicator(D, B, Bp, taus, opts);
      },
      py::arg("obstacle"), py::arg("source"), py::arg("receiver"),
      py::arg("taus"), py::arg("rel_tol") = 1e-5,
      "Indicator I(tau) from the boundary representation of the "
      "reflected-wave functional (closed data route)");

  py::class_<DecayFit>(m, "DecayFit")
      .def_readonly("rate", &DecayFit::rate)
      .def_readonly("uncertainty", &DecayFit::uncertainty)
      .def_readonly("intercept", &DecayFit::intercept)
      .def_readonly("window_begin", &DecayFit::window_begin)
      .def_readonly("window_end", &DecayFit::window_end)
      .def_readonly("pointwise_spread", &DecayFit::pointwise_spread)
      .def_readonly("drift", &DecayFit::drift);
  m.def("decay_fit", &decay_fit, py::arg("curve"),
        py::arg("prefactor_power") = 0.0);
  m.def("decay_fit_refined", &decay_fit_refined, py::arg("curve"),
        py::arg("prefactor_power") = 0.0);

  py::class_<ScaledLimit>(m, "ScaledLimit")
      .def_readonly("estimate", &ScaledLimit::estimate)
      .def_readonly("extrapolated", &ScaledLimit::extrapolated)
      .def_readonly("plateau_found", &ScaledLimit::plateau_found)
      .def_readonly("diverging", &ScaledLimit::diverging);
  m.def("scaled_limit", &scaled_limit, py::arg("curve"), py::arg("kappa"),
        py::arg("prefactor_power") = 4.0);

  py::enum_<AsymptoticKind>(m, "AsymptoticKind")
      .value("reflection_sum", AsymptoticKind::reflection_sum)
      .value("scaled_indicator", AsymptoticKind::scaled_indicator)
      .value("monostatic", AsymptoticKind::monostatic)
      .value("shifted", AsymptoticKind::shifted);
  m.def("asymptotic_rhs", &asymptotic_rhs, py::arg("kind"),
        py::arg("obstacle"), py::arg("source"), py::arg("receiver"),
        py::arg("shift") = 0.0,
        "Predicted limit of the scaled indicator from the reflector "
        "geometry (curvature determinant formula)");

  // ---- wave simulation ----
  py::class_<SimulationConfig>(m, "SimulationConfig")
      .def(py::init<>())
      .def_readwrite("h", &SimulationConfig::h)
      .def_readwrite("T", &SimulationConfig::T)
      .def_readwrite("cfl", &SimulationConfig::cfl)
      .def_readwrite("domain_halfwidth", &SimulationConfig::domain_halfwidth)
      .def_readwrite("source", &SimulationConfig::source)
      .def_readwrite("receiver", &SimulationConfig::receiver)
      .def_readwrite("obstacle", &SimulationConfig::obstacle)
      .def_readwrite("seed", &SimulationConfig::seed)
      .def("canonical_json", &SimulationConfig::canonical_json);
  m.def("causal_halfwidth", &causal_halfwidth, py::arg("config"));

  py::class_<ReceiverTrace>(m, "ReceiverTrace")
      .def_readonly("dt", &ReceiverTrace::dt)
      .def_readonly("h", &ReceiverTrace::h)
      .def_readonly("T", &ReceiverTrace::T)
      .def_readonly("n_samples", &ReceiverTrace::n_samples)
      .def_property_readonly("n_receivers", &ReceiverTrace::n_receivers)
      .def_readonly("peak", &ReceiverTrace::peak)
      .def_readonly("energy", &ReceiverTrace::energy);
  m.def("simulate", &simulate, py::arg("config"),
        "Leapfrog FDTD solve of u_tt = Laplace(u), u(0) = 0, u_t(0) = "
        "chi_B, homogeneous Dirichlet on the obstacle boundary");
  m.def("save_trace", &save_trace, py::arg("path"), py::arg("trace"));
  m.def("load_trace", &load_trace, py::arg("path"));
  m.def("fdtd_indicator", &fdtd_indicator, py::arg("obstacle_run"),
        py::arg("free_run"), py::arg("source"), py::arg("receiver"),
        py::arg("taus"));

  // ---- reflector scan / curvature / reconstruction ----
  py::class_<ScanOptions>(m, "ScanOptions")
      .def(py::init<>())
      .def_readwrite("c_total", &ScanOptions::c_total)
      .def_readwrite("s", &ScanOptions::s)
      .def_readwrite("omega_level", &ScanOptions::omega_level)
      .def_readwrite("delta_c", &ScanOptions::delta_c)
      .def_readwrite("refine_rounds", &ScanOptions::refine_rounds)
      .def_readwrite("taus", &ScanOptions::taus);

  py::class_<ScanHit>(m, "ScanHit")
      .def_readonly("omega", &ScanHit::omega)
      .def_readonly("c_omega", &ScanHit::c_omega)
      .def_readonly("q", &ScanHit::q);

  py::class_<ScanResult>(m, "ScanResult")
      .def_readonly("hits", &ScanResult::hits)
      .def_readonly("clusters", &ScanResult::clusters)
      .def_readonly("omega_best", &ScanResult::omega_best)
      .def_readonly("c_omega_best", &ScanResult::c_omega_best)
      .def_readonly("q", &ScanResult::q)
      .def_readonly("delta_c", &ScanResult::delta_c)
      .def_readonly("evaluated", &ScanResult::evaluated);

  m.def("geometry_rate_probe", &geometry_rate_probe, py::arg("obstacle"),
        py::arg("source"), py::arg("receiver"), py::arg("shift"));
  m.def(
      "semianalytic_rate_probe",
      [](const ObstacleShape& D, const Ball& B, const Ball& Bp, double s,
         const std::vector<double>& taus) {
        return semianalytic_rate_probe(D, B, Bp, s, taus);
      },
      py::arg("obstacle"), py::arg("source"), py::arg("receiver"),
      py::arg("shift"), py::arg("taus"));
  m.def("fdtd_rate_probe", &fdtd_rate_probe, py::arg("obstacle_run"),
        py::arg("free_run"), py::arg("source"), py::arg("receiver"),
        py::arg("shift"), py::arg("taus"));
  m.def("scan_reflector", &scan_reflector, py::arg("probe"),
        py::arg("source"), py::arg("receiver"), py::arg("options"));
  m.def("refine_direction_quadratic", &refine_direction_quadratic,
        py::arg("probe"), py::arg("omega"), py::arg("halfwidth"),
        py::arg("grid") = 5);
  m.def("extract_normal", &extract_normal, py::arg("q"), py::arg("p"),
        py::arg("p_prime"),
        "Outward obstacle normal at the contact point (inward spheroid "
        "normal, bisector of the two focal rays)");

  py::class_<CurvatureExtraction>(m, "CurvatureExtraction")
      .def_readonly("det1", &CurvatureExtraction::det1)
      .def_readonly("det2", &CurvatureExtraction::det2)
      .def_readonly("X1", &CurvatureExtraction::X1)
      .def_readonly("K", &CurvatureExtraction::K)
      .def_readonly("cond", &CurvatureExtraction::cond);
  m.def("curvature_extract_geometry", &curvature_extract_geometry,
        py::arg("obstacle"), py::arg("q"), py::arg("source"),
        py::arg("receiver"), py::arg("s1"), py::arg("s2"));
  m.def("curvature_extract_curves", &curvature_extract_curves,
        py::arg("curve1"), py::arg("curve2"), py::arg("q"), py::arg("source"),
        py::arg("receiver"), py::arg("kappa"), py::arg("s1"), py::arg("s2"));
  m.def(
      "shifted_indicator_semianalytic",
      [](const ObstacleShape& D, const Ball& B, const Ball& Bp,
         const Vec3& omega, double s, const std::vector<double>& taus) {
        return shifted_indicator_semianalytic(D, B, Bp, omega, s, taus);
      },
      py::arg("obstacle"), py::arg("source"), py::arg("receiver"),
      py::arg("omega"), py::arg("shift"), py::arg("taus"));
  m.def("shifted_indicator_fdtd", &shifted_indicator_fdtd,
        py::arg("obstacle_run"), py::arg("free_run"), py::arg("source"),
        py::arg("receiver"), py::arg("omega"), py::arg("shift"),
        py::arg("taus"));

  py::class_<BallReconstruction>(m, "BallReconstruction")
      .def_readonly("q", &BallReconstruction::q)
      .def_readonly("normal", &BallReconstruction::normal)
      .def_readonly("radius", &BallReconstruction::radius)
      .def_readonly("center", &BallReconstruction::center)
      .def_readonly("c", &BallReconstruction::c)
      .def_readonly("kappa", &BallReconstruction::kappa);
  m.def("reconstruct_ball", &reconstruct_ball, py::arg("q"),
        py::arg("normal"), py::arg("curvature"), py::arg("c"),
        py::arg("kappa"));

  py::class_<PrincipalResult>(m, "PrincipalResult")
      .def_readonly("H", &PrincipalResult::H)
      .def_readonly("k1", &PrincipalResult::k1)
      .def_readonly("k2", &PrincipalResult::k2)
      .def_readonly("dir1", &PrincipalResult::dir1)
      .def_readonly("dir2", &PrincipalResult::dir2)
      .def_readonly("isotropic", &PrincipalResult::isotropic)
      .def_readonly("theta", &PrincipalResult::theta)
      .def_readonly("X1", &PrincipalResult::X1);
  m.def("principal_directions", &principal_directions, py::arg("probe"),
        py::arg("q"), py::arg("p"), py::arg("p_prime"),
        py::arg("theta_count") = 16, py::arg("isotropy_tol") = 0.02);
  m.def("geometry_x1_probe", &geometry_x1_probe, py::arg("obstacle"),
        py::arg("q"), py::arg("source"), py::arg("receiver"), py::arg("s1"),
        py::arg("s2"));
  m.def(
      "semianalytic_x1_probe",
      [](const ObstacleShape& D, const Vec3& q, const Ball& B, const Ball& Bp,
         double s1, double s2, const std::vector<double>& taus) {
        return semianalytic_x1_probe(D, q, B, Bp, s1, s2, taus);
      },
      py::arg("obstacle"), py::arg("q"), py::arg("source"),
      py::arg("receiver"), py::arg("s1"), py::arg("s2"), py::arg("taus"));

  // ---- verification suite ----
  py::class_<CriterionResult>(m, "CriterionResult")
      .def_readonly("index", &CriterionResult::index)
      .def_readonly("name", &CriterionResult::name)
      .def_readonly("pass_", &CriterionResult::pass)
      .def_readonly("detail", &CriterionResult::detail)
      .def_readonly("data_json", &CriterionResult::data_json);
  m.def("criterion_count", &criterion_count);
  m.def("criterion_name", &criterion_name, py::arg("index"));
  m.def("run_criterion", &run_criterion, py::arg("index"),
        py::arg("work_dir"));

#ifdef VERSION_INFO
#define STRINGIFY(x) #x
#define MACRO_STRINGIFY(x) STRINGIFY(x)
  m.attr("__version__") = MACRO_STRINGIFY(VERSION_INFO);
#else
  m.attr("__version__") = "dev";
#endif
}
