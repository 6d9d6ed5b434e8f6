#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "hcm/analytic.hpp"
#include "hcm/config.hpp"
#include "hcm/engine.hpp"
#include "hcm/errors.hpp"
#include "hcm/filter.hpp"
#include "hcm/gaussian.hpp"
#include "hcm/output.hpp"

namespace py = pybind11;
using namespace hcm;

PYBIND11_MODULE(_hcm, m) {
  m.doc() = "Heralded hybrid linear amplifier cloning machine: phase-space "
            "algebra, analytic oracle and Monte Carlo engine.";
  m.attr("__version__") = kToolVersion;

  py::register_exception<RegimeError>(m, "RegimeError", PyExc_ValueError);
  py::register_exception<CalibrationError>(m, "CalibrationError", PyExc_RuntimeError);
  py::register_exception<NumericError>(m, "NumericError", PyExc_RuntimeError);
  py::register_exception<InsufficientDataError>(m, "InsufficientDataError",
                                                PyExc_RuntimeError);
  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);

  // phase-space core
  py::class_<Quadratures>(m, "Quadratures")
      .def(py::init<double, double>(), py::arg("x") = 0.0, py::arg("p") = 0.0)
      .def_readwrite("x", &Quadratures::x)
      .def_readwrite("p", &Quadratures::p)
      .def("__repr__", [](const Quadratures& q) {
        return "Quadratures(x=" + std::to_string(q.x) + ", p=" + std::to_string(q.p) + ")";
      });

  py::class_<Cov2>(m, "Cov2")
      .def(py::init<double, double, double>(), py::arg("xx") = 1.0,
           py::arg("xp") = 0.0, py::arg("pp") = 1.0)
      .def_readwrite("xx", &Cov2::xx)
      .def_readwrite("xp", &Cov2::xp)
      .def_readwrite("pp", &Cov2::pp)
      .def("det", &Cov2::det);

  py::class_<GaussianState>(m, "GaussianState")
      .def(py::init<>())
      .def_readwrite("mean", &GaussianState::mean)
      .def_readwrite("cov", &GaussianState::cov);

  py::class_<WignerGrid>(m, "WignerGrid")
      .def_readonly("x_axis", &WignerGrid::x_axis)
      .def_readonly("p_axis", &WignerGrid::p_axis)
      .def_readonly("values", &WignerGrid::values)
      .def("at", &WignerGrid::at);

  m.def("coherent", &coherent, py::arg("alpha_re"), py::arg("alpha_im"));
  m.def("vacuum", &vacuum);
  m.def("beamsplitter_pair", &beamsplitter_pair, py::arg("a"), py::arg("b"),
        py::arg("transmission"));
  m.def("loss_channel", &loss_channel, py::arg("state"), py::arg("eta"));
  m.def("displace", &displace, py::arg("state"), py::arg("dx"), py::arg("dp"));
  m.def("fidelity_gaussian", &fidelity_gaussian, py::arg("rho_i"), py::arg("rho_o"));
  m.def("wigner", &wigner, py::arg("state"), py::arg("x_axis"), py::arg("p_axis"));
  m.def("linspace", &linspace);

  // analytic oracle
  py::class_<GainSet>(m, "GainSet")
      .def_readonly("g_dla", &GainSet::g_dla)
      .def_readonly("g_nla", &GainSet::g_nla)
      .def_readonly("g_nla_prime", &GainSet::g_nla_prime)
      .def_readonly("g_xp", &GainSet::g_xp)
      .def_readonly("g_total", &GainSet::g_total)
      .def_readonly("t_s", &GainSet::t_s)
      .def_readonly("n_clones", &GainSet::n_clones)
      .def("lambda_ff", &GainSet::lambda_ff);

  py::class_<CloneMoments>(m, "CloneMoments")
      .def_readonly("mean", &CloneMoments::mean)
      .def_readonly("variance_x", &CloneMoments::variance_x)
      .def_readonly("variance_p", &CloneMoments::variance_p)
      .def_readonly("n_clones", &CloneMoments::n_clones);

  m.def("derive_gains", &derive_gains, py::arg("n_clones"), py::arg("t_s"));
  m.def("clone_moments_ideal", &clone_moments_ideal, py::arg("gains"),
        py::arg("alpha_in"));
  m.def("equivalent_concatenation_moments", &equivalent_concatenation_moments,
        py::arg("gains"), py::arg("alpha_in"));
  m.def("fidelity_unity", &fidelity_unity, py::arg("n_clones"), py::arg("t_s"));
  m.def("fidelity_nonunity", &fidelity_nonunity, py::arg("n_clones"),
        py::arg("g_dla"), py::arg("g_total"), py::arg("alpha_in"));
  m.def("no_cloning_limit", &no_cloning_limit, py::arg("n_clones"));
  m.def("fidelity_max", &fidelity_max, py::arg("n_clones"));

  // heralding filter
  py::enum_<CutoffGeometry>(m, "CutoffGeometry")
      .value("RADIAL", CutoffGeometry::kRadial)
      .value("RECT", CutoffGeometry::kRect);

  py::class_<HeraldingFilter>(m, "HeraldingFilter")
      .def_readonly("g_prime", &HeraldingFilter::g_prime)
      .def_readonly("cutoff", &HeraldingFilter::cutoff)
      .def_readonly("cutoff_re", &HeraldingFilter::cutoff_re)
      .def_readonly("cutoff_im", &HeraldingFilter::cutoff_im)
      .def_readonly("geometry", &HeraldingFilter::geometry)
      .def("norm_m", &HeraldingFilter::norm_m)
      .def("log_norm", &HeraldingFilter::log_norm)
      .def("inside", &HeraldingFilter::inside);

  m.def("make_filter", &make_filter, py::arg("g_prime"), py::arg("cutoff"),
        py::arg("geometry") = CutoffGeometry::kRadial);
  m.def("make_filter_from_rule", &make_filter_from_rule, py::arg("g_prime"),
        py::arg("alpha_max"), py::arg("beta"),
        py::arg("geometry") = CutoffGeometry::kRadial);
  m.def("choose_cutoff", &choose_cutoff, py::arg("g_prime"), py::arg("alpha_max"),
        py::arg("beta"));
  m.def("acceptance_probability", &acceptance_probability, py::arg("filter"),
        py::arg("alpha_m"));
  m.def("herald", &herald, py::arg("filter"), py::arg("alpha_m"), py::arg("u"));

  py::class_<CutoffRule>(m, "CutoffRule")
      .def(py::init([](double beta, std::complex<double> alpha_max,
                       CutoffGeometry geometry) {
             return CutoffRule{beta, alpha_max, geometry};
           }),
           py::arg("beta") = 3.0, py::arg("alpha_max") = std::complex<double>(0.0, 0.0),
           py::arg("geometry") = CutoffGeometry::kRadial)
      .def_readwrite("beta", &CutoffRule::beta)
      .def_readwrite("alpha_max", &CutoffRule::alpha_max)
      .def_readwrite("geometry", &CutoffRule::geometry);

  m.def("calibrate_gain", &calibrate_gain, py::arg("n_clones"), py::arg("t_s"),
        py::arg("eta_dh"), py::arg("rule"), py::arg("alpha_ref"));

  py::class_<FilterMoments>(m, "FilterMoments")
      .def_readonly("probability", &FilterMoments::probability)
      .def_readonly("mean", &FilterMoments::mean)
      .def_readonly("var_re", &FilterMoments::var_re)
      .def_readonly("var_im", &FilterMoments::var_im)
      .def_readonly("cov", &FilterMoments::cov);

  m.def("postfilter_moments", &postfilter_moments, py::arg("alpha0"), py::arg("filter"));
  m.def("success_probability", &success_probability, py::arg("alpha0"),
        py::arg("filter"));

  py::class_<RunPrediction>(m, "RunPrediction")
      .def_readonly("acceptance", &RunPrediction::acceptance)
      .def_readonly("mean_x", &RunPrediction::mean_x)
      .def_readonly("mean_p", &RunPrediction::mean_p)
      .def_readonly("var_x", &RunPrediction::var_x)
      .def_readonly("var_p", &RunPrediction::var_p)
      .def_readonly("fidelity", &RunPrediction::fidelity);

  m.def("predict_run", &predict_run, py::arg("gains"), py::arg("alpha_in"),
        py::arg("eta_dh"), py::arg("filter"), py::arg("port_transmission"));

  // monte carlo engine
  py::class_<FilterSpec>(m, "FilterSpec")
      .def(py::init<>())
      .def_readwrite("g_prime", &FilterSpec::g_prime)
      .def_readwrite("beta", &FilterSpec::beta)
      .def_readwrite("geometry", &FilterSpec::geometry);

  py::class_<HcmConfig>(m, "HcmConfig")
      .def(py::init<>())
      .def_readwrite("n_clones", &HcmConfig::n_clones)
      .def_readwrite("t_s", &HcmConfig::t_s)
      .def_readwrite("alpha_in", &HcmConfig::alpha_in)
      .def_readwrite("filter", &HcmConfig::filter)
      .def_readwrite("eta_dh", &HcmConfig::eta_dh)
      .def_readwrite("eta_input", &HcmConfig::eta_input)
      .def_readwrite("eta_verify", &HcmConfig::eta_verify)
      .def_readwrite("port_transmissions", &HcmConfig::port_transmissions)
      .def_readwrite("shots", &HcmConfig::shots)
      .def_readwrite("seed", &HcmConfig::seed)
      .def("validate", &HcmConfig::validate);

  m.def("config_from_json", [](const std::string& text) {
    return config_from_json(nlohmann::json::parse(text));
  });

  py::class_<ResolvedRun>(m, "ResolvedRun")
      .def_readonly("cfg", &ResolvedRun::cfg)
      .def_readonly("gains", &ResolvedRun::gains)
      .def_readonly("filter", &ResolvedRun::filter)
      .def_readonly("calibrated", &ResolvedRun::calibrated);

  m.def("resolve", &resolve, py::arg("config"));

  py::class_<CloneStatistics::PerClone>(m, "PerCloneStatistics")
      .def_readonly("count_x", &CloneStatistics::PerClone::count_x)
      .def_readonly("count_p", &CloneStatistics::PerClone::count_p)
      .def_readonly("mean_x", &CloneStatistics::PerClone::mean_x)
      .def_readonly("mean_p", &CloneStatistics::PerClone::mean_p)
      .def_readonly("var_x", &CloneStatistics::PerClone::var_x)
      .def_readonly("var_p", &CloneStatistics::PerClone::var_p)
      .def_readonly("mean_x_raw", &CloneStatistics::PerClone::mean_x_raw)
      .def_readonly("var_x_raw", &CloneStatistics::PerClone::var_x_raw)
      .def_readonly("mean_p_raw", &CloneStatistics::PerClone::mean_p_raw)
      .def_readonly("var_p_raw", &CloneStatistics::PerClone::var_p_raw);

  py::class_<CloneStatistics>(m, "CloneStatistics")
      .def_readonly("clones", &CloneStatistics::clones)
      .def_readonly("total_shots", &CloneStatistics::total_shots)
      .def_readonly("acceptance_count", &CloneStatistics::acceptance_count)
      .def("acceptance_rate", &CloneStatistics::acceptance_rate)
      .def("containment", &CloneStatistics::containment);

  py::class_<FidelityEstimate>(m, "FidelityEstimate")
      .def_readonly("value", &FidelityEstimate::value)
      .def_readonly("std_dev", &FidelityEstimate::std_dev)
      .def_readonly("n_samples", &FidelityEstimate::n_samples);

  py::class_<BatchResult>(m, "BatchResult")
      .def_readonly("stats", &BatchResult::stats)
      .def_readonly("fidelity", &BatchResult::fidelity)
      .def_readonly("acceptance_rate", &BatchResult::acceptance_rate);

  m.def(
      "run_batch",
      [](const ResolvedRun& run, int threads, int n_blocks) {
        py::gil_scoped_release release;
        return run_batch(run, threads, n_blocks);
      },
      py::arg("run"), py::arg("threads") = 1, py::arg("n_blocks") = 0);

  m.def("estimate_fidelity", &estimate_fidelity, py::arg("clone"),
        py::arg("input_state"), py::arg("eta_tot"));
  m.def("correct_efficiency", &correct_efficiency, py::arg("stats"), py::arg("eta_tot"));
}
