#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "qillum/bounds.hpp"
#include "qillum/errors.hpp"
#include "qillum/fockspace.hpp"
#include "qillum/receivers.hpp"
#include "qillum/scenario.hpp"

namespace py = pybind11;
using namespace qillum;

namespace {

ScenarioParams make_params(double n_s, double kappa, double n_b) {
  return validate_params({n_s, kappa, n_b});
}

// Blocks of a joint state as (photon-number difference, first idler number, matrix).
std::vector<py::tuple> state_blocks(const JointState& s) {
  std::vector<py::tuple> out;
  for (const Block& b : s.rho.blocks()) out.push_back(py::make_tuple(b.key, b.offset, b.matrix));
  return out;
}

}  // namespace

PYBIND11_MODULE(_qillum, m) {
  m.doc() = "Quantum illumination: Fock-space states, Chernoff bounds and receiver models";

  auto error = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
  py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);
  py::register_exception<TruncationError>(m, "TruncationError", error.ptr());
  py::register_exception<LinAlgError>(m, "LinAlgError", error.ptr());
  py::register_exception<ConvergenceError>(m, "ConvergenceError", error.ptr());

  py::class_<ScenarioParams>(m, "ScenarioParams")
      .def(py::init(&make_params), py::arg("n_s"), py::arg("kappa"), py::arg("n_b"))
      .def_readonly("n_s", &ScenarioParams::n_s)
      .def_readonly("kappa", &ScenarioParams::kappa)
      .def_readonly("n_b", &ScenarioParams::n_b)
      .def_readonly("asymptotic_regime", &ScenarioParams::asymptotic_regime)
      .def("__eq__", [](const ScenarioParams& a, const ScenarioParams& b) { return a == b; })
      .def("__repr__", [](const ScenarioParams& p) {
        return "ScenarioParams(n_s=" + format_double(p.n_s) + ", kappa=" + format_double(p.kappa) +
               ", n_b=" + format_double(p.n_b) + ")";
      });

  py::enum_<ThresholdPolicy>(m, "ThresholdPolicy")
      .value("paper_formula", ThresholdPolicy::paper_formula)
      .value("optimal_scan", ThresholdPolicy::optimal_scan);
  py::enum_<VoteMethod>(m, "VoteMethod")
      .value("exact_binomial", VoteMethod::exact_binomial)
      .value("clt", VoteMethod::clt);

  m.def("render_config", [](const std::string& text) { return render_config(parse_config(text)); },
        py::arg("text"), "Parse a key=value config and render it canonically.");
  m.def("config_params", [](const std::string& text) { return parse_config(text).params; },
        py::arg("text"));

  py::class_<ExponentReport>(m, "ExponentReport")
      .def_readonly("r_q", &ExponentReport::r_q)
      .def_readonly("r_c", &ExponentReport::r_c)
      .def_readonly("r_c_hom", &ExponentReport::r_c_hom)
      .def_readonly("regime_approximation", &ExponentReport::regime_approximation);
  m.def("asymptotic_exponents", &asymptotic_exponents, py::arg("params"));

  py::class_<ChernoffResult>(m, "ChernoffResult")
      .def_readonly("s_star", &ChernoffResult::s_star)
      .def_readonly("q_qcb", &ChernoffResult::q_qcb)
      .def_readonly("q_half", &ChernoffResult::q_half)
      .def_readonly("exponent", &ChernoffResult::exponent);
  m.def("spdc_chernoff", &spdc_chernoff, py::arg("params"), py::arg("tail_tol") = 1e-9);
  m.def("coherent_chernoff", &coherent_chernoff, py::arg("params"), py::arg("tail_tol") = 1e-9);

  py::class_<BoundTriple>(m, "BoundTriple")
      .def_readonly("lower", &BoundTriple::lower)
      .def_readonly("upper_qcb", &BoundTriple::upper_qcb)
      .def_readonly("upper_bhatt", &BoundTriple::upper_bhatt)
      .def_readonly("log_lower", &BoundTriple::log_lower)
      .def_readonly("log_upper_qcb", &BoundTriple::log_upper_qcb)
      .def_readonly("log_upper_bhatt", &BoundTriple::log_upper_bhatt);
  m.def("error_prob_bounds", &error_prob_bounds, py::arg("q_half"), py::arg("q_qcb"), py::arg("k"));

  py::class_<TruncationSpec>(m, "TruncationSpec")
      .def_readonly("n_r_max", &TruncationSpec::n_r_max)
      .def_readonly("n_i_max", &TruncationSpec::n_i_max)
      .def_readonly("tail_tol", &TruncationSpec::tail_tol);
  m.def("truncation_for", &TruncationSpec::for_params, py::arg("params"), py::arg("tail_tol") = 1e-9);

  py::class_<JointState>(m, "JointState")
      .def_readonly("trunc", &JointState::trunc)
      .def("element", &JointState::element, py::arg("m_r"), py::arg("m_i"), py::arg("n_r"),
           py::arg("n_i"))
      .def("trace", &JointState::trace)
      .def("blocks", &state_blocks);
  m.def("build_rho0", [](const ScenarioParams& p, double tail_tol) {
    return build_rho0(p, TruncationSpec::for_params(p, tail_tol));
  }, py::arg("params"), py::arg("tail_tol") = 1e-9);
  m.def("build_rho1", [](const ScenarioParams& p, double tail_tol) {
    return build_rho1(p, TruncationSpec::for_params(p, tail_tol));
  }, py::arg("params"), py::arg("tail_tol") = 1e-9);

  py::class_<ErrorProbability>(m, "ErrorProbability")
      .def_readonly("pe", &ErrorProbability::pe)
      .def_readonly("log10_pe", &ErrorProbability::log10_pe);
  m.def("homodyne_error", &homodyne_error, py::arg("params"), py::arg("k"));

  py::class_<OpaStatistics>(m, "OpaStatistics")
      .def_readonly("n0", &OpaStatistics::n0)
      .def_readonly("n1", &OpaStatistics::n1)
      .def_readonly("sigma0", &OpaStatistics::sigma0)
      .def_readonly("sigma1", &OpaStatistics::sigma1)
      .def_readonly("gain", &OpaStatistics::gain);
  m.def("opa_output_means", &opa_output_means, py::arg("params"), py::arg("gain"));

  py::class_<ThresholdDecision>(m, "ThresholdDecision")
      .def_readonly("error", &ThresholdDecision::error)
      .def_property_readonly("threshold", [](const ThresholdDecision& d) { return d.rule.threshold; })
      .def_readonly("degenerate", &ThresholdDecision::degenerate);
  m.def("opa_error_exact", &opa_error_exact, py::arg("params"), py::arg("gain"), py::arg("k"),
        py::arg("policy") = ThresholdPolicy::paper_formula);
  m.def("opa_error_onoff", &opa_error_onoff, py::arg("params"), py::arg("gain"), py::arg("k"),
        py::arg("policy") = ThresholdPolicy::paper_formula);
  m.def("opa_error_gaussian", [](const ScenarioParams& p, double g, std::int64_t k) {
    return opa_error_gaussian(p, g, k).error;
  }, py::arg("params"), py::arg("gain"), py::arg("k"));
  m.def("opa_exponent", &opa_exponent, py::arg("params"), py::arg("gain"));

  py::class_<GainOptimum>(m, "GainOptimum")
      .def_readonly("gain", &GainOptimum::gain)
      .def_readonly("r_opa", &GainOptimum::r_opa)
      .def_readonly("degenerate", &GainOptimum::degenerate);
  m.def("optimize_gain", &optimize_gain, py::arg("params"));
  m.def("bhattacharyya_preset_gain", &bhattacharyya_preset_gain, py::arg("params"));

  py::class_<BhattacharyyaResult>(m, "BhattacharyyaResult")
      .def_readonly("q_b", &BhattacharyyaResult::q_b)
      .def_readonly("r_b_exact", &BhattacharyyaResult::r_b_exact)
      .def_readonly("r_b_paper_form", &BhattacharyyaResult::r_b_paper_form);
  m.def("opa_bhattacharyya", &opa_bhattacharyya, py::arg("params"), py::arg("gain"));

  py::class_<HelstromResult>(m, "HelstromResult")
      .def_readonly("pe_single", &HelstromResult::pe_single)
      .def_readonly("p01", &HelstromResult::p01)
      .def_readonly("p10", &HelstromResult::p10)
      .def_readonly("trace_distance", &HelstromResult::trace_distance)
      .def_readonly("degenerate", &HelstromResult::degenerate);
  m.def("helstrom_single_shot", &helstrom_single_shot, py::arg("rho0"), py::arg("rho1"));
  m.def("majority_vote_error", [](double p01, double p10, std::int64_t k, VoteMethod method) {
    return majority_vote_error(p01, p10, k, method).error;
  }, py::arg("p01"), py::arg("p10"), py::arg("k"), py::arg("method") = VoteMethod::exact_binomial);
  m.def("separable_helstrom_error", [](const HelstromResult& h, std::int64_t k, VoteMethod method) {
    return separable_helstrom_error(h, k, method).error;
  }, py::arg("helstrom"), py::arg("k"), py::arg("method") = VoteMethod::exact_binomial);
}
