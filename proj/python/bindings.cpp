#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "onebit/channel.hpp"
#include "onebit/config.hpp"
#include "onebit/detection.hpp"
#include "onebit/estimation.hpp"
#include "onebit/harness.hpp"
#include "onebit/lifting.hpp"
#include "onebit/ofdm.hpp"
#include "onebit/svm.hpp"

namespace py = pybind11;
using namespace onebit;

namespace {

SolverOptions solver(double tol, int max_epochs) {
    SolverOptions o;
    o.tol = tol;
    o.max_epochs = max_epochs;
    return o;
}

QuantizedMatrix as_quantized(const ComplexMatrix& y) {
    return QuantizedMatrix::from_signs(y);
}

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "SVM channel estimation and data detection for one-bit massive MIMO";

    py::register_exception<InvalidInput>(m, "InvalidInput", PyExc_ValueError);
    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);

    m.def("one_bit_quantize", [](const ComplexMatrix& r) { return one_bit_quantize(r).values(); },
          py::arg("r"), "sign(Re r) + j sign(Im r), with sign(0) = +1");
    m.def("block_lift", &block_lift, py::arg("a"));
    m.def("side_by_side", &side_by_side, py::arg("a"));
    m.def("rotation_lift", &rotation_lift, py::arg("a"));

    py::class_<SvmSolution>(m, "SvmSolution")
        .def_readonly("weights", &SvmSolution::weights)
        .def_readonly("duals", &SvmSolution::duals)
        .def_readonly("objective", &SvmSolution::objective)
        .def_readonly("dual_objective", &SvmSolution::dual_objective)
        .def_readonly("gap", &SvmSolution::gap)
        .def_readonly("iterations", &SvmSolution::iterations)
        .def_readonly("converged", &SvmSolution::converged);

    m.def(
        "solve_soft_margin",
        [](const RowMatrix& features, const RealVector& labels, double penalty, double tol, int max_epochs) {
            return solve_soft_margin(SvmProblem{features, labels, penalty}, solver(tol, max_epochs));
        },
        py::arg("features"), py::arg("labels"), py::arg("C") = 1.0, py::arg("tol") = 1e-6,
        py::arg("max_epochs") = 10000);

    m.def("constellation_points",
          [](const std::string& name) { return Constellation::make(parse_modulation(name)).points(); },
          py::arg("name"));
    m.def("gamma_schedule",
          [](double snr_db, const std::string& name) { return gamma_schedule(Snr::from_db(snr_db), parse_modulation(name)); },
          py::arg("snr_db"), py::arg("constellation") = "qpsk");

    m.def("iid_channel", [](int n, int k, std::uint64_t seed) {
        Rng rng(seed);
        return gen_iid_channel(n, k, rng).H;
    }, py::arg("N"), py::arg("K"), py::arg("seed"));

    m.def(
        "svm_ce",
        [](const ComplexMatrix& y, const ComplexMatrix& pilots, double penalty, double tol) {
            const CeRealForms forms = realify_ce(as_quantized(y), pilots);
            const ChannelEstimate est = svm_ce_uncorrelated(forms.Y, forms.X, penalty, solver(tol, 10000));
            return py::make_tuple(est.H, est.flagged);
        },
        py::arg("y"), py::arg("pilots"), py::arg("C") = 1.0, py::arg("tol") = 1e-6,
        "Per-antenna SVM channel estimate from N x T one-bit observations; returns (H, flagged rows).");

    m.def(
        "detect",
        [](const ComplexMatrix& y, const ComplexMatrix& channel, double snr_db, const std::string& constellation,
           const std::string& detector) {
            const Constellation c = Constellation::make(parse_modulation(constellation));
            const Snr snr = Snr::from_db(snr_db);
            const Detector d = parse_detector(detector);
            if (d == Detector::ml) {
                return ml_detect_block(as_quantized(y), channel, c, snr).indices;
            }
            if (d == Detector::ofdm_svm) {
                throw InvalidInput("detect: use the ofdm functions for ofdm_svm");
            }
            TwoStageOptions o;
            o.second_stage = d == Detector::svm_two_stage;
            return two_stage_detect(as_quantized(y), channel, c, snr, o).indices;
        },
        py::arg("y"), py::arg("H"), py::arg("snr_db"), py::arg("constellation") = "qpsk",
        py::arg("detector") = "svm_two_stage", "K x T matrix of detected constellation indices.");

    m.def("circulant", &circulant, py::arg("first_column"));
    m.def("unitary_dft", &unitary_dft, py::arg("size"));

    m.def(
        "run_experiment",
        [](const std::string& config_text, int threads) {
            RunOptions o;
            o.threads = threads;
            return run_experiment(parse_config(config_text), o).to_csv();
        },
        py::arg("config_text"), py::arg("threads") = 1,
        "Runs a key = value experiment description and returns the metrics CSV.");
    m.def("list_scenarios", [] {
        std::vector<std::string> names;
        for (const auto& s : list_scenarios()) {
            names.push_back(s.name);
        }
        return names;
    });
}
