// Python bindings for the main operations.

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "schatten_lab/entropy.hpp"
#include "schatten_lab/nets.hpp"
#include "schatten_lab/recovery.hpp"
#include "schatten_lab/sampling.hpp"
#include "schatten_lab/volumes.hpp"

namespace py = pybind11;
using namespace schatten_lab;

namespace {
Exponent to_exponent(double v) {
    return std::isinf(v) ? Exponent::infinity() : Exponent(v);
}
}  // namespace

PYBIND11_MODULE(_schatten_lab, m) {
    m.doc() = "Entropy numbers of Schatten-class embeddings: numerical laboratory";

    m.def(
        "theory_rate",
        [](double p, double q, long n, int n_dim) {
            return theory_rate(RateQuery(to_exponent(p), to_exponent(q), n, n_dim));
        },
        py::arg("p"), py::arg("q"), py::arg("n"), py::arg("n_dim"));

    m.def(
        "schatten_norm",
        [](const Mat& a, double p) { return schatten_norm(a, to_exponent(p)); }, py::arg("a"),
        py::arg("p"));

    m.def(
        "singular_values", [](const Mat& a) { return singular_values(a); }, py::arg("a"));

    m.def(
        "sample_ball",
        [](int n_dim, double p, const std::string& mode, std::uint64_t seed,
           std::uint64_t stream) {
            BallSampleMode m_ = BallSampleMode::spectral;
            if (mode == "rejection") m_ = BallSampleMode::rejection;
            else if (mode == "spectral") m_ = BallSampleMode::spectral;
            else if (mode == "low_rank") m_ = BallSampleMode::low_rank;
            else throw invalid_input("mode must be rejection, spectral, or low_rank");
            return sample_schatten_ball(BallSpec(n_dim, to_exponent(p)), m_,
                                        StreamKey{seed, stream});
        },
        py::arg("n_dim"), py::arg("p"), py::arg("mode") = "spectral", py::arg("seed") = 0,
        py::arg("stream") = 0);

    m.def(
        "ball_volume",
        [](int n_dim, double p, long samples, std::uint64_t seed, int threads) {
            const VolumeEstimate est = schatten_ball_volume_mc(BallSpec(n_dim, to_exponent(p)),
                                                               samples, StreamKey{seed, 0},
                                                               threads);
            return py::make_tuple(est.value, est.std_error);
        },
        py::arg("n_dim"), py::arg("p"), py::arg("samples") = 100000, py::arg("seed") = 0,
        py::arg("threads") = 1);

    m.def(
        "net_build_budget",
        [](int n_dim, double p, double q, int levels, double alpha, double c_q,
           std::uint64_t seed) {
            const ProductNet net = schatten_net_build(n_dim, to_exponent(p), to_exponent(q),
                                                      levels, alpha, c_q, StreamKey{seed, 0});
            return py::make_tuple(net.error_budget, net.log2_cardinality);
        },
        py::arg("n_dim"), py::arg("p"), py::arg("q"), py::arg("levels"), py::arg("alpha") = 1.0,
        py::arg("c_q") = 1.0, py::arg("seed") = 0);

    m.def(
        "sandwich",
        [](int n_dim, double p, double q, const std::vector<int>& levels, std::uint64_t seed,
           int threads) {
            SandwichOptions opts;
            opts.threads = threads;
            const SandwichReport rep = sandwich_report(to_exponent(p), to_exponent(q), n_dim,
                                                       levels, StreamKey{seed, 0}, opts);
            py::list rows;
            for (const auto& r : rep.rows) {
                py::dict d;
                d["n"] = r.n;
                d["lower"] = r.lower;
                d["upper"] = r.upper;
                d["theory"] = r.theory;
                d["method_lower"] = r.method_lower;
                d["method_upper"] = r.method_upper;
                rows.append(std::move(d));
            }
            return rows;
        },
        py::arg("n_dim"), py::arg("p"), py::arg("q"), py::arg("levels"), py::arg("seed") = 0,
        py::arg("threads") = 1);

    m.def(
        "recovery_experiment",
        [](int n_dim, const std::vector<int>& m_grid, double p, double q, int trials,
           std::uint64_t seed, int threads) {
            EmOptions opts;
            opts.threads = threads;
            const RecoveryReport rep = em_experiment(n_dim, m_grid, to_exponent(p), to_exponent(q),
                                                     trials, StreamKey{seed, 0}, opts);
            py::list rows;
            for (const auto& r : rep.rows) {
                py::dict d;
                d["m"] = r.m;
                d["worst_error"] = r.worst_error;
                d["theory_lower"] = r.theory_lower;
                rows.append(std::move(d));
            }
            return rows;
        },
        py::arg("n_dim"), py::arg("m_grid"), py::arg("p"), py::arg("q"), py::arg("trials") = 8,
        py::arg("seed") = 0, py::arg("threads") = 1);

    py::register_exception<invalid_input>(m, "InvalidInput", PyExc_ValueError);
    py::register_exception<numeric_failure>(m, "NumericFailure", PyExc_RuntimeError);
}
