#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "smcva/annealing.hpp"
#include "smcva/pipeline.hpp"
#include "smcva/sampler.hpp"

namespace py = pybind11;
using namespace smcva;

PYBIND11_MODULE(_smcva, m) {
    m.doc() = "Lorenz96 twin experiments: variational annealing and "
              "bias-informed Metropolis-Hastings sampling";

    py::class_<ModelSpec>(m, "ModelSpec")
        .def(py::init([](int dim, double dt, int n_params) {
                 ModelSpec s{dim, dt, n_params};
                 s.validate();
                 return s;
             }),
             py::arg("dim"), py::arg("dt"), py::arg("n_params") = 1)
        .def_readonly("dim", &ModelSpec::dim)
        .def_readonly("dt", &ModelSpec::dt)
        .def_readonly("n_params", &ModelSpec::n_params);

    m.def("vector_field", &vector_field, py::arg("spec"), py::arg("x"),
          py::arg("p"));
    m.def("jacobians", &jacobians, py::arg("spec"), py::arg("x"), py::arg("p"));
    m.def("discrete_map", &discrete_map, py::arg("spec"), py::arg("x"),
          py::arg("p"));
    m.def("jacobians_map", &jacobians_map, py::arg("spec"), py::arg("x"),
          py::arg("p"));
    m.def("integrate_trajectory", &integrate_trajectory, py::arg("spec"),
          py::arg("x0"), py::arg("p"), py::arg("n_steps"));

    m.def("measured_indices", &measured_indices, py::arg("dim"),
          py::arg("n_measured"));
    m.def("generate_truth", &generate_truth, py::arg("spec"), py::arg("p"),
          py::arg("n_window"), py::arg("n_pred"), py::arg("seed"));

    py::class_<Observations>(m, "Observations")
        .def(py::init<>())
        .def_readwrite("measured", &Observations::measured)
        .def_readwrite("values", &Observations::values)
        .def_readwrite("continuation", &Observations::continuation);

    py::class_<NoiseSpec>(m, "NoiseSpec")
        .def(py::init([](double fraction, double dynamic_range,
                         std::uint64_t seed) {
                 return NoiseSpec{fraction, dynamic_range, seed};
             }),
             py::arg("fraction") = 0.034, py::arg("dynamic_range") = 20.0,
             py::arg("seed") = 0)
        .def_property_readonly("amplitude", &NoiseSpec::amplitude);

    m.def("apply_noise", &apply_noise, py::arg("truth"), py::arg("indices"),
          py::arg("n_window"), py::arg("noise"));

    py::class_<Path>(m, "Path")
        .def(py::init([](const Eigen::MatrixXd& states,
                         const Eigen::VectorXd& params) {
                 Path p;
                 p.states = states;
                 p.params = params;
                 return p;
             }),
             py::arg("states"), py::arg("params"))
        .def_property(
            "states",
            [](const Path& p) { return Eigen::MatrixXd(p.states); },
            [](Path& p, const Eigen::MatrixXd& s) { p.states = s; })
        .def_readwrite("params", &Path::params);

    py::class_<ActionValue>(m, "ActionValue")
        .def_readonly("total", &ActionValue::total)
        .def_readonly("measurement_term", &ActionValue::measurement_term)
        .def_readonly("model_term", &ActionValue::model_term);

    m.def(
        "action",
        [](const Path& path, const ModelSpec& spec, double r_m, double r_f,
           const Observations& obs) {
            ActionConfig cfg{r_m, r_f, &obs};
            return action(path, spec, cfg);
        },
        py::arg("path"), py::arg("spec"), py::arg("r_m"), py::arg("r_f"),
        py::arg("obs"));
    m.def(
        "action_gradient",
        [](const Path& path, const ModelSpec& spec, double r_m, double r_f,
           const Observations& obs) {
            ActionConfig cfg{r_m, r_f, &obs};
            return action_gradient(path, spec, cfg);
        },
        py::arg("path"), py::arg("spec"), py::arg("r_m"), py::arg("r_f"),
        py::arg("obs"));

    py::class_<OptimResult>(m, "OptimResult")
        .def_readonly("path", &OptimResult::path)
        .def_readonly("action", &OptimResult::action)
        .def_readonly("converged", &OptimResult::converged)
        .def_readonly("iterations", &OptimResult::iterations);

    m.def(
        "minimize",
        [](const Path& initial, const ModelSpec& spec, double r_m, double r_f,
           const Observations& obs, double grad_tolerance, int max_iterations) {
            ActionConfig cfg{r_m, r_f, &obs};
            OptimizerSettings settings;
            settings.grad_tolerance = grad_tolerance;
            settings.max_iterations = max_iterations;
            return minimize(initial, spec, cfg, settings);
        },
        py::arg("initial"), py::arg("spec"), py::arg("r_m"), py::arg("r_f"),
        py::arg("obs"), py::arg("grad_tolerance") = 1e-8,
        py::arg("max_iterations") = 5000);

    py::class_<BiasSpec>(m, "BiasSpec")
        .def_readonly("center", &BiasSpec::center)
        .def_readonly("sigma_state", &BiasSpec::sigma_state)
        .def_readonly("sigma_param", &BiasSpec::sigma_param);

    m.def("build_bias", &build_bias, py::arg("best"), py::arg("worst"),
          py::arg("floor") = 1e-2,
          py::arg("cap_state") = std::numeric_limits<double>::infinity(),
          py::arg("cap_param") = std::numeric_limits<double>::infinity());
    m.def("log_bias", &log_bias, py::arg("path"), py::arg("bias"));

    py::class_<MarginalHistogram>(m, "MarginalHistogram")
        .def_readonly("bin_edges", &MarginalHistogram::bin_edges)
        .def_readonly("mass", &MarginalHistogram::mass)
        .def_readonly("mean", &MarginalHistogram::mean)
        .def_readonly("rms", &MarginalHistogram::rms)
        .def_readonly("n_samples", &MarginalHistogram::n_samples)
        .def_readonly("total_weight", &MarginalHistogram::total_weight);

    m.def(
        "sample_posterior",
        [](const Path& best, const Path& worst, const ModelSpec& spec,
           double r_m, double r_f, const Observations& obs, int walkers,
           int burn_in, int steps, int thin, double step_scale,
           std::uint64_t seed, double cap_state, double cap_param) {
            const BiasSpec bias =
                build_bias(best, worst, 1e-2, cap_state, cap_param);
            ActionEvaluator eval(spec, ActionConfig{r_m, r_f, &obs});
            RunSettings run;
            run.n_walkers = walkers;
            run.burn_in = burn_in;
            run.n_steps = steps;
            run.thin = thin;
            run.step_scale = step_scale;
            auto samples = run_ensemble(
                bias, [&eval](const Path& p) { return eval.log_prob(p); }, run,
                seed);
            return marginalize(samples, 0);
        },
        py::arg("best"), py::arg("worst"), py::arg("spec"), py::arg("r_m"),
        py::arg("r_f"), py::arg("obs"), py::arg("walkers") = 20,
        py::arg("burn_in") = 2000, py::arg("steps") = 100000,
        py::arg("thin") = 80, py::arg("step_scale") = 0.02, py::arg("seed") = 1,
        py::arg("cap_state") = std::numeric_limits<double>::infinity(),
        py::arg("cap_param") = std::numeric_limits<double>::infinity());

    py::class_<RunConfig>(m, "RunConfig")
        .def(py::init(&RunConfig::profile), py::arg("profile") = "desk")
        .def("apply_key", &RunConfig::apply_key)
        .def_readwrite("seed", &RunConfig::seed);

    m.def("run_generate", &run_generate, py::arg("config"), py::arg("out_dir"));
    m.def("run_anneal", &run_anneal, py::arg("config"), py::arg("out_dir"));
    m.def("run_sample", &run_sample, py::arg("config"), py::arg("out_dir"));
    m.def("run_report", &run_report, py::arg("out_dir"));
}
