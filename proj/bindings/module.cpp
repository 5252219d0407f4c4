#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "gpl/pipeline.hpp"

namespace py = pybind11;

namespace {

std::shared_ptr<gpl::GroundInstance> parse_instance(const std::string& domain_text,
                                                    const std::string& problem_text) {
    return gpl::load_instance(domain_text, problem_text, 0);
}

std::string sample_states(const std::string& domain_text,
                          const std::vector<std::string>& problem_texts, size_t budget,
                          std::optional<size_t> m) {
    auto instances = gpl::load_instances(domain_text, problem_texts);
    gpl::SamplerOptions opts;
    opts.transition_budget = budget;
    opts.explicit_m = m;
    return gpl::sample_to_json(gpl::build_sample_set(std::move(instances), opts));
}

std::string solve_wcnf(const std::string& text) {
    gpl::WeightedCnf cnf = gpl::parse_wcnf(text);
    gpl::SolveResult result = gpl::solve_max_sat(cnf);
    if (result.status == gpl::SolveStatus::Unsatisfiable) return "s UNSATISFIABLE\n";
    std::string out = "o " + std::to_string(result.assignment.cost) + "\ns OPTIMUM FOUND\nv";
    for (int v = 0; v < cnf.num_vars; ++v)
        out += " " + std::to_string(result.assignment.values[static_cast<size_t>(v)] ? v + 1
                                                                                     : -(v + 1));
    return out + " 0\n";
}

std::string run_pipeline_json(const std::string& config_json) {
    gpl::PipelineConfig config = gpl::PipelineConfig::from_json(config_json);
    gpl::PipelineResult result = gpl::run_pipeline(config);
    return gpl::report_to_json(result.report);
}

}  // namespace

PYBIND11_MODULE(_gpl, m) {
    m.doc() = "learning features and abstract actions for generalized planning";

    py::class_<gpl::GroundInstance, std::shared_ptr<gpl::GroundInstance>>(m, "Instance")
        .def_property_readonly("num_atoms",
                               [](const gpl::GroundInstance& i) { return i.atoms.size(); })
        .def_property_readonly("num_actions",
                               [](const gpl::GroundInstance& i) { return i.actions.size(); })
        .def_property_readonly("objects",
                               [](const gpl::GroundInstance& i) { return i.objects; })
        .def_property_readonly("atom_names",
                               [](const gpl::GroundInstance& i) { return i.atom_names; })
        .def("to_json", [](const gpl::GroundInstance& i) { return gpl::instance_to_json(i); });

    m.def("parse_instance", &parse_instance, py::arg("domain_text"), py::arg("problem_text"),
          "parse and ground a pddl domain/problem pair");
    m.def("sample_states", &sample_states, py::arg("domain_text"), py::arg("problem_texts"),
          py::arg("budget") = 500, py::arg("m") = std::nullopt,
          "sample a closed state set, returned as json");
    m.def("solve_wcnf", &solve_wcnf, py::arg("text"),
          "solve a dimacs wcnf string, returning competition-format output");
    m.def("run_pipeline", &run_pipeline_json, py::arg("config_json"),
          "run the full learning pipeline, returning the report as json");
}
