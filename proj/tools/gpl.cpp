#include <cstdlib>
#include <iostream>

#include <CLI11.hpp>

#include "gpl/pipeline.hpp"

namespace {

gpl::PipelineConfig load_config(const std::string& path) {
    gpl::PipelineConfig config = gpl::PipelineConfig::from_file(path);
    // lets tests and scripts swap the solver without touching the config
    if (const char* env = std::getenv("GPL_SOLVER"))
        config.solver = gpl::SolverMode::External(env, config.output);
    return config;
}

int run_stage(const std::string& config_path, const std::string& stage) {
    gpl::PipelineConfig config = load_config(config_path);
    gpl::PipelineResult result = gpl::run_pipeline(config, stage);
    std::cout << gpl::report_text(result.report);
    if (stage.empty() || stage == "plan" || stage == "solve" || stage == "extract") {
        if (result.solution.status == gpl::SolveStatus::Unsatisfiable && stage != "sample")
            return 2;
    }
    if (stage.empty())
        for (auto& t : result.report.tests)
            if (!t.success) return 3;
    return 0;
}

int solve_wcnf_file(const std::string& path) {
    gpl::WeightedCnf cnf = gpl::parse_wcnf(gpl::read_file(path));
    gpl::SolveResult result = gpl::solve_max_sat(cnf);
    if (result.status == gpl::SolveStatus::Unsatisfiable) {
        std::cout << "s UNSATISFIABLE\n";
        return 20;
    }
    std::cout << "o " << result.assignment.cost << "\n";
    std::cout << "s OPTIMUM FOUND\n";
    std::cout << "v";
    for (int v = 0; v < cnf.num_vars; ++v)
        std::cout << " " << (result.assignment.values[static_cast<size_t>(v)] ? v + 1 : -(v + 1));
    std::cout << " 0\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"generalized planning: features and abstract actions from sampled states"};
    app.require_subcommand(1);

    std::string config_path, wcnf_path, domain_path, problem_path, out_path;

    auto add_stage = [&](const std::string& name, const std::string& desc) {
        CLI::App* cmd = app.add_subcommand(name, desc);
        cmd->add_option("config", config_path, "pipeline config (json)")->required();
        return cmd;
    };
    CLI::App* c_sample = add_stage("sample", "sample states and transitions");
    CLI::App* c_pool = add_stage("pool", "generate the feature pool");
    CLI::App* c_encode = add_stage("encode", "emit the weighted max-sat theory");
    CLI::App* c_solve = add_stage("solve", "select a minimum-cost feature set");
    CLI::App* c_extract = add_stage("extract", "extract the abstract model");
    CLI::App* c_plan = add_stage("plan", "find a terminating strong-cyclic policy");
    CLI::App* c_execute = add_stage("execute", "validate the policy on held-out instances");
    CLI::App* c_pipeline = add_stage("pipeline", "run every stage");
    CLI::App* c_report = add_stage("report", "print the report of a finished run");

    CLI::App* c_wcnf = app.add_subcommand("solve-wcnf", "solve a dimacs wcnf file");
    c_wcnf->add_option("file", wcnf_path, "wcnf input")->required();

    CLI::App* c_ground = app.add_subcommand("ground", "dump a grounded instance as json");
    c_ground->add_option("--domain", domain_path, "domain pddl")->required();
    c_ground->add_option("--problem", problem_path, "problem pddl")->required();
    c_ground->add_option("-o,--output", out_path, "output file (default stdout)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (c_wcnf->parsed()) return solve_wcnf_file(wcnf_path);
        if (c_ground->parsed()) {
            auto inst = gpl::load_instance(gpl::read_file(domain_path),
                                           gpl::read_file(problem_path), 0);
            std::string json = gpl::instance_to_json(*inst);
            if (out_path.empty())
                std::cout << json << "\n";
            else
                gpl::write_file(out_path, json);
            return 0;
        }
        if (c_sample->parsed()) return run_stage(config_path, "sample");
        if (c_pool->parsed()) return run_stage(config_path, "pool");
        if (c_encode->parsed()) return run_stage(config_path, "encode");
        if (c_solve->parsed()) return run_stage(config_path, "solve");
        if (c_extract->parsed()) return run_stage(config_path, "extract");
        if (c_plan->parsed()) return run_stage(config_path, "plan");
        if (c_execute->parsed() || c_pipeline->parsed()) return run_stage(config_path, "");
        if (c_report->parsed()) {
            gpl::PipelineConfig config = load_config(config_path);
            std::cout << gpl::read_file(config.output + "/report.txt");
            return 0;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
