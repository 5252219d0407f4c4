#pragma once

#include <optional>
#include <string>
#include <vector>

#include "gpl/abstraction.hpp"
#include "gpl/dl.hpp"
#include "gpl/encoder.hpp"
#include "gpl/executor.hpp"
#include "gpl/fondplanner.hpp"
#include "gpl/satcore.hpp"

namespace gpl {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct PipelineConfig {
    std::string domain;
    std::vector<std::string> train;
    std::vector<std::string> test;
    size_t budget = 500;
    std::optional<size_t> explicit_m;
    int k = 8;
    bool distance = false;
    TheoryVariant variant = TheoryVariant::TG;
    SolverMode solver;
    // Feature conditions by canonical name ("n(...)=0", "b(...)>0"); empty
    // specs fall back to the valuations observed on the training instances.
    std::vector<std::vector<std::string>> init_spec;
    std::vector<std::vector<std::string>> goal_spec;
    std::string output = "out";
    uint64_t seed = 0;
    size_t exec_node_limit = 200000;
    bool cache = true;

    static PipelineConfig from_json(const std::string& text);
    static PipelineConfig from_file(const std::string& path);
    std::string to_json() const;
};

struct TestOutcome {
    std::string instance;
    bool success = false;
    std::string failure;
};

struct PipelineReport {
    std::string domain_name;
    size_t num_states = 0, num_expanded = 0, num_transitions = 0;
    size_t pool_size = 0;
    int num_vars = 0;
    size_t num_clauses = 0;
    std::string solve_status;
    int64_t cost = 0;
    std::vector<std::string> selected_names;
    size_t num_actions = 0;
    bool sound = false, complete = false;
    bool solved = false;
    size_t policy_size = 0;
    std::vector<TestOutcome> tests;
    std::vector<std::pair<std::string, double>> timings;  // (stage, seconds)
};

struct PipelineResult {
    SampleSet sample;
    FeaturePool pool;
    FeatureMatrix matrix;
    Theory theory;
    SolveResult solution;
    std::vector<int> selected;
    std::vector<AbstractAction> actions;
    QnpModel qnp;
    FondModel fond;
    std::optional<Policy> policy;
    PipelineReport report;
};

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

std::shared_ptr<GroundInstance> load_instance(const std::string& domain_text,
                                              const std::string& problem_text, int id);

// Grounds every problem against one shared (goal-extended) domain model, as
// the sampler and the feature pool require.
std::vector<std::shared_ptr<GroundInstance>> load_instances(
    const std::string& domain_text, const std::vector<std::string>& problem_texts);

// Condition lists by feature name; every referenced feature must be selected.
CondSet parse_condition_spec(const std::vector<std::string>& spec, const FeaturePool& pool);

// Runs the full chain, or stops after the named stage ("sample", "pool",
// "encode", "solve", "extract", "plan").
PipelineResult run_pipeline(const PipelineConfig& config, const std::string& stop_after = "");

std::string report_text(const PipelineReport& report);
std::string report_to_json(const PipelineReport& report);

}  // namespace gpl
