#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "gpl/dl.hpp"
#include "gpl/fondplanner.hpp"

namespace gpl {

struct NoInstantiationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Runs an abstract policy on a concrete instance.  The selected features (ids
// into the pool, in the same order as the FOND atoms) tie the two levels
// together.
class PolicyExecutor {
  public:
    PolicyExecutor(const FeaturePool& pool, std::vector<int> selected,
                   const FondModel& fond, const Policy& policy,
                   std::shared_ptr<const GroundInstance> inst);

    uint32_t abstract_state(const State& s);

    // Applicable ground actions whose qualitative change over the selected
    // features equals the abstract action's effects.
    std::vector<std::pair<int, State>> instantiations(const State& s, int abstract_action);

    struct Step {
        std::string abstract_action;
        std::string ground_action;
        uint32_t abstract_before = 0;
    };
    struct RunResult {
        bool success = false;
        std::string failure;  // empty on success
        std::vector<Step> trace;
    };

    // One random execution; instantiations are drawn uniformly.
    RunResult sample_one(uint64_t seed, size_t max_steps = 10000);

    // Every resolution of the instantiation choices must reach the goal;
    // revisiting a concrete state on the current path counts as failure.
    bool exhaustive(size_t node_limit, std::string* failure = nullptr);

  private:
    const FeaturePool& pool_;
    std::vector<int> selected_;
    const FondModel& fond_;
    const Policy& policy_;
    std::shared_ptr<const GroundInstance> inst_;
    FeatureEvaluator eval_;
};

std::string trace_to_json(const PolicyExecutor::RunResult& result);

}  // namespace gpl
