#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "gpl/strips.hpp"

namespace gpl {

struct UnsolvableInstanceError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct SampleTransition {
    int src = -1;      // sampled-state id
    int dst = -1;
    int action = -1;   // ground action id within the source instance
    bool marked = false;
};

struct SampledState {
    State state;
    bool expanded = false;
    bool goal = false;
};

// Closed set of labeled transitions drawn from one or more grounded instances.
struct SampleSet {
    std::vector<std::shared_ptr<GroundInstance>> instances;
    std::vector<SampledState> states;
    std::vector<SampleTransition> transitions;

    size_t num_expanded() const {
        size_t n = 0;
        for (auto& s : states) n += s.expanded;
        return n;
    }
    std::vector<int> expanded_ids() const {
        std::vector<int> out;
        for (size_t i = 0; i < states.size(); ++i)
            if (states[i].expanded) out.push_back(static_cast<int>(i));
        return out;
    }
    // Transitions grouped by source state, in insertion order.
    std::vector<std::vector<int>> outgoing() const;
};

std::vector<State> bfs_prefix(const GroundInstance& inst, size_t m);

// Shortest action sequence from the initial state to a goal state.
std::vector<int> optimal_plan(const GroundInstance& inst);

struct SamplerOptions {
    size_t transition_budget = 500;  // total, split evenly across instances
    std::optional<size_t> explicit_m;  // per-instance BFS prefix size override
};

SampleSet build_sample_set(std::vector<std::shared_ptr<GroundInstance>> instances,
                           const SamplerOptions& opts);

bool check_closure(const SampleSet& sample);

std::string sample_to_json(const SampleSet& sample);

}  // namespace gpl
