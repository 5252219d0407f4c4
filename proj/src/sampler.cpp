#include "gpl/sampler.hpp"

#include <algorithm>
#include <deque>
#include <unordered_map>

#include <json.hpp>

namespace gpl {

std::vector<std::vector<int>> SampleSet::outgoing() const {
    std::vector<std::vector<int>> out(states.size());
    for (size_t t = 0; t < transitions.size(); ++t)
        out[static_cast<size_t>(transitions[t].src)].push_back(static_cast<int>(t));
    return out;
}

std::vector<State> bfs_prefix(const GroundInstance& inst, size_t m) {
    std::vector<State> order;
    std::unordered_map<State, int, StateHash> seen;
    std::deque<int> queue;
    State init = inst.initial_state();
    order.push_back(init);
    seen.emplace(init, 0);
    queue.push_back(0);
    while (!queue.empty() && order.size() < m) {
        State s = order[static_cast<size_t>(queue.front())];
        queue.pop_front();
        for (auto& [aid, succ] : inst.successors(s)) {
            (void)aid;
            if (seen.count(succ)) continue;
            int id = static_cast<int>(order.size());
            seen.emplace(succ, id);
            order.push_back(succ);
            queue.push_back(id);
            if (order.size() >= m) break;
        }
    }
    return order;
}

std::vector<int> optimal_plan(const GroundInstance& inst) {
    State init = inst.initial_state();
    if (inst.is_goal(init)) return {};
    std::vector<State> order{init};
    std::vector<std::pair<int, int>> parent{{-1, -1}};  // (parent index, action)
    std::unordered_map<State, int, StateHash> seen{{init, 0}};
    std::deque<int> queue{0};
    while (!queue.empty()) {
        int cur = queue.front();
        queue.pop_front();
        State s = order[static_cast<size_t>(cur)];
        for (auto& [aid, succ] : inst.successors(s)) {
            if (seen.count(succ)) continue;
            int id = static_cast<int>(order.size());
            seen.emplace(succ, id);
            order.push_back(succ);
            parent.emplace_back(cur, aid);
            if (inst.is_goal(succ)) {
                std::vector<int> plan;
                for (int i = id; parent[static_cast<size_t>(i)].first >= 0;
                     i = parent[static_cast<size_t>(i)].first)
                    plan.push_back(parent[static_cast<size_t>(i)].second);
                std::reverse(plan.begin(), plan.end());
                return plan;
            }
            queue.push_back(id);
        }
    }
    throw UnsolvableInstanceError("instance has no plan");
}

namespace {

// Total out-degree over (BFS prefix of size m) union (optimal-plan states).
size_t selection_transition_count(const GroundInstance& inst, size_t m,
                                  const std::vector<State>& plan_states) {
    std::vector<State> selected = bfs_prefix(inst, m);
    std::unordered_map<State, bool, StateHash> in_sel;
    for (auto& s : selected) in_sel.emplace(s, true);
    for (auto& s : plan_states)
        if (!in_sel.count(s)) {
            in_sel.emplace(s, true);
            selected.push_back(s);
        }
    size_t total = 0;
    for (auto& s : selected) total += inst.successors(s).size();
    return total;
}

}  // namespace

SampleSet build_sample_set(std::vector<std::shared_ptr<GroundInstance>> instances,
                           const SamplerOptions& opts) {
    if (instances.empty()) throw std::invalid_argument("no training instances");
    SampleSet sample;
    sample.instances = instances;
    const size_t target =
        (opts.transition_budget + instances.size() - 1) / instances.size();

    std::unordered_map<State, int, StateHash> index;
    auto state_id = [&](const State& s) {
        auto it = index.find(s);
        if (it != index.end()) return it->second;
        int id = static_cast<int>(sample.states.size());
        index.emplace(s, id);
        SampledState ss;
        ss.state = s;
        ss.goal = instances[static_cast<size_t>(s.instance_id)]->is_goal(s);
        sample.states.push_back(std::move(ss));
        return id;
    };

    for (auto& inst : instances) {
        std::vector<int> plan = optimal_plan(*inst);
        std::vector<State> plan_states{inst->initial_state()};
        for (int aid : plan) plan_states.push_back(inst->apply(plan_states.back(), aid));

        size_t m = 1;
        if (opts.explicit_m) {
            m = *opts.explicit_m;
        } else {
            size_t reachable = bfs_prefix(*inst, SIZE_MAX).size();
            while (m < reachable &&
                   selection_transition_count(*inst, m, plan_states) < target)
                m *= 2;
            m = std::min(m, reachable);
        }

        std::vector<State> selected = bfs_prefix(*inst, m);
        for (auto& s : plan_states) {
            bool present = false;
            for (auto& t : selected) present |= t == s;
            if (!present) selected.push_back(s);
        }

        for (auto& s : selected) {
            int sid = state_id(s);
            if (sample.states[static_cast<size_t>(sid)].expanded) continue;
            sample.states[static_cast<size_t>(sid)].expanded = true;
            for (auto& [aid, succ] : inst->successors(s)) {
                SampleTransition tr;
                tr.src = sid;
                tr.dst = state_id(succ);
                tr.action = aid;
                sample.transitions.push_back(tr);
            }
        }

        // Plan edges are the goal-relevant transitions; a trivially solved
        // instance marks the full expansion of its initial state instead.
        if (plan.empty()) {
            int sid = state_id(inst->initial_state());
            for (auto& tr : sample.transitions)
                if (tr.src == sid) tr.marked = true;
        } else {
            for (size_t i = 0; i < plan.size(); ++i) {
                int sid = state_id(plan_states[i]);
                int did = state_id(plan_states[i + 1]);
                for (auto& tr : sample.transitions)
                    if (tr.src == sid && tr.dst == did && tr.action == plan[i])
                        tr.marked = true;
            }
        }
    }
    return sample;
}

bool check_closure(const SampleSet& sample) {
    if (sample.transitions.empty()) return false;
    auto out = sample.outgoing();
    std::vector<bool> has_out(sample.states.size(), false);
    for (auto& tr : sample.transitions) {
        if (tr.dst < 0 || static_cast<size_t>(tr.dst) >= sample.states.size()) return false;
        has_out[static_cast<size_t>(tr.src)] = true;
    }
    for (size_t i = 0; i < sample.states.size(); ++i) {
        if (!has_out[i] && !sample.states[i].expanded) continue;
        const SampledState& ss = sample.states[i];
        auto& inst = sample.instances[static_cast<size_t>(ss.state.instance_id)];
        auto succs = inst->successors(ss.state);
        if (has_out[i] && succs.size() != out[i].size()) return false;
        if (ss.expanded && succs.size() != out[i].size()) return false;
        std::vector<std::pair<int, int>> expected, got;
        for (auto& [aid, succ] : succs) {
            auto found = std::find_if(
                sample.states.begin(), sample.states.end(),
                [&](const SampledState& c) { return c.state == succ; });
            if (found == sample.states.end()) return false;
            expected.emplace_back(aid, static_cast<int>(found - sample.states.begin()));
        }
        for (int t : out[i])
            got.emplace_back(sample.transitions[static_cast<size_t>(t)].action,
                             sample.transitions[static_cast<size_t>(t)].dst);
        std::sort(expected.begin(), expected.end());
        std::sort(got.begin(), got.end());
        if ((has_out[i] || ss.expanded) && expected != got) return false;
    }
    return true;
}

std::string sample_to_json(const SampleSet& sample) {
    nlohmann::json j;
    nlohmann::json states = nlohmann::json::array();
    for (auto& ss : sample.states) {
        std::vector<size_t> atom_ids;
        ss.state.atoms.for_each([&](size_t i) { atom_ids.push_back(i); });
        states.push_back({{"instance", ss.state.instance_id},
                          {"atoms", atom_ids},
                          {"expanded", ss.expanded},
                          {"goal", ss.goal}});
    }
    j["states"] = states;
    nlohmann::json transitions = nlohmann::json::array();
    for (auto& tr : sample.transitions)
        transitions.push_back(
            {{"src", tr.src}, {"dst", tr.dst}, {"action", tr.action}, {"marked", tr.marked}});
    j["transitions"] = transitions;
    return j.dump(2);
}

}  // namespace gpl
