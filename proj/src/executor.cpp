#include "gpl/executor.hpp"

#include <random>
#include <unordered_map>
#include <unordered_set>

#include <json.hpp>

namespace gpl {

PolicyExecutor::PolicyExecutor(const FeaturePool& pool, std::vector<int> selected,
                               const FondModel& fond, const Policy& policy,
                               std::shared_ptr<const GroundInstance> inst)
    : pool_(pool),
      selected_(std::move(selected)),
      fond_(fond),
      policy_(policy),
      inst_(inst),
      eval_(pool, inst) {
    if (selected_.size() != static_cast<size_t>(fond_.num_atoms()))
        throw std::invalid_argument("selected feature count does not match the abstraction");
}

uint32_t PolicyExecutor::abstract_state(const State& s) {
    uint32_t out = 0;
    for (size_t f = 0; f < selected_.size(); ++f)
        if (eval_.eval(selected_[f], s) != 0) out |= 1u << f;
    return out;
}

std::vector<std::pair<int, State>> PolicyExecutor::instantiations(const State& s,
                                                                  int abstract_action) {
    const FondAction& action = fond_.actions[static_cast<size_t>(abstract_action)];
    std::vector<std::pair<int, State>> out;
    for (auto& [aid, t] : inst_->successors(s)) {
        bool match = true;
        for (size_t f = 0; f < selected_.size() && match; ++f) {
            QualChange d = eval_.delta(selected_[f], s, t);
            auto it = action.eff.find(static_cast<int>(f));
            if (it == action.eff.end()) {
                match = d == QualChange::None;
                continue;
            }
            switch (it->second) {
                case FeatEff::Set: match = d == QualChange::Pos; break;
                case FeatEff::Clear: match = d == QualChange::Neg; break;
                case FeatEff::Inc: match = d == QualChange::Inc; break;
                case FeatEff::Dec: match = d == QualChange::Dec; break;
            }
        }
        if (match) out.emplace_back(aid, t);
    }
    return out;
}

PolicyExecutor::RunResult PolicyExecutor::sample_one(uint64_t seed, size_t max_steps) {
    RunResult result;
    std::mt19937_64 rng(seed);
    State s = inst_->initial_state();
    std::unordered_set<State, StateHash> visited{s};
    for (size_t step = 0; step < max_steps; ++step) {
        if (inst_->is_goal(s)) {
            result.success = true;
            return result;
        }
        uint32_t ab = abstract_state(s);
        if (fond_.is_goal(ab)) {
            result.failure = "abstract goal reached in a non-goal concrete state";
            return result;
        }
        auto rule = policy_.rules.find(ab);
        if (rule == policy_.rules.end()) {
            result.failure = "no policy rule for abstract state " + std::to_string(ab);
            return result;
        }
        auto options = instantiations(s, rule->second);
        if (options.empty())
            throw NoInstantiationError(
                "abstract action '" + fond_.actions[static_cast<size_t>(rule->second)].name +
                "' has no instantiation");
        auto& [aid, t] =
            options[std::uniform_int_distribution<size_t>(0, options.size() - 1)(rng)];
        result.trace.push_back({fond_.actions[static_cast<size_t>(rule->second)].name,
                                inst_->actions[static_cast<size_t>(aid)].name, ab});
        if (!visited.insert(t).second) {
            result.failure = "concrete state revisited";
            return result;
        }
        s = t;
    }
    result.failure = "step limit exceeded";
    return result;
}

bool PolicyExecutor::exhaustive(size_t node_limit, std::string* failure) {
    // Colors over the execution graph; a gray hit is a cycle, i.e. an infinite
    // execution exists.
    enum { White, Gray, Black };
    std::unordered_map<State, int, StateHash> color;
    auto fail = [&](const std::string& msg) {
        if (failure) *failure = msg;
        return false;
    };
    struct Frame {
        State state;
        std::vector<std::pair<int, State>> succ;
        size_t next = 0;
    };
    std::vector<Frame> stack;
    State init = inst_->initial_state();
    stack.push_back({init, {}, 0});
    size_t nodes = 0;
    while (!stack.empty()) {
        Frame& frame = stack.back();
        if (frame.next == 0) {
            auto it = color.find(frame.state);
            if (it != color.end() && it->second == Black) {
                stack.pop_back();
                continue;
            }
            if (it != color.end() && it->second == Gray) return fail("execution cycle");
            if (++nodes > node_limit) return fail("node limit exceeded");
            color[frame.state] = Gray;
            if (inst_->is_goal(frame.state)) {
                color[frame.state] = Black;
                stack.pop_back();
                continue;
            }
            uint32_t ab = abstract_state(frame.state);
            if (fond_.is_goal(ab))
                return fail("abstract goal reached in a non-goal concrete state");
            auto rule = policy_.rules.find(ab);
            if (rule == policy_.rules.end())
                return fail("no policy rule for abstract state " + std::to_string(ab));
            frame.succ = instantiations(frame.state, rule->second);
            if (frame.succ.empty())
                throw NoInstantiationError(
                    "abstract action '" + fond_.actions[static_cast<size_t>(rule->second)].name +
                    "' has no instantiation");
        }
        if (frame.next < frame.succ.size()) {
            State next = frame.succ[frame.next++].second;
            auto it = color.find(next);
            if (it != color.end() && it->second == Gray) return fail("execution cycle");
            if (it == color.end() || it->second == White) stack.push_back({next, {}, 0});
        } else {
            color[frame.state] = Black;
            stack.pop_back();
        }
    }
    return true;
}

std::string trace_to_json(const PolicyExecutor::RunResult& result) {
    nlohmann::json j;
    j["success"] = result.success;
    if (!result.failure.empty()) j["failure"] = result.failure;
    j["trace"] = nlohmann::json::array();
    for (auto& step : result.trace)
        j["trace"].push_back({{"abstract_action", step.abstract_action},
                              {"ground_action", step.ground_action},
                              {"abstract_state", step.abstract_before}});
    return j.dump(2);
}

}  // namespace gpl
