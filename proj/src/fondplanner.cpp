#include "gpl/fondplanner.hpp"

#include <algorithm>
#include <functional>
#include <sstream>

#include <json.hpp>

namespace gpl {

FondModel qnp_to_fond(const QnpModel& qnp) {
    if (qnp.features.size() > kMaxFondAtoms)
        throw FondError("too many features for the boolean translation: " +
                        std::to_string(qnp.features.size()));
    FondModel fond;
    fond.atoms = qnp.features;
    auto mask_of = [](const CondSet& conds) {
        uint32_t mask = 0, val = 0;
        for (auto& [f, c] : conds) {
            mask |= 1u << f;
            if (c == FeatCond::Nonzero) val |= 1u << f;
        }
        return std::make_pair(mask, val);
    };
    for (auto& c : qnp.init) {
        auto [mask, val] = mask_of(c);
        // unconstrained atoms expand to both polarities
        uint32_t free = ~mask & (fond.num_states() - 1);
        for (uint32_t sub = free;; sub = (sub - 1) & free) {
            fond.inits.push_back(val | sub);
            if (sub == 0) break;
        }
    }
    std::sort(fond.inits.begin(), fond.inits.end());
    fond.inits.erase(std::unique(fond.inits.begin(), fond.inits.end()), fond.inits.end());
    for (auto& c : qnp.goal_dnf) fond.goal.push_back(mask_of(c));
    for (auto& a : qnp.actions) {
        FondAction fa;
        fa.name = a.name;
        fa.eff = a.eff;
        std::tie(fa.pre_mask, fa.pre_val) = mask_of(a.pre);
        fa.outcomes.push_back({});
        for (auto& [f, e] : a.eff) {
            uint32_t bit = 1u << f;
            switch (e) {
                case FeatEff::Set:
                case FeatEff::Inc:
                    for (auto& o : fa.outcomes) o.set |= bit;
                    break;
                case FeatEff::Clear:
                    for (auto& o : fa.outcomes) o.clear |= bit;
                    break;
                case FeatEff::Dec: {
                    // the count either stays positive or reaches zero
                    std::vector<FondOutcome> expanded;
                    for (auto& o : fa.outcomes) {
                        expanded.push_back(o);
                        FondOutcome z = o;
                        z.clear |= bit;
                        expanded.push_back(z);
                    }
                    fa.outcomes = std::move(expanded);
                    break;
                }
            }
        }
        fond.actions.push_back(std::move(fa));
    }
    return fond;
}

namespace {

// Safe actions per state within a candidate set, i.e. all outcomes stay inside.
std::vector<std::vector<int>> safe_actions(const FondModel& fond,
                                           const std::vector<bool>& in_set) {
    std::vector<std::vector<int>> safe(fond.num_states());
    for (uint32_t s = 0; s < fond.num_states(); ++s) {
        if (!in_set[s] || fond.is_goal(s)) continue;
        for (size_t a = 0; a < fond.actions.size(); ++a) {
            if (!fond.actions[a].applicable(s)) continue;
            bool ok = true;
            for (auto& o : fond.actions[a].outcomes)
                if (!in_set[o.apply(s)]) { ok = false; break; }
            if (ok) safe[s].push_back(static_cast<int>(a));
        }
    }
    return safe;
}

// Backward layers towards the goal using safe actions; layer 0 is the goal.
std::vector<int> goal_layers(const FondModel& fond, const std::vector<bool>& in_set,
                             const std::vector<std::vector<int>>& safe) {
    std::vector<int> layer(fond.num_states(), -1);
    for (uint32_t s = 0; s < fond.num_states(); ++s)
        if (in_set[s] && fond.is_goal(s)) layer[s] = 0;
    bool changed = true;
    int depth = 0;
    while (changed) {
        changed = false;
        ++depth;
        for (uint32_t s = 0; s < fond.num_states(); ++s) {
            if (!in_set[s] || layer[s] >= 0) continue;
            for (int a : safe[s]) {
                bool reaches = false;
                for (auto& o : fond.actions[static_cast<size_t>(a)].outcomes) {
                    int l = layer[o.apply(s)];
                    if (l >= 0 && l < depth) { reaches = true; break; }
                }
                if (reaches) {
                    layer[s] = depth;
                    changed = true;
                    break;
                }
            }
        }
    }
    return layer;
}

}  // namespace

std::vector<uint32_t> strong_cyclic_set(const FondModel& fond) {
    std::vector<bool> in_set(fond.num_states(), true);
    while (true) {
        auto safe = safe_actions(fond, in_set);
        auto layer = goal_layers(fond, in_set, safe);
        bool shrunk = false;
        for (uint32_t s = 0; s < fond.num_states(); ++s)
            if (in_set[s] && layer[s] < 0) {
                in_set[s] = false;
                shrunk = true;
            }
        if (!shrunk) break;
    }
    std::vector<uint32_t> out;
    for (uint32_t s = 0; s < fond.num_states(); ++s)
        if (in_set[s]) out.push_back(s);
    return out;
}

std::optional<Policy> strong_cyclic_solve(const FondModel& fond) {
    std::vector<bool> in_set(fond.num_states(), false);
    for (uint32_t s : strong_cyclic_set(fond)) in_set[s] = true;
    for (uint32_t init : fond.inits)
        if (!in_set[init]) return std::nullopt;
    auto safe = safe_actions(fond, in_set);
    auto layer = goal_layers(fond, in_set, safe);
    Policy policy;
    for (uint32_t s = 0; s < fond.num_states(); ++s) {
        if (!in_set[s] || fond.is_goal(s)) continue;
        int best = -1, best_layer = -1;
        for (int a : safe[s]) {
            int closest = -1;
            for (auto& o : fond.actions[static_cast<size_t>(a)].outcomes) {
                int l = layer[o.apply(s)];
                if (closest < 0 || l < closest) closest = l;
            }
            if (best < 0 || closest < best_layer) {
                best = a;
                best_layer = closest;
            }
        }
        policy.rules[s] = best;
    }
    return policy;
}

bool is_strong_cyclic(const FondModel& fond, const Policy& policy) {
    for (uint32_t init : fond.inits)
        if (!fond.is_goal(init) && !policy.rules.count(init)) return false;
    // closure: every successor of a ruled state is ruled or a goal
    for (auto& [s, a] : policy.rules) {
        if (a < 0 || a >= static_cast<int>(fond.actions.size())) return false;
        if (!fond.actions[static_cast<size_t>(a)].applicable(s)) return false;
        for (auto& o : fond.actions[static_cast<size_t>(a)].outcomes) {
            uint32_t t = o.apply(s);
            if (!fond.is_goal(t) && !policy.rules.count(t)) return false;
        }
    }
    // goal reachability from every ruled state, forward within the policy graph
    for (auto& [start, unused] : policy.rules) {
        std::vector<uint32_t> stack{start};
        std::map<uint32_t, bool> seen{{start, true}};
        bool found = false;
        while (!stack.empty() && !found) {
            uint32_t s = stack.back();
            stack.pop_back();
            if (fond.is_goal(s)) { found = true; break; }
            int a = policy.rules.at(s);
            for (auto& o : fond.actions[static_cast<size_t>(a)].outcomes) {
                uint32_t t = o.apply(s);
                if (fond.is_goal(t)) { found = true; break; }
                if (!seen[t]) {
                    seen[t] = true;
                    stack.push_back(t);
                }
            }
        }
        if (!found) return false;
    }
    return true;
}

namespace {

struct SieveEdge {
    int from, to;     // indices into the node list
    int action;
    bool removed = false;
};

// Tarjan over the surviving edges.
std::vector<int> scc_components(int n, const std::vector<SieveEdge>& edges) {
    std::vector<std::vector<int>> adj(static_cast<size_t>(n));
    for (size_t e = 0; e < edges.size(); ++e)
        if (!edges[e].removed) adj[static_cast<size_t>(edges[e].from)].push_back(edges[e].to);
    std::vector<int> comp(static_cast<size_t>(n), -1), low(static_cast<size_t>(n)),
        num(static_cast<size_t>(n), -1), stk;
    std::vector<bool> on_stack(static_cast<size_t>(n), false);
    int counter = 0, ncomp = 0;
    std::function<void(int)> dfs = [&](int v) {
        num[static_cast<size_t>(v)] = low[static_cast<size_t>(v)] = counter++;
        stk.push_back(v);
        on_stack[static_cast<size_t>(v)] = true;
        for (int w : adj[static_cast<size_t>(v)]) {
            if (num[static_cast<size_t>(w)] < 0) {
                dfs(w);
                low[static_cast<size_t>(v)] =
                    std::min(low[static_cast<size_t>(v)], low[static_cast<size_t>(w)]);
            } else if (on_stack[static_cast<size_t>(w)]) {
                low[static_cast<size_t>(v)] =
                    std::min(low[static_cast<size_t>(v)], num[static_cast<size_t>(w)]);
            }
        }
        if (low[static_cast<size_t>(v)] == num[static_cast<size_t>(v)]) {
            while (true) {
                int w = stk.back();
                stk.pop_back();
                on_stack[static_cast<size_t>(w)] = false;
                comp[static_cast<size_t>(w)] = ncomp;
                if (w == v) break;
            }
            ++ncomp;
        }
    };
    for (int v = 0; v < n; ++v)
        if (num[static_cast<size_t>(v)] < 0) dfs(v);
    return comp;
}

}  // namespace

bool terminates(const FondModel& fond, const Policy& policy) {
    std::vector<uint32_t> nodes;
    std::map<uint32_t, int> index;
    for (auto& [s, a] : policy.rules) {
        index[s] = static_cast<int>(nodes.size());
        nodes.push_back(s);
    }
    std::vector<SieveEdge> edges;
    for (auto& [s, a] : policy.rules)
        for (auto& o : fond.actions[static_cast<size_t>(a)].outcomes) {
            uint32_t t = o.apply(s);
            if (index.count(t)) edges.push_back({index[s], index[t], a});
        }

    bool changed = true;
    while (changed) {
        changed = false;
        auto comp = scc_components(static_cast<int>(nodes.size()), edges);
        // inc/dec features per component, over surviving intra-component edges
        std::map<std::pair<int, int>, bool> inc;  // (component, feature)
        for (auto& e : edges) {
            if (e.removed || comp[static_cast<size_t>(e.from)] != comp[static_cast<size_t>(e.to)])
                continue;
            for (auto& [f, eff] : fond.actions[static_cast<size_t>(e.action)].eff)
                if (eff == FeatEff::Inc) inc[{comp[static_cast<size_t>(e.from)], f}] = true;
        }
        for (auto& e : edges) {
            if (e.removed || comp[static_cast<size_t>(e.from)] != comp[static_cast<size_t>(e.to)])
                continue;
            for (auto& [f, eff] : fond.actions[static_cast<size_t>(e.action)].eff)
                if (eff == FeatEff::Dec && fond.atoms[static_cast<size_t>(f)].numeric &&
                    !inc.count({comp[static_cast<size_t>(e.from)], f})) {
                    e.removed = true;
                    changed = true;
                    break;
                }
        }
    }

    // acyclic residue: no surviving intra-component edge
    auto comp = scc_components(static_cast<int>(nodes.size()), edges);
    for (auto& e : edges)
        if (!e.removed && comp[static_cast<size_t>(e.from)] == comp[static_cast<size_t>(e.to)])
            return false;
    return true;
}

std::optional<Policy> solve_qnp(const QnpModel& qnp, FondModel* out_fond) {
    FondModel fond = qnp_to_fond(qnp);
    if (out_fond) *out_fond = fond;

    auto layered = strong_cyclic_solve(fond);
    if (!layered) return std::nullopt;
    if (terminates(fond, *layered)) return layered;

    // lexicographic search over safe action choices
    std::vector<bool> in_set(fond.num_states(), false);
    for (uint32_t s : strong_cyclic_set(fond)) in_set[s] = true;
    auto safe = safe_actions(fond, in_set);
    std::vector<uint32_t> slots;
    for (uint32_t s = 0; s < fond.num_states(); ++s)
        if (in_set[s] && !fond.is_goal(s)) slots.push_back(s);
    std::vector<size_t> choice(slots.size(), 0);
    const size_t kMaxCombos = 1u << 22;
    size_t combos = 0;
    while (true) {
        Policy candidate;
        bool feasible = true;
        for (size_t i = 0; i < slots.size(); ++i) {
            if (safe[slots[i]].empty()) { feasible = false; break; }
            candidate.rules[slots[i]] = safe[slots[i]][choice[i]];
        }
        if (feasible && is_strong_cyclic(fond, candidate) && terminates(fond, candidate))
            return candidate;
        if (++combos >= kMaxCombos) break;
        size_t i = 0;
        while (i < slots.size()) {
            if (++choice[i] < safe[slots[i]].size()) break;
            choice[i] = 0;
            ++i;
        }
        if (i == slots.size()) break;
    }
    return std::nullopt;
}

namespace {

nlohmann::json state_json(const FondModel& fond, uint32_t s) {
    nlohmann::json j = nlohmann::json::object();
    for (int f = 0; f < fond.num_atoms(); ++f)
        j[fond.atoms[static_cast<size_t>(f)].name] = (s >> f) & 1u ? true : false;
    return j;
}

std::string state_text(const FondModel& fond, uint32_t s) {
    std::string out;
    for (int f = 0; f < fond.num_atoms(); ++f) {
        if (!out.empty()) out += ", ";
        const QnpFeature& ft = fond.atoms[static_cast<size_t>(f)];
        bool pos = (s >> f) & 1u;
        out += ft.numeric ? ft.name + (pos ? ">0" : "=0") : (pos ? "" : "-") + ft.name;
    }
    return out;
}

}  // namespace

std::string policy_to_json(const FondModel& fond, const Policy& policy) {
    nlohmann::json j;
    j["atoms"] = nlohmann::json::array();
    for (auto& a : fond.atoms) j["atoms"].push_back({{"name", a.name}, {"numeric", a.numeric}});
    j["rules"] = nlohmann::json::array();
    for (auto& [s, a] : policy.rules)
        j["rules"].push_back({{"state", s},
                              {"valuation", state_json(fond, s)},
                              {"action", fond.actions[static_cast<size_t>(a)].name},
                              {"action_index", a}});
    return j.dump(2);
}

Policy policy_from_json(const FondModel& fond, const std::string& text) {
    nlohmann::json j = nlohmann::json::parse(text);
    Policy policy;
    for (auto& r : j.at("rules")) {
        uint32_t s = r.at("state").get<uint32_t>();
        if (s >= fond.num_states()) throw FondError("policy state out of range");
        int a = r.at("action_index").get<int>();
        if (a < 0 || a >= static_cast<int>(fond.actions.size()))
            throw FondError("policy action out of range");
        policy.rules[s] = a;
    }
    return policy;
}

std::string policy_table(const FondModel& fond, const Policy& policy) {
    std::ostringstream os;
    for (auto& [s, a] : policy.rules)
        os << "if " << state_text(fond, s) << " then "
           << fond.actions[static_cast<size_t>(a)].name << "\n";
    return os.str();
}

}  // namespace gpl
