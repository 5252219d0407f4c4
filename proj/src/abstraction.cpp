#include "gpl/abstraction.hpp"

#include <algorithm>
#include <sstream>

#include <json.hpp>

namespace gpl {

namespace {

std::string schema_of(const std::string& ground) {
    auto p = ground.find('(');
    return p == std::string::npos ? ground : ground.substr(0, p);
}

std::string cond_text(const std::string& feature, bool numeric, FeatCond c) {
    if (numeric) return c == FeatCond::Zero ? feature + "=0" : feature + ">0";
    return c == FeatCond::Zero ? "-" + feature : feature;
}

std::string eff_text(const std::string& feature, FeatEff e) {
    switch (e) {
        case FeatEff::Set: return feature;
        case FeatEff::Clear: return "-" + feature;
        case FeatEff::Inc: return feature + "++";
        case FeatEff::Dec: return feature + "--";
    }
    return feature;
}

std::string cond_set_text(const QnpModel& qnp, const CondSet& conds) {
    std::string out;
    for (auto& [f, c] : conds) {
        if (!out.empty()) out += ", ";
        out += cond_text(qnp.features[static_cast<size_t>(f)].name,
                         qnp.features[static_cast<size_t>(f)].numeric, c);
    }
    return out;
}

}  // namespace

AbstractAction abstract_transition(const SampleSet& sample, const FeatureMatrix& matrix,
                                   const std::vector<int>& selected, int transition) {
    const SampleTransition& tr = sample.transitions[static_cast<size_t>(transition)];
    AbstractAction a;
    for (int f : selected) {
        a.pre[f] = matrix.zero(tr.src, f) ? FeatCond::Zero : FeatCond::Nonzero;
        switch (matrix.delta(f, tr.src, tr.dst)) {
            case QualChange::Pos: a.eff[f] = FeatEff::Set; break;
            case QualChange::Neg: a.eff[f] = FeatEff::Clear; break;
            case QualChange::Inc: a.eff[f] = FeatEff::Inc; break;
            case QualChange::Dec: a.eff[f] = FeatEff::Dec; break;
            case QualChange::None: break;
        }
    }
    int inst = sample.states[static_cast<size_t>(tr.src)].state.instance_id;
    a.source_names.insert(
        schema_of(sample.instances[static_cast<size_t>(inst)]->actions[static_cast<size_t>(tr.action)].name));
    return a;
}

std::vector<AbstractAction> extract_actions(const SampleSet& sample,
                                            const FeatureMatrix& matrix,
                                            const std::vector<int>& selected,
                                            TransitionScope scope) {
    std::vector<AbstractAction> actions;
    for (size_t t = 0; t < sample.transitions.size(); ++t) {
        if (scope == TransitionScope::Marked && !sample.transitions[t].marked) continue;
        AbstractAction a = abstract_transition(sample, matrix, selected, static_cast<int>(t));
        auto it = std::find(actions.begin(), actions.end(), a);
        if (it == actions.end())
            actions.push_back(std::move(a));
        else
            it->source_names.insert(a.source_names.begin(), a.source_names.end());
    }
    std::sort(actions.begin(), actions.end());

    // Merge pairs that share effects and disagree only in the polarity of one
    // precondition; the disagreeing condition is immaterial, drop it.
    bool merged = true;
    while (merged) {
        merged = false;
        for (size_t i = 0; i < actions.size() && !merged; ++i) {
            for (size_t j = i + 1; j < actions.size() && !merged; ++j) {
                if (actions[i].eff != actions[j].eff) continue;
                const CondSet& p = actions[i].pre;
                const CondSet& q = actions[j].pre;
                if (p.size() != q.size()) continue;
                int differing = -1;
                bool same_keys = true;
                for (auto it_p = p.begin(), it_q = q.begin(); it_p != p.end(); ++it_p, ++it_q) {
                    if (it_p->first != it_q->first) { same_keys = false; break; }
                    if (it_p->second != it_q->second) {
                        if (differing >= 0) { differing = -2; break; }
                        differing = it_p->first;
                    }
                }
                if (!same_keys || differing < 0) continue;
                actions[i].pre.erase(differing);
                actions[i].source_names.insert(actions[j].source_names.begin(),
                                               actions[j].source_names.end());
                actions.erase(actions.begin() + static_cast<long>(j));
                merged = true;
            }
        }
        if (merged) std::sort(actions.begin(), actions.end());
    }

    // Stable names from the witnessing schemas.
    std::map<std::string, int> name_count;
    for (auto& a : actions) {
        std::string base;
        for (auto& n : a.source_names) base += (base.empty() ? "" : "_") + n;
        if (base.empty()) base = "act";
        name_count[base]++;
    }
    std::map<std::string, int> name_seen;
    for (auto& a : actions) {
        std::string base;
        for (auto& n : a.source_names) base += (base.empty() ? "" : "_") + n;
        if (base.empty()) base = "act";
        int seq = ++name_seen[base];
        a.name = name_count[base] > 1 ? base + "_" + std::to_string(seq) : base;
    }
    return actions;
}

bool pre_holds(const FeatureMatrix& matrix, const CondSet& pre, int state) {
    for (auto& [f, c] : pre)
        if (matrix.zero(state, f) != (c == FeatCond::Zero)) return false;
    return true;
}

bool effects_match(const SampleSet& sample, const FeatureMatrix& matrix,
                   const std::vector<int>& selected, const AbstractAction& action,
                   int transition) {
    const SampleTransition& tr = sample.transitions[static_cast<size_t>(transition)];
    for (int f : selected) {
        QualChange d = matrix.delta(f, tr.src, tr.dst);
        auto it = action.eff.find(f);
        if (it == action.eff.end()) {
            if (d != QualChange::None) return false;
            continue;
        }
        switch (it->second) {
            case FeatEff::Set: if (d != QualChange::Pos) return false; break;
            case FeatEff::Clear: if (d != QualChange::Neg) return false; break;
            case FeatEff::Inc: if (d != QualChange::Inc) return false; break;
            case FeatEff::Dec: if (d != QualChange::Dec) return false; break;
        }
    }
    return true;
}

VerifyResult verify_sound_complete(const SampleSet& sample, const FeatureMatrix& matrix,
                                   const std::vector<int>& selected,
                                   const std::vector<AbstractAction>& actions,
                                   TransitionScope scope) {
    VerifyResult result;
    auto out = sample.outgoing();

    // Soundness: an applicable action must be realizable by some transition.
    for (auto& action : actions) {
        for (int s : sample.expanded_ids()) {
            if (!pre_holds(matrix, action.pre, s)) continue;
            bool witnessed = false;
            for (int t : out[static_cast<size_t>(s)])
                if (effects_match(sample, matrix, selected, action, t)) {
                    witnessed = true;
                    break;
                }
            if (!witnessed) {
                result.sound = false;
                result.issues.push_back("unsound: action '" + action.name +
                                        "' applicable at state " + std::to_string(s) +
                                        " with no matching transition");
            }
        }
    }

    // Completeness: every in-scope transition realizes some applicable action.
    for (size_t t = 0; t < sample.transitions.size(); ++t) {
        if (scope == TransitionScope::Marked && !sample.transitions[t].marked) continue;
        bool covered = false;
        for (auto& action : actions)
            if (pre_holds(matrix, action.pre, sample.transitions[t].src) &&
                effects_match(sample, matrix, selected, action, static_cast<int>(t))) {
                covered = true;
                break;
            }
        if (!covered) {
            result.complete = false;
            result.issues.push_back("incomplete: transition " + std::to_string(t) + " (" +
                                    std::to_string(sample.transitions[t].src) + " -> " +
                                    std::to_string(sample.transitions[t].dst) +
                                    ") matches no action");
        }
    }
    return result;
}

namespace {

std::vector<CondSet> distinct_valuations(const SampleSet& sample, const FeatureMatrix& matrix,
                                         const std::vector<int>& selected,
                                         const std::vector<int>& states) {
    std::vector<CondSet> out;
    for (int s : states) {
        CondSet v;
        for (int f : selected)
            v[f] = matrix.zero(s, f) ? FeatCond::Zero : FeatCond::Nonzero;
        if (std::find(out.begin(), out.end(), v) == out.end()) out.push_back(std::move(v));
    }
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace

std::vector<CondSet> learn_goal_dnf(const SampleSet& sample, const FeatureMatrix& matrix,
                                    const std::vector<int>& selected) {
    std::vector<int> goals;
    for (size_t s = 0; s < sample.states.size(); ++s)
        if (sample.states[s].goal) goals.push_back(static_cast<int>(s));
    return distinct_valuations(sample, matrix, selected, goals);
}

std::vector<CondSet> initial_conditions(const SampleSet& sample, const FeatureMatrix& matrix,
                                        const std::vector<int>& selected) {
    // State 0 of each instance is its initial state; sampling inserts them in
    // instance order before anything else reachable.
    std::vector<int> inits;
    std::vector<bool> seen(sample.instances.size(), false);
    for (size_t s = 0; s < sample.states.size(); ++s) {
        int inst = sample.states[s].state.instance_id;
        if (!seen[static_cast<size_t>(inst)] &&
            sample.states[s].state.atoms == sample.instances[static_cast<size_t>(inst)]->init) {
            seen[static_cast<size_t>(inst)] = true;
            inits.push_back(static_cast<int>(s));
        }
    }
    return distinct_valuations(sample, matrix, selected, inits);
}

QnpModel assemble_qnp(const FeatureMatrix& matrix, const std::vector<int>& selected,
                      const std::vector<AbstractAction>& actions,
                      const std::vector<CondSet>& init, const std::vector<CondSet>& goal_dnf) {
    QnpModel qnp;
    std::map<int, int> local;
    for (int f : selected) {
        local[f] = static_cast<int>(qnp.features.size());
        qnp.features.push_back({matrix.features[static_cast<size_t>(f)].name,
                                matrix.features[static_cast<size_t>(f)].numeric});
    }
    auto remap = [&](const CondSet& conds, const char* what) {
        CondSet out;
        for (auto& [f, c] : conds) {
            auto it = local.find(f);
            if (it == local.end())
                throw QnpError(std::string(what) + " refers to unselected feature " +
                               std::to_string(f));
            out[it->second] = c;
        }
        return out;
    };
    for (auto& a : actions) {
        AbstractAction r;
        r.name = a.name;
        r.source_names = a.source_names;
        r.pre = remap(a.pre, "action precondition");
        for (auto& [f, e] : a.eff) {
            auto it = local.find(f);
            if (it == local.end())
                throw QnpError("action effect refers to unselected feature " + std::to_string(f));
            r.eff[it->second] = e;
        }
        qnp.actions.push_back(std::move(r));
    }
    for (auto& c : init) qnp.init.push_back(remap(c, "init"));
    for (auto& c : goal_dnf) qnp.goal_dnf.push_back(remap(c, "goal"));
    if (qnp.goal_dnf.empty()) throw QnpError("empty goal");
    return qnp;
}

namespace {

nlohmann::json conds_json(const CondSet& conds) {
    nlohmann::json j = nlohmann::json::object();
    for (auto& [f, c] : conds) j[std::to_string(f)] = c == FeatCond::Zero ? "=0" : ">0";
    return j;
}

CondSet conds_from_json(const nlohmann::json& j) {
    CondSet out;
    for (auto& [k, v] : j.items())
        out[std::stoi(k)] = v.get<std::string>() == "=0" ? FeatCond::Zero : FeatCond::Nonzero;
    return out;
}

const char* eff_tag(FeatEff e) {
    switch (e) {
        case FeatEff::Set: return "set";
        case FeatEff::Clear: return "clear";
        case FeatEff::Inc: return "inc";
        case FeatEff::Dec: return "dec";
    }
    return "set";
}

FeatEff eff_from_tag(const std::string& t) {
    if (t == "set") return FeatEff::Set;
    if (t == "clear") return FeatEff::Clear;
    if (t == "inc") return FeatEff::Inc;
    if (t == "dec") return FeatEff::Dec;
    throw QnpError("unknown effect tag '" + t + "'");
}

}  // namespace

std::string qnp_to_json(const QnpModel& qnp) {
    nlohmann::json j;
    j["features"] = nlohmann::json::array();
    for (auto& f : qnp.features) j["features"].push_back({{"name", f.name}, {"numeric", f.numeric}});
    j["init"] = nlohmann::json::array();
    for (auto& c : qnp.init) j["init"].push_back(conds_json(c));
    j["goal"] = nlohmann::json::array();
    for (auto& c : qnp.goal_dnf) j["goal"].push_back(conds_json(c));
    j["actions"] = nlohmann::json::array();
    for (auto& a : qnp.actions) {
        nlohmann::json eff = nlohmann::json::object();
        for (auto& [f, e] : a.eff) eff[std::to_string(f)] = eff_tag(e);
        j["actions"].push_back({{"name", a.name}, {"pre", conds_json(a.pre)}, {"eff", eff}});
    }
    return j.dump(2);
}

QnpModel qnp_from_json(const std::string& text) {
    nlohmann::json j = nlohmann::json::parse(text);
    QnpModel qnp;
    for (auto& f : j.at("features"))
        qnp.features.push_back({f.at("name").get<std::string>(), f.at("numeric").get<bool>()});
    for (auto& c : j.at("init")) qnp.init.push_back(conds_from_json(c));
    for (auto& c : j.at("goal")) qnp.goal_dnf.push_back(conds_from_json(c));
    for (auto& a : j.at("actions")) {
        AbstractAction act;
        act.name = a.at("name").get<std::string>();
        act.pre = conds_from_json(a.at("pre"));
        for (auto& [k, v] : a.at("eff").items())
            act.eff[std::stoi(k)] = eff_from_tag(v.get<std::string>());
        qnp.actions.push_back(std::move(act));
    }
    return qnp;
}

std::string qnp_listing(const QnpModel& qnp) {
    std::ostringstream os;
    os << "features:";
    for (auto& f : qnp.features) os << " " << f.name << (f.numeric ? " [num]" : " [bool]");
    os << "\n";
    for (auto& c : qnp.init) os << "init: " << cond_set_text(qnp, c) << "\n";
    for (auto& c : qnp.goal_dnf) os << "goal: " << cond_set_text(qnp, c) << "\n";
    for (auto& a : qnp.actions) {
        os << a.name << " <";
        os << cond_set_text(qnp, a.pre);
        os << "; ";
        std::string eff;
        for (auto& [f, e] : a.eff) {
            if (!eff.empty()) eff += ", ";
            eff += eff_text(qnp.features[static_cast<size_t>(f)].name, e);
        }
        os << eff << ">\n";
    }
    return os.str();
}

}  // namespace gpl
