#include "gpl/encoder.hpp"

#include <algorithm>

#include <json.hpp>

namespace gpl {

namespace {

std::pair<int, int> ordered(int a, int b) { return a < b ? std::make_pair(a, b) : std::make_pair(b, a); }

}  // namespace

Theory build_theory(const SampleSet& sample, const FeatureMatrix& matrix,
                    TheoryVariant variant) {
    if (!check_closure(sample)) throw std::invalid_argument("sample set is not closed");
    if (matrix.num_features() == 0) throw std::invalid_argument("empty feature pool");

    Theory theory;
    TheoryVars& vars = theory.vars;
    vars.variant = variant;
    const std::vector<int> expanded = sample.expanded_ids();
    const size_t nf = matrix.num_features();

    // Pure-literal pre-filter: a feature that neither distinguishes any pair
    // of expanded states nor changes differently across transitions can never
    // occur in a disjunct of (1) or (2).
    std::vector<bool> keep(nf, false);
    for (size_t f = 0; f < nf; ++f) {
        bool truth_varies = false;
        for (size_t i = 1; i < expanded.size() && !truth_varies; ++i)
            truth_varies = matrix.zero(expanded[i], static_cast<int>(f)) !=
                           matrix.zero(expanded[0], static_cast<int>(f));
        bool delta_varies = false;
        for (size_t t = 1; t < sample.transitions.size() && !delta_varies; ++t)
            delta_varies =
                matrix.delta(static_cast<int>(f), sample.transitions[t].src,
                             sample.transitions[t].dst) !=
                matrix.delta(static_cast<int>(f), sample.transitions[0].src,
                             sample.transitions[0].dst);
        keep[f] = truth_varies || delta_varies;
    }

    vars.selected.assign(nf, -1);
    int next_var = 0;
    for (size_t f = 0; f < nf; ++f)
        if (keep[f]) vars.selected[f] = next_var++;

    // Marked material (variant T treats everything as marked).
    std::vector<int> marked_transitions;
    std::vector<int> marked_sources;
    for (size_t t = 0; t < sample.transitions.size(); ++t)
        if (variant == TheoryVariant::T || sample.transitions[t].marked)
            marked_transitions.push_back(static_cast<int>(t));
    for (int t : marked_transitions) {
        int src = sample.transitions[static_cast<size_t>(t)].src;
        if (std::find(marked_sources.begin(), marked_sources.end(), src) ==
            marked_sources.end())
            marked_sources.push_back(src);
    }
    std::sort(marked_sources.begin(), marked_sources.end());

    // D1 variables: (marked source, expanded) pairs plus goal/non-goal pairs.
    for (int s : marked_sources)
        for (int t : expanded)
            if (s != t) vars.d1.emplace(ordered(s, t), -1);
    std::vector<std::pair<int, int>> goal_pairs;
    for (size_t i = 0; i < expanded.size(); ++i)
        for (size_t j = i + 1; j < expanded.size(); ++j)
            if (sample.states[static_cast<size_t>(expanded[i])].goal !=
                sample.states[static_cast<size_t>(expanded[j])].goal) {
                goal_pairs.emplace_back(expanded[i], expanded[j]);
                vars.d1.emplace(ordered(expanded[i], expanded[j]), -1);
            }
    for (auto& [key, var] : vars.d1) var = next_var++;

    // D2 variables: (marked transition, any transition) with distinct sources.
    for (int i : marked_transitions)
        for (size_t j = 0; j < sample.transitions.size(); ++j)
            if (sample.transitions[static_cast<size_t>(i)].src !=
                sample.transitions[j].src)
                vars.d2.emplace(ordered(i, static_cast<int>(j)), -1);
    for (auto& [key, var] : vars.d2) var = next_var++;
    vars.num_vars = next_var;

    WeightedCnf& cnf = theory.cnf;
    cnf.num_vars = next_var;
    auto pos = [](int var) { return var + 1; };
    auto neg = [](int var) { return -(var + 1); };

    // (1)  D1(s,t) <-> OR selected(f) over features with different values
    for (auto& [key, d1var] : vars.d1) {
        auto [s, t] = key;
        std::vector<int> clause{neg(d1var)};
        for (size_t f = 0; f < nf; ++f) {
            if (!keep[f] || !matrix.distinguishes(static_cast<int>(f), s, t)) continue;
            clause.push_back(pos(vars.selected[f]));
            cnf.hard.push_back({neg(vars.selected[f]), pos(d1var)});
        }
        cnf.hard.push_back(std::move(clause));
    }

    // (2)  D2(s,s',t,t') <-> OR selected(f) over features with equal values in
    // s,t but different qualitative change across the two transitions
    for (auto& [key, d2var] : vars.d2) {
        const SampleTransition& a = sample.transitions[static_cast<size_t>(key.first)];
        const SampleTransition& b = sample.transitions[static_cast<size_t>(key.second)];
        std::vector<int> clause{neg(d2var)};
        for (size_t f = 0; f < nf; ++f) {
            if (!keep[f]) continue;
            if (matrix.distinguishes(static_cast<int>(f), a.src, b.src)) continue;
            if (matrix.delta(static_cast<int>(f), a.src, a.dst) ==
                matrix.delta(static_cast<int>(f), b.src, b.dst))
                continue;
            clause.push_back(pos(vars.selected[f]));
            cnf.hard.push_back({neg(vars.selected[f]), pos(d2var)});
        }
        cnf.hard.push_back(std::move(clause));
    }

    // (3)  -D1(s,t) -> OR_t' -D2(s,s',t,t')
    auto out = sample.outgoing();
    for (int t : marked_transitions) {
        const SampleTransition& tr = sample.transitions[static_cast<size_t>(t)];
        for (int other : expanded) {
            if (other == tr.src) continue;
            std::vector<int> clause{pos(vars.d1.at(ordered(tr.src, other)))};
            for (int succ_tr : out[static_cast<size_t>(other)])
                clause.push_back(neg(vars.d2.at(ordered(t, succ_tr))));
            cnf.hard.push_back(std::move(clause));
        }
    }

    // (4)  D1(s,t) for expanded pairs where exactly one state is a goal
    for (auto& [s, t] : goal_pairs)
        cnf.hard.push_back({pos(vars.d1.at(ordered(s, t)))});

    for (size_t f = 0; f < nf; ++f)
        if (keep[f] && matrix.features[f].cost > 0)
            cnf.soft.push_back({{neg(vars.selected[f])}, matrix.features[f].cost});

    return theory;
}

std::pair<double, double> size_bound(const SampleSet& sample, size_t pool_size) {
    double m = static_cast<double>(sample.num_expanded());
    double b = m > 0 ? static_cast<double>(sample.transitions.size()) / m : 0.0;
    double F = static_cast<double>(pool_size);
    double var_bound = F + m * m * (b * b + 1);
    double clause_bound = m * m * (2 + b * b + b + F * (b * b + 1));
    return {var_bound, clause_bound};
}

std::string theory_vars_to_json(const TheoryVars& vars, const FeatureMatrix& matrix) {
    nlohmann::json j;
    nlohmann::json sel = nlohmann::json::object();
    for (size_t f = 0; f < vars.selected.size(); ++f)
        if (vars.selected[f] >= 0)
            sel[std::to_string(vars.selected[f] + 1)] = "selected(" + matrix.features[f].name + ")";
    j["selected"] = sel;
    nlohmann::json d1 = nlohmann::json::object();
    for (auto& [key, var] : vars.d1)
        d1[std::to_string(var + 1)] = {key.first, key.second};
    j["d1"] = d1;
    nlohmann::json d2 = nlohmann::json::object();
    for (auto& [key, var] : vars.d2)
        d2[std::to_string(var + 1)] = {key.first, key.second};
    j["d2"] = d2;
    j["num_vars"] = vars.num_vars;
    j["variant"] = vars.variant == TheoryVariant::T ? "T" : "TG";
    return j.dump(2);
}

}  // namespace gpl
