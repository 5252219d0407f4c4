#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "gpl/feature_matrix.hpp"
#include "gpl/sampler.hpp"
#include "gpl/wcnf.hpp"

namespace gpl {

enum class TheoryVariant { T, TG };

// Variable layout of a learning theory: selected(f), D1(s,t), D2(ss',tt').
// D1/D2 are symmetric and stored under canonically ordered keys.
struct TheoryVars {
    TheoryVariant variant = TheoryVariant::T;
    std::vector<int> selected;  // feature id -> var id, -1 if pre-filtered out
    std::map<std::pair<int, int>, int> d1;  // (state, state), first < second
    std::map<std::pair<int, int>, int> d2;  // (transition, transition), first < second
    int num_vars = 0;

    int selected_var(int feature) const { return selected[static_cast<size_t>(feature)]; }
    std::vector<int> selected_features(const Assignment& a) const {
        std::vector<int> out;
        for (size_t f = 0; f < selected.size(); ++f)
            if (selected[f] >= 0 && a.values[static_cast<size_t>(selected[f])])
                out.push_back(static_cast<int>(f));
        return out;
    }
};

struct Theory {
    WeightedCnf cnf;
    TheoryVars vars;
};

Theory build_theory(const SampleSet& sample, const FeatureMatrix& matrix,
                    TheoryVariant variant);

// Closed-form bounds on variable/clause counts, with m the number of expanded
// states and b their average branching factor.
std::pair<double, double> size_bound(const SampleSet& sample, size_t pool_size);

std::string theory_vars_to_json(const TheoryVars& vars, const FeatureMatrix& matrix);

}  // namespace gpl
