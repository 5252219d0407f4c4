#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "gpl/feature_matrix.hpp"
#include "gpl/sampler.hpp"

namespace gpl {

enum class FeatCond { Zero, Nonzero };
enum class FeatEff { Set, Clear, Inc, Dec };

// Condition set over feature ids: for booleans Nonzero reads p / Zero reads
// not-p, for numerics Nonzero reads n>0 / Zero reads n=0.
using CondSet = std::map<int, FeatCond>;

struct AbstractAction {
    std::string name;
    CondSet pre;
    std::map<int, FeatEff> eff;
    std::set<std::string> source_names;  // schema names of witness transitions

    bool operator==(const AbstractAction& o) const { return pre == o.pre && eff == o.eff; }
    bool operator<(const AbstractAction& o) const {
        if (eff != o.eff) return eff < o.eff;
        return pre < o.pre;
    }
};

enum class TransitionScope { Marked, All };

struct VerifyResult {
    bool sound = true;
    bool complete = true;
    std::vector<std::string> issues;  // human-readable witnesses of failures
    bool ok() const { return sound && complete; }
};

// Qualitative condition/effect pair of a single sampled transition.
AbstractAction abstract_transition(const SampleSet& sample, const FeatureMatrix& matrix,
                                   const std::vector<int>& selected, int transition);

// One abstract action per distinct qualitative profile, with complementary
// preconditions on a single feature merged away (to fixpoint).
std::vector<AbstractAction> extract_actions(const SampleSet& sample,
                                            const FeatureMatrix& matrix,
                                            const std::vector<int>& selected,
                                            TransitionScope scope);

// Sound: every applicable abstract action at an expanded sampled state has a
// concrete transition with the same qualitative effects.  Complete: every
// in-scope transition is covered by some abstract action.
VerifyResult verify_sound_complete(const SampleSet& sample, const FeatureMatrix& matrix,
                                   const std::vector<int>& selected,
                                   const std::vector<AbstractAction>& actions,
                                   TransitionScope scope);

// Whether the action's precondition holds at a sampled state and, if so,
// whether a transition matches its effects.
bool pre_holds(const FeatureMatrix& matrix, const CondSet& pre, int state);
bool effects_match(const SampleSet& sample, const FeatureMatrix& matrix,
                   const std::vector<int>& selected, const AbstractAction& action,
                   int transition);

// Distinct feature valuations (as conditions) over the sampled goal states.
std::vector<CondSet> learn_goal_dnf(const SampleSet& sample, const FeatureMatrix& matrix,
                                    const std::vector<int>& selected);

// Same over the initial states of the training instances.
std::vector<CondSet> initial_conditions(const SampleSet& sample, const FeatureMatrix& matrix,
                                        const std::vector<int>& selected);

struct QnpFeature {
    std::string name;
    bool numeric = false;
};

// Qualitative numeric problem over the selected features; feature references
// inside actions/init/goal are indices into `features`.
struct QnpModel {
    std::vector<QnpFeature> features;
    std::vector<CondSet> init;      // disjunction of possible initial valuations
    std::vector<CondSet> goal_dnf;  // disjunction of goal valuations
    std::vector<AbstractAction> actions;
};

struct QnpError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

QnpModel assemble_qnp(const FeatureMatrix& matrix, const std::vector<int>& selected,
                      const std::vector<AbstractAction>& actions,
                      const std::vector<CondSet>& init, const std::vector<CondSet>& goal_dnf);

std::string qnp_to_json(const QnpModel& qnp);
QnpModel qnp_from_json(const std::string& text);

// Readable <Pre; Eff> listing, one action per line.
std::string qnp_listing(const QnpModel& qnp);

}  // namespace gpl
