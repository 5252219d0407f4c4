#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "gpl/abstraction.hpp"

namespace gpl {

// Boolean FOND problem over one atom per feature ("f holds" = value nonzero).
// States are bitmasks, so the atom count is capped.
inline constexpr int kMaxFondAtoms = 20;

struct FondOutcome {
    uint32_t set = 0;
    uint32_t clear = 0;
    uint32_t apply(uint32_t state) const { return (state | set) & ~clear; }
};

struct FondAction {
    std::string name;
    uint32_t pre_mask = 0;  // atoms constrained by the precondition
    uint32_t pre_val = 0;   // required values on those atoms
    std::vector<FondOutcome> outcomes;
    std::map<int, FeatEff> eff;  // qualitative label, used by the termination sieve

    bool applicable(uint32_t state) const { return (state & pre_mask) == pre_val; }
};

struct FondModel {
    std::vector<QnpFeature> atoms;
    std::vector<uint32_t> inits;
    std::vector<std::pair<uint32_t, uint32_t>> goal;  // DNF of (mask, val)
    std::vector<FondAction> actions;

    int num_atoms() const { return static_cast<int>(atoms.size()); }
    uint32_t num_states() const { return 1u << atoms.size(); }
    bool is_goal(uint32_t state) const {
        for (auto& [mask, val] : goal)
            if ((state & mask) == val) return true;
        return false;
    }
};

struct FondError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Deterministic atoms for increments and boolean flips; a decrement branches
// on whether the count hits zero.
FondModel qnp_to_fond(const QnpModel& qnp);

struct Policy {
    std::map<uint32_t, int> rules;  // state -> action index
};

// All states from which some policy reaches the goal with certainty under
// fairness (strong cyclic solvable set).
std::vector<uint32_t> strong_cyclic_set(const FondModel& fond);

// Layered policy over the whole solvable set; empty when some initial state
// falls outside it.
std::optional<Policy> strong_cyclic_solve(const FondModel& fond);

// Reference check, independent of how the policy was produced: closure within
// the domain plus goal reachability from every non-goal state in it.
bool is_strong_cyclic(const FondModel& fond, const Policy& policy);

// Sieve on the policy graph: repeatedly delete edges that decrement a numeric
// feature no edge of the same strongly connected component increments; the
// policy terminates iff the residue is acyclic.
bool terminates(const FondModel& fond, const Policy& policy);

// First terminating strong-cyclic policy: the layered one when it passes the
// sieve, otherwise lexicographic search over action choices.
std::optional<Policy> solve_qnp(const QnpModel& qnp, FondModel* out_fond = nullptr);

std::string policy_to_json(const FondModel& fond, const Policy& policy);
Policy policy_from_json(const FondModel& fond, const std::string& text);
std::string policy_table(const FondModel& fond, const Policy& policy);

}  // namespace gpl
