#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "gpl/bitset.hpp"

namespace gpl {

struct ParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct UnsupportedFeatureError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct GroundingError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Predicate {
    std::string name;
    int arity = 0;
    // Goal copies p_G have a fixed denotation given by the instance goal.
    bool goal_copy = false;
    int origin = -1;  // predicate id this is a copy of
};

// Schema-level literal: args are parameter indices (>= 0) or domain constant
// ids encoded as -(cid + 1).
struct SchemaLiteral {
    int pred = -1;
    std::vector<int> args;
};

struct ActionSchema {
    std::string name;
    std::vector<std::string> params;
    std::vector<SchemaLiteral> pre, add, del;
};

struct DomainModel {
    std::string name;
    std::vector<Predicate> predicates;
    std::vector<std::string> constants;
    std::vector<ActionSchema> schemas;

    int predicate_id(const std::string& n) const {
        for (size_t i = 0; i < predicates.size(); ++i)
            if (predicates[i].name == n) return static_cast<int>(i);
        return -1;
    }
};

struct GroundLiteral {
    bool positive = true;
    std::string pred;
    std::vector<std::string> args;
};

struct ProblemDescription {
    std::string name;
    std::vector<std::string> objects;                 // problem objects (constants excluded)
    std::vector<std::pair<std::string, std::string>> object_types;  // (object, type)
    std::vector<GroundLiteral> init;                  // positive facts
    std::vector<GroundLiteral> goal;
};

struct GroundAtom {
    int pred = -1;
    std::vector<int> args;  // object ids
    bool operator==(const GroundAtom& o) const { return pred == o.pred && args == o.args; }
    bool operator<(const GroundAtom& o) const {
        return pred != o.pred ? pred < o.pred : args < o.args;
    }
};

struct GroundAction {
    int id = -1;
    std::string name;  // e.g. "unstack(b2,b1)"
    Bitset pre, add, del;
};

struct State {
    int instance_id = -1;
    Bitset atoms;

    bool operator==(const State& o) const {
        return instance_id == o.instance_id && atoms == o.atoms;
    }
};

struct StateHash {
    size_t operator()(const State& s) const {
        return s.atoms.hash() * 31 + static_cast<size_t>(s.instance_id);
    }
};

class GroundInstance {
  public:
    int id = 0;
    std::shared_ptr<const DomainModel> domain;
    std::vector<std::string> objects;
    std::vector<GroundAtom> atoms;
    std::vector<std::string> atom_names;
    std::vector<GroundAction> actions;
    Bitset init;
    std::vector<std::pair<int, bool>> goal;  // (atom id, positive)
    std::vector<int> goal_params;            // object ids bound to x, y, ... in order
    std::vector<GroundAtom> goal_atoms;      // positive goal atoms, for goal-copy predicates

    int atom_id(const GroundAtom& a) const {
        auto it = atom_index_.find(a);
        return it == atom_index_.end() ? -1 : it->second;
    }
    int object_id(const std::string& name) const {
        for (size_t i = 0; i < objects.size(); ++i)
            if (objects[i] == name) return static_cast<int>(i);
        return -1;
    }

    State initial_state() const { return State{id, init}; }
    bool is_goal(const State& s) const;
    State apply(const State& s, int action_id) const;
    // Applicable actions paired with their successor states, ordered by action id.
    std::vector<std::pair<int, State>> successors(const State& s) const;

    void finalize_index();

  private:
    std::map<GroundAtom, int> atom_index_;
};

std::pair<DomainModel, ProblemDescription> parse_pddl(const std::string& domain_text,
                                                      const std::string& problem_text);

std::shared_ptr<GroundInstance> ground(std::shared_ptr<const DomainModel> domain,
                                       const ProblemDescription& problem, int instance_id = 0);

// Adds goal-copy predicates p_G for every predicate mentioned in a goal.
DomainModel add_goal_predicates(const DomainModel& domain);

std::string instance_to_json(const GroundInstance& inst);

}  // namespace gpl
