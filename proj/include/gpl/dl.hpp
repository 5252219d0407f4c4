#pragma once

#include <memory>
#include <string>
#include <unordered_map>
#include <vector>

#include "gpl/feature_matrix.hpp"
#include "gpl/sampler.hpp"
#include "gpl/strips.hpp"

namespace gpl {

enum class ConceptKind { Primitive, Universe, Nominal, Not, And, Exists, Forall, RoleEq };
enum class RoleKind { Primitive, Inverse, Closure, InverseClosure };

struct RoleNode {
    RoleKind kind = RoleKind::Primitive;
    int pred = -1;
    int complexity = 1;
    std::string text;
};

struct ConceptNode {
    ConceptKind kind = ConceptKind::Universe;
    int pred = -1;        // Primitive
    int param = -1;       // Nominal: goal-parameter position
    int child = -1, child2 = -1;  // concept operands
    int role = -1, role2 = -1;    // role operands
    int complexity = 1;
    std::string text;
};

enum class FeatureKind { BoolNullary, BoolConcept, NumConcept, Distance };

struct Feature {
    FeatureKind kind = FeatureKind::BoolConcept;
    int pred = -1;       // BoolNullary
    int concept_id = -1;  // BoolConcept / NumConcept
    int c1 = -1, role = -1, cfilter = -1, c2 = -1;  // Distance
    int cost = 0;
    std::string name;

    bool numeric() const {
        return kind == FeatureKind::NumConcept || kind == FeatureKind::Distance;
    }
};

struct PoolOptions {
    int k = 8;
    bool distance = false;
    // Complexity cap on the three component concepts of dist features; keeps
    // the distance sub-pool from dwarfing the rest.
    int dist_component_complexity = 2;
};

struct FeaturePool {
    std::vector<RoleNode> roles;
    std::vector<ConceptNode> concepts;
    std::vector<Feature> features;

    int feature_id(const std::string& name) const {
        for (size_t i = 0; i < features.size(); ++i)
            if (features[i].name == name) return static_cast<int>(i);
        return -1;
    }
};

// Evaluates concepts, roles, and features against concrete states of one
// instance, memoizing denotations per state.
class FeatureEvaluator {
  public:
    FeatureEvaluator(const FeaturePool& pool, std::shared_ptr<const GroundInstance> inst);

    Bitset concept_denotation(int concept_id, const State& s);
    // Role denotation as adjacency rows: row x holds the objects y with R(x,y).
    const std::vector<Bitset>& role_denotation(int role_id, const State& s);
    int64_t eval(int feature_id, const State& s);
    QualChange delta(int feature_id, const State& s, const State& t);

  private:
    void switch_state(const State& s);

    const FeaturePool& pool_;
    std::shared_ptr<const GroundInstance> inst_;
    size_t state_hash_ = 0;
    bool has_state_ = false;
    Bitset state_atoms_;
    std::unordered_map<int, Bitset> concept_cache_;
    std::unordered_map<int, std::vector<Bitset>> role_cache_;
};

FeaturePool generate_pool(const SampleSet& sample, const PoolOptions& opts);

FeatureMatrix build_matrix(const FeaturePool& pool, const SampleSet& sample);

std::string pool_to_json(const FeaturePool& pool);

}  // namespace gpl
