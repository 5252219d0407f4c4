#include "gpl/dl.hpp"

#include <algorithm>
#include <cstring>
#include <deque>

#include <json.hpp>

namespace gpl {

namespace {

std::string param_name(int index) {
    static const char* names[] = {"x", "y", "z"};
    if (index < 3) return names[index];
    return "p" + std::to_string(index);
}

std::vector<Bitset> transpose(const std::vector<Bitset>& rows, size_t n) {
    std::vector<Bitset> out(n, Bitset(n));
    for (size_t x = 0; x < n; ++x)
        rows[x].for_each([&](size_t y) { out[y].set(x); });
    return out;
}

// Warshall-style transitive closure (non-reflexive unless cyclic).
std::vector<Bitset> transitive_closure(std::vector<Bitset> rows, size_t n) {
    for (size_t k = 0; k < n; ++k)
        for (size_t x = 0; x < n; ++x)
            if (rows[x].test(k)) rows[x] |= rows[k];
    return rows;
}

// Role adjacency rows for one state.
std::vector<Bitset> compute_role(const RoleNode& role, const GroundInstance& inst,
                                 const Bitset& atoms) {
    const size_t n = inst.objects.size();
    const Predicate& pred = inst.domain->predicates[static_cast<size_t>(role.pred)];
    std::vector<Bitset> base(n, Bitset(n));
    if (pred.goal_copy) {
        for (auto& atom : inst.goal_atoms)
            if (atom.pred == pred.origin)
                base[static_cast<size_t>(atom.args[0])].set(static_cast<size_t>(atom.args[1]));
    } else {
        for (size_t i = 0; i < inst.atoms.size(); ++i) {
            const GroundAtom& atom = inst.atoms[i];
            if (atom.pred != role.pred) continue;
            if (atoms.test(i))
                base[static_cast<size_t>(atom.args[0])].set(static_cast<size_t>(atom.args[1]));
        }
    }
    switch (role.kind) {
        case RoleKind::Primitive: return base;
        case RoleKind::Inverse: return transpose(base, n);
        case RoleKind::Closure: return transitive_closure(std::move(base), n);
        case RoleKind::InverseClosure:
            return transitive_closure(transpose(base, n), n);
    }
    return base;
}

Bitset unary_denotation(int pred_id, const GroundInstance& inst, const Bitset& atoms) {
    const size_t n = inst.objects.size();
    Bitset out(n);
    const Predicate& pred = inst.domain->predicates[static_cast<size_t>(pred_id)];
    if (pred.goal_copy) {
        for (auto& atom : inst.goal_atoms)
            if (atom.pred == pred.origin) out.set(static_cast<size_t>(atom.args[0]));
        return out;
    }
    for (size_t i = 0; i < inst.atoms.size(); ++i)
        if (inst.atoms[i].pred == pred_id && atoms.test(i))
            out.set(static_cast<size_t>(inst.atoms[i].args[0]));
    return out;
}

bool nullary_truth(int pred_id, const GroundInstance& inst, const Bitset& atoms) {
    const Predicate& pred = inst.domain->predicates[static_cast<size_t>(pred_id)];
    if (pred.goal_copy) {
        for (auto& atom : inst.goal_atoms)
            if (atom.pred == pred.origin) return true;
        return false;
    }
    GroundAtom atom{pred_id, {}};
    int id = inst.atom_id(atom);
    return id >= 0 && atoms.test(static_cast<size_t>(id));
}

Bitset concept_from_parts(const ConceptNode& node, const GroundInstance& inst,
                          const Bitset& atoms, const Bitset* child, const Bitset* child2,
                          const std::vector<Bitset>* role, const std::vector<Bitset>* role2) {
    const size_t n = inst.objects.size();
    Bitset out(n);
    switch (node.kind) {
        case ConceptKind::Primitive:
            return unary_denotation(node.pred, inst, atoms);
        case ConceptKind::Universe:
            for (size_t i = 0; i < n; ++i) out.set(i);
            return out;
        case ConceptKind::Nominal: {
            if (node.param >= static_cast<int>(inst.goal_params.size()))
                throw std::runtime_error("instance lacks goal parameter " + param_name(node.param));
            out.set(static_cast<size_t>(inst.goal_params[static_cast<size_t>(node.param)]));
            return out;
        }
        case ConceptKind::Not: {
            out = *child;
            out.flip_all();
            return out;
        }
        case ConceptKind::And: {
            out = *child;
            out &= *child2;
            return out;
        }
        case ConceptKind::Exists: {
            for (size_t x = 0; x < n; ++x) {
                Bitset row = (*role)[x];
                row &= *child;
                if (row.any()) out.set(x);
            }
            return out;
        }
        case ConceptKind::Forall: {
            for (size_t x = 0; x < n; ++x)
                if (child->contains((*role)[x])) out.set(x);
            return out;
        }
        case ConceptKind::RoleEq: {
            for (size_t x = 0; x < n; ++x)
                if ((*role)[x] == (*role2)[x]) out.set(x);
            return out;
        }
    }
    return out;
}

int64_t distance_value(const Bitset& sources, const Bitset& targets,
                       const std::vector<Bitset>& edges, const Bitset& filter, size_t n) {
    if (sources.none()) return kUnreachable;
    Bitset frontier = sources;
    Bitset visited = sources;
    int64_t depth = 0;
    while (true) {
        Bitset hit = frontier;
        hit &= targets;
        if (hit.any()) return depth;
        Bitset next(n);
        frontier.for_each([&](size_t x) {
            Bitset row = edges[x];
            row &= filter;
            next |= row;
        });
        next.subtract(visited);
        if (next.none()) return kUnreachable;
        visited |= next;
        frontier = std::move(next);
        ++depth;
    }
}

}  // namespace

FeatureEvaluator::FeatureEvaluator(const FeaturePool& pool,
                                   std::shared_ptr<const GroundInstance> inst)
    : pool_(pool), inst_(std::move(inst)) {}

void FeatureEvaluator::switch_state(const State& s) {
    if (has_state_ && state_atoms_ == s.atoms) return;
    has_state_ = true;
    state_atoms_ = s.atoms;
    concept_cache_.clear();
    role_cache_.clear();
}

const std::vector<Bitset>& FeatureEvaluator::role_denotation(int role_id, const State& s) {
    switch_state(s);
    auto it = role_cache_.find(role_id);
    if (it != role_cache_.end()) return it->second;
    auto rows = compute_role(pool_.roles[static_cast<size_t>(role_id)], *inst_, s.atoms);
    return role_cache_.emplace(role_id, std::move(rows)).first->second;
}

Bitset FeatureEvaluator::concept_denotation(int concept_id, const State& s) {
    switch_state(s);
    auto it = concept_cache_.find(concept_id);
    if (it != concept_cache_.end()) return it->second;
    const ConceptNode& node = pool_.concepts[static_cast<size_t>(concept_id)];
    Bitset child, child2;
    const std::vector<Bitset>*role = nullptr, *role2 = nullptr;
    if (node.child >= 0) child = concept_denotation(node.child, s);
    if (node.child2 >= 0) child2 = concept_denotation(node.child2, s);
    if (node.role >= 0) role = &role_denotation(node.role, s);
    if (node.role2 >= 0) role2 = &role_denotation(node.role2, s);
    Bitset out = concept_from_parts(node, *inst_, s.atoms, &child, &child2, role, role2);
    concept_cache_.emplace(concept_id, out);
    return out;
}

int64_t FeatureEvaluator::eval(int feature_id, const State& s) {
    const Feature& f = pool_.features[static_cast<size_t>(feature_id)];
    switch (f.kind) {
        case FeatureKind::BoolNullary:
            return nullary_truth(f.pred, *inst_, s.atoms) ? 1 : 0;
        case FeatureKind::BoolConcept:
            return concept_denotation(f.concept_id, s).any() ? 1 : 0;
        case FeatureKind::NumConcept:
            return static_cast<int64_t>(concept_denotation(f.concept_id, s).count());
        case FeatureKind::Distance: {
            Bitset sources = concept_denotation(f.c1, s);
            Bitset targets = concept_denotation(f.c2, s);
            Bitset filter = concept_denotation(f.cfilter, s);
            const auto& edges = role_denotation(f.role, s);
            return distance_value(sources, targets, edges, filter, inst_->objects.size());
        }
    }
    return 0;
}

QualChange FeatureEvaluator::delta(int feature_id, const State& s, const State& t) {
    int64_t a = eval(feature_id, s);
    int64_t b = eval(feature_id, t);
    if (a == b) return QualChange::None;
    if (pool_.features[static_cast<size_t>(feature_id)].numeric())
        return b > a ? QualChange::Inc : QualChange::Dec;
    return b > a ? QualChange::Pos : QualChange::Neg;
}

namespace {

std::string role_text(const RoleNode& r, const DomainModel& domain) {
    const std::string base = domain.predicates[static_cast<size_t>(r.pred)].name;
    switch (r.kind) {
        case RoleKind::Primitive: return base;
        case RoleKind::Inverse: return "inv(" + base + ")";
        case RoleKind::Closure: return "tc(" + base + ")";
        case RoleKind::InverseClosure: return "tc(inv(" + base + "))";
    }
    return base;
}

// Denotation signature across every sampled state, for redundancy pruning.
std::string signature(const std::vector<Bitset>& dens) {
    std::string key;
    for (const Bitset& b : dens) {
        for (uint64_t w : b.words()) {
            char buf[8];
            std::memcpy(buf, &w, 8);
            key.append(buf, 8);
        }
        key.push_back('|');
    }
    return key;
}

struct PoolBuilder {
    const SampleSet& sample;
    const PoolOptions& opts;
    const DomainModel& domain;
    FeaturePool pool;

    // per state caches
    std::vector<const GroundInstance*> state_inst;
    std::vector<std::vector<std::vector<Bitset>>> role_dens;  // [role][state] -> rows
    std::vector<std::vector<Bitset>> concept_dens;            // [concept][state]
    std::unordered_map<std::string, int> seen;

    explicit PoolBuilder(const SampleSet& s, const PoolOptions& o)
        : sample(s), opts(o), domain(*s.instances.front()->domain) {
        for (auto& inst : s.instances)
            if (inst->domain.get() != s.instances.front()->domain.get())
                throw std::invalid_argument("sample instances must share one domain model");
        for (auto& ss : s.states)
            state_inst.push_back(s.instances[static_cast<size_t>(ss.state.instance_id)].get());
    }

    size_t num_params() const {
        size_t n = SIZE_MAX;
        for (auto& inst : sample.instances)
            n = std::min(n, inst->goal_params.size());
        return n == SIZE_MAX ? 0 : n;
    }

    void add_role(RoleKind kind, int pred, int complexity) {
        RoleNode r;
        r.kind = kind;
        r.pred = pred;
        r.complexity = complexity;
        r.text = role_text(r, domain);
        role_dens.emplace_back();
        auto& per_state = role_dens.back();
        per_state.reserve(sample.states.size());
        for (size_t s = 0; s < sample.states.size(); ++s)
            per_state.push_back(compute_role(r, *state_inst[s], sample.states[s].state.atoms));
        pool.roles.push_back(std::move(r));
    }

    // Returns the retained id, or -1 when pruned as redundant.
    int try_concept(ConceptNode node) {
        std::vector<Bitset> dens;
        dens.reserve(sample.states.size());
        for (size_t s = 0; s < sample.states.size(); ++s) {
            const Bitset* child = node.child >= 0 ? &concept_dens[static_cast<size_t>(node.child)][s] : nullptr;
            const Bitset* child2 = node.child2 >= 0 ? &concept_dens[static_cast<size_t>(node.child2)][s] : nullptr;
            const std::vector<Bitset>* role =
                node.role >= 0 ? &role_dens[static_cast<size_t>(node.role)][s] : nullptr;
            const std::vector<Bitset>* role2 =
                node.role2 >= 0 ? &role_dens[static_cast<size_t>(node.role2)][s] : nullptr;
            dens.push_back(concept_from_parts(node, *state_inst[s],
                                              sample.states[s].state.atoms, child, child2, role,
                                              role2));
        }
        std::string key = signature(dens);
        auto [it, inserted] = seen.emplace(key, static_cast<int>(pool.concepts.size()));
        if (!inserted) return -1;
        pool.concepts.push_back(std::move(node));
        concept_dens.push_back(std::move(dens));
        return static_cast<int>(pool.concepts.size()) - 1;
    }

    void generate_concepts() {
        const int k = opts.k;
        for (int c = 1; c <= k; ++c) {
            size_t level_end = pool.concepts.size();  // ids below this have complexity < c
            if (c == 1) {
                for (size_t p = 0; p < domain.predicates.size(); ++p) {
                    if (domain.predicates[p].arity != 1) continue;
                    ConceptNode n;
                    n.kind = ConceptKind::Primitive;
                    n.pred = static_cast<int>(p);
                    n.complexity = 1;
                    n.text = domain.predicates[p].name;
                    try_concept(std::move(n));
                }
                ConceptNode u;
                u.kind = ConceptKind::Universe;
                u.complexity = 1;
                u.text = "top";
                try_concept(std::move(u));
                for (size_t p = 0; p < num_params(); ++p) {
                    ConceptNode n;
                    n.kind = ConceptKind::Nominal;
                    n.param = static_cast<int>(p);
                    n.complexity = 1;
                    n.text = "nom(" + param_name(static_cast<int>(p)) + ")";
                    try_concept(std::move(n));
                }
                continue;
            }
            // negation of primitive / universal / nominal concepts
            for (size_t i = 0; i < level_end; ++i) {
                const ConceptNode& inner = pool.concepts[i];
                if (inner.complexity != c - 1) continue;
                if (inner.kind != ConceptKind::Primitive && inner.kind != ConceptKind::Universe &&
                    inner.kind != ConceptKind::Nominal)
                    continue;
                ConceptNode n;
                n.kind = ConceptKind::Not;
                n.child = static_cast<int>(i);
                n.complexity = c;
                n.text = "not(" + inner.text + ")";
                try_concept(std::move(n));
            }
            // conjunctions
            for (size_t a = 0; a < level_end; ++a) {
                for (size_t b = a + 1; b < level_end; ++b) {
                    if (pool.concepts[a].complexity + pool.concepts[b].complexity + 1 != c)
                        continue;
                    ConceptNode n;
                    n.kind = ConceptKind::And;
                    n.child = static_cast<int>(a);
                    n.child2 = static_cast<int>(b);
                    n.complexity = c;
                    n.text = "and(" + pool.concepts[a].text + "," + pool.concepts[b].text + ")";
                    try_concept(std::move(n));
                }
            }
            // existential and universal restrictions
            for (size_t r = 0; r < pool.roles.size(); ++r) {
                for (size_t i = 0; i < level_end; ++i) {
                    if (pool.roles[r].complexity + pool.concepts[i].complexity + 1 != c) continue;
                    for (ConceptKind kind : {ConceptKind::Exists, ConceptKind::Forall}) {
                        ConceptNode n;
                        n.kind = kind;
                        n.role = static_cast<int>(r);
                        n.child = static_cast<int>(i);
                        n.complexity = c;
                        n.text = std::string(kind == ConceptKind::Exists ? "some(" : "all(") +
                                 pool.roles[r].text + "," + pool.concepts[i].text + ")";
                        try_concept(std::move(n));
                    }
                }
            }
            // role equality
            for (size_t r = 0; r < pool.roles.size(); ++r) {
                for (size_t r2 = r + 1; r2 < pool.roles.size(); ++r2) {
                    if (pool.roles[r].complexity + pool.roles[r2].complexity + 1 != c) continue;
                    ConceptNode n;
                    n.kind = ConceptKind::RoleEq;
                    n.role = static_cast<int>(r);
                    n.role2 = static_cast<int>(r2);
                    n.complexity = c;
                    n.text = "eq(" + pool.roles[r].text + "," + pool.roles[r2].text + ")";
                    try_concept(std::move(n));
                }
            }
        }
    }

    void build_features() {
        std::unordered_map<std::string, int> feature_profiles;
        auto profile_key = [&](const std::vector<int64_t>& vals) {
            std::string key;
            key.resize(vals.size() * 8);
            std::memcpy(key.data(), vals.data(), key.size());
            return key;
        };

        for (size_t p = 0; p < domain.predicates.size(); ++p) {
            if (domain.predicates[p].arity != 0) continue;
            Feature f;
            f.kind = FeatureKind::BoolNullary;
            f.pred = static_cast<int>(p);
            f.cost = 0;
            f.name = "bp(" + domain.predicates[p].name + ")";
            pool.features.push_back(std::move(f));
        }
        for (size_t i = 0; i < pool.concepts.size(); ++i) {
            const ConceptNode& node = pool.concepts[i];
            if (node.complexity > opts.k) continue;
            bool boolean = true;
            for (size_t s = 0; s < sample.states.size(); ++s)
                boolean &= concept_dens[i][s].count() <= 1;
            Feature f;
            f.kind = boolean ? FeatureKind::BoolConcept : FeatureKind::NumConcept;
            f.concept_id = static_cast<int>(i);
            f.cost = node.complexity;
            f.name = (boolean ? "b(" : "n(") + node.text + ")";
            pool.features.push_back(std::move(f));
        }
        if (!opts.distance) return;

        // dist(C1, R:C, C2): C1 restricted to concepts with a singleton
        // denotation on every sampled state; component complexities capped.
        std::vector<int> singletons, components;
        for (size_t i = 0; i < pool.concepts.size(); ++i) {
            if (pool.concepts[i].complexity > opts.dist_component_complexity) continue;
            components.push_back(static_cast<int>(i));
            bool singleton = true;
            for (size_t s = 0; s < sample.states.size(); ++s)
                singleton &= concept_dens[i][s].count() == 1;
            if (singleton) singletons.push_back(static_cast<int>(i));
        }
        for (int c1 : singletons) {
            for (size_t r = 0; r < pool.roles.size(); ++r) {
                for (int cf : components) {
                    for (int c2 : components) {
                        int cost = pool.concepts[static_cast<size_t>(c1)].complexity +
                                   pool.roles[r].complexity +
                                   pool.concepts[static_cast<size_t>(cf)].complexity +
                                   pool.concepts[static_cast<size_t>(c2)].complexity;
                        if (cost > opts.k) continue;
                        std::vector<int64_t> vals;
                        vals.reserve(sample.states.size());
                        for (size_t s = 0; s < sample.states.size(); ++s)
                            vals.push_back(distance_value(
                                concept_dens[static_cast<size_t>(c1)][s],
                                concept_dens[static_cast<size_t>(c2)][s], role_dens[r][s],
                                concept_dens[static_cast<size_t>(cf)][s],
                                state_inst[s]->objects.size()));
                        // dist features that add no new valuation profile are dropped
                        auto [it, inserted] =
                            feature_profiles.emplace(profile_key(vals), 1);
                        if (!inserted) continue;
                        Feature f;
                        f.kind = FeatureKind::Distance;
                        f.c1 = c1;
                        f.role = static_cast<int>(r);
                        f.cfilter = cf;
                        f.c2 = c2;
                        f.cost = cost;
                        f.name = "dist(" + pool.concepts[static_cast<size_t>(c1)].text + "," +
                                 pool.roles[r].text + ":" +
                                 pool.concepts[static_cast<size_t>(cf)].text + "," +
                                 pool.concepts[static_cast<size_t>(c2)].text + ")";
                        pool.features.push_back(std::move(f));
                    }
                }
            }
        }
    }

    FeaturePool run() {
        for (size_t p = 0; p < domain.predicates.size(); ++p) {
            if (domain.predicates[p].arity != 2) continue;
            add_role(RoleKind::Primitive, static_cast<int>(p), 1);
            add_role(RoleKind::Inverse, static_cast<int>(p), 2);
            add_role(RoleKind::Closure, static_cast<int>(p), 2);
            add_role(RoleKind::InverseClosure, static_cast<int>(p), 3);
        }
        generate_concepts();
        build_features();
        return std::move(pool);
    }
};

}  // namespace

FeaturePool generate_pool(const SampleSet& sample, const PoolOptions& opts) {
    if (opts.k < 1) throw std::invalid_argument("k must be >= 1");
    PoolBuilder builder(sample, opts);
    return builder.run();
}

FeatureMatrix build_matrix(const FeaturePool& pool, const SampleSet& sample) {
    FeatureMatrix matrix;
    for (auto& f : pool.features)
        matrix.features.push_back(FeatureInfo{f.name, f.numeric(), f.cost});
    std::vector<std::unique_ptr<FeatureEvaluator>> evals;
    for (auto& inst : sample.instances)
        evals.push_back(std::make_unique<FeatureEvaluator>(pool, inst));
    matrix.values.reserve(sample.states.size());
    for (auto& ss : sample.states) {
        std::vector<int64_t> row;
        row.reserve(pool.features.size());
        auto& ev = *evals[static_cast<size_t>(ss.state.instance_id)];
        for (size_t f = 0; f < pool.features.size(); ++f)
            row.push_back(ev.eval(static_cast<int>(f), ss.state));
        matrix.values.push_back(std::move(row));
    }
    return matrix;
}

std::string pool_to_json(const FeaturePool& pool) {
    nlohmann::json j = nlohmann::json::array();
    for (size_t i = 0; i < pool.features.size(); ++i) {
        const Feature& f = pool.features[i];
        const char* kind = f.kind == FeatureKind::BoolNullary  ? "bool_nullary"
                           : f.kind == FeatureKind::BoolConcept ? "bool"
                           : f.kind == FeatureKind::NumConcept  ? "numeric"
                                                                : "distance";
        j.push_back({{"id", i}, {"name", f.name}, {"kind", kind}, {"cost", f.cost}});
    }
    return j.dump(2);
}

}  // namespace gpl
