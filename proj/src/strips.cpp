#include "gpl/strips.hpp"

#include <algorithm>
#include <set>

#include <json.hpp>

#include "gpl/sexpr.hpp"

namespace gpl {

namespace {

bool is_variable(const std::string& s) { return !s.empty() && s[0] == '?'; }

// Parses a PDDL typed list "a b - t c d" into (item, type) pairs; type is ""
// for untyped items.
std::vector<std::pair<std::string, std::string>> parse_typed_list(const Sexpr& list,
                                                                  size_t from = 0) {
    std::vector<std::pair<std::string, std::string>> out;
    std::vector<std::string> pending;
    for (size_t i = from; i < list.size(); ++i) {
        const std::string& tok = list.at(i).as_atom();
        if (tok == "-") {
            if (i + 1 >= list.size())
                throw ParseError("dangling '-' in typed list");
            const Sexpr& type_expr = list.at(i + 1);
            if (!type_expr.is_atom)
                throw UnsupportedFeatureError("'either' types are not supported");
            for (auto& p : pending) out.emplace_back(p, type_expr.atom);
            pending.clear();
            ++i;
        } else {
            pending.push_back(tok);
        }
    }
    for (auto& p : pending) out.emplace_back(p, "");
    return out;
}

struct DomainBuilder {
    DomainModel model;
    std::set<std::string> types;

    int require_predicate(const std::string& name, size_t arity, int line) {
        int id = model.predicate_id(name);
        if (id < 0)
            throw ParseError("undeclared predicate '" + name + "' at line " + std::to_string(line));
        if (model.predicates[id].arity != static_cast<int>(arity))
            throw ParseError("predicate '" + name + "' used with arity " + std::to_string(arity) +
                             ", declared " + std::to_string(model.predicates[id].arity));
        return id;
    }

    int type_predicate(const std::string& type) {
        int id = model.predicate_id(type);
        if (id < 0) {
            model.predicates.push_back(Predicate{type, 1});
            id = static_cast<int>(model.predicates.size()) - 1;
        }
        return id;
    }

    SchemaLiteral make_literal(const Sexpr& atom, const std::vector<std::string>& params) {
        if (atom.is_atom || atom.size() == 0 || !atom.at(0).is_atom)
            throw ParseError("malformed atom at line " + std::to_string(atom.line));
        SchemaLiteral lit;
        lit.pred = require_predicate(atom.at(0).atom, atom.size() - 1, atom.line);
        for (size_t i = 1; i < atom.size(); ++i) {
            const std::string& arg = atom.at(i).as_atom();
            if (is_variable(arg)) {
                auto it = std::find(params.begin(), params.end(), arg);
                if (it == params.end())
                    throw ParseError("unbound variable '" + arg + "' at line " +
                                     std::to_string(atom.line));
                lit.args.push_back(static_cast<int>(it - params.begin()));
            } else {
                auto it = std::find(model.constants.begin(), model.constants.end(), arg);
                if (it == model.constants.end())
                    throw ParseError("unknown constant '" + arg + "' at line " +
                                     std::to_string(atom.line));
                lit.args.push_back(-static_cast<int>(it - model.constants.begin()) - 1);
            }
        }
        return lit;
    }

    void parse_action(const Sexpr& node) {
        ActionSchema schema;
        schema.name = node.at(1).as_atom();
        size_t i = 2;
        std::vector<std::pair<std::string, std::string>> typed_params;
        while (i < node.size()) {
            const std::string& key = node.at(i).as_atom();
            const Sexpr& val = node.at(i + 1);
            if (key == ":parameters") {
                typed_params = parse_typed_list(val);
            } else if (key == ":precondition") {
                parse_condition(val, schema, typed_params, /*effect=*/false);
            } else if (key == ":effect") {
                parse_condition(val, schema, typed_params, /*effect=*/true);
            } else {
                throw UnsupportedFeatureError("unsupported action field '" + key + "'");
            }
            i += 2;
        }
        // Re-run: parameters must be known before conditions are parsed, so
        // collect them first and parse conditions in a second pass.
        model.schemas.push_back(std::move(schema));
    }

    void parse_condition(const Sexpr& cond, ActionSchema& schema,
                         const std::vector<std::pair<std::string, std::string>>& typed_params,
                         bool effect) {
        if (schema.params.empty() && !typed_params.empty()) {
            for (auto& [p, type] : typed_params) {
                schema.params.push_back(p);
                if (!type.empty()) {
                    SchemaLiteral lit;
                    lit.pred = type_predicate(type);
                    lit.args.push_back(static_cast<int>(schema.params.size()) - 1);
                    schema.pre.push_back(lit);
                }
            }
        }
        std::vector<const Sexpr*> parts;
        if (cond.head_is("and")) {
            for (size_t i = 1; i < cond.size(); ++i) parts.push_back(&cond.at(i));
        } else if (!cond.is_atom && cond.size() > 0) {
            parts.push_back(&cond);
        }
        for (const Sexpr* part : parts) {
            if (part->head_is("or") || part->head_is("imply") || part->head_is("exists") ||
                part->head_is("forall") || part->head_is("when"))
                throw UnsupportedFeatureError("unsupported construct '" + part->at(0).atom +
                                              "' (only STRIPS conditions are accepted)");
            if (part->head_is("not")) {
                if (!effect)
                    throw UnsupportedFeatureError(
                        "negative preconditions are not supported");
                schema.del.push_back(make_literal(part->at(1), schema.params));
            } else if (effect) {
                schema.add.push_back(make_literal(*part, schema.params));
            } else {
                schema.pre.push_back(make_literal(*part, schema.params));
            }
        }
    }
};

void check_requirements(const Sexpr& node) {
    for (size_t i = 1; i < node.size(); ++i) {
        const std::string& req = node.at(i).as_atom();
        if (req != ":strips" && req != ":typing")
            throw UnsupportedFeatureError("unsupported requirement '" + req + "'");
    }
}

GroundLiteral parse_ground_literal(const Sexpr& node) {
    GroundLiteral lit;
    const Sexpr* atom = &node;
    if (node.head_is("not")) {
        lit.positive = false;
        atom = &node.at(1);
    }
    if (atom->is_atom || atom->size() == 0)
        throw ParseError("malformed fact at line " + std::to_string(atom->line));
    lit.pred = atom->at(0).as_atom();
    for (size_t i = 1; i < atom->size(); ++i) lit.args.push_back(atom->at(i).as_atom());
    return lit;
}

}  // namespace

std::pair<DomainModel, ProblemDescription> parse_pddl(const std::string& domain_text,
                                                      const std::string& problem_text) {
    Sexpr droot = parse_sexpr(domain_text);
    if (!droot.head_is("define")) throw ParseError("domain file must start with (define ...)");

    DomainBuilder builder;
    std::vector<const Sexpr*> action_nodes;
    for (size_t i = 1; i < droot.size(); ++i) {
        const Sexpr& node = droot.at(i);
        if (node.head_is("domain")) {
            builder.model.name = node.at(1).as_atom();
        } else if (node.head_is(":requirements")) {
            check_requirements(node);
        } else if (node.head_is(":types")) {
            for (auto& [t, super] : parse_typed_list(node, 1)) {
                if (!super.empty() && super != "object")
                    throw UnsupportedFeatureError("type hierarchies are not supported");
                builder.types.insert(t);
                builder.type_predicate(t);
            }
        } else if (node.head_is(":constants")) {
            for (auto& [c, type] : parse_typed_list(node, 1)) {
                builder.model.constants.push_back(c);
                (void)type;  // constant types turn into init atoms at grounding
            }
        } else if (node.head_is(":predicates")) {
            for (size_t j = 1; j < node.size(); ++j) {
                const Sexpr& p = node.at(j);
                Predicate pred;
                pred.name = p.at(0).as_atom();
                pred.arity = static_cast<int>(p.size()) - 1;
                if (builder.model.predicate_id(pred.name) >= 0)
                    throw ParseError("duplicate predicate '" + pred.name + "'");
                builder.model.predicates.push_back(pred);
            }
        } else if (node.head_is(":action")) {
            action_nodes.push_back(&node);
        } else if (node.head_is(":functions") || node.head_is(":durative-action") ||
                   node.head_is(":derived")) {
            throw UnsupportedFeatureError("unsupported domain section '" + node.at(0).atom + "'");
        } else {
            throw ParseError("unrecognized domain section at line " + std::to_string(node.line));
        }
    }
    for (const Sexpr* a : action_nodes) builder.parse_action(*a);

    Sexpr proot = parse_sexpr(problem_text);
    if (!proot.head_is("define")) throw ParseError("problem file must start with (define ...)");
    ProblemDescription problem;
    for (size_t i = 1; i < proot.size(); ++i) {
        const Sexpr& node = proot.at(i);
        if (node.head_is("problem")) {
            problem.name = node.at(1).as_atom();
        } else if (node.head_is(":domain")) {
            // name match not enforced; files are paired explicitly
        } else if (node.head_is(":objects")) {
            for (auto& [o, type] : parse_typed_list(node, 1)) {
                problem.objects.push_back(o);
                if (!type.empty()) problem.object_types.emplace_back(o, type);
            }
        } else if (node.head_is(":init")) {
            for (size_t j = 1; j < node.size(); ++j) {
                GroundLiteral lit = parse_ground_literal(node.at(j));
                if (!lit.positive) throw UnsupportedFeatureError("negative init facts");
                problem.init.push_back(std::move(lit));
            }
        } else if (node.head_is(":goal")) {
            const Sexpr& g = node.at(1);
            if (g.head_is("and")) {
                for (size_t j = 1; j < g.size(); ++j)
                    problem.goal.push_back(parse_ground_literal(g.at(j)));
            } else {
                problem.goal.push_back(parse_ground_literal(g));
            }
        } else if (node.head_is(":metric")) {
            throw UnsupportedFeatureError("metrics are not supported");
        } else {
            throw ParseError("unrecognized problem section at line " + std::to_string(node.line));
        }
    }

    // Typed objects become static unary atoms over the compiled type predicates.
    for (auto& [obj, type] : problem.object_types) {
        if (builder.model.predicate_id(type) < 0) builder.type_predicate(type);
        problem.init.push_back(GroundLiteral{true, type, {obj}});
    }
    return {std::move(builder.model), std::move(problem)};
}

bool GroundInstance::is_goal(const State& s) const {
    for (auto& [atom, positive] : goal)
        if (s.atoms.test(static_cast<size_t>(atom)) != positive) return false;
    return true;
}

State GroundInstance::apply(const State& s, int action_id) const {
    const GroundAction& a = actions[static_cast<size_t>(action_id)];
    State next{id, s.atoms};
    next.atoms.subtract(a.del);
    next.atoms |= a.add;
    return next;
}

std::vector<std::pair<int, State>> GroundInstance::successors(const State& s) const {
    std::vector<std::pair<int, State>> out;
    for (const GroundAction& a : actions)
        if (s.atoms.contains(a.pre)) out.emplace_back(a.id, apply(s, a.id));
    return out;
}

void GroundInstance::finalize_index() {
    atom_index_.clear();
    for (size_t i = 0; i < atoms.size(); ++i) atom_index_[atoms[i]] = static_cast<int>(i);
}

namespace {

std::string ground_name(const std::string& schema, const std::vector<int>& binding,
                        const std::vector<std::string>& objects) {
    std::string n = schema + "(";
    for (size_t i = 0; i < binding.size(); ++i) {
        if (i) n += ",";
        n += objects[static_cast<size_t>(binding[i])];
    }
    return n + ")";
}

int resolve_arg(int arg, const std::vector<int>& binding, const std::vector<int>& constant_ids) {
    return arg >= 0 ? binding[static_cast<size_t>(arg)]
                    : constant_ids[static_cast<size_t>(-arg - 1)];
}

}  // namespace

std::shared_ptr<GroundInstance> ground(std::shared_ptr<const DomainModel> domain,
                                       const ProblemDescription& problem, int instance_id) {
    auto inst = std::make_shared<GroundInstance>();
    inst->id = instance_id;
    inst->domain = domain;

    std::vector<int> constant_ids;
    for (auto& c : domain->constants) {
        constant_ids.push_back(static_cast<int>(inst->objects.size()));
        inst->objects.push_back(c);
    }
    for (auto& o : problem.objects) {
        if (inst->object_id(o) >= 0) throw GroundingError("duplicate object '" + o + "'");
        inst->objects.push_back(o);
    }
    const size_t nobj = inst->objects.size();

    // Full atom table: all instantiations of non-copy predicates, in
    // (predicate, args) lexicographic order.
    for (size_t p = 0; p < domain->predicates.size(); ++p) {
        const Predicate& pred = domain->predicates[p];
        if (pred.goal_copy) continue;
        std::vector<int> args(static_cast<size_t>(pred.arity), 0);
        while (true) {
            GroundAtom atom{static_cast<int>(p), args};
            std::string name = pred.name;
            if (!args.empty()) {
                name += "(";
                for (size_t i = 0; i < args.size(); ++i)
                    name += (i ? "," : "") + inst->objects[static_cast<size_t>(args[i])];
                name += ")";
            }
            inst->atoms.push_back(atom);
            inst->atom_names.push_back(name);
            int k = static_cast<int>(args.size()) - 1;
            while (k >= 0 && args[static_cast<size_t>(k)] + 1 == static_cast<int>(nobj)) {
                args[static_cast<size_t>(k)] = 0;
                --k;
            }
            if (k < 0) break;
            ++args[static_cast<size_t>(k)];
        }
    }
    inst->finalize_index();
    const size_t natoms = inst->atoms.size();

    auto lookup_literal = [&](const GroundLiteral& lit) {
        int pred = domain->predicate_id(lit.pred);
        if (pred < 0) throw GroundingError("unknown predicate '" + lit.pred + "'");
        GroundAtom atom{pred, {}};
        for (auto& a : lit.args) {
            int oid = inst->object_id(a);
            if (oid < 0) throw GroundingError("unknown object '" + a + "'");
            atom.args.push_back(oid);
        }
        int id = inst->atom_id(atom);
        if (id < 0) throw GroundingError("arity mismatch for '" + lit.pred + "'");
        return id;
    };

    inst->init = Bitset(natoms);
    for (auto& fact : problem.init) inst->init.set(static_cast<size_t>(lookup_literal(fact)));
    for (auto& lit : problem.goal) {
        inst->goal.emplace_back(lookup_literal(lit), lit.positive);
        if (lit.positive) {
            GroundAtom atom{domain->predicate_id(lit.pred), {}};
            for (auto& a : lit.args) atom.args.push_back(inst->object_id(a));
            inst->goal_atoms.push_back(atom);
        }
    }

    // Goal parameters: arguments of the single goal atom, or the objects common
    // to every goal atom, by first appearance.
    std::vector<std::vector<std::string>> goal_args;
    for (auto& lit : problem.goal) goal_args.push_back(lit.args);
    std::vector<std::string> ordered;
    for (auto& args : goal_args)
        for (auto& a : args)
            if (std::find(ordered.begin(), ordered.end(), a) == ordered.end())
                ordered.push_back(a);
    for (auto& cand : ordered) {
        bool in_all = true;
        if (goal_args.size() > 1)
            for (auto& args : goal_args)
                in_all &= std::find(args.begin(), args.end(), cand) != args.end();
        if (in_all) inst->goal_params.push_back(inst->object_id(cand));
    }

    // Ground all schema instantiations.
    std::vector<GroundAction> all;
    for (const ActionSchema& schema : domain->schemas) {
        if (!schema.params.empty() && nobj == 0) continue;
        std::vector<int> binding(schema.params.size(), 0);
        while (true) {
            GroundAction ga;
            ga.name = ground_name(schema.name, binding, inst->objects);
            ga.pre = Bitset(natoms);
            ga.add = Bitset(natoms);
            ga.del = Bitset(natoms);
            auto fill = [&](const std::vector<SchemaLiteral>& lits, Bitset& bits) {
                for (auto& lit : lits) {
                    GroundAtom atom{lit.pred, {}};
                    for (int arg : lit.args)
                        atom.args.push_back(resolve_arg(arg, binding, constant_ids));
                    bits.set(static_cast<size_t>(inst->atom_id(atom)));
                }
            };
            fill(schema.pre, ga.pre);
            fill(schema.add, ga.add);
            fill(schema.del, ga.del);
            ga.del.subtract(ga.add);  // delete-then-add semantics; keeps add/del disjoint
            all.push_back(std::move(ga));

            int k = static_cast<int>(binding.size()) - 1;
            while (k >= 0 && binding[static_cast<size_t>(k)] + 1 == static_cast<int>(nobj)) {
                binding[static_cast<size_t>(k)] = 0;
                --k;
            }
            if (k < 0) break;
            ++binding[static_cast<size_t>(k)];
        }
    }

    // Delete-free reachability; statically inapplicable actions are dropped.
    Bitset reached = inst->init;
    bool changed = true;
    std::vector<bool> fires(all.size(), false);
    while (changed) {
        changed = false;
        for (size_t i = 0; i < all.size(); ++i) {
            if (fires[i]) continue;
            if (reached.contains(all[i].pre)) {
                fires[i] = true;
                reached |= all[i].add;
                changed = true;
            }
        }
    }
    for (size_t i = 0; i < all.size(); ++i) {
        if (!fires[i]) continue;
        all[i].id = static_cast<int>(inst->actions.size());
        inst->actions.push_back(std::move(all[i]));
    }
    return inst;
}

DomainModel add_goal_predicates(const DomainModel& domain) {
    DomainModel out = domain;
    for (size_t p = 0; p < domain.predicates.size(); ++p) {
        const Predicate& pred = domain.predicates[p];
        if (pred.goal_copy) continue;
        Predicate copy;
        copy.name = pred.name + "_g";
        copy.arity = pred.arity;
        copy.goal_copy = true;
        copy.origin = static_cast<int>(p);
        out.predicates.push_back(copy);
    }
    return out;
}

std::string instance_to_json(const GroundInstance& inst) {
    nlohmann::json j;
    j["objects"] = inst.objects;
    j["atoms"] = inst.atom_names;
    nlohmann::json actions = nlohmann::json::array();
    for (auto& a : inst.actions) {
        nlohmann::json ja;
        ja["id"] = a.id;
        ja["name"] = a.name;
        auto ids = [](const Bitset& b) {
            std::vector<size_t> v;
            b.for_each([&](size_t i) { v.push_back(i); });
            return v;
        };
        ja["pre"] = ids(a.pre);
        ja["add"] = ids(a.add);
        ja["del"] = ids(a.del);
        actions.push_back(ja);
    }
    j["actions"] = actions;
    std::vector<size_t> init;
    inst.init.for_each([&](size_t i) { init.push_back(i); });
    j["init"] = init;
    nlohmann::json goal = nlohmann::json::array();
    for (auto& [atom, positive] : inst.goal)
        goal.push_back({{"atom", atom}, {"positive", positive}});
    j["goal"] = goal;
    nlohmann::json params = nlohmann::json::array();
    for (int p : inst.goal_params) params.push_back(inst.objects[static_cast<size_t>(p)]);
    j["goal_params"] = params;
    return j.dump(2);
}

}  // namespace gpl
