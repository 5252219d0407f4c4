#include "gpl/pipeline.hpp"

#include <chrono>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>

#include <json.hpp>

namespace gpl {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string content_hash(const std::string& text) {
    return std::to_string(std::hash<std::string>{}(text));
}

}  // namespace

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot read '" + path + "'");
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write '" + path + "'");
    out << content;
}

PipelineConfig PipelineConfig::from_json(const std::string& text) {
    nlohmann::json j = nlohmann::json::parse(text);
    PipelineConfig c;
    c.domain = j.at("domain").get<std::string>();
    c.train = j.at("train").get<std::vector<std::string>>();
    if (j.contains("test")) c.test = j.at("test").get<std::vector<std::string>>();
    if (j.contains("budget")) c.budget = j.at("budget").get<size_t>();
    if (j.contains("m") && !j.at("m").is_null()) c.explicit_m = j.at("m").get<size_t>();
    if (j.contains("k")) c.k = j.at("k").get<int>();
    if (j.contains("distance")) c.distance = j.at("distance").get<bool>();
    if (j.contains("variant")) {
        std::string v = j.at("variant").get<std::string>();
        if (v == "T")
            c.variant = TheoryVariant::T;
        else if (v == "TG")
            c.variant = TheoryVariant::TG;
        else
            throw ConfigError("unknown variant '" + v + "'");
    }
    if (j.contains("solver")) {
        auto& s = j.at("solver");
        std::string mode = s.at("mode").get<std::string>();
        if (mode == "builtin") {
            c.solver = SolverMode::Builtin();
        } else if (mode == "external") {
            c.solver = SolverMode::External(s.at("path").get<std::string>(),
                                            s.value("work_dir", std::string(".")));
        } else {
            throw ConfigError("unknown solver mode '" + mode + "'");
        }
    }
    if (j.contains("init") && !j.at("init").is_string())
        c.init_spec = j.at("init").get<std::vector<std::vector<std::string>>>();
    if (j.contains("goal") && !j.at("goal").is_string())
        c.goal_spec = j.at("goal").get<std::vector<std::vector<std::string>>>();
    if (j.contains("output")) c.output = j.at("output").get<std::string>();
    if (j.contains("seed")) c.seed = j.at("seed").get<uint64_t>();
    if (j.contains("exec_node_limit")) c.exec_node_limit = j.at("exec_node_limit").get<size_t>();
    if (j.contains("cache")) c.cache = j.at("cache").get<bool>();
    return c;
}

PipelineConfig PipelineConfig::from_file(const std::string& path) {
    return from_json(read_file(path));
}

std::string PipelineConfig::to_json() const {
    nlohmann::json j;
    j["domain"] = domain;
    j["train"] = train;
    j["test"] = test;
    j["budget"] = budget;
    if (explicit_m) j["m"] = *explicit_m;
    j["k"] = k;
    j["distance"] = distance;
    j["variant"] = variant == TheoryVariant::T ? "T" : "TG";
    if (solver.builtin) {
        j["solver"] = {{"mode", "builtin"}};
    } else {
        j["solver"] = {{"mode", "external"}, {"path", solver.external_path},
                       {"work_dir", solver.work_dir}};
    }
    if (!init_spec.empty()) j["init"] = init_spec; else j["init"] = "auto";
    if (!goal_spec.empty()) j["goal"] = goal_spec; else j["goal"] = "auto";
    j["output"] = output;
    j["seed"] = seed;
    j["exec_node_limit"] = exec_node_limit;
    j["cache"] = cache;
    return j.dump(2);
}

std::shared_ptr<GroundInstance> load_instance(const std::string& domain_text,
                                              const std::string& problem_text, int id) {
    auto [domain, problem] = parse_pddl(domain_text, problem_text);
    auto extended = std::make_shared<DomainModel>(add_goal_predicates(domain));
    return ground(extended, problem, id);
}

std::vector<std::shared_ptr<GroundInstance>> load_instances(
    const std::string& domain_text, const std::vector<std::string>& problem_texts) {
    std::vector<std::shared_ptr<GroundInstance>> out;
    std::shared_ptr<DomainModel> shared;
    for (size_t i = 0; i < problem_texts.size(); ++i) {
        auto [domain, problem] = parse_pddl(domain_text, problem_texts[i]);
        if (!shared) shared = std::make_shared<DomainModel>(add_goal_predicates(domain));
        out.push_back(ground(shared, problem, static_cast<int>(i)));
    }
    return out;
}

CondSet parse_condition_spec(const std::vector<std::string>& spec, const FeaturePool& pool) {
    CondSet out;
    for (const std::string& item : spec) {
        FeatCond cond;
        std::string name;
        if (item.size() > 2 && item.substr(item.size() - 2) == "=0") {
            cond = FeatCond::Zero;
            name = item.substr(0, item.size() - 2);
        } else if (item.size() > 2 && item.substr(item.size() - 2) == ">0") {
            cond = FeatCond::Nonzero;
            name = item.substr(0, item.size() - 2);
        } else {
            throw ConfigError("condition '" + item + "' must end in =0 or >0");
        }
        int f = pool.feature_id(name);
        if (f < 0) throw ConfigError("unknown feature '" + name + "'");
        out[f] = cond;
    }
    return out;
}

PipelineResult run_pipeline(const PipelineConfig& config, const std::string& stop_after) {
    namespace fs = std::filesystem;
    PipelineResult result;
    PipelineReport& report = result.report;
    fs::create_directories(config.output);
    auto out_path = [&](const std::string& name) { return config.output + "/" + name; };

    auto timed = [&](const std::string& stage, auto&& fn) {
        auto start = Clock::now();
        fn();
        report.timings.emplace_back(stage, seconds_since(start));
    };

    std::string domain_text = read_file(config.domain);

    // sampling
    timed("sample", [&] {
        std::vector<std::string> texts;
        for (auto& path : config.train) texts.push_back(read_file(path));
        auto instances = load_instances(domain_text, texts);
        if (instances.empty()) throw ConfigError("no training instances");
        report.domain_name = instances[0]->domain->name;
        SamplerOptions opts;
        opts.transition_budget = config.budget;
        opts.explicit_m = config.explicit_m;
        result.sample = build_sample_set(std::move(instances), opts);
        write_file(out_path("sample.json"), sample_to_json(result.sample));
    });
    report.num_states = result.sample.states.size();
    report.num_expanded = result.sample.num_expanded();
    report.num_transitions = result.sample.transitions.size();
    if (stop_after == "sample") return result;

    // feature pool + matrix
    timed("pool", [&] {
        PoolOptions opts;
        opts.k = config.k;
        opts.distance = config.distance;
        result.pool = generate_pool(result.sample, opts);
        write_file(out_path("pool.json"), pool_to_json(result.pool));
        result.matrix = build_matrix(result.pool, result.sample);
    });
    report.pool_size = result.pool.features.size();
    if (stop_after == "pool") return result;

    // theory
    timed("encode", [&] {
        result.theory = build_theory(result.sample, result.matrix, config.variant);
        write_file(out_path("theory.wcnf"), wcnf_to_string(result.theory.cnf));
        write_file(out_path("theory_vars.json"),
                   theory_vars_to_json(result.theory.vars, result.matrix));
    });
    report.num_vars = result.theory.cnf.num_vars;
    report.num_clauses = result.theory.cnf.num_clauses();
    if (stop_after == "encode") return result;

    // solve, reusing a previous solution when the theory is unchanged
    timed("solve", [&] {
        std::string hash = content_hash(wcnf_to_string(result.theory.cnf));
        std::string cache_path = out_path("solution.json");
        bool reused = false;
        if (config.cache && fs::exists(cache_path)) {
            try {
                nlohmann::json j = nlohmann::json::parse(read_file(cache_path));
                if (j.value("wcnf_hash", std::string()) == hash &&
                    j.value("status", std::string()) == "optimal") {
                    result.solution.status = SolveStatus::Optimal;
                    result.solution.assignment.values = j.at("values").get<std::vector<bool>>();
                    result.solution.assignment.cost = j.at("cost").get<int64_t>();
                    if (satisfies_hard(result.theory.cnf, result.solution.assignment))
                        reused = true;
                }
            } catch (const std::exception&) {
                reused = false;
            }
        }
        if (!reused) result.solution = solve_max_sat(result.theory.cnf, config.solver);
        if (result.solution.status == SolveStatus::Unsatisfiable) {
            report.solve_status = "unsatisfiable";
            write_file(cache_path, nlohmann::json{{"status", "unsatisfiable"},
                                                  {"wcnf_hash", hash}}
                                       .dump(2));
            return;
        }
        report.solve_status = "optimal";
        report.cost = result.solution.assignment.cost;
        result.selected = result.theory.vars.selected_features(result.solution.assignment);
        nlohmann::json j;
        j["status"] = "optimal";
        j["cost"] = result.solution.assignment.cost;
        j["wcnf_hash"] = hash;
        j["values"] = result.solution.assignment.values;
        j["selected"] = nlohmann::json::array();
        for (int f : result.selected)
            j["selected"].push_back(result.matrix.features[static_cast<size_t>(f)].name);
        write_file(cache_path, j.dump(2));
    });
    if (result.solution.status == SolveStatus::Unsatisfiable) return result;
    for (int f : result.selected)
        report.selected_names.push_back(result.matrix.features[static_cast<size_t>(f)].name);
    if (stop_after == "solve") return result;

    // abstraction
    TransitionScope scope =
        config.variant == TheoryVariant::TG ? TransitionScope::Marked : TransitionScope::All;
    timed("extract", [&] {
        result.actions = extract_actions(result.sample, result.matrix, result.selected, scope);
        VerifyResult verify = verify_sound_complete(result.sample, result.matrix,
                                                    result.selected, result.actions, scope);
        report.sound = verify.sound;
        report.complete = verify.complete;

        std::vector<CondSet> init = config.init_spec.empty()
                                        ? initial_conditions(result.sample, result.matrix,
                                                             result.selected)
                                        : std::vector<CondSet>{};
        for (auto& spec : config.init_spec)
            init.push_back(parse_condition_spec(spec, result.pool));
        std::vector<CondSet> goal = config.goal_spec.empty()
                                        ? learn_goal_dnf(result.sample, result.matrix,
                                                         result.selected)
                                        : std::vector<CondSet>{};
        for (auto& spec : config.goal_spec)
            goal.push_back(parse_condition_spec(spec, result.pool));
        result.qnp = assemble_qnp(result.matrix, result.selected, result.actions, init, goal);
        write_file(out_path("qnp.json"), qnp_to_json(result.qnp));
        write_file(out_path("qnp.txt"), qnp_listing(result.qnp));
    });
    report.num_actions = result.actions.size();
    if (stop_after == "extract") return result;

    // planning
    timed("plan", [&] {
        result.policy = solve_qnp(result.qnp, &result.fond);
        if (result.policy) {
            write_file(out_path("policy.json"), policy_to_json(result.fond, *result.policy));
            write_file(out_path("policy.txt"), policy_table(result.fond, *result.policy));
        }
    });
    report.solved = result.policy.has_value();
    if (result.policy) report.policy_size = result.policy->rules.size();
    if (stop_after == "plan") return result;

    // validation on held-out instances
    if (result.policy) {
        timed("execute", [&] {
            for (size_t i = 0; i < config.test.size(); ++i) {
                TestOutcome outcome;
                outcome.instance = config.test[i];
                try {
                    auto inst = load_instance(domain_text, read_file(config.test[i]),
                                              static_cast<int>(i));
                    PolicyExecutor exec(result.pool, result.selected, result.fond,
                                        *result.policy, inst);
                    std::string failure;
                    outcome.success = exec.exhaustive(config.exec_node_limit, &failure);
                    outcome.failure = failure;
                    auto run = exec.sample_one(config.seed + i);
                    write_file(out_path("trace_" + std::to_string(i) + ".json"),
                               trace_to_json(run));
                } catch (const std::exception& e) {
                    outcome.success = false;
                    outcome.failure = e.what();
                }
                report.tests.push_back(std::move(outcome));
            }
        });
    }

    write_file(out_path("report.json"), report_to_json(report));
    write_file(out_path("report.txt"), report_text(report));
    return result;
}

std::string report_text(const PipelineReport& r) {
    std::ostringstream os;
    os << "domain: " << r.domain_name << "\n";
    os << "sample: " << r.num_states << " states (" << r.num_expanded << " expanded), "
       << r.num_transitions << " transitions\n";
    os << "pool: " << r.pool_size << " features\n";
    os << "theory: " << r.num_vars << " vars, " << r.num_clauses << " clauses\n";
    os << "solve: " << r.solve_status;
    if (r.solve_status == "optimal") os << ", cost " << r.cost;
    os << "\n";
    if (!r.selected_names.empty()) {
        os << "selected:";
        for (auto& n : r.selected_names) os << " " << n;
        os << "\n";
    }
    if (r.solve_status == "optimal") {
        os << "abstraction: " << r.num_actions << " actions, "
           << (r.sound ? "sound" : "UNSOUND") << ", "
           << (r.complete ? "complete" : "INCOMPLETE") << "\n";
        os << "plan: " << (r.solved ? "solved" : "no terminating policy");
        if (r.solved) os << ", " << r.policy_size << " rules";
        os << "\n";
    }
    size_t passed = 0;
    for (auto& t : r.tests) passed += t.success;
    if (!r.tests.empty())
        os << "validation: " << passed << "/" << r.tests.size() << " instances\n";
    for (auto& t : r.tests)
        if (!t.success) os << "  failed " << t.instance << ": " << t.failure << "\n";
    for (auto& [stage, secs] : r.timings) {
        os << stage << ": ";
        os.precision(3);
        os << std::fixed << secs << "s\n";
        os.unsetf(std::ios::fixed);
        os.precision(6);
    }
    return os.str();
}

std::string report_to_json(const PipelineReport& r) {
    nlohmann::json j;
    j["domain"] = r.domain_name;
    j["sample"] = {{"states", r.num_states},
                   {"expanded", r.num_expanded},
                   {"transitions", r.num_transitions}};
    j["pool_size"] = r.pool_size;
    j["theory"] = {{"vars", r.num_vars}, {"clauses", r.num_clauses}};
    j["solve"] = {{"status", r.solve_status}, {"cost", r.cost}};
    j["selected"] = r.selected_names;
    j["abstraction"] = {{"actions", r.num_actions}, {"sound", r.sound},
                        {"complete", r.complete}};
    j["plan"] = {{"solved", r.solved}, {"rules", r.policy_size}};
    j["tests"] = nlohmann::json::array();
    for (auto& t : r.tests)
        j["tests"].push_back(
            {{"instance", t.instance}, {"success", t.success}, {"failure", t.failure}});
    j["timings"] = nlohmann::json::object();
    for (auto& [stage, secs] : r.timings) j["timings"][stage] = secs;
    return j.dump(2);
}

}  // namespace gpl
