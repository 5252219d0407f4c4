#include "gpl/satcore.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <limits>
#include <vector>

namespace gpl {

namespace {

// Literal encoding: lit = 2*var + (negated ? 1 : 0).
inline int enc(int dimacs_lit) {
    int v = std::abs(dimacs_lit) - 1;
    return 2 * v + (dimacs_lit < 0 ? 1 : 0);
}
inline int lit_var(int lit) { return lit >> 1; }
inline int lit_neg(int lit) { return lit ^ 1; }

class CdclSolver {
  public:
    CdclSolver(const WeightedCnf& cnf, int64_t budget) : budget_(budget) {
        nvars_ = cnf.num_vars;
        // Non-unit soft clauses get a relaxation variable; unit softs charge
        // their violating literal directly.
        weight_.assign(2 * static_cast<size_t>(nvars_) + 2 * cnf.soft.size(), 0);
        std::vector<std::vector<int>> clauses;
        for (auto& c : cnf.hard) {
            std::vector<int> lits;
            for (int l : c) lits.push_back(enc(l));
            clauses.push_back(std::move(lits));
        }
        for (auto& [c, w] : cnf.soft) {
            if (c.size() == 1) {
                weight_[static_cast<size_t>(lit_neg(enc(c[0])))] += w;
            } else {
                int relax = nvars_++;
                std::vector<int> lits;
                for (int l : c) lits.push_back(enc(l));
                lits.push_back(2 * relax);
                clauses.push_back(std::move(lits));
                weight_.resize(2 * static_cast<size_t>(nvars_), 0);
                weight_[static_cast<size_t>(2 * relax)] += w;
            }
        }
        weight_.resize(2 * static_cast<size_t>(nvars_), 0);

        assign_.assign(static_cast<size_t>(nvars_), -1);
        level_.assign(static_cast<size_t>(nvars_), 0);
        reason_.assign(static_cast<size_t>(nvars_), -1);
        watches_.assign(2 * static_cast<size_t>(nvars_), {});
        for (auto& c : clauses)
            if (!add_clause(c)) {
                unsat_at_root_ = true;
                return;
            }
    }

    bool solve() {
        if (unsat_at_root_) return false;
        if (!propagate_all()) return false;
        int next = 0;
        while (true) {
            int conflict = propagate();
            if (conflict != kNoConflict) {
                if (decision_level() == 0) return false;
                std::vector<int> learned;
                int back_level = analyze(conflict, learned);
                backtrack(back_level);
                attach_learned(learned);
                next = 0;
                continue;
            }
            while (next < nvars_ && assign_[static_cast<size_t>(next)] >= 0) ++next;
            if (next == nvars_) return true;
            trail_lim_.push_back(static_cast<int>(trail_.size()));
            enqueue(2 * next + 1, -1);  // phase false
        }
    }

    bool value(int var) const { return assign_[static_cast<size_t>(var)] == 1; }
    int num_vars_original(const WeightedCnf& cnf) const { return cnf.num_vars; }

  private:
    static constexpr int kNoConflict = -1;
    static constexpr int kBudgetReason = -2;

    int decision_level() const { return static_cast<int>(trail_lim_.size()); }

    bool add_clause(std::vector<int> lits) {
        std::sort(lits.begin(), lits.end());
        lits.erase(std::unique(lits.begin(), lits.end()), lits.end());
        for (int l : lits)
            if (std::find(lits.begin(), lits.end(), lit_neg(l)) != lits.end()) return true;
        if (lits.empty()) return false;
        if (lits.size() == 1) return enqueue(lits[0], -1);
        int ref = static_cast<int>(clause_starts_.size());
        clause_starts_.push_back(static_cast<int>(arena_.size()));
        arena_.push_back(static_cast<int>(lits.size()));
        for (int l : lits) arena_.push_back(l);
        watches_[static_cast<size_t>(lits[0])].push_back(ref);
        watches_[static_cast<size_t>(lits[1])].push_back(ref);
        return true;
    }

    void attach_learned(const std::vector<int>& lits) {
        if (lits.size() == 1) {
            enqueue(lits[0], -1);
            return;
        }
        int ref = static_cast<int>(clause_starts_.size());
        clause_starts_.push_back(static_cast<int>(arena_.size()));
        arena_.push_back(static_cast<int>(lits.size()));
        for (int l : lits) arena_.push_back(l);
        watches_[static_cast<size_t>(lits[0])].push_back(ref);
        watches_[static_cast<size_t>(lits[1])].push_back(ref);
        enqueue(lits[0], ref);
    }

    int* clause_lits(int ref) { return &arena_[static_cast<size_t>(clause_starts_[static_cast<size_t>(ref)]) + 1]; }
    int clause_size(int ref) const { return arena_[static_cast<size_t>(clause_starts_[static_cast<size_t>(ref)])]; }

    bool lit_value_true(int lit) const {
        int a = assign_[static_cast<size_t>(lit_var(lit))];
        if (a < 0) return false;
        return (a == 1) == ((lit & 1) == 0);
    }
    bool lit_value_false(int lit) const {
        int a = assign_[static_cast<size_t>(lit_var(lit))];
        if (a < 0) return false;
        return (a == 1) != ((lit & 1) == 0);
    }

    bool enqueue(int lit, int reason) {
        int var = lit_var(lit);
        int8_t val = (lit & 1) ? 0 : 1;
        if (assign_[static_cast<size_t>(var)] >= 0)
            return assign_[static_cast<size_t>(var)] == val;
        assign_[static_cast<size_t>(var)] = val;
        level_[static_cast<size_t>(var)] = decision_level();
        reason_[static_cast<size_t>(var)] = reason;
        trail_.push_back(lit);
        cost_ += weight_[static_cast<size_t>(lit)];
        return true;
    }

    bool propagate_all() { return propagate() == kNoConflict; }

    int propagate() {
        while (qhead_ < trail_.size()) {
            int lit = trail_[qhead_++];
            // budget check: the set of weight-charged true literals over-spends
            if (cost_ > budget_) {
                budget_conflict_.clear();
                for (int l : trail_)
                    if (weight_[static_cast<size_t>(l)] > 0)
                        budget_conflict_.push_back(lit_neg(l));
                return kBudgetReason;
            }
            int false_lit = lit_neg(lit);
            auto& watch = watches_[static_cast<size_t>(false_lit)];
            size_t keep = 0;
            for (size_t i = 0; i < watch.size(); ++i) {
                int ref = watch[i];
                int* lits = clause_lits(ref);
                int size = clause_size(ref);
                if (lits[0] == false_lit) std::swap(lits[0], lits[1]);
                if (lit_value_true(lits[0])) {
                    watch[keep++] = ref;
                    continue;
                }
                bool moved = false;
                for (int k = 2; k < size; ++k) {
                    if (!lit_value_false(lits[k])) {
                        std::swap(lits[1], lits[k]);
                        watches_[static_cast<size_t>(lits[1])].push_back(ref);
                        moved = true;
                        break;
                    }
                }
                if (moved) continue;
                watch[keep++] = ref;
                if (!enqueue(lits[0], ref)) {
                    for (size_t j = i + 1; j < watch.size(); ++j) watch[keep++] = watch[j];
                    watch.resize(keep);
                    return ref;
                }
            }
            watch.resize(keep);
        }
        if (cost_ > budget_) {
            budget_conflict_.clear();
            for (int l : trail_)
                if (weight_[static_cast<size_t>(l)] > 0) budget_conflict_.push_back(lit_neg(l));
            return kBudgetReason;
        }
        return kNoConflict;
    }

    // First-UIP learning.
    int analyze(int conflict, std::vector<int>& learned) {
        std::vector<bool> seen(static_cast<size_t>(nvars_), false);
        learned.clear();
        learned.push_back(0);  // placeholder for the asserting literal
        int counter = 0;
        int lit = -1;
        size_t index = trail_.size();

        std::vector<int> reason_lits;
        if (conflict == kBudgetReason) {
            reason_lits = budget_conflict_;
        } else {
            reason_lits.assign(clause_lits(conflict), clause_lits(conflict) + clause_size(conflict));
        }

        while (true) {
            for (int q : reason_lits) {
                if (q == lit) continue;
                int v = lit_var(q);
                if (seen[static_cast<size_t>(v)] || level_[static_cast<size_t>(v)] == 0) continue;
                seen[static_cast<size_t>(v)] = true;
                if (level_[static_cast<size_t>(v)] == decision_level())
                    ++counter;
                else
                    learned.push_back(q);
            }
            do {
                lit = trail_[--index];
            } while (!seen[static_cast<size_t>(lit_var(lit))]);
            seen[static_cast<size_t>(lit_var(lit))] = false;
            --counter;
            if (counter == 0) break;
            int r = reason_[static_cast<size_t>(lit_var(lit))];
            if (r == -1) {
                // decision reached without UIP; cannot happen with 1UIP scheme
                break;
            }
            reason_lits.assign(clause_lits(r), clause_lits(r) + clause_size(r));
        }
        learned[0] = lit_neg(lit);

        int back_level = 0;
        if (learned.size() > 1) {
            size_t max_i = 1;
            for (size_t i = 2; i < learned.size(); ++i)
                if (level_[static_cast<size_t>(lit_var(learned[i]))] >
                    level_[static_cast<size_t>(lit_var(learned[max_i]))])
                    max_i = i;
            std::swap(learned[1], learned[max_i]);
            back_level = level_[static_cast<size_t>(lit_var(learned[1]))];
        }
        return back_level;
    }

    void backtrack(int target_level) {
        while (decision_level() > target_level) {
            int mark = trail_lim_.back();
            trail_lim_.pop_back();
            while (static_cast<int>(trail_.size()) > mark) {
                int lit = trail_.back();
                trail_.pop_back();
                cost_ -= weight_[static_cast<size_t>(lit)];
                assign_[static_cast<size_t>(lit_var(lit))] = -1;
            }
        }
        qhead_ = trail_.size();
    }

    int nvars_ = 0;
    int64_t budget_;
    int64_t cost_ = 0;
    bool unsat_at_root_ = false;
    std::vector<int64_t> weight_;  // per encoded literal
    std::vector<int8_t> assign_;
    std::vector<int> level_, reason_;
    std::vector<int> trail_, trail_lim_;
    size_t qhead_ = 0;
    std::vector<int> arena_, clause_starts_;
    std::vector<std::vector<int>> watches_;
    std::vector<int> budget_conflict_;
};

}  // namespace

std::optional<Assignment> solve_with_budget(const WeightedCnf& cnf, int64_t budget) {
    CdclSolver solver(cnf, budget);
    if (!solver.solve()) return std::nullopt;
    Assignment a;
    a.values.resize(static_cast<size_t>(cnf.num_vars));
    for (int v = 0; v < cnf.num_vars; ++v) a.values[static_cast<size_t>(v)] = solver.value(v);
    a.cost = assignment_cost(cnf, a);
    return a;
}

namespace {

SolveResult solve_builtin(const WeightedCnf& cnf) {
    SolveResult result;
    auto model = solve_with_budget(cnf, std::numeric_limits<int64_t>::max() / 2);
    if (!model) {
        result.status = SolveStatus::Unsatisfiable;
        return result;
    }
    while (true) {
        result.status = SolveStatus::Optimal;
        result.assignment = *model;
        if (model->cost == 0) break;
        model = solve_with_budget(cnf, model->cost - 1);
        if (!model) break;
    }
    return result;
}

SolveResult solve_external(const WeightedCnf& cnf, const SolverMode& mode) {
    std::string path = mode.work_dir + "/theory.wcnf";
    {
        std::ofstream out(path, std::ios::binary);
        if (!out) throw ExternalSolverError("cannot write " + path);
        write_wcnf(cnf, out);
    }
    std::string cmd = mode.external_path + " " + path + " 2>/dev/null";
    FILE* pipe = popen(cmd.c_str(), "r");
    if (!pipe) throw ExternalSolverError("failed to launch: " + cmd);
    std::string output;
    char buf[4096];
    size_t n;
    while ((n = fread(buf, 1, sizeof(buf), pipe)) > 0) output.append(buf, n);
    int rc = pclose(pipe);
    if (rc != 0 && output.find("s ") == std::string::npos)
        throw ExternalSolverError("external solver failed with exit code " + std::to_string(rc));
    return parse_solver_output(output, cnf.num_vars);
}

}  // namespace

SolveResult solve_max_sat(const WeightedCnf& cnf, const SolverMode& mode) {
    SolveResult result = mode.builtin ? solve_builtin(cnf) : solve_external(cnf, mode);
    if (result.status == SolveStatus::Optimal) {
        if (!satisfies_hard(cnf, result.assignment))
            throw SolverOutputError("returned assignment violates hard clauses");
        result.assignment.cost = assignment_cost(cnf, result.assignment);
    }
    return result;
}

}  // namespace gpl
