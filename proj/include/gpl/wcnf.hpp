#pragma once

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

namespace gpl {

// Weighted partial CNF. Literals use DIMACS convention: +-(var+1) for var
// ids 0..num_vars-1.
struct WeightedCnf {
    int num_vars = 0;
    std::vector<std::vector<int>> hard;
    std::vector<std::pair<std::vector<int>, int64_t>> soft;

    int64_t top_weight() const {
        int64_t sum = 1;
        for (auto& [lits, w] : soft) sum += w;
        return sum;
    }
    size_t num_clauses() const { return hard.size() + soft.size(); }
};

struct Assignment {
    std::vector<bool> values;  // indexed by var id
    int64_t cost = 0;          // sum of violated soft weights

    bool lit_true(int lit) const {
        int v = std::abs(lit) - 1;
        return values[static_cast<size_t>(v)] == (lit > 0);
    }
};

int64_t assignment_cost(const WeightedCnf& cnf, const Assignment& a);
bool satisfies_hard(const WeightedCnf& cnf, const Assignment& a);

void write_wcnf(const WeightedCnf& cnf, std::ostream& os);
std::string wcnf_to_string(const WeightedCnf& cnf);

// DIMACS "p wcnf" reader; clauses with the header's top weight become hard.
WeightedCnf parse_wcnf(const std::string& text);

enum class SolveStatus { Optimal, Unsatisfiable };

struct SolveResult {
    SolveStatus status = SolveStatus::Unsatisfiable;
    Assignment assignment;
};

struct SolverOutputError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Parses standard MaxSAT competition output: "s OPTIMUM FOUND" / "s
// UNSATISFIABLE" with "v" literal lines.
SolveResult parse_solver_output(const std::string& text, int num_vars);

}  // namespace gpl
