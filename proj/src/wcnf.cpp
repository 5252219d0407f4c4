#include "gpl/wcnf.hpp"

#include <cstdlib>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace gpl {

int64_t assignment_cost(const WeightedCnf& cnf, const Assignment& a) {
    int64_t cost = 0;
    for (auto& [lits, w] : cnf.soft) {
        bool sat = false;
        for (int lit : lits) sat |= a.lit_true(lit);
        if (!sat) cost += w;
    }
    return cost;
}

bool satisfies_hard(const WeightedCnf& cnf, const Assignment& a) {
    for (auto& clause : cnf.hard) {
        bool sat = false;
        for (int lit : clause) sat |= a.lit_true(lit);
        if (!sat) return false;
    }
    return true;
}

void write_wcnf(const WeightedCnf& cnf, std::ostream& os) {
    const int64_t top = cnf.top_weight();
    os << "p wcnf " << cnf.num_vars << " " << cnf.num_clauses() << " " << top << "\n";
    for (auto& clause : cnf.hard) {
        os << top;
        for (int lit : clause) os << " " << lit;
        os << " 0\n";
    }
    for (auto& [lits, w] : cnf.soft) {
        os << w;
        for (int lit : lits) os << " " << lit;
        os << " 0\n";
    }
}

std::string wcnf_to_string(const WeightedCnf& cnf) {
    std::ostringstream os;
    write_wcnf(cnf, os);
    return os.str();
}

WeightedCnf parse_wcnf(const std::string& text) {
    WeightedCnf cnf;
    std::istringstream is(text);
    std::string line;
    int64_t top = -1;
    int lineno = 0;
    size_t declared_clauses = 0;
    while (std::getline(is, line)) {
        ++lineno;
        if (line.empty() || line[0] == 'c') continue;
        std::istringstream ls(line);
        if (line[0] == 'p') {
            std::string p, fmt;
            if (!(ls >> p >> fmt >> cnf.num_vars >> declared_clauses >> top) || fmt != "wcnf")
                throw SolverOutputError("bad header on line " + std::to_string(lineno));
            continue;
        }
        if (top < 0) throw SolverOutputError("clause before header on line " + std::to_string(lineno));
        int64_t w;
        if (!(ls >> w)) throw SolverOutputError("bad clause on line " + std::to_string(lineno));
        std::vector<int> lits;
        int lit;
        while (ls >> lit && lit != 0) {
            if (std::abs(lit) > cnf.num_vars)
                throw SolverOutputError("literal out of range on line " + std::to_string(lineno));
            lits.push_back(lit);
        }
        if (w >= top)
            cnf.hard.push_back(std::move(lits));
        else
            cnf.soft.push_back({std::move(lits), w});
    }
    if (top < 0) throw SolverOutputError("missing wcnf header");
    if (declared_clauses != cnf.num_clauses())
        throw SolverOutputError("clause count mismatch: header says " +
                                std::to_string(declared_clauses) + ", found " +
                                std::to_string(cnf.num_clauses()));
    return cnf;
}

SolveResult parse_solver_output(const std::string& text, int num_vars) {
    SolveResult result;
    bool have_status = false;
    std::vector<int> lits;
    std::istringstream is(text);
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        if (line.empty() || line[0] == 'c' || line[0] == 'o') continue;
        if (line[0] == 's') {
            have_status = true;
            if (line.find("UNSATISFIABLE") != std::string::npos) {
                result.status = SolveStatus::Unsatisfiable;
            } else if (line.find("OPTIMUM FOUND") != std::string::npos ||
                       line.find("SATISFIABLE") != std::string::npos) {
                result.status = SolveStatus::Optimal;
            } else {
                throw SolverOutputError("unrecognized status line " + std::to_string(lineno) +
                                        ": " + line);
            }
        } else if (line[0] == 'v') {
            std::istringstream ls(line.substr(1));
            std::string tok;
            while (ls >> tok) {
                char* end = nullptr;
                long lit = std::strtol(tok.c_str(), &end, 10);
                if (end == tok.c_str() || *end != '\0')
                    throw SolverOutputError("malformed literal on line " +
                                            std::to_string(lineno) + ": " + tok);
                if (lit != 0) lits.push_back(static_cast<int>(lit));
            }
        } else {
            throw SolverOutputError("unrecognized output line " + std::to_string(lineno) + ": " +
                                    line);
        }
    }
    if (!have_status) throw SolverOutputError("missing 's' status line");
    if (result.status == SolveStatus::Optimal) {
        result.assignment.values.assign(static_cast<size_t>(num_vars), false);
        for (int lit : lits) {
            int v = std::abs(lit) - 1;
            if (v < 0 || v >= num_vars)
                throw SolverOutputError("literal out of range: " + std::to_string(lit));
            result.assignment.values[static_cast<size_t>(v)] = lit > 0;
        }
    }
    return result;
}

}  // namespace gpl
