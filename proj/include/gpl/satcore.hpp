#pragma once

#include <optional>
#include <string>

#include "gpl/wcnf.hpp"

namespace gpl {

struct SolverMode {
    bool builtin = true;
    std::string external_path;  // solver executable, used when !builtin
    std::string work_dir = ".";

    static SolverMode Builtin() { return SolverMode{}; }
    static SolverMode External(std::string path, std::string dir = ".") {
        return SolverMode{false, std::move(path), std::move(dir)};
    }
};

struct ExternalSolverError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Complete Weighted Max-SAT: CDCL engine plus linear descent on the soft cost
// bound, or an external solver reached through WCNF files.
SolveResult solve_max_sat(const WeightedCnf& cnf, const SolverMode& mode = SolverMode::Builtin());

// Plain SAT call on the hard clauses with an upper bound on the soft cost;
// exposed for the descent loop and for tests.
std::optional<Assignment> solve_with_budget(const WeightedCnf& cnf, int64_t budget);

}  // namespace gpl
