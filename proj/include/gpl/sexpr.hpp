#pragma once

#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace gpl {

// Minimal s-expression reader for the PDDL subset. Atoms are lower-cased,
// since PDDL identifiers are case-insensitive.
struct SexprError : std::runtime_error {
    int line, column;
    SexprError(const std::string& msg, int line, int column)
        : std::runtime_error(msg + " at line " + std::to_string(line) +
                             ", column " + std::to_string(column)),
          line(line), column(column) {}
};

struct Sexpr {
    bool is_atom = false;
    std::string atom;
    std::vector<Sexpr> items;
    int line = 0, column = 0;

    const Sexpr& at(size_t i) const {
        if (is_atom || i >= items.size())
            throw SexprError("expected list element " + std::to_string(i), line, column);
        return items[i];
    }
    size_t size() const { return items.size(); }
    bool head_is(const std::string& s) const {
        return !is_atom && !items.empty() && items[0].is_atom && items[0].atom == s;
    }
    const std::string& as_atom() const {
        if (!is_atom) throw SexprError("expected atom", line, column);
        return atom;
    }
};

Sexpr parse_sexpr(const std::string& text);

}  // namespace gpl
