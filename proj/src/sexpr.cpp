#include "gpl/sexpr.hpp"

#include <cctype>

namespace gpl {

namespace {

struct Cursor {
    const std::string& text;
    size_t pos = 0;
    int line = 1, column = 1;

    bool done() const { return pos >= text.size(); }
    char peek() const { return text[pos]; }
    void advance() {
        if (text[pos] == '\n') {
            ++line;
            column = 1;
        } else {
            ++column;
        }
        ++pos;
    }
    void skip_ws() {
        while (!done()) {
            char c = peek();
            if (c == ';') {
                while (!done() && peek() != '\n') advance();
            } else if (std::isspace(static_cast<unsigned char>(c))) {
                advance();
            } else {
                break;
            }
        }
    }
};

Sexpr parse_one(Cursor& cur) {
    cur.skip_ws();
    if (cur.done()) throw SexprError("unexpected end of input", cur.line, cur.column);
    Sexpr node;
    node.line = cur.line;
    node.column = cur.column;
    if (cur.peek() == '(') {
        cur.advance();
        while (true) {
            cur.skip_ws();
            if (cur.done()) throw SexprError("unclosed '('", node.line, node.column);
            if (cur.peek() == ')') {
                cur.advance();
                return node;
            }
            node.items.push_back(parse_one(cur));
        }
    }
    if (cur.peek() == ')') throw SexprError("unexpected ')'", cur.line, cur.column);
    node.is_atom = true;
    while (!cur.done()) {
        char c = cur.peek();
        if (std::isspace(static_cast<unsigned char>(c)) || c == '(' || c == ')' || c == ';') break;
        node.atom += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
        cur.advance();
    }
    return node;
}

}  // namespace

Sexpr parse_sexpr(const std::string& text) {
    Cursor cur{text};
    Sexpr root = parse_one(cur);
    cur.skip_ws();
    if (!cur.done()) throw SexprError("trailing content after top-level expression", cur.line, cur.column);
    return root;
}

}  // namespace gpl
