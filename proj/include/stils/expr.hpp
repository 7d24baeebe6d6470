#pragma once

#include <map>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include "stils/errors.hpp"

namespace stils::expr {

/// Variable bindings for evaluation.
using EvalContext = std::map<std::string, double>;

struct Node;
using NodePtr = std::shared_ptr<const Node>;

enum class NodeKind { Number, Variable, Unary, Binary, Call };

struct Node {
    NodeKind kind;
    double value = 0.0;          // Number
    std::string name;            // Variable or Call
    char op = 0;                 // Unary ('-') or Binary ('+','-','*','/','^')
    std::vector<NodePtr> args;   // operands / call arguments
};

/// Immutable parsed expression. Thread-safe to evaluate.
class Expression {
public:
    Expression() = default;
    explicit Expression(NodePtr root) : root_(std::move(root)) {}

    bool valid() const { return root_ != nullptr; }
    const Node& root() const { return *root_; }

    double eval(const EvalContext& ctx) const;
    std::set<std::string> free_vars() const;
    std::string unparse() const;

    bool operator==(const Expression& other) const;

private:
    NodePtr root_;
};

/// Recursive-descent parser for the arithmetic grammar:
///   expr   := term (("+"|"-") term)*
///   term   := factor (("*"|"/") factor)*
///   factor := unary ("^" factor)?
///   unary  := "-" unary | atom
///   atom   := number | name | name "(" expr ("," expr)* ")" | "(" expr ")"
/// Known names: variables t, x, y, vx, vy, vz; constant pi;
/// functions sin, cos, exp, abs, sqrt (1 arg), min, max (2 args).
Expression parse(const std::string& text);

}  // namespace stils::expr
