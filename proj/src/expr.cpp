#include "stils/expr.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <functional>

namespace stils::expr {

namespace {

const std::set<std::string> kVariables = {"t", "x", "y", "vx", "vy", "vz"};

// name -> arity
const std::map<std::string, int> kFunctions = {
    {"sin", 1}, {"cos", 1}, {"exp", 1}, {"abs", 1}, {"sqrt", 1}, {"min", 2}, {"max", 2},
};

struct Token {
    enum Kind { Number, Name, Op, LParen, RParen, Comma, End } kind;
    double value = 0.0;
    std::string text;
    char op = 0;
    std::size_t offset = 0;
};

class Lexer {
public:
    explicit Lexer(const std::string& s) : s_(s) { advance(); }

    const Token& peek() const { return tok_; }

    Token take() {
        Token t = tok_;
        advance();
        return t;
    }

private:
    void advance() {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
        tok_ = Token{};
        tok_.offset = pos_;
        if (pos_ >= s_.size()) {
            tok_.kind = Token::End;
            return;
        }
        char c = s_[pos_];
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            const char* begin = s_.c_str() + pos_;
            char* end = nullptr;
            double v = std::strtod(begin, &end);
            if (end == begin) throw ParseError("malformed number", pos_);
            tok_.kind = Token::Number;
            tok_.value = v;
            pos_ += static_cast<std::size_t>(end - begin);
            return;
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t start = pos_;
            while (pos_ < s_.size() &&
                   (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_'))
                ++pos_;
            tok_.kind = Token::Name;
            tok_.text = s_.substr(start, pos_ - start);
            return;
        }
        switch (c) {
            case '+': case '-': case '*': case '/': case '^':
                tok_.kind = Token::Op;
                tok_.op = c;
                break;
            case '(': tok_.kind = Token::LParen; break;
            case ')': tok_.kind = Token::RParen; break;
            case ',': tok_.kind = Token::Comma; break;
            default:
                throw ParseError(std::string("unexpected character '") + c + "'", pos_);
        }
        ++pos_;
    }

    const std::string& s_;
    std::size_t pos_ = 0;
    Token tok_;
};

class Parser {
public:
    explicit Parser(const std::string& s) : lex_(s) {}

    NodePtr parse_all() {
        NodePtr e = parse_expr();
        const Token& t = lex_.peek();
        if (t.kind != Token::End) throw ParseError("trailing tokens", t.offset);
        return e;
    }

private:
    NodePtr parse_expr() {
        NodePtr lhs = parse_term();
        while (lex_.peek().kind == Token::Op &&
               (lex_.peek().op == '+' || lex_.peek().op == '-')) {
            char op = lex_.take().op;
            lhs = binary(op, lhs, parse_term());
        }
        return lhs;
    }

    NodePtr parse_term() {
        NodePtr lhs = parse_factor();
        while (lex_.peek().kind == Token::Op &&
               (lex_.peek().op == '*' || lex_.peek().op == '/')) {
            char op = lex_.take().op;
            lhs = binary(op, lhs, parse_factor());
        }
        return lhs;
    }

    // factor := unary ("^" factor)?   -- right-associative
    NodePtr parse_factor() {
        NodePtr base = parse_unary();
        if (lex_.peek().kind == Token::Op && lex_.peek().op == '^') {
            lex_.take();
            return binary('^', base, parse_factor());
        }
        return base;
    }

    NodePtr parse_unary() {
        if (lex_.peek().kind == Token::Op && lex_.peek().op == '-') {
            lex_.take();
            auto n = std::make_shared<Node>();
            n->kind = NodeKind::Unary;
            n->op = '-';
            n->args.push_back(parse_unary());
            return n;
        }
        return parse_atom();
    }

    NodePtr parse_atom() {
        Token t = lex_.take();
        switch (t.kind) {
            case Token::Number: {
                auto n = std::make_shared<Node>();
                n->kind = NodeKind::Number;
                n->value = t.value;
                return n;
            }
            case Token::Name: {
                if (lex_.peek().kind == Token::LParen) {
                    auto it = kFunctions.find(t.text);
                    if (it == kFunctions.end())
                        throw ParseError("unknown function '" + t.text + "'", t.offset);
                    lex_.take();  // '('
                    auto n = std::make_shared<Node>();
                    n->kind = NodeKind::Call;
                    n->name = t.text;
                    n->args.push_back(parse_expr());
                    while (lex_.peek().kind == Token::Comma) {
                        lex_.take();
                        n->args.push_back(parse_expr());
                    }
                    Token close = lex_.take();
                    if (close.kind != Token::RParen)
                        throw ParseError("expected ')'", close.offset);
                    if (static_cast<int>(n->args.size()) != it->second)
                        throw ParseError("function '" + t.text + "' expects " +
                                             std::to_string(it->second) + " argument(s)",
                                         t.offset);
                    return n;
                }
                if (t.text == "pi") {
                    auto n = std::make_shared<Node>();
                    n->kind = NodeKind::Number;
                    n->value = M_PI;
                    return n;
                }
                if (!kVariables.count(t.text))
                    throw ParseError("unknown identifier '" + t.text + "'", t.offset);
                auto n = std::make_shared<Node>();
                n->kind = NodeKind::Variable;
                n->name = t.text;
                return n;
            }
            case Token::LParen: {
                NodePtr e = parse_expr();
                Token close = lex_.take();
                if (close.kind != Token::RParen)
                    throw ParseError("expected ')'", close.offset);
                return e;
            }
            default:
                throw ParseError("expected operand", t.offset);
        }
    }

    static NodePtr binary(char op, NodePtr lhs, NodePtr rhs) {
        auto n = std::make_shared<Node>();
        n->kind = NodeKind::Binary;
        n->op = op;
        n->args = {std::move(lhs), std::move(rhs)};
        return n;
    }

    Lexer lex_;
};

double eval_node(const Node& n, const EvalContext& ctx) {
    switch (n.kind) {
        case NodeKind::Number:
            return n.value;
        case NodeKind::Variable: {
            auto it = ctx.find(n.name);
            if (it == ctx.end()) throw EvalError("unbound variable '" + n.name + "'");
            return it->second;
        }
        case NodeKind::Unary:
            return -eval_node(*n.args[0], ctx);
        case NodeKind::Binary: {
            double a = eval_node(*n.args[0], ctx);
            double b = eval_node(*n.args[1], ctx);
            switch (n.op) {
                case '+': return a + b;
                case '-': return a - b;
                case '*': return a * b;
                case '/': return a / b;
                case '^': return std::pow(a, b);
            }
            break;
        }
        case NodeKind::Call: {
            double a = eval_node(*n.args[0], ctx);
            if (n.name == "sin") return std::sin(a);
            if (n.name == "cos") return std::cos(a);
            if (n.name == "exp") return std::exp(a);
            if (n.name == "abs") return std::fabs(a);
            if (n.name == "sqrt") return std::sqrt(a);
            double b = eval_node(*n.args[1], ctx);
            if (n.name == "min") return std::fmin(a, b);
            if (n.name == "max") return std::fmax(a, b);
            break;
        }
    }
    throw EvalError("corrupt expression tree");
}

void collect_vars(const Node& n, std::set<std::string>& out) {
    if (n.kind == NodeKind::Variable) out.insert(n.name);
    for (const auto& a : n.args) collect_vars(*a, out);
}

void unparse_node(const Node& n, std::string& out) {
    switch (n.kind) {
        case NodeKind::Number: {
            char buf[64];
            std::snprintf(buf, sizeof(buf), "%.17g", n.value);
            out += buf;
            break;
        }
        case NodeKind::Variable:
            out += n.name;
            break;
        case NodeKind::Unary:
            out += "(-";
            unparse_node(*n.args[0], out);
            out += ')';
            break;
        case NodeKind::Binary:
            out += '(';
            unparse_node(*n.args[0], out);
            out += n.op;
            unparse_node(*n.args[1], out);
            out += ')';
            break;
        case NodeKind::Call:
            out += n.name;
            out += '(';
            for (std::size_t i = 0; i < n.args.size(); ++i) {
                if (i) out += ',';
                unparse_node(*n.args[i], out);
            }
            out += ')';
            break;
    }
}

bool equal_nodes(const Node& a, const Node& b) {
    if (a.kind != b.kind || a.op != b.op || a.name != b.name ||
        a.args.size() != b.args.size())
        return false;
    if (a.kind == NodeKind::Number && a.value != b.value) return false;
    for (std::size_t i = 0; i < a.args.size(); ++i)
        if (!equal_nodes(*a.args[i], *b.args[i])) return false;
    return true;
}

}  // namespace

double Expression::eval(const EvalContext& ctx) const {
    if (!root_) throw EvalError("empty expression");
    return eval_node(*root_, ctx);
}

std::set<std::string> Expression::free_vars() const {
    std::set<std::string> out;
    if (root_) collect_vars(*root_, out);
    return out;
}

std::string Expression::unparse() const {
    std::string out;
    if (root_) unparse_node(*root_, out);
    return out;
}

bool Expression::operator==(const Expression& other) const {
    if (!root_ || !other.root_) return root_ == other.root_;
    return equal_nodes(*root_, *other.root_);
}

Expression parse(const std::string& text) {
    if (text.empty()) throw ParseError("empty input", 0);
    Parser p(text);
    return Expression(p.parse_all());
}

}  // namespace stils::expr
