#include "dseq/expr.hpp"

#include <bit>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <cstdlib>
#include <limits>
#include <stdexcept>

#include "dseq/error.hpp"
#include "dseq/harmonic.hpp"

namespace dseq::expr {

NodePtr number(double value) { return std::make_shared<const Node>(Node{Number{value}}); }
NodePtr variable(std::size_t slot) { return std::make_shared<const Node>(Node{Variable{slot}}); }
NodePtr negate(NodePtr operand) { return std::make_shared<const Node>(Node{Negate{std::move(operand)}}); }
NodePtr binary(BinaryOp op, NodePtr lhs, NodePtr rhs) {
    return std::make_shared<const Node>(Node{Binary{op, std::move(lhs), std::move(rhs)}});
}
NodePtr call(Func func, std::vector<NodePtr> args) {
    return std::make_shared<const Node>(Node{Call{func, std::move(args)}});
}

namespace {

struct FuncEntry {
    std::string_view name;
    Func func;
    std::size_t min_args;
    std::size_t max_args;
};

constexpr std::size_t kVariadic = std::numeric_limits<std::size_t>::max();

constexpr FuncEntry kFuncs[] = {
    {"sin", Func::Sin, 1, 1},     {"cos", Func::Cos, 1, 1},   {"exp", Func::Exp, 1, 1},
    {"log", Func::Log, 1, 1},     {"sqrt", Func::Sqrt, 1, 1}, {"abs", Func::Abs, 1, 1},
    {"min", Func::Min, 2, kVariadic}, {"max", Func::Max, 2, kVariadic},
    {"floor", Func::Floor, 1, 1}, {"H", Func::H, 1, 1},
};

const FuncEntry* find_func(std::string_view name) {
    for (const auto& e : kFuncs)
        if (e.name == name) return &e;
    return nullptr;
}

const FuncEntry& entry(Func f) {
    for (const auto& e : kFuncs)
        if (e.func == f) return e;
    throw std::logic_error("unknown function id");
}

class Parser {
public:
    Parser(std::string_view text, const std::vector<std::string>& vars) : text_(text), vars_(vars) {}

    NodePtr parse_all() {
        NodePtr e = parse_expr();
        skip_ws();
        if (pos_ != text_.size()) fail(pos_, "unexpected '" + std::string(1, text_[pos_]) + "'");
        return e;
    }

private:
    [[noreturn]] void fail(std::size_t at, const std::string& msg,
                           ParseErrorKind kind = ParseErrorKind::Syntax) const {
        throw ParseError(kind, at, msg);
    }

    void skip_ws() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }

    bool accept(char c) {
        skip_ws();
        if (pos_ < text_.size() && text_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    void expect(char c) {
        if (!accept(c)) fail(pos_, std::string("expected '") + c + "'");
    }

    NodePtr parse_expr() {
        NodePtr lhs = parse_term();
        for (;;) {
            if (accept('+'))
                lhs = binary(BinaryOp::Add, lhs, parse_term());
            else if (accept('-'))
                lhs = binary(BinaryOp::Sub, lhs, parse_term());
            else
                return lhs;
        }
    }

    NodePtr parse_term() {
        NodePtr lhs = parse_unary();
        for (;;) {
            if (accept('*'))
                lhs = binary(BinaryOp::Mul, lhs, parse_unary());
            else if (accept('/'))
                lhs = binary(BinaryOp::Div, lhs, parse_unary());
            else
                return lhs;
        }
    }

    NodePtr parse_unary() {
        if (accept('-')) return negate(parse_unary());
        return parse_power();
    }

    NodePtr parse_power() {
        NodePtr base = parse_atom();
        if (accept('^')) return binary(BinaryOp::Pow, base, parse_unary());
        return base;
    }

    NodePtr parse_atom() {
        skip_ws();
        if (pos_ >= text_.size()) fail(pos_, "unexpected end of input");
        const char c = text_[pos_];
        if (std::isdigit(static_cast<unsigned char>(c))) return parse_number();
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return parse_identifier();
        if (accept('(')) {
            NodePtr inner = parse_expr();
            expect(')');
            return inner;
        }
        fail(pos_, "unexpected '" + std::string(1, c) + "'");
    }

    NodePtr parse_number() {
        const std::size_t start = pos_;
        auto digits = [&] {
            std::size_t n = 0;
            while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_, ++n;
            return n;
        };
        digits();
        if (pos_ < text_.size() && text_[pos_] == '.') {
            ++pos_;
            digits();
        }
        if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
            ++pos_;
            if (pos_ < text_.size() && (text_[pos_] == '+' || text_[pos_] == '-')) ++pos_;
            if (digits() == 0) fail(pos_, "malformed exponent");
        }
        const std::string literal(text_.substr(start, pos_ - start));
        const double value = std::strtod(literal.c_str(), nullptr);
        if (!std::isfinite(value)) fail(start, "number out of range");
        return number(value);
    }

    NodePtr parse_identifier() {
        const std::size_t start = pos_;
        while (pos_ < text_.size() &&
               (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
            ++pos_;
        const std::string_view name = text_.substr(start, pos_ - start);

        skip_ws();
        const bool called = pos_ < text_.size() && text_[pos_] == '(';
        if (const FuncEntry* fe = find_func(name)) {
            if (!called) fail(pos_, "expected '(' after " + std::string(name));
            ++pos_;
            std::vector<NodePtr> args;
            args.push_back(parse_expr());
            while (accept(',')) args.push_back(parse_expr());
            expect(')');
            if (args.size() < fe->min_args || args.size() > fe->max_args)
                fail(start, std::string(name) + " called with " + std::to_string(args.size()) + " argument(s)",
                     ParseErrorKind::Arity);
            return call(fe->func, std::move(args));
        }
        for (std::size_t i = 0; i < vars_.size(); ++i)
            if (vars_[i] == name) {
                if (called) fail(start, std::string(name) + " is a variable, not a function");
                return variable(i);
            }
        fail(start, "unknown identifier '" + std::string(name) + "'", ParseErrorKind::UnknownIdentifier);
    }

    std::string_view text_;
    const std::vector<std::string>& vars_;
    std::size_t pos_ = 0;
};

double checked(double v, const char* what) {
    if (!std::isfinite(v)) throw DomainError(std::string("non-finite result in ") + what);
    return v;
}

double eval(const Node& n, std::span<const double> vals) {
    return std::visit(
        [&](const auto& node) -> double {
            using T = std::decay_t<decltype(node)>;
            if constexpr (std::is_same_v<T, Number>) {
                return node.value;
            } else if constexpr (std::is_same_v<T, Variable>) {
                return vals[node.slot];
            } else if constexpr (std::is_same_v<T, Negate>) {
                return -eval(*node.operand, vals);
            } else if constexpr (std::is_same_v<T, Binary>) {
                const double a = eval(*node.lhs, vals);
                const double b = eval(*node.rhs, vals);
                switch (node.op) {
                case BinaryOp::Add: return checked(a + b, "'+'");
                case BinaryOp::Sub: return checked(a - b, "'-'");
                case BinaryOp::Mul: return checked(a * b, "'*'");
                case BinaryOp::Div:
                    if (b == 0.0) throw DomainError("division by zero");
                    return checked(a / b, "'/'");
                case BinaryOp::Pow: return checked(std::pow(a, b), "'^'");
                }
                throw std::logic_error("bad operator");
            } else {
                const double x = eval(*node.args[0], vals);
                switch (node.func) {
                case Func::Sin: return std::sin(x);
                case Func::Cos: return std::cos(x);
                case Func::Exp: return checked(std::exp(x), "exp");
                case Func::Log:
                    if (x <= 0.0) throw DomainError("log of non-positive value");
                    return std::log(x);
                case Func::Sqrt:
                    if (x < 0.0) throw DomainError("sqrt of negative value");
                    return std::sqrt(x);
                case Func::Abs: return std::fabs(x);
                case Func::Floor: return std::floor(x);
                case Func::H:
                    if (x < 0.0) throw DomainError("H of negative value");
                    return harmonic_real(x);
                case Func::Min:
                case Func::Max: {
                    double best = x;
                    for (std::size_t i = 1; i < node.args.size(); ++i) {
                        const double y = eval(*node.args[i], vals);
                        best = node.func == Func::Min ? std::min(best, y) : std::max(best, y);
                    }
                    return best;
                }
                }
                throw std::logic_error("bad function");
            }
        },
        n.v);
}

// Precedence levels: 0 sum, 1 product, 2 unary, 3 power, 4 atom.
int level(const Node& n) {
    if (const auto* b = std::get_if<Binary>(&n.v)) {
        switch (b->op) {
        case BinaryOp::Add:
        case BinaryOp::Sub: return 0;
        case BinaryOp::Mul:
        case BinaryOp::Div: return 1;
        case BinaryOp::Pow: return 3;
        }
    }
    if (std::holds_alternative<Negate>(n.v)) return 2;
    if (const auto* num = std::get_if<Number>(&n.v); num && std::signbit(num->value)) return 2;
    return 4;
}

void print(const Node& n, int required, const std::vector<std::string>& vars, std::string& out) {
    const bool paren = level(n) < required;
    if (paren) out += '(';
    std::visit(
        [&](const auto& node) {
            using T = std::decay_t<decltype(node)>;
            if constexpr (std::is_same_v<T, Number>) {
                out += format_number(node.value);
            } else if constexpr (std::is_same_v<T, Variable>) {
                out += vars.at(node.slot);
            } else if constexpr (std::is_same_v<T, Negate>) {
                out += '-';
                print(*node.operand, 2, vars, out);
            } else if constexpr (std::is_same_v<T, Binary>) {
                switch (node.op) {
                case BinaryOp::Add:
                case BinaryOp::Sub:
                    print(*node.lhs, 0, vars, out);
                    out += node.op == BinaryOp::Add ? " + " : " - ";
                    print(*node.rhs, 1, vars, out);
                    break;
                case BinaryOp::Mul:
                case BinaryOp::Div:
                    print(*node.lhs, 1, vars, out);
                    out += node.op == BinaryOp::Mul ? '*' : '/';
                    print(*node.rhs, 2, vars, out);
                    break;
                case BinaryOp::Pow:
                    print(*node.lhs, 4, vars, out);
                    out += '^';
                    print(*node.rhs, 2, vars, out);
                    break;
                }
            } else {
                out += func_name(node.func);
                out += '(';
                for (std::size_t i = 0; i < node.args.size(); ++i) {
                    if (i) out += ", ";
                    print(*node.args[i], 0, vars, out);
                }
                out += ')';
            }
        },
        n.v);
    if (paren) out += ')';
}

} // namespace

std::string_view func_name(Func f) { return entry(f).name; }

std::pair<std::size_t, std::size_t> func_arity(Func f) {
    const auto& e = entry(f);
    return {e.min_args, e.max_args};
}

std::string format_number(double value) {
    char buf[40];
    if (value == std::trunc(value) && std::fabs(value) < 1e15) {
        std::snprintf(buf, sizeof buf, "%.0f", value);
        if (std::strcmp(buf, "-0") != 0) return buf;
    }
    for (int precision = 1; precision <= 17; ++precision) {
        std::snprintf(buf, sizeof buf, "%.*g", precision, value);
        if (std::strtod(buf, nullptr) == value) break;
    }
    return buf;
}

Expression::Expression(NodePtr root, std::vector<std::string> variables)
    : root_(std::move(root)), variables_(std::move(variables)) {
    if (!root_) throw std::invalid_argument("empty expression tree");
}

Expression Expression::parse(std::string_view text, std::vector<std::string> variables) {
    Parser p(text, variables);
    NodePtr root = p.parse_all();
    return Expression(std::move(root), std::move(variables));
}

double Expression::evaluate(std::span<const double> values) const {
    if (values.size() < variables_.size()) throw std::invalid_argument("too few variable values");
    return checked(eval(*root_, values), "expression");
}

std::string Expression::to_string() const {
    std::string out;
    print(*root_, 0, variables_, out);
    return out;
}

bool structurally_equal(const Node& a, const Node& b) {
    if (a.v.index() != b.v.index()) return false;
    return std::visit(
        [&](const auto& x) -> bool {
            using T = std::decay_t<decltype(x)>;
            const auto& y = std::get<T>(b.v);
            if constexpr (std::is_same_v<T, Number>) {
                return std::bit_cast<std::uint64_t>(x.value) == std::bit_cast<std::uint64_t>(y.value);
            } else if constexpr (std::is_same_v<T, Variable>) {
                return x.slot == y.slot;
            } else if constexpr (std::is_same_v<T, Negate>) {
                return structurally_equal(*x.operand, *y.operand);
            } else if constexpr (std::is_same_v<T, Binary>) {
                return x.op == y.op && structurally_equal(*x.lhs, *y.lhs) && structurally_equal(*x.rhs, *y.rhs);
            } else {
                if (x.func != y.func || x.args.size() != y.args.size()) return false;
                for (std::size_t i = 0; i < x.args.size(); ++i)
                    if (!structurally_equal(*x.args[i], *y.args[i])) return false;
                return true;
            }
        },
        a.v);
}

bool structurally_equal(const Expression& a, const Expression& b) {
    return a.variables() == b.variables() && structurally_equal(*a.root(), *b.root());
}

} // namespace dseq::expr
