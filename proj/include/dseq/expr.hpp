#pragma once

#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace dseq::expr {

// Grammar (whitespace insensitive):
//   expr  := term (('+'|'-') term)*
//   term  := unary (('*'|'/') unary)*
//   unary := '-' unary | power
//   power := atom ('^' unary)?
//   atom  := NUMBER | VAR | FUNC '(' expr (',' expr)* ')' | '(' expr ')'

enum class BinaryOp { Add, Sub, Mul, Div, Pow };
enum class Func { Sin, Cos, Exp, Log, Sqrt, Abs, Min, Max, Floor, H };

struct Node;
using NodePtr = std::shared_ptr<const Node>;

struct Number {
    double value;
};
struct Variable {
    std::size_t slot; // position in the expression's variable list
};
struct Negate {
    NodePtr operand;
};
struct Binary {
    BinaryOp op;
    NodePtr lhs;
    NodePtr rhs;
};
struct Call {
    Func func;
    std::vector<NodePtr> args;
};

struct Node {
    std::variant<Number, Variable, Negate, Binary, Call> v;
};

NodePtr number(double value);
NodePtr variable(std::size_t slot);
NodePtr negate(NodePtr operand);
NodePtr binary(BinaryOp op, NodePtr lhs, NodePtr rhs);
NodePtr call(Func func, std::vector<NodePtr> args);

std::string_view func_name(Func f);
/// Minimum and maximum argument count (max = SIZE_MAX for variadic min/max).
std::pair<std::size_t, std::size_t> func_arity(Func f);

/// A parsed expression bound to an ordered list of variable names.
/// Immutable; copies share the tree.
class Expression {
public:
    Expression(NodePtr root, std::vector<std::string> variables);

    /// Throws ParseError (syntax / unknown identifier / arity) with a byte offset.
    static Expression parse(std::string_view text, std::vector<std::string> variables);

    /// Values are matched to variables by position. Throws DomainError when the
    /// expression is undefined at the point or the result is not finite.
    double evaluate(std::span<const double> values) const;
    double operator()(double a) const { return evaluate(std::span<const double>(&a, 1)); }
    double operator()(double a, double b) const {
        const double v[2] = {a, b};
        return evaluate(v);
    }

    /// Canonical text; re-parsing it yields a structurally identical tree.
    std::string to_string() const;

    const NodePtr& root() const noexcept { return root_; }
    const std::vector<std::string>& variables() const noexcept { return variables_; }

private:
    NodePtr root_;
    std::vector<std::string> variables_;
};

/// Same shape, same operators, bit-identical constants.
bool structurally_equal(const Node& a, const Node& b);
bool structurally_equal(const Expression& a, const Expression& b);

/// Shortest decimal form that strtod maps back to the same double (at most 17 digits).
std::string format_number(double value);

} // namespace dseq::expr
