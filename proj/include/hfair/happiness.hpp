#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "hfair/core.hpp"
#include "hfair/error.hpp"

namespace hfair {

// Happiness expression language
//
//   expr    := term (('+' | '-') term)*
//   term    := unary (('*' | '/') unary)*
//   unary   := '-' unary | primary
//   primary := number | ident | '(' expr ')'
//            | 'ind' '(' expr cmp expr ')'        -> 1 if the comparison holds, else 0
//            | 'eq' '(' ident ',' "category" ')'  -> 1 if the categorical feature matches
//   cmp     := '<' | '<=' | '==' | '>=' | '>'
//
// `yhat`, `y` and `z` are reserved; any other identifier must name a numeric
// feature of the schema (categorical features are only usable inside eq()).
// Labels evaluate to their index, which is the 0/1 value for binary problems.

enum class ExprKind { Number, Yhat, Y, Z, Feature, Add, Sub, Mul, Div, Neg, Ind, Eq };
enum class CmpOp { Lt, Le, EqEq, Ge, Gt };

struct Expr {
    ExprKind kind = ExprKind::Number;
    double number = 0.0;
    std::string name;        // Feature / Eq: feature name
    std::size_t column = 0;  // Feature / Eq: resolved schema column
    std::string category;    // Eq
    std::size_t category_code = 0;
    CmpOp cmp = CmpOp::Lt;   // Ind
    std::vector<Expr> args;

    bool operator==(const Expr&) const = default;
};

class ParseError : public Error {
public:
    enum class Kind { Syntax, UnknownIdentifier, Type };

    ParseError(Kind kind, std::size_t offset, const std::string& message);

    Kind kind() const { return kind_; }
    std::size_t offset() const { return offset_; }

private:
    Kind kind_;
    std::size_t offset_;
};

Expr parse_happiness_expr(std::string_view text, const FeatureSchema& schema);

// Renders with the minimal parentheses needed for parse(render(e)) == e.
std::string render(const Expr& e);

struct HappinessArgs {
    Label yhat = 0;
    std::span<const double> x;
    Label y = 0;
    int z = 0;
};

// Throws EvalError on division by zero or a feature index outside x.
double evaluate(const Expr& e, const HappinessArgs& args);

// Vector-valued happiness eta(yhat, x, y, z). Components are either parsed
// expressions or built-in callables bound to a schema at construction.
class HappinessSpec {
public:
    using Builtin = std::function<double(const HappinessArgs&)>;

    struct Component {
        std::string name;
        std::variant<Expr, Builtin> fn;
    };

    HappinessSpec() = default;
    HappinessSpec(std::string name, std::vector<Component> components);

    // One component per expression text.
    static HappinessSpec from_expressions(std::span<const std::string> texts,
                                          const FeatureSchema& schema);

    const std::string& name() const { return name_; }
    std::size_t dim() const { return components_.size(); }
    const std::vector<Component>& components() const { return components_; }

    void eval(const HappinessArgs& args, std::span<double> out) const;
    std::vector<double> eval(Label yhat, std::span<const double> x, Label y, int z) const;

private:
    std::string name_;
    std::vector<Component> components_;
};

} // namespace hfair
