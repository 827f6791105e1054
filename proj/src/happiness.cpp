#include "hfair/happiness.hpp"

#include <cctype>
#include <charconv>
#include <cmath>

namespace hfair {

ParseError::ParseError(Kind kind, std::size_t offset, const std::string& message)
    : Error(message + " at offset " + std::to_string(offset)), kind_(kind), offset_(offset) {}

namespace {

enum class Tok {
    Number, Ident, String, LParen, RParen, Comma,
    Plus, Minus, Star, Slash, Lt, Le, EqEq, Ge, Gt, End
};

struct Token {
    Tok kind;
    std::size_t offset;
    std::string text;
    double number = 0.0;
};

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }
bool digit(char c) { return std::isdigit(static_cast<unsigned char>(c)) != 0; }

std::vector<Token> tokenize(std::string_view s) {
    std::vector<Token> out;
    std::size_t i = 0;
    std::size_t content_end = 0; // one past the last non-space byte
    auto syntax = [](std::size_t at, const std::string& msg) {
        return ParseError(ParseError::Kind::Syntax, at, msg);
    };
    while (i < s.size()) {
        const char c = s[i];
        if (std::isspace(static_cast<unsigned char>(c))) {
            ++i;
            continue;
        }
        const std::size_t start = i;
        if (digit(c) || (c == '.' && i + 1 < s.size() && digit(s[i + 1]))) {
            while (i < s.size() && digit(s[i])) ++i;
            if (i < s.size() && s[i] == '.') {
                ++i;
                while (i < s.size() && digit(s[i])) ++i;
            }
            if (i < s.size() && (s[i] == 'e' || s[i] == 'E')) {
                std::size_t j = i + 1;
                if (j < s.size() && (s[j] == '+' || s[j] == '-')) ++j;
                if (j < s.size() && digit(s[j])) {
                    while (j < s.size() && digit(s[j])) ++j;
                    i = j;
                }
            }
            Token t{Tok::Number, start, std::string(s.substr(start, i - start))};
            auto [ptr, ec] = std::from_chars(t.text.data(), t.text.data() + t.text.size(), t.number);
            if (ec != std::errc() || ptr != t.text.data() + t.text.size() || !std::isfinite(t.number)) {
                throw syntax(start, "malformed number '" + t.text + "'");
            }
            out.push_back(std::move(t));
        } else if (ident_start(c)) {
            while (i < s.size() && ident_char(s[i])) ++i;
            out.push_back({Tok::Ident, start, std::string(s.substr(start, i - start))});
        } else if (c == '"') {
            ++i;
            std::string value;
            while (i < s.size() && s[i] != '"') value += s[i++];
            if (i >= s.size()) throw syntax(start, "unterminated string");
            ++i;
            out.push_back({Tok::String, start, std::move(value)});
        } else {
            Tok kind;
            std::size_t len = 1;
            const char next = i + 1 < s.size() ? s[i + 1] : '\0';
            switch (c) {
            case '(': kind = Tok::LParen; break;
            case ')': kind = Tok::RParen; break;
            case ',': kind = Tok::Comma; break;
            case '+': kind = Tok::Plus; break;
            case '-': kind = Tok::Minus; break;
            case '*': kind = Tok::Star; break;
            case '/': kind = Tok::Slash; break;
            case '<':
                kind = next == '=' ? Tok::Le : Tok::Lt;
                len = next == '=' ? 2 : 1;
                break;
            case '>':
                kind = next == '=' ? Tok::Ge : Tok::Gt;
                len = next == '=' ? 2 : 1;
                break;
            case '=':
                if (next != '=') throw syntax(start, "expected '=='");
                kind = Tok::EqEq;
                len = 2;
                break;
            default:
                throw syntax(start, std::string("unexpected character '") + c + "'");
            }
            i += len;
            out.push_back({kind, start, std::string(s.substr(start, len))});
        }
        content_end = i;
    }
    out.push_back({Tok::End, content_end, ""});
    return out;
}

class Parser {
public:
    Parser(std::vector<Token> tokens, const FeatureSchema& schema)
        : tokens_(std::move(tokens)), schema_(schema) {}

    Expr parse() {
        Expr e = expr();
        if (peek().kind != Tok::End) fail(peek(), "unexpected '" + peek().text + "'");
        return e;
    }

private:
    const Token& peek() const { return tokens_[pos_]; }
    const Token& take() { return tokens_[pos_++]; }

    [[noreturn]] void fail(const Token& t, const std::string& msg) const {
        if (t.kind == Tok::End) {
            throw ParseError(ParseError::Kind::Syntax, t.offset, "unexpected end of input");
        }
        throw ParseError(ParseError::Kind::Syntax, t.offset, msg);
    }

    const Token& expect(Tok kind, const char* what) {
        if (peek().kind != kind) fail(peek(), std::string("expected ") + what);
        return take();
    }

    static Expr binary(ExprKind kind, Expr lhs, Expr rhs) {
        Expr e;
        e.kind = kind;
        e.args.push_back(std::move(lhs));
        e.args.push_back(std::move(rhs));
        return e;
    }

    Expr expr() {
        Expr lhs = term();
        while (peek().kind == Tok::Plus || peek().kind == Tok::Minus) {
            const ExprKind kind = take().kind == Tok::Plus ? ExprKind::Add : ExprKind::Sub;
            lhs = binary(kind, std::move(lhs), term());
        }
        return lhs;
    }

    Expr term() {
        Expr lhs = unary();
        while (peek().kind == Tok::Star || peek().kind == Tok::Slash) {
            const ExprKind kind = take().kind == Tok::Star ? ExprKind::Mul : ExprKind::Div;
            lhs = binary(kind, std::move(lhs), unary());
        }
        return lhs;
    }

    Expr unary() {
        if (peek().kind == Tok::Minus) {
            take();
            Expr e;
            e.kind = ExprKind::Neg;
            e.args.push_back(unary());
            return e;
        }
        return primary();
    }

    Expr primary() {
        const Token& t = peek();
        switch (t.kind) {
        case Tok::Number: {
            take();
            Expr e;
            e.kind = ExprKind::Number;
            e.number = t.number;
            return e;
        }
        case Tok::LParen: {
            take();
            Expr e = expr();
            expect(Tok::RParen, "')'");
            return e;
        }
        case Tok::Ident:
            return identifier();
        default:
            fail(t, "expected a value, got '" + t.text + "'");
        }
    }

    Expr identifier() {
        const Token& t = take();
        Expr e;
        if (t.text == "ind" && peek().kind == Tok::LParen) return indicator();
        if (t.text == "eq" && peek().kind == Tok::LParen) return category_match();
        if (t.text == "yhat") {
            e.kind = ExprKind::Yhat;
        } else if (t.text == "y") {
            e.kind = ExprKind::Y;
        } else if (t.text == "z") {
            e.kind = ExprKind::Z;
        } else {
            const auto col = schema_.find(t.text);
            if (!col) {
                throw ParseError(ParseError::Kind::UnknownIdentifier, t.offset,
                                 "unknown identifier '" + t.text + "'");
            }
            if (schema_.column(*col).kind == FeatureKind::Categorical) {
                throw ParseError(ParseError::Kind::Type, t.offset,
                                 "categorical feature '" + t.text + "' used outside eq()");
            }
            e.kind = ExprKind::Feature;
            e.name = t.text;
            e.column = *col;
        }
        return e;
    }

    Expr indicator() {
        take(); // (
        Expr e;
        e.kind = ExprKind::Ind;
        e.args.push_back(expr());
        switch (peek().kind) {
        case Tok::Lt: e.cmp = CmpOp::Lt; break;
        case Tok::Le: e.cmp = CmpOp::Le; break;
        case Tok::EqEq: e.cmp = CmpOp::EqEq; break;
        case Tok::Ge: e.cmp = CmpOp::Ge; break;
        case Tok::Gt: e.cmp = CmpOp::Gt; break;
        default: fail(peek(), "expected comparison operator");
        }
        take();
        e.args.push_back(expr());
        expect(Tok::RParen, "')'");
        return e;
    }

    Expr category_match() {
        take(); // (
        const Token& feature = expect(Tok::Ident, "feature name");
        const auto col = schema_.find(feature.text);
        if (!col) {
            throw ParseError(ParseError::Kind::UnknownIdentifier, feature.offset,
                             "unknown identifier '" + feature.text + "'");
        }
        if (schema_.column(*col).kind != FeatureKind::Categorical) {
            throw ParseError(ParseError::Kind::Type, feature.offset,
                             "eq() needs a categorical feature, '" + feature.text + "' is numeric");
        }
        expect(Tok::Comma, "','");
        const Token& cat = expect(Tok::String, "quoted category");
        const auto code = schema_.category_code(*col, cat.text);
        if (!code) {
            throw ParseError(ParseError::Kind::Type, cat.offset,
                             "'" + cat.text + "' is not a category of '" + feature.text + "'");
        }
        expect(Tok::RParen, "')'");
        Expr e;
        e.kind = ExprKind::Eq;
        e.name = feature.text;
        e.column = *col;
        e.category = cat.text;
        e.category_code = *code;
        return e;
    }

    std::vector<Token> tokens_;
    std::size_t pos_ = 0;
    const FeatureSchema& schema_;
};

int precedence(const Expr& e) {
    switch (e.kind) {
    case ExprKind::Add:
    case ExprKind::Sub: return 1;
    case ExprKind::Mul:
    case ExprKind::Div: return 2;
    case ExprKind::Neg: return 3;
    default: return 4;
    }
}

const char* cmp_text(CmpOp op) {
    switch (op) {
    case CmpOp::Lt: return "<";
    case CmpOp::Le: return "<=";
    case CmpOp::EqEq: return "==";
    case CmpOp::Ge: return ">=";
    case CmpOp::Gt: return ">";
    }
    return "?";
}

void render_into(const Expr& e, std::string& out);

void render_child(const Expr& child, bool parens, std::string& out) {
    if (parens) out += '(';
    render_into(child, out);
    if (parens) out += ')';
}

void render_into(const Expr& e, std::string& out) {
    switch (e.kind) {
    case ExprKind::Number: {
        char buf[64];
        auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, e.number);
        (void)ec;
        out.append(buf, ptr);
        return;
    }
    case ExprKind::Yhat: out += "yhat"; return;
    case ExprKind::Y: out += "y"; return;
    case ExprKind::Z: out += "z"; return;
    case ExprKind::Feature: out += e.name; return;
    case ExprKind::Neg:
        out += '-';
        render_child(e.args[0], precedence(e.args[0]) < 3, out);
        return;
    case ExprKind::Ind:
        out += "ind(";
        render_into(e.args[0], out);
        out += ' ';
        out += cmp_text(e.cmp);
        out += ' ';
        render_into(e.args[1], out);
        out += ')';
        return;
    case ExprKind::Eq:
        out += "eq(" + e.name + ", \"" + e.category + "\")";
        return;
    case ExprKind::Add:
    case ExprKind::Sub:
    case ExprKind::Mul:
    case ExprKind::Div: {
        const int p = precedence(e);
        static constexpr const char* ops[] = {" + ", " - ", " * ", " / "};
        const auto op = ops[static_cast<int>(e.kind) - static_cast<int>(ExprKind::Add)];
        render_child(e.args[0], precedence(e.args[0]) < p, out);
        out += op;
        render_child(e.args[1], precedence(e.args[1]) <= p, out);
        return;
    }
    }
}

} // namespace

Expr parse_happiness_expr(std::string_view text, const FeatureSchema& schema) {
    if (text.find_first_not_of(" \t\r\n") == std::string_view::npos) {
        throw ParseError(ParseError::Kind::Syntax, 0, "empty expression");
    }
    return Parser(tokenize(text), schema).parse();
}

std::string render(const Expr& e) {
    std::string out;
    render_into(e, out);
    return out;
}

double evaluate(const Expr& e, const HappinessArgs& a) {
    switch (e.kind) {
    case ExprKind::Number: return e.number;
    case ExprKind::Yhat: return static_cast<double>(a.yhat);
    case ExprKind::Y: return static_cast<double>(a.y);
    case ExprKind::Z: return static_cast<double>(a.z);
    case ExprKind::Feature:
        if (e.column >= a.x.size()) throw EvalError("missing feature '" + e.name + "'");
        return a.x[e.column];
    case ExprKind::Add: return evaluate(e.args[0], a) + evaluate(e.args[1], a);
    case ExprKind::Sub: return evaluate(e.args[0], a) - evaluate(e.args[1], a);
    case ExprKind::Mul: return evaluate(e.args[0], a) * evaluate(e.args[1], a);
    case ExprKind::Div: {
        const double num = evaluate(e.args[0], a);
        const double den = evaluate(e.args[1], a);
        if (den == 0.0) throw EvalError("division by zero in '" + render(e) + "'");
        return num / den;
    }
    case ExprKind::Neg: return -evaluate(e.args[0], a);
    case ExprKind::Ind: {
        const double l = evaluate(e.args[0], a);
        const double r = evaluate(e.args[1], a);
        bool holds = false;
        switch (e.cmp) {
        case CmpOp::Lt: holds = l < r; break;
        case CmpOp::Le: holds = l <= r; break;
        case CmpOp::EqEq: holds = l == r; break;
        case CmpOp::Ge: holds = l >= r; break;
        case CmpOp::Gt: holds = l > r; break;
        }
        return holds ? 1.0 : 0.0;
    }
    case ExprKind::Eq:
        if (e.column >= a.x.size()) throw EvalError("missing feature '" + e.name + "'");
        return a.x[e.column] == static_cast<double>(e.category_code) ? 1.0 : 0.0;
    }
    throw EvalError("corrupt expression node");
}

HappinessSpec::HappinessSpec(std::string name, std::vector<Component> components)
    : name_(std::move(name)), components_(std::move(components)) {
    if (components_.empty()) throw ArgumentError("happiness function needs at least one component");
}

HappinessSpec HappinessSpec::from_expressions(std::span<const std::string> texts,
                                              const FeatureSchema& schema) {
    std::vector<Component> comps;
    std::string name;
    for (const auto& t : texts) {
        comps.push_back({t, parse_happiness_expr(t, schema)});
        if (!name.empty()) name += "; ";
        name += t;
    }
    return HappinessSpec(std::move(name), std::move(comps));
}

void HappinessSpec::eval(const HappinessArgs& args, std::span<double> out) const {
    for (std::size_t i = 0; i < components_.size(); ++i) {
        const auto& fn = components_[i].fn;
        if (const auto* expr = std::get_if<Expr>(&fn)) {
            out[i] = evaluate(*expr, args);
        } else {
            out[i] = std::get<Builtin>(fn)(args);
        }
    }
}

std::vector<double> HappinessSpec::eval(Label yhat, std::span<const double> x, Label y, int z) const {
    std::vector<double> out(dim());
    eval(HappinessArgs{yhat, x, y, z}, out);
    return out;
}

} // namespace hfair
