#include "rpgkit/expr.hpp"

#include <cassert>
#include <cctype>

#include "rpgkit/util.hpp"

namespace rpgkit {

int VariableTable::add(Slot slot) {
    slots_.push_back(std::move(slot));
    return int(slots_.size()) - 1;
}

void VariableTable::alias(const std::string& name, int slot) {
    by_name_.emplace(name, slot);
}

std::optional<int> VariableTable::lookup(std::string_view name) const {
    auto it = by_name_.find(std::string(name));
    if (it == by_name_.end()) return std::nullopt;
    return it->second;
}

uint64_t GameState::hash_raw(const std::vector<int64_t>& raw) {
    uint64_t h = 0xcbf29ce484222325ull;
    for (int64_t v : raw) h = fnv1a64_u64(uint64_t(v), h);
    return h;
}

ExprPtr Expr::clone() const {
    auto c = std::make_unique<Expr>();
    c->kind = kind;
    c->number = number;
    c->boolean = boolean;
    c->slot = slot;
    c->var_name = var_name;
    c->un = un;
    c->bin = bin;
    if (lhs) c->lhs = lhs->clone();
    if (rhs) c->rhs = rhs->clone();
    return c;
}

// ---------------------------------------------------------------------------
// Lexer

namespace {

enum class Tok {
    End, Number, Ident, True, False,
    Plus, Minus, Star, Slash,
    Eq, Ne, Lt, Le, Gt, Ge,
    And, Or, Not,
    LParen, RParen,
    Assign, PlusAssign, MinusAssign, StarAssign, SlashAssign,
};

struct Token {
    Tok kind;
    size_t pos;
    Fixed number;
    std::string text;
};

// Token positions are 1-based columns; end-of-input sits one past the last
// character.
class Lexer {
public:
    explicit Lexer(std::string_view src) : src_(src) {}

    Token next() {
        skip_ws();
        size_t p = pos_ + 1;
        if (pos_ >= src_.size()) return {Tok::End, p, {}, {}};
        char c = src_[pos_];

        if (std::isdigit(static_cast<unsigned char>(c)) ||
            (c == '.' && pos_ + 1 < src_.size() &&
             std::isdigit(static_cast<unsigned char>(src_[pos_ + 1])))) {
            size_t start = pos_;
            while (pos_ < src_.size() &&
                   (std::isdigit(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '.'))
                ++pos_;
            auto text = src_.substr(start, pos_ - start);
            auto f = Fixed::parse(text);
            if (!f)
                throw DslParseError("invalid number literal '" + std::string(text) + "'", start + 1);
            return {Tok::Number, p, *f, std::string(text)};
        }

        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            size_t start = pos_;
            while (pos_ < src_.size() &&
                   (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_'))
                ++pos_;
            std::string word(src_.substr(start, pos_ - start));
            if (word == "true") return {Tok::True, p, {}, word};
            if (word == "false") return {Tok::False, p, {}, word};
            if (word == "and") return {Tok::And, p, {}, word};
            if (word == "or") return {Tok::Or, p, {}, word};
            if (word == "not") return {Tok::Not, p, {}, word};
            return {Tok::Ident, p, {}, word};
        }

        auto two = [&](char a, char b) {
            return c == a && pos_ + 1 < src_.size() && src_[pos_ + 1] == b;
        };
        if (two('&', '&')) { pos_ += 2; return Token{Tok::And, p, {}, "&&"}; }
        if (two('|', '|')) { pos_ += 2; return Token{Tok::Or, p, {}, "||"}; }
        if (two('=', '=')) { pos_ += 2; return Token{Tok::Eq, p, {}, "=="}; }
        if (two('!', '=')) { pos_ += 2; return Token{Tok::Ne, p, {}, "!="}; }
        if (two('<', '=')) { pos_ += 2; return Token{Tok::Le, p, {}, "<="}; }
        if (two('>', '=')) { pos_ += 2; return Token{Tok::Ge, p, {}, ">="}; }
        if (two('+', '=')) { pos_ += 2; return Token{Tok::PlusAssign, p, {}, "+="}; }
        if (two('-', '=')) { pos_ += 2; return Token{Tok::MinusAssign, p, {}, "-="}; }
        if (two('*', '=')) { pos_ += 2; return Token{Tok::StarAssign, p, {}, "*="}; }
        if (two('/', '=')) { pos_ += 2; return Token{Tok::SlashAssign, p, {}, "/="}; }

        ++pos_;
        switch (c) {
            case '+': return {Tok::Plus, p, {}, "+"};
            case '-': return {Tok::Minus, p, {}, "-"};
            case '*': return {Tok::Star, p, {}, "*"};
            case '/': return {Tok::Slash, p, {}, "/"};
            case '<': return {Tok::Lt, p, {}, "<"};
            case '>': return {Tok::Gt, p, {}, ">"};
            case '(': return {Tok::LParen, p, {}, "("};
            case ')': return {Tok::RParen, p, {}, ")"};
            case '!': return {Tok::Not, p, {}, "!"};
            case '=': return {Tok::Assign, p, {}, "="};
        }
        throw DslParseError(std::string("unexpected character '") + c + "'", p);
    }

private:
    void skip_ws() {
        while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    }
    std::string_view src_;
    size_t pos_ = 0;
};

// ---------------------------------------------------------------------------
// Parser. Precedence, low to high:
//   or  ->  and  ->  not  ->  comparison  ->  add/sub  ->  mul/div  ->  unary -

class Parser {
public:
    Parser(std::string_view src, const VariableTable& vars) : lex_(src), vars_(vars) {
        advance();
    }

    ExprPtr parse_expression() { return parse_or(); }

    // recursion bound; evaluation and printing inherit it via the AST shape.
    // Each parenthesis level costs a few ticks, so this allows ~300 levels.
    static constexpr int kMaxDepth = 1024;

    void expect_end() const {
        if (cur_.kind != Tok::End)
            throw DslParseError("unexpected trailing input '" + cur_.text + "'", cur_.pos);
    }

    Token current() const { return cur_; }
    void advance() { cur_ = lex_.next(); }

    int resolve(const std::string& name) const {
        auto slot = vars_.lookup(name);
        if (!slot) throw ResolveError("unknown identifier '" + name + "'", name);
        return *slot;
    }

private:
    struct DepthGuard {
        explicit DepthGuard(Parser& p) : parser(p) {
            if (++parser.depth_ > kMaxDepth)
                throw DslParseError("expression nests too deeply", parser.cur_.pos);
        }
        ~DepthGuard() { --parser.depth_; }
        Parser& parser;
    };

    ExprPtr parse_or() {
        DepthGuard guard(*this);
        auto e = parse_and();
        while (cur_.kind == Tok::Or) {
            advance();
            e = make_bin(BinOp::Or, std::move(e), parse_and());
        }
        return e;
    }

    ExprPtr parse_and() {
        auto e = parse_not();
        while (cur_.kind == Tok::And) {
            advance();
            e = make_bin(BinOp::And, std::move(e), parse_not());
        }
        return e;
    }

    ExprPtr parse_not() {
        DepthGuard guard(*this);
        if (cur_.kind == Tok::Not) {
            advance();
            auto e = std::make_unique<Expr>();
            e->kind = Expr::Kind::Unary;
            e->un = UnOp::Not;
            e->lhs = parse_not();
            return e;
        }
        return parse_comparison();
    }

    ExprPtr parse_comparison() {
        auto e = parse_additive();
        for (;;) {
            BinOp op;
            switch (cur_.kind) {
                case Tok::Eq: op = BinOp::Eq; break;
                case Tok::Ne: op = BinOp::Ne; break;
                case Tok::Lt: op = BinOp::Lt; break;
                case Tok::Le: op = BinOp::Le; break;
                case Tok::Gt: op = BinOp::Gt; break;
                case Tok::Ge: op = BinOp::Ge; break;
                default: return e;
            }
            advance();
            e = make_bin(op, std::move(e), parse_additive());
        }
    }

    ExprPtr parse_additive() {
        auto e = parse_multiplicative();
        for (;;) {
            if (cur_.kind == Tok::Plus) {
                advance();
                e = make_bin(BinOp::Add, std::move(e), parse_multiplicative());
            } else if (cur_.kind == Tok::Minus) {
                advance();
                e = make_bin(BinOp::Sub, std::move(e), parse_multiplicative());
            } else {
                return e;
            }
        }
    }

    ExprPtr parse_multiplicative() {
        auto e = parse_unary();
        for (;;) {
            if (cur_.kind == Tok::Star) {
                advance();
                e = make_bin(BinOp::Mul, std::move(e), parse_unary());
            } else if (cur_.kind == Tok::Slash) {
                advance();
                e = make_bin(BinOp::Div, std::move(e), parse_unary());
            } else {
                return e;
            }
        }
    }

    ExprPtr parse_unary() {
        DepthGuard guard(*this);
        if (cur_.kind == Tok::Minus) {
            advance();
            auto e = std::make_unique<Expr>();
            e->kind = Expr::Kind::Unary;
            e->un = UnOp::Neg;
            e->lhs = parse_unary();
            return e;
        }
        return parse_primary();
    }

    ExprPtr parse_primary() {
        auto e = std::make_unique<Expr>();
        switch (cur_.kind) {
            case Tok::Number:
                e->kind = Expr::Kind::Number;
                e->number = cur_.number;
                advance();
                return e;
            case Tok::True:
            case Tok::False:
                e->kind = Expr::Kind::Boolean;
                e->boolean = cur_.kind == Tok::True;
                advance();
                return e;
            case Tok::Ident: {
                e->kind = Expr::Kind::Var;
                e->var_name = cur_.text;
                e->slot = resolve(cur_.text);
                advance();
                return e;
            }
            case Tok::LParen: {
                advance();
                auto inner = parse_or();
                if (cur_.kind != Tok::RParen)
                    throw DslParseError("expected ')'", cur_.pos);
                advance();
                return inner;
            }
            default:
                throw DslParseError("expected a value", cur_.pos);
        }
    }

    static ExprPtr make_bin(BinOp op, ExprPtr l, ExprPtr r) {
        auto e = std::make_unique<Expr>();
        e->kind = Expr::Kind::Binary;
        e->bin = op;
        e->lhs = std::move(l);
        e->rhs = std::move(r);
        return e;
    }

    Lexer lex_;
    Token cur_{Tok::End, 0, {}, {}};
    const VariableTable& vars_;
    int depth_ = 0;
};

}  // namespace

ExprAst parse_condition(std::string_view text, const VariableTable& vars) {
    Parser p(text, vars);
    auto root = p.parse_expression();
    p.expect_end();
    return ExprAst(std::move(root), std::string(text));
}

EffectStmt parse_effect(std::string_view text, const VariableTable& vars) {
    Parser p(text, vars);
    auto tok = p.current();
    if (tok.kind != Tok::Ident)
        throw DslParseError("effect must start with a variable name", tok.pos);
    std::string target = tok.text;
    int slot = p.resolve(target);
    p.advance();

    AssignOp op;
    switch (p.current().kind) {
        case Tok::Assign: op = AssignOp::Assign; break;
        case Tok::PlusAssign: op = AssignOp::AddAssign; break;
        case Tok::MinusAssign: op = AssignOp::SubAssign; break;
        case Tok::StarAssign: op = AssignOp::MulAssign; break;
        case Tok::SlashAssign: op = AssignOp::DivAssign; break;
        default:
            throw DslParseError("expected assignment operator after '" + target + "'",
                                p.current().pos);
    }
    p.advance();
    auto rhs = p.parse_expression();
    p.expect_end();

    EffectStmt stmt;
    stmt.target_slot = slot;
    stmt.target_name = target;
    stmt.op = op;
    stmt.rhs = ExprAst(std::move(rhs), "");
    stmt.source = std::string(text);
    return stmt;
}

// ---------------------------------------------------------------------------
// Printing

namespace {

int precedence(const Expr& e) {
    if (e.kind == Expr::Kind::Unary) return e.un == UnOp::Not ? 3 : 7;
    if (e.kind != Expr::Kind::Binary) return 8;
    switch (e.bin) {
        case BinOp::Or: return 1;
        case BinOp::And: return 2;
        case BinOp::Eq: case BinOp::Ne:
        case BinOp::Lt: case BinOp::Le:
        case BinOp::Gt: case BinOp::Ge: return 4;
        case BinOp::Add: case BinOp::Sub: return 5;
        case BinOp::Mul: case BinOp::Div: return 6;
    }
    return 8;
}

const char* bin_symbol(BinOp op) {
    switch (op) {
        case BinOp::Add: return "+";
        case BinOp::Sub: return "-";
        case BinOp::Mul: return "*";
        case BinOp::Div: return "/";
        case BinOp::Eq: return "==";
        case BinOp::Ne: return "!=";
        case BinOp::Lt: return "<";
        case BinOp::Le: return "<=";
        case BinOp::Gt: return ">";
        case BinOp::Ge: return ">=";
        case BinOp::And: return "&&";
        case BinOp::Or: return "||";
    }
    return "?";
}

void print_rec(const Expr& e, int parent_prec, bool right_side, std::string& out) {
    int prec = precedence(e);
    // All binary operators here are left-associative, so the right operand
    // needs parens at equal precedence.
    bool parens = prec < parent_prec || (prec == parent_prec && right_side);
    if (parens) out.push_back('(');
    switch (e.kind) {
        case Expr::Kind::Number:
            out += e.number.to_string();
            break;
        case Expr::Kind::Boolean:
            out += e.boolean ? "true" : "false";
            break;
        case Expr::Kind::Var:
            out += e.var_name;
            break;
        case Expr::Kind::Unary:
            out += e.un == UnOp::Not ? "!" : "-";
            print_rec(*e.lhs, prec + 1, false, out);
            break;
        case Expr::Kind::Binary:
            print_rec(*e.lhs, prec, false, out);
            out.push_back(' ');
            out += bin_symbol(e.bin);
            out.push_back(' ');
            print_rec(*e.rhs, prec, true, out);
            break;
    }
    if (parens) out.push_back(')');
}

}  // namespace

std::string pretty_print(const Expr& e) {
    std::string out;
    print_rec(e, 0, false, out);
    return out;
}

bool expr_equal(const Expr& a, const Expr& b) {
    if (a.kind != b.kind) return false;
    switch (a.kind) {
        case Expr::Kind::Number: return a.number == b.number;
        case Expr::Kind::Boolean: return a.boolean == b.boolean;
        case Expr::Kind::Var: return a.slot == b.slot && a.var_name == b.var_name;
        case Expr::Kind::Unary: return a.un == b.un && expr_equal(*a.lhs, *b.lhs);
        case Expr::Kind::Binary:
            return a.bin == b.bin && expr_equal(*a.lhs, *b.lhs) && expr_equal(*a.rhs, *b.rhs);
    }
    return false;
}

// ---------------------------------------------------------------------------
// Evaluation

namespace {

Fixed eval_raw(const Expr& e, const std::vector<int64_t>& raw) {
    switch (e.kind) {
        case Expr::Kind::Number:
            return e.number;
        case Expr::Kind::Boolean:
            return Fixed::from_int(e.boolean ? 1 : 0);
        case Expr::Kind::Var:
            return Fixed::from_raw(raw[size_t(e.slot)]);
        case Expr::Kind::Unary: {
            Fixed v = eval_raw(*e.lhs, raw);
            return e.un == UnOp::Neg ? -v : Fixed::from_int(v.truthy() ? 0 : 1);
        }
        case Expr::Kind::Binary:
            break;
    }
    // short-circuit logical operators
    if (e.bin == BinOp::And) {
        if (!eval_raw(*e.lhs, raw).truthy()) return Fixed::from_int(0);
        return Fixed::from_int(eval_raw(*e.rhs, raw).truthy() ? 1 : 0);
    }
    if (e.bin == BinOp::Or) {
        if (eval_raw(*e.lhs, raw).truthy()) return Fixed::from_int(1);
        return Fixed::from_int(eval_raw(*e.rhs, raw).truthy() ? 1 : 0);
    }
    Fixed l = eval_raw(*e.lhs, raw);
    Fixed r = eval_raw(*e.rhs, raw);
    switch (e.bin) {
        case BinOp::Add: return l + r;
        case BinOp::Sub: return l - r;
        case BinOp::Mul: return l * r;
        case BinOp::Div: return l / r;
        case BinOp::Eq: return Fixed::from_int(l == r ? 1 : 0);
        case BinOp::Ne: return Fixed::from_int(l != r ? 1 : 0);
        case BinOp::Lt: return Fixed::from_int(l < r ? 1 : 0);
        case BinOp::Le: return Fixed::from_int(l <= r ? 1 : 0);
        case BinOp::Gt: return Fixed::from_int(l > r ? 1 : 0);
        case BinOp::Ge: return Fixed::from_int(l >= r ? 1 : 0);
        default: break;
    }
    return Fixed::from_int(0);  // unreachable
}

}  // namespace

Fixed eval_expr(const Expr& e, const GameState& state) {
    return eval_raw(e, state.raw());
}

bool eval_condition(std::span<const ExprAst> conds, const GameState& state) {
    for (const auto& c : conds)
        if (!eval_expr(*c.root, state).truthy()) return false;
    return true;
}

GameState apply_effects(std::span<const EffectStmt> effects, const GameState& state,
                        const VariableTable& vars) {
    if (effects.empty()) return state;
    std::vector<int64_t> raw = state.raw();
    for (const auto& stmt : effects) {
        Fixed rhs = eval_raw(*stmt.rhs.root, raw);
        Fixed cur = Fixed::from_raw(raw[size_t(stmt.target_slot)]);
        Fixed next;
        switch (stmt.op) {
            case AssignOp::Assign: next = rhs; break;
            case AssignOp::AddAssign: next = cur + rhs; break;
            case AssignOp::SubAssign: next = cur - rhs; break;
            case AssignOp::MulAssign: next = cur * rhs; break;
            case AssignOp::DivAssign: next = cur / rhs; break;
        }
        const auto& sl = vars.slot(stmt.target_slot);
        next = next.clamped(sl.min_value, sl.max_value);
        raw[size_t(stmt.target_slot)] = next.raw();
    }
    return GameState(std::move(raw));
}

}  // namespace rpgkit
