#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "rpgkit/fixed.hpp"

namespace rpgkit {

struct DslParseError : std::runtime_error {
    DslParseError(const std::string& what, size_t pos)
        : std::runtime_error(what), position(pos) {}
    size_t position;
};

struct ResolveError : std::runtime_error {
    ResolveError(const std::string& what, std::string ident)
        : std::runtime_error(what), identifier(std::move(ident)) {}
    std::string identifier;
};

// Symbol table for the expression language: one slot per game variable
// (visible first, then hidden, declaration order). A slot is reachable by
// value_name or unique_id.
class VariableTable {
public:
    struct Slot {
        std::string value_name;
        std::string unique_id;
        Fixed min_value;
        Fixed max_value;
        Fixed initial_value;
        bool hidden = false;
    };

    int add(Slot slot);  // returns slot index; caller handles name aliases
    void alias(const std::string& name, int slot);

    std::optional<int> lookup(std::string_view name) const;
    const Slot& slot(int i) const { return slots_[size_t(i)]; }
    size_t size() const { return slots_.size(); }

    int succeeded_slot = -1;
    int failed_slot = -1;

private:
    std::vector<Slot> slots_;
    std::unordered_map<std::string, int> by_name_;
};

enum class UnOp { Neg, Not };
enum class BinOp { Add, Sub, Mul, Div, Eq, Ne, Lt, Le, Gt, Ge, And, Or };

struct Expr;
using ExprPtr = std::unique_ptr<Expr>;

struct Expr {
    enum class Kind { Number, Boolean, Var, Unary, Binary };
    Kind kind = Kind::Number;

    Fixed number;            // Kind::Number
    bool boolean = false;    // Kind::Boolean
    int slot = -1;           // Kind::Var
    std::string var_name;    // Kind::Var, as written in the source
    UnOp un = UnOp::Neg;     // Kind::Unary
    BinOp bin = BinOp::Add;  // Kind::Binary
    ExprPtr lhs, rhs;        // Unary uses lhs only

    ExprPtr clone() const;
};

// A parsed condition expression; keeps the source text for serialization.
struct ExprAst {
    ExprPtr root;
    std::string source;

    ExprAst() = default;
    ExprAst(ExprPtr r, std::string s) : root(std::move(r)), source(std::move(s)) {}
    ExprAst(ExprAst&&) = default;
    ExprAst& operator=(ExprAst&&) = default;
    ExprAst(const ExprAst& o) : root(o.root ? o.root->clone() : nullptr), source(o.source) {}
    ExprAst& operator=(const ExprAst& o) {
        root = o.root ? o.root->clone() : nullptr;
        source = o.source;
        return *this;
    }
};

enum class AssignOp { Assign, AddAssign, SubAssign, MulAssign, DivAssign };

struct EffectStmt {
    int target_slot = -1;
    std::string target_name;
    AssignOp op = AssignOp::Assign;
    ExprAst rhs;
    std::string source;
};

// Total assignment of exact values to all variables, with a content hash.
// Immutable after construction.
class GameState {
public:
    GameState() = default;
    explicit GameState(std::vector<int64_t> raw) : raw_(std::move(raw)) { rehash(); }

    const std::vector<int64_t>& raw() const { return raw_; }
    uint64_t hash() const { return hash_; }
    Fixed value(int slot) const { return Fixed::from_raw(raw_[size_t(slot)]); }
    size_t size() const { return raw_.size(); }

    friend bool operator==(const GameState& a, const GameState& b) {
        return a.hash_ == b.hash_ && a.raw_ == b.raw_;
    }

    static uint64_t hash_raw(const std::vector<int64_t>& raw);

private:
    void rehash() { hash_ = hash_raw(raw_); }
    std::vector<int64_t> raw_;
    uint64_t hash_ = 0;
};

// Parsing. Throws DslParseError (with position) or ResolveError.
ExprAst parse_condition(std::string_view text, const VariableTable& vars);
EffectStmt parse_effect(std::string_view text, const VariableTable& vars);

// Canonical printing with minimal parentheses; parse(print(ast)) == ast.
std::string pretty_print(const Expr& e);
bool expr_equal(const Expr& a, const Expr& b);

// Evaluation. Booleans coerce to 1/0; any nonzero value is truthy.
// Throws EvalError on division by zero.
Fixed eval_expr(const Expr& e, const GameState& state);

// Conjunction over the list; the empty list is true.
bool eval_condition(std::span<const ExprAst> conds, const GameState& state);

// Applies statements in order; the target is clamped into its declared
// bounds after every statement. The input state is not modified.
GameState apply_effects(std::span<const EffectStmt> effects, const GameState& state,
                        const VariableTable& vars);

}  // namespace rpgkit
