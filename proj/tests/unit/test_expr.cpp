#include "doctest.h"
#include "rpgkit/expr.hpp"

#include <random>

using namespace rpgkit;

namespace {

struct Env {
    VariableTable vars;
    std::vector<int64_t> raw;

    void add(const std::string& name, int64_t value, int64_t lo = -1000, int64_t hi = 1000) {
        VariableTable::Slot s;
        s.value_name = name;
        s.unique_id = name;
        s.min_value = Fixed::from_int(lo);
        s.max_value = Fixed::from_int(hi);
        s.initial_value = Fixed::from_int(value);
        int idx = vars.add(std::move(s));
        vars.alias(name, idx);
        raw.push_back(Fixed::from_int(value).raw());
    }

    GameState state() const { return GameState(raw); }

    Fixed eval(const std::string& text) const {
        auto ast = parse_condition(text, vars);
        return eval_expr(*ast.root, state());
    }
};

}  // namespace

TEST_CASE("conditions parse to the expected shapes") {
    Env env;
    env.add("progress", 0);
    env.add("has_key", 0);

    auto ast = parse_condition("progress >= 1 && has_key == 1", env.vars);
    REQUIRE(ast.root->kind == Expr::Kind::Binary);
    CHECK(ast.root->bin == BinOp::And);
    CHECK(ast.root->lhs->bin == BinOp::Ge);
    CHECK(ast.root->lhs->lhs->kind == Expr::Kind::Var);
    CHECK(ast.root->rhs->bin == BinOp::Eq);

    auto lit = parse_condition("true", env.vars);
    CHECK(lit.root->kind == Expr::Kind::Boolean);
    CHECK(lit.root->boolean);
}

TEST_CASE("truncated input reports a 1-based position") {
    Env env;
    env.add("progress", 0);
    try {
        parse_condition("progress >", env.vars);
        FAIL("expected DslParseError");
    } catch (const DslParseError& e) {
        CHECK(e.position == 11);
    }
}

TEST_CASE("unknown identifiers resolve to errors") {
    Env env;
    env.add("progress", 0);
    CHECK_THROWS_AS(parse_condition("mystery == 1", env.vars), ResolveError);
    CHECK_THROWS_AS(parse_effect("unknown_var = 1", env.vars), ResolveError);
}

TEST_CASE("effects parse") {
    Env env;
    env.add("trust", 0);
    env.add("has_succeeded", 0);

    auto e1 = parse_effect("has_succeeded = 1", env.vars);
    CHECK(e1.op == AssignOp::Assign);
    CHECK(e1.target_name == "has_succeeded");

    auto e2 = parse_effect("trust += 10", env.vars);
    CHECK(e2.op == AssignOp::AddAssign);

    CHECK_THROWS_AS(parse_effect("trust * 2", env.vars), DslParseError);
    CHECK_THROWS_AS(parse_effect("1 = trust", env.vars), DslParseError);
    // a single '=' is assignment, never comparison
    CHECK_THROWS_AS(parse_condition("trust = 1", env.vars), DslParseError);
}

TEST_CASE("precedence and associativity") {
    Env env;
    env.add("x", 2);
    CHECK(env.eval("1 + 2 * 3") == Fixed::from_int(7));
    CHECK(env.eval("(1 + 2) * 3") == Fixed::from_int(9));
    CHECK(env.eval("10 - 4 - 3") == Fixed::from_int(3));
    CHECK(env.eval("2 * x >= 4").truthy());
    CHECK(env.eval("not x == 3").truthy());       // not binds looser than ==
    CHECK(env.eval("-x * 3") == Fixed::from_int(-6));
    CHECK(env.eval("1 + 1 == 2 && 2 + 2 == 4").truthy());
    CHECK(env.eval("x == 1 or x == 2").truthy()); // keyword operators
    CHECK(env.eval("x == 1 and x == 2").truthy() == false);
}

TEST_CASE("condition lists are conjunctions, empty list is true") {
    Env env;
    env.add("progress", 0);
    env.add("has_key", 0);

    std::vector<ExprAst> one;
    one.push_back(parse_condition("progress == 0", env.vars));
    CHECK(eval_condition(one, env.state()));

    CHECK(eval_condition({}, env.state()));

    Env env2;
    env2.add("progress", 2);
    env2.add("has_key", 0);
    std::vector<ExprAst> two;
    two.push_back(parse_condition("progress >= 1", env2.vars));
    two.push_back(parse_condition("has_key == 1", env2.vars));
    CHECK(!eval_condition(two, env2.state()));
}

TEST_CASE("truthiness: any nonzero value") {
    Env env;
    env.add("x", 0);
    CHECK(env.eval("0.0001").truthy());
    CHECK(!env.eval("0").truthy());
    CHECK(env.eval("-3").truthy());
    CHECK(env.eval("!0").truthy());
    CHECK(!env.eval("!5").truthy());
}

TEST_CASE("logical operators short-circuit") {
    Env env;
    env.add("x", 0);
    CHECK(env.eval("true || 1 / x > 0").truthy());
    CHECK(!env.eval("false && 1 / x > 0").truthy());
    CHECK_THROWS_AS(env.eval("1 / x > 0"), EvalError);
}

TEST_CASE("apply_effects clamps at bounds after every statement") {
    Env env;
    env.add("trust", 95, 0, 100);
    std::vector<EffectStmt> fx;
    fx.push_back(parse_effect("trust += 10", env.vars));
    GameState out = apply_effects(fx, env.state(), env.vars);
    CHECK(out.value(0) == Fixed::from_int(100));

    // clamped intermediate value feeds the next statement
    Env env2;
    env2.add("a", 0, 0, 5);
    env2.add("b", 0, 0, 100);
    std::vector<EffectStmt> fx2;
    fx2.push_back(parse_effect("a = 50", env2.vars));
    fx2.push_back(parse_effect("b = a * 2", env2.vars));
    GameState out2 = apply_effects(fx2, env2.state(), env2.vars);
    CHECK(out2.value(0) == Fixed::from_int(5));
    CHECK(out2.value(1) == Fixed::from_int(10));
}

TEST_CASE("apply_effects is sequential and pure") {
    Env env;
    env.add("a", 0);
    env.add("b", 2);
    std::vector<EffectStmt> fx;
    fx.push_back(parse_effect("a = b + 1", env.vars));
    fx.push_back(parse_effect("b = a", env.vars));
    GameState in = env.state();
    uint64_t in_hash = in.hash();
    GameState out = apply_effects(fx, in, env.vars);
    CHECK(out.value(0) == Fixed::from_int(3));
    CHECK(out.value(1) == Fixed::from_int(3));
    CHECK(in.hash() == in_hash);
    CHECK(in.value(0) == Fixed::from_int(0));

    GameState same = apply_effects({}, in, env.vars);
    CHECK(same == in);
    CHECK(same.hash() == in.hash());
}

TEST_CASE("identical inputs give identical outputs and hashes") {
    Env env;
    env.add("x", 3);
    auto a = apply_effects(std::vector<EffectStmt>{parse_effect("x += 2", env.vars)}, env.state(),
                           env.vars);
    auto b = apply_effects(std::vector<EffectStmt>{parse_effect("x += 2", env.vars)}, env.state(),
                           env.vars);
    CHECK(a == b);
    CHECK(a.hash() == b.hash());
}

namespace {

// random AST for the print/parse round-trip property
ExprPtr random_expr(std::mt19937_64& rng, const VariableTable& vars, int depth) {
    auto node = std::make_unique<Expr>();
    int pick = int(rng() % (depth <= 0 ? 3 : 6));
    switch (pick) {
        case 0:
            node->kind = Expr::Kind::Number;
            node->number = Fixed::from_raw(int64_t(rng() % 200000));
            break;
        case 1:
            node->kind = Expr::Kind::Boolean;
            node->boolean = rng() & 1;
            break;
        case 2: {
            node->kind = Expr::Kind::Var;
            node->slot = int(rng() % vars.size());
            node->var_name = vars.slot(node->slot).value_name;
            break;
        }
        case 3: {
            node->kind = Expr::Kind::Unary;
            node->un = (rng() & 1) ? UnOp::Neg : UnOp::Not;
            node->lhs = random_expr(rng, vars, depth - 1);
            break;
        }
        default: {
            node->kind = Expr::Kind::Binary;
            static const BinOp ops[] = {BinOp::Add, BinOp::Sub, BinOp::Mul, BinOp::Div,
                                        BinOp::Eq,  BinOp::Ne,  BinOp::Lt,  BinOp::Le,
                                        BinOp::Gt,  BinOp::Ge,  BinOp::And, BinOp::Or};
            node->bin = ops[rng() % 12];
            node->lhs = random_expr(rng, vars, depth - 1);
            node->rhs = random_expr(rng, vars, depth - 1);
            break;
        }
    }
    return node;
}

}  // namespace

TEST_CASE("pretty-print / parse round trip on random ASTs") {
    Env env;
    env.add("alpha", 1);
    env.add("beta", 2);
    std::mt19937_64 rng(42);
    for (int i = 0; i < 500; ++i) {
        auto ast = random_expr(rng, env.vars, 4);
        std::string printed = pretty_print(*ast);
        ExprAst reparsed = parse_condition(printed, env.vars);
        CHECK_MESSAGE(expr_equal(*ast, *reparsed.root), "printed form: ", printed);
    }
}

TEST_CASE("random in-bounds effects keep every value in bounds") {
    std::mt19937_64 rng(99);
    for (int iter = 0; iter < 200; ++iter) {
        Env env;
        env.add("p", int64_t(rng() % 10), 0, 9);
        env.add("q", int64_t(rng() % 5), 0, 4);
        static const char* stmts[] = {"p += 3", "p -= 1", "q = p + 2", "p = q * 3", "q -= 2"};
        std::vector<EffectStmt> fx;
        for (int k = 0, n = int(rng() % 4) + 1; k < n; ++k)
            fx.push_back(parse_effect(stmts[rng() % 5], env.vars));
        GameState out = apply_effects(fx, env.state(), env.vars);
        CHECK(out.value(0) >= Fixed::from_int(0));
        CHECK(out.value(0) <= Fixed::from_int(9));
        CHECK(out.value(1) >= Fixed::from_int(0));
        CHECK(out.value(1) <= Fixed::from_int(4));
    }
}

TEST_CASE("pathologically nested input fails cleanly instead of overflowing") {
    Env env;
    env.add("x", 1);
    std::string deep(20000, '(');
    deep += "x";
    deep += std::string(20000, ')');
    CHECK_THROWS_AS(parse_condition(deep, env.vars), DslParseError);

    std::string nots;
    for (int i = 0; i < 20000; ++i) nots += "not ";
    nots += "x";
    CHECK_THROWS_AS(parse_condition(nots, env.vars), DslParseError);

    std::string minus(20000, '-');
    minus += "x";
    CHECK_THROWS_AS(parse_condition(minus, env.vars), DslParseError);

    // a reasonable nesting depth still parses
    std::string shallow(100, '(');
    shallow += "x";
    shallow += std::string(100, ')');
    CHECK_NOTHROW(parse_condition(shallow, env.vars));
}
