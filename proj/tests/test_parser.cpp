#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "random_ast.hpp"
#include "support.hpp"

using namespace patmine;

namespace
{

std::string error_of(const std::string& text)
{
    try
    {
        parse_statement(text);
    }
    catch (const ParseError& e)
    {
        return e.what();
    }
    catch (const AstError& e)
    {
        return e.what();
    }
    return "";
}

bool round_trips(const Statement& s)
{
    const auto text = print_canonical(s);
    const auto back = parse_statement(text);
    return equal(s, back) && print_canonical(back) == text;
}

TermPtr term(const std::string& text)
{
    return std::get<stmt::Eval>(parse_statement("eval " + text + ";").node).term;
}

} // namespace

TEST_CASE("Q0 parses to the expected shape")
{
    const auto q = support::query_from_text(
        "query Q0(k=3) := forall i in 1..k: closed(X[i]) and coverTransactions([X[1..k]]) and forall i < j: "
        "overlapTransactions(X[i],X[j]) = 0;");
    CHECK(q.name == "Q0");
    CHECK(q.k == 3);
    const auto* conj = std::get_if<And>(&q.formula->node);
    REQUIRE(conj);
    REQUIRE(conj->parts.size() == 3);

    const auto* fa = std::get_if<ForAll>(&conj->parts[0]->node);
    REQUIRE(fa);
    CHECK(fa->var == "i");
    CHECK(fa->lo == Index::literal(1));
    CHECK(fa->hi == Index::named("k"));
    CHECK(std::holds_alternative<Closed>(fa->body->node));

    const auto* cov = std::get_if<Global>(&conj->parts[1]->node);
    REQUIRE(cov);
    CHECK(cov->kind == GlobalKind::CoverTransactions);
    REQUIRE(cov->vars.size() == 1);
    CHECK(cov->vars[0].last == Index::named("k"));

    const auto* pairs = std::get_if<ForAllPairs>(&conj->parts[2]->node);
    REQUIRE(pairs);
    const auto* rel = std::get_if<Relation>(&pairs->body->node);
    REQUIRE(rel);
    CHECK(rel->rel == Rel::Eq);
    const auto* call = std::get_if<Call>(&rel->left->node);
    REQUIRE(call);
    CHECK(call->name == "overlapTransactions");
}

TEST_CASE("define area")
{
    const auto s = parse_statement("define area(X) := freq(X) * size(X);");
    const auto& def = std::get<stmt::Define>(s.node).def;
    CHECK(def.name == "area");
    CHECK(def.arity() == 1);
    CHECK(print_canonical(s) == "define area(X) := freq(X) * size(X);");
}

TEST_CASE("variable bound check")
{
    CHECK(error_of("query bad(k=2) := closed(X[3]);").find("variable index 3 exceeds k=2") != std::string::npos);
    CHECK(error_of("query bad(k=2) := closed(X[j]);").find("j") != std::string::npos);
}

TEST_CASE("syntax errors carry a location inside the buffer")
{
    const std::vector<std::string> bad = {
        "query Q(k=3) := closed(X[1]) and;",
        "solve;",
        "query Q(k=) := true;",
        "define f() := 1;",
        "load data.dat;",
        "eval {};",
        "query Q(k=1) := freq(X[1]) >= 'unterminated;",
        "param x = ;",
        "export Q to \"f\" as xml;",
        "query Q(k=1) := true",
        "query Q(k=1) := ((true);",
    };
    for (const auto& text : bad)
    {
        CAPTURE(text);
        try
        {
            parse_statement(text);
            FAIL("accepted");
        }
        catch (const ParseError& e)
        {
            CHECK(e.span().line == 1);
            CHECK(e.span().offset <= text.size());
        }
    }
}

TEST_CASE("errors on later lines report that line")
{
    const std::string script = "load \"a.dat\";\nparam x = 1;\nsolve Q limit;\n";
    try
    {
        parse_script(script);
        FAIL("accepted");
    }
    catch (const ParseError& e)
    {
        CHECK(e.span().line == 3);
    }
}

TEST_CASE("numeric literals and precedence")
{
    CHECK(equal(term("1/2"), make_term(NumConst{Rational(1, 2)})));
    CHECK(equal(term("0.25"), make_term(NumConst{Rational(1, 4)})));
    CHECK(equal(term("-3"), make_term(NumConst{Rational(-3)})));
    CHECK(print_term(*term("1 + 2 * 3")) == "1 + 2 * 3");
    CHECK(print_term(*term("(1 + 2) * 3")) == "(1 + 2) * 3");
    CHECK(print_term(*term("1 - (2 - 3)")) == "1 - (2 - 3)");
    CHECK(print_term(*term("(1 - 2) - 3")) == "1 - 2 - 3");
    CHECK(print_term(*term("X[1] union X[2] inter X[3]")) == "X[1] union X[2] inter X[3]");
    CHECK(print_term(*term("{A, 'a b'}")) == "{A, 'a b'}");
}

TEST_CASE("statement_complete ignores semicolons in strings and comments")
{
    CHECK_FALSE(statement_complete("solve Q0"));
    CHECK(statement_complete("solve Q0;"));
    CHECK_FALSE(statement_complete("load \"a;b\""));
    CHECK_FALSE(statement_complete("# comment ;\nsolve Q0"));
    CHECK(statement_complete("load \"a;b\";"));
}

TEST_CASE("scripts hold several statements")
{
    const auto stmts = parse_script("# header\nload \"x.dat\" class label;\nparam deltaT = 1;\n\nsolve Q4 limit 5;\n");
    REQUIRE(stmts.size() == 3);
    CHECK(std::get<stmt::Load>(stmts[0].node).class_column == "label");
    CHECK(stmts[1].span.line == 3);
    CHECK(std::get<stmt::Solve>(stmts[2].node).limit == 5);
    CHECK(parse_script("").empty());
    CHECK(parse_script("  # nothing\n").empty());
}

TEST_CASE("fixture queries round-trip")
{
    for (int i = 0; i <= 6; ++i)
    {
        CAPTURE(i);
        const auto q = support::fixture_query(i);
        CHECK(round_trips(Statement{stmt::QueryDecl{q}, {}}));
    }
}

TEST_CASE("interactive commands round-trip")
{
    for (const char* text : {"show queries;", "show solutions Q3 limit 2;", "export Q4 to \"q4.json\" as json;",
                             "stats Q1;", "quit;", "eval area(X[1]) with X[1] = {E, G};",
                             "check canonical([X[1..2]]) with X[1] = {A}, X[2] = {B};",
                             "refine Q1 from Q0 := canonical([X[1..k]]);", "param deltaT = -1/2;"})
    {
        CAPTURE(text);
        CHECK(print_canonical(parse_statement(text)) == text);
    }
}

TEST_CASE("random statements round-trip")
{
    random_ast::Generator gen(20240611);
    int failures = 0;
    for (int i = 0; i < 1000; ++i)
    {
        const auto s = gen.statement();
        const auto text = print_canonical(s);
        CAPTURE(text);
        bool ok = false;
        try
        {
            ok = round_trips(s);
        }
        catch (const std::exception& e)
        {
            MESSAGE(e.what());
        }
        if (!ok)
            ++failures;
        CHECK(ok);
    }
    CHECK(failures == 0);
}

TEST_CASE("labels that shadow define parameters stay quoted")
{
    FunctionDef def{"f", {"X"}, make_term(SetOp{SetOpKind::Union, make_term(ArgRef{"X"}), make_term(ItemConst{"X"})}), {}};
    const Statement s{stmt::Define{def}, {}};
    CHECK(print_canonical(s) == "define f(X) := X union 'X';");
    CHECK(round_trips(s));
}
