#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "support.hpp"

using namespace patmine;

namespace
{

TermPtr term(const std::string& text)
{
    return std::get<stmt::Eval>(parse_statement("eval " + text + ";").node).term;
}

FormulaPtr formula(const std::string& text)
{
    return std::get<stmt::Check>(parse_statement("check " + text + ";").node).formula;
}

void define(Definitions& defs, const std::string& text)
{
    defs.define(std::get<stmt::Define>(parse_statement(text).node).def);
}

Definitions standard_defs()
{
    Definitions defs;
    define(defs, "define area(X) := freq(X) * size(X);");
    define(defs, "define coverage(X, Y) := freq(X union Y) * size(X inter Y);");
    return defs;
}

std::string define_error(Definitions& defs, const std::string& text)
{
    try
    {
        define(defs, text);
    }
    catch (const AstError& e)
    {
        return e.message();
    }
    return "";
}

} // namespace

TEST_CASE("expand substitutes user symbols")
{
    const auto defs = standard_defs();
    CHECK(equal(expand(defs, term("area(X[1])")), term("freq(X[1]) * size(X[1])")));
    CHECK(equal(expand(defs, term("coverage(X[1], X[2])")), term("freq(X[1] union X[2]) * size(X[1] inter X[2])")));
    const auto builtin = term("freq(X[1]) + overlapItems(X[1], X[2])");
    CHECK(equal(expand(defs, builtin), builtin));
}

TEST_CASE("expand reaches through nested definitions and is idempotent")
{
    auto defs = standard_defs();
    define(defs, "define twice_area(X) := area(X) + area(X);");
    const auto once = expand(defs, term("twice_area(X[2]) / 2"));
    CHECK(equal(once, term("(freq(X[2]) * size(X[2]) + freq(X[2]) * size(X[2])) / 2")));
    CHECK(equal(expand(defs, once), once));
}

TEST_CASE("definitions reject bad bodies")
{
    Definitions defs = standard_defs();
    CHECK(define_error(defs, "define area(X) := size(X);").find("already defined") != std::string::npos);
    CHECK_FALSE(define_error(defs, "define freq(X) := size(X);").empty());
    CHECK(define_error(defs, "define f(X) := f(X);").find("recursive") != std::string::npos);
    CHECK_FALSE(define_error(defs, "define g(X) := later(X);").empty());
    CHECK_FALSE(define_error(defs, "define h(X) := area(X, X);").empty());
    CHECK_FALSE(define_error(defs, "define p(X, X) := size(X);").empty());
    CHECK_FALSE(define_error(defs, "define q(X) := size(X[1]);").empty());
    CHECK(defs.all().size() == 2);
}

TEST_CASE("refine conjoins and leaves the base alone")
{
    const auto q0 = support::fixture_query(0);
    const auto before = q0;
    const auto q1 = refine(q0, formula("canonical([X[1..3]])"), "Q1");
    CHECK(equal(q0, before));
    CHECK(q1.name == "Q1");
    CHECK(q1.k == 3);
    const auto* conj = std::get_if<And>(&q1.formula->node);
    REQUIRE(conj);
    REQUIRE(conj->parts.size() == 2);
    CHECK(equal(conj->parts[0], q0.formula));
    CHECK_THROWS_AS(refine(q0, formula("closed(X[4])"), "bad"), AstError);
}

TEST_CASE("ground expands forall families")
{
    const auto q = support::query_from_text("query q(k=3) := forall i < j: overlapItems(X[i], X[j]) = 0;");
    const auto g = ground(q, {});
    const auto* conj = std::get_if<And>(&g->node);
    REQUIRE(conj);
    CHECK(conj->parts.size() == 3);
    CHECK(equal(conj->parts[2], formula("overlapItems(X[2], X[3]) = 0")));

    const auto single = support::query_from_text("query q(k=2) := forall i in 2..k: closed(X[i]);");
    CHECK(equal(ground(single, {}), formula("closed(X[2])")));
}

TEST_CASE("ground substitutes parameters and reports unbound ones")
{
    auto q = support::query_from_text("query q(k=1) := freq(X[1]) >= $minfr;");
    CHECK_THROWS_WITH_AS(ground(q, {}), doctest::Contains("unbound parameter $minfr"), AstError);
    q.params["minfr"] = Rational(3, 2);
    CHECK(equal(ground(q, {}), formula("freq(X[1]) >= 3/2")));
}

TEST_CASE("validate accepts the fixture queries")
{
    const auto d = support::running_example();
    for (int i = 0; i <= 6; ++i)
    {
        auto q = support::fixture_query(i);
        q.params = {{"deltaT", 1}, {"deltaI", 1}};
        CHECK(validate(q, d, {}).empty());
    }
}

TEST_CASE("validate reports located diagnostics")
{
    const auto d = support::running_example();

    auto diags = validate(support::query_from_text("query q(k=1) := Z in X[1];"), d, {});
    REQUIRE(diags.size() == 1);
    CHECK(diags[0].message == "unknown item Z");
    CHECK(diags[0].span.line == 1);
    CHECK(diags[0].span.column == 17);

    diags = validate(support::query_from_text("query q(k=1) := freq(X[1]) + {A} >= 1;"), d, {});
    REQUIRE(diags.size() == 1);
    CHECK(diags[0].message == "numeric operator over set operand");

    diags = validate(support::query_from_text("query q(k=1) := freq(X[1]) >= $missing;"), d, {});
    REQUIRE(diags.size() == 1);
    CHECK(diags[0].message.find("unbound parameter") != std::string::npos);

    diags = validate(support::query_from_text("query q(k=1) := mystery(X[1]) >= 1;"), d, {});
    REQUIRE(diags.size() == 1);
    CHECK(diags[0].span.line == 1);

    diags = validate(support::query_from_text("query q(k=1) := freq(X[1], \"D9\") >= 1;"), d, {});
    CHECK(diags.size() == 1);

    diags = validate(support::query_from_text("query q(k=1) := t@11 in cover(X[1]);"), d, {});
    CHECK(diags.size() == 1);
}

TEST_CASE("builtin signatures")
{
    REQUIRE(find_builtin("freq"));
    CHECK(find_builtin("freq")->min_arity == 1);
    CHECK(find_builtin("freq")->max_arity == 2);
    CHECK(find_builtin("growthRate")->min_arity == 3);
    CHECK_FALSE(find_builtin("area"));
}
