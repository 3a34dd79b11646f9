#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "support.hpp"

using namespace patmine;
using support::pattern;

namespace
{

const Dataset& table1()
{
    static const Dataset d = support::running_example();
    return d;
}

/// the running example with D1 = first six rows, D2 = last five.
const Dataset& split_table1()
{
    static const Dataset d = [] {
        const auto& base = table1();
        std::vector<std::string> labels;
        for (const auto& item : base.items())
            labels.push_back(item.label);
        std::vector<std::vector<ItemId>> rows;
        for (const auto& r : oracle::table1().rows)
            rows.emplace_back(r.begin(), r.end());
        return Dataset("split", labels, rows, {{"D1", {0, 1, 2, 3, 4, 5}}, {"D2", {6, 7, 8, 9, 10}}});
    }();
    return d;
}

Definitions standard_defs()
{
    Definitions defs;
    defs.define(std::get<stmt::Define>(parse_statement("define area(X) := freq(X) * size(X);").node).def);
    return defs;
}

Value eval(const Dataset& d, const std::string& text, const Assignment& a, const Definitions& defs = {})
{
    auto t = std::get<stmt::Eval>(parse_statement("eval " + text + ";").node).term;
    return eval_term(d, a, *ground(t, static_cast<int>(a.size()), defs, {}));
}

Number num(const Value& v)
{
    REQUIRE(std::holds_alternative<Number>(v));
    return std::get<Number>(v);
}

bool holds(const Dataset& d, const std::string& formula, const Assignment& a)
{
    Query q{"q", static_cast<int>(a.size()),
            std::get<stmt::Check>(parse_statement("check " + formula + ";").node).formula, {}, {}};
    return check(d, a, q, standard_defs());
}

} // namespace

TEST_CASE("measure fixtures")
{
    const auto defs = standard_defs();
    CHECK(num(eval(table1(), "area(X[1])", {pattern("EG")}, defs)) == Number(12));
    CHECK(num(eval(table1(), "overlapTransactions(X[1], X[2])", {pattern("AF"), pattern("EG")})) == Number(0));
    CHECK(num(eval(table1(), "freq({A, E})", {})) == Number(3));
    CHECK(num(eval(table1(), "size(X[1] union X[2])", {pattern("AF"), pattern("EG")})) == Number(4));
    CHECK(num(eval(split_table1(), "card(\"D1\") + card(\"D2\")", {})) == Number(11));
    CHECK(num(eval(table1(), "freq(X[1]) / 4", {pattern("EG")})) == Number(Rational(3, 2)));

    const auto c = eval(table1(), "cover(X[1])", {pattern("CH")});
    REQUIRE(std::holds_alternative<CoverValue>(c));
    CHECK(std::get<CoverValue>(c).transactions.indices() == std::vector<std::uint32_t>{8, 9, 10});
}

TEST_CASE("overlapItems of a pattern with itself is its size")
{
    for (const auto& x : oracle::all_itemsets(8))
    {
        const auto p = pattern(x);
        REQUIRE(num(eval(table1(), "overlapItems(X[1], X[1])", {p})) == Number(static_cast<std::int64_t>(x.size())));
    }
}

TEST_CASE("generic division by zero is an error")
{
    CHECK_THROWS_AS(eval(table1(), "size(X[1]) / freq(X[1])", {pattern("AB")}), EvalError);
}

TEST_CASE("growth rate")
{
    const auto& d = split_table1();
    CHECK(eval_growth_rate(d, pattern("E"), "D1", "D2") == Number(Rational(25, 24)));
    CHECK(eval_growth_rate(d, pattern("E"), "D1", "D1") == Number(1));
    CHECK(eval_growth_rate(d, pattern("AD"), "D1", "D2").is_infinite());
    CHECK_THROWS_WITH_AS(eval_growth_rate(d, pattern("AB"), "D1", "D2"), doctest::Contains("undefined growth rate"),
                         EvalError);
    CHECK_THROWS(eval_growth_rate(d, pattern("E"), "D1", "D3"));
    CHECK(num(eval(d, "growthRate(X[1], \"D1\", \"D2\")", {pattern("E")})) == Number(Rational(25, 24)));
    CHECK(holds(d, "growthRate(X[1], \"D1\", \"D2\") > 1000", {pattern("AD")}));

    const Dataset with_empty("e", {"A"}, {{0}, {0}}, {{"D1", {0, 1}}, {"D2", {}}});
    CHECK_THROWS(eval_growth_rate(with_empty, pattern("A"), "D1", "D2"));

    // brute force over every itemset of the running example
    const auto t = oracle::table1();
    for (const auto& x : oracle::all_itemsets(8))
    {
        int f1 = 0, f2 = 0;
        for (int r = 0; r < 11; ++r)
            if (oracle::contains(t.rows[r], x))
                ++(r < 6 ? f1 : f2);
        if (f1 == 0 && f2 == 0)
            continue;
        const auto g = eval_growth_rate(d, pattern(x), "D1", "D2");
        if (f2 == 0)
            CHECK(g.is_infinite());
        else
            CHECK(g == Number(Rational(5 * f1, 6 * f2)));
    }
}

TEST_CASE("query checks from the clustering walkthrough")
{
    auto q3 = support::fixture_query(3);
    auto q2 = support::fixture_query(2);
    CHECK(check(table1(), {pattern("AF"), pattern("CH"), pattern("EG")}, q3, {}));
    CHECK_FALSE(check(table1(), {pattern("CFGH"), pattern("E"), pattern("ADF")}, q2, {}));
    CHECK_THROWS(check(table1(), {pattern("AF")}, q3, {}));
}

TEST_CASE("dedicated constraints")
{
    CHECK(holds(table1(), "coverTransactions([X[1..3]])", {pattern("AF"), pattern("CH"), pattern("EG")}));
    CHECK_FALSE(holds(table1(), "coverTransactions([X[1..2]])", {pattern("AF"), pattern("CH")}));
    CHECK_FALSE(holds(table1(), "coverItems([X[1..3]])", {pattern("AF"), pattern("CH"), pattern("EG")}));
    CHECK(holds(table1(), "coverItems([X[1..2]])", {pattern("ABCD"), pattern("EFGH")}));
    CHECK(holds(table1(), "closed(X[1])", {pattern("EG")}));
    CHECK_FALSE(holds(table1(), "closed(X[1])", {pattern("CF")}));
    // the full itemset is Galois-closed but covers nothing
    CHECK(is_closed(table1(), pattern("ABCDEFGH")));
    CHECK_FALSE(holds(table1(), "closed(X[1])", {pattern("ABCDEFGH")}));
    CHECK(holds(table1(), "canonical([X[1..3]])", {pattern("A"), pattern("AB"), pattern("B")}));
    CHECK_FALSE(holds(table1(), "canonical([X[1..2]])", {pattern("AF"), pattern("AF")}));
    CHECK(holds(table1(), "A in X[1] and B notin X[1] and {A} subset X[1] and X[1] subseteq X[1]", {pattern("AF")}));
    CHECK(holds(table1(), "t@1 in cover(X[1])", {pattern("AF")}));
    CHECK(holds(table1(), "freq(X[1]) >= 6 or size(X[1]) > 5", {pattern("EG")}));
}

TEST_CASE("lexicographic order")
{
    auto bits = [](const std::string& s) { return pattern(s).to_bits(8); };
    CHECK(lex_less(bits("A"), bits("AB")));
    CHECK(lex_less(bits("AB"), bits("B")));
    CHECK(lex_less(bits("ADF"), bits("AE")));
    CHECK_FALSE(lex_less(bits("B"), bits("B")));
    const auto sets = oracle::all_itemsets(6);
    for (std::size_t i = 0; i + 1 < sets.size(); ++i)
        REQUIRE(lex_less(pattern(sets[i]).to_bits(8), pattern(sets[i + 1]).to_bits(8)));
}

TEST_CASE("canonical holds for exactly one ordering of distinct patterns")
{
    std::mt19937 rng(3);
    const auto sets = oracle::all_itemsets(8);
    std::uniform_int_distribution<std::size_t> pick(0, sets.size() - 1);
    for (int round = 0; round < 300; ++round)
    {
        Assignment a;
        while (a.size() < 3)
        {
            auto p = pattern(sets[pick(rng)]);
            if (std::find(a.begin(), a.end(), p) == a.end())
                a.push_back(p);
        }
        std::sort(a.begin(), a.end());
        int hits = 0;
        do
            hits += holds(table1(), "canonical([X[1..3]])", a);
        while (std::next_permutation(a.begin(), a.end()));
        REQUIRE(hits == 1);
    }
}

TEST_CASE("conjunction semantics of refinement")
{
    std::mt19937 rng(5);
    const auto sets = oracle::all_itemsets(8);
    std::uniform_int_distribution<std::size_t> pick(0, sets.size() - 1);
    const auto q1 = support::fixture_query(1);
    const auto extra = std::get<stmt::Check>(parse_statement("check forall i in 1..3: freq(X[i]) >= 2;").node).formula;
    const auto q2 = refine(q1, extra, "Q2");
    for (int round = 0; round < 2000; ++round)
    {
        Assignment a{pattern(sets[pick(rng)]), pattern(sets[pick(rng)]), pattern(sets[pick(rng)])};
        if (round % 3 == 0)
            a = {pattern("AF"), pattern("CH"), pattern("EG")};
        Query only_extra{"c", 3, extra, {}, {}};
        REQUIRE(check(table1(), a, q2, {}) == (check(table1(), a, q1, {}) && check(table1(), a, only_extra, {})));
    }
}

TEST_CASE("overlapTransactions equals freq of the union")
{
    const auto t = oracle::table1();
    const auto sets = oracle::all_itemsets(8);
    for (std::size_t i = 0; i < sets.size(); i += 3)
        for (std::size_t j = 0; j < sets.size(); j += 5)
        {
            const auto v = num(eval(table1(), "overlapTransactions(X[1], X[2])", {pattern(sets[i]), pattern(sets[j])}));
            REQUIRE(v == Number(oracle::freq(t, oracle::unite(sets[i], sets[j]))));
        }
}

TEST_CASE("evaluation is repeatable")
{
    const auto defs = standard_defs();
    const Assignment a{pattern("CEH")};
    const auto first = num(eval(table1(), "area(X[1]) / 7 + 1", a, defs));
    for (int i = 0; i < 10; ++i)
        CHECK(num(eval(table1(), "area(X[1]) / 7 + 1", a, defs)) == first);
}

namespace
{

bool exception_oracle(const oracle::Table& t, const oracle::Itemset& x1, const oracle::Itemset& x2, int item,
                      const ExceptionThresholds& th)
{
    const auto base = oracle::minus(x1, x2);
    const oracle::Itemset i{item};
    const int f_base_i = oracle::freq(t, oracle::unite(base, i));
    const int f_base_not_i = oracle::freq(t, base) - f_base_i;
    const int f_x1_not_i = oracle::freq(t, x1) - oracle::freq(t, oracle::unite(x1, i));
    return f_base_i >= th.minfr && f_base_not_i <= th.delta1 && f_x1_not_i <= th.maxfr
           && oracle::freq(t, x1) - f_x1_not_i <= th.delta2;
}

} // namespace

TEST_CASE("exception rules")
{
    const auto t = oracle::table1();
    const ExceptionThresholds slack{0, 11, 11, 11};
    CHECK(check_exception(table1(), pattern("CE"), pattern("E"), 6, slack));

    const ExceptionThresholds th{2, 1, 2, 2};
    CHECK(check_exception(table1(), pattern("CE"), pattern("E"), 6, th)
          == exception_oracle(t, oracle::letters("CE"), oracle::letters("E"), 6, th));

    const ExceptionThresholds impossible{0, -1, 11, 11};
    for (const auto& x1 : oracle::all_itemsets(8))
        if (x1.size() == 2)
            for (int i = 0; i < 8; ++i)
                if (!std::binary_search(x1.begin(), x1.end(), i))
                    CHECK_FALSE(check_exception(table1(), pattern(x1), pattern(oracle::Itemset{x1[0]}), static_cast<ItemId>(i), impossible));

    CHECK_THROWS_AS(check_exception(table1(), pattern("CE"), pattern("CE"), 6, th), std::invalid_argument);
    CHECK_THROWS_AS(check_exception(table1(), pattern("CE"), pattern("A"), 6, th), std::invalid_argument);
    CHECK_THROWS_AS(check_exception(table1(), pattern("CE"), pattern("E"), 2, th), std::invalid_argument);
}
