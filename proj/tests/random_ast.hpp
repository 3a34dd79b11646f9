#pragma once

// Random statement generator for the parse/print round-trip property. It
// builds ASTs directly (not text) and only produces shapes the parser itself
// can yield: literal-or-bound variable indices within k, non-empty pattern
// literals, and calls to names the parser reads as calls.

#include <random>
#include <string>
#include <vector>

#include "patmine/ast.hpp"
#include "patmine/parser.hpp"

namespace random_ast
{

using namespace patmine;

class Generator
{
public:
    explicit Generator(std::uint32_t seed) : rng_(seed) {}

    Statement statement()
    {
        bound_.clear();
        params_.clear();
        switch (pick(12))
        {
        case 0: {
            Query q;
            q.name = name("Q");
            q.k = k_ = 1 + pick(4);
            q.formula = formula(3);
            return {stmt::QueryDecl{q}, {}};
        }
        case 1: {
            FunctionDef def;
            def.name = name("f");
            const int arity = 1 + pick(3);
            const char* names[] = {"X", "Y", "Z"};
            for (int i = 0; i < arity; ++i)
                def.params.push_back(names[i]);
            params_ = def.params;
            k_ = 0;
            def.body = term(3, true);
            return {stmt::Define{def}, {}};
        }
        case 2:
            k_ = 1 + pick(4);
            return {stmt::Refine{name("R"), name("Q"), formula(3)}, {}};
        case 3:
            return {stmt::Solve{name("Q"), coin() ? std::optional<int>(1 + pick(50)) : std::nullopt}, {}};
        case 4:
            return {stmt::Param{name("p"), rational()}, {}};
        case 5:
            return {stmt::Load{"data/" + name("d") + ".dat", coin() ? std::optional<std::string>("class") : std::nullopt}, {}};
        case 6: {
            auto what = static_cast<stmt::ShowWhat>(pick(4));
            stmt::Show s{what, {}, {}};
            if (what == stmt::ShowWhat::Solutions)
            {
                s.name = name("Q");
                if (coin())
                    s.limit = 1 + pick(9);
            }
            return {s, {}};
        }
        case 7:
            return {stmt::Export{name("Q"), "out/" + name("e") + ".json", static_cast<stmt::Format>(pick(3))}, {}};
        case 8:
            return {stmt::Stats{name("Q")}, {}};
        case 9:
            return {stmt::Quit{}, {}};
        case 10:
            k_ = 1 + pick(3);
            return {stmt::Eval{term(3, false), bindings()}, {}};
        default:
            k_ = 1 + pick(3);
            return {stmt::Check{formula(2), bindings()}, {}};
        }
    }

private:
    int pick(int n) { return std::uniform_int_distribution<int>(0, n - 1)(rng_); }
    bool coin() { return pick(2) == 0; }

    std::string name(const std::string& prefix) { return prefix + std::to_string(pick(20)); }

    Rational rational()
    {
        const std::int64_t num = pick(40) - 10;
        const std::int64_t den = 1 + pick(4);
        return Rational(num, den);
    }

    std::string label()
    {
        static const char* labels[] = {"A", "B", "C", "item_7", "t", "X", "k", "a b", "1x", "Y", "big-one"};
        return labels[pick(static_cast<int>(std::size(labels)))];
    }

    Index index()
    {
        if (!bound_.empty() && coin())
            return Index::named(bound_[pick(static_cast<int>(bound_.size()))]);
        return Index::literal(1 + pick(k_));
    }

    stmt::Bindings bindings()
    {
        stmt::Bindings out;
        const int n = pick(3);
        for (int i = 0; i < n; ++i)
        {
            std::vector<std::string> ls{label()};
            if (coin())
                ls.push_back(label());
            out.emplace_back(1 + pick(3), ls);
        }
        return out;
    }

    TermPtr leaf(bool in_define)
    {
        switch (pick(in_define ? 7 : 8))
        {
        case 0: return make_term(NumConst{rational()});
        case 1: return make_term(ItemConst{label()});
        case 2: {
            PatternConst p;
            const int n = 1 + pick(3);
            for (int i = 0; i < n; ++i)
                p.labels.push_back(label());
            return make_term(p);
        }
        case 3: return make_term(TransactionConst{static_cast<std::size_t>(pick(12))});
        case 4: return make_term(PartitionConst{coin() ? "D1" : "pos class"});
        case 5: return make_term(ParamRef{name("delta")});
        case 6:
            if (in_define)
                return make_term(ArgRef{params_[pick(static_cast<int>(params_.size()))]});
            return make_term(Var{index()});
        default: return make_term(Var{index()});
        }
    }

    TermPtr term(int depth, bool in_define)
    {
        if (depth == 0 || pick(3) == 0)
            return leaf(in_define);
        switch (pick(3))
        {
        case 0:
            return make_term(SetOp{static_cast<SetOpKind>(pick(3)), term(depth - 1, in_define), term(depth - 1, in_define)});
        case 1:
            return make_term(NumOp{static_cast<NumOpKind>(pick(4)), term(depth - 1, in_define), term(depth - 1, in_define)});
        default: {
            static const char* calls[] = {"freq", "size", "cover", "overlapItems", "growthRate", "area", "card"};
            Call c{calls[pick(static_cast<int>(std::size(calls)))], {}};
            const int n = pick(4);
            for (int i = 0; i < n; ++i)
                c.args.push_back(term(depth - 1, in_define));
            return make_term(c);
        }
        }
    }

    FormulaPtr atom(int depth)
    {
        switch (pick(depth > 0 ? 8 : 4))
        {
        case 0: return make_formula(Closed{index()});
        case 1: {
            Global g{static_cast<GlobalKind>(pick(3)), {}};
            const int n = 1 + pick(3);
            for (int i = 0; i < n; ++i)
            {
                VarSpan vs{index(), std::nullopt};
                if (coin())
                    vs.last = coin() ? Index::named("k") : Index::literal(1 + pick(k_));
                g.vars.push_back(vs);
            }
            return make_formula(g);
        }
        case 2: return make_formula(TrueConst{});
        case 3: return make_formula(Relation{static_cast<Rel>(pick(10)), term(2, false), term(2, false)});
        case 4: {
            std::vector<FormulaPtr> parts;
            const int n = 2 + pick(2);
            for (int i = 0; i < n; ++i)
                parts.push_back(formula(depth - 1));
            return coin() ? make_formula(And{parts}) : make_formula(Or{parts});
        }
        case 5: {
            std::string v = "i" + std::to_string(bound_.size());
            const int lo = 1 + pick(k_);
            Index hi = coin() ? Index::named("k") : Index::literal(lo + pick(k_ - lo + 1));
            bound_.push_back(v);
            auto body = atom(depth - 1);
            bound_.pop_back();
            return make_formula(ForAll{v, Index::literal(lo), hi, body});
        }
        case 6: {
            std::string a = "a" + std::to_string(bound_.size()), b = "b" + std::to_string(bound_.size());
            bound_.push_back(a);
            bound_.push_back(b);
            auto body = atom(depth - 1);
            bound_.resize(bound_.size() - 2);
            return make_formula(ForAllPairs{a, b, body});
        }
        default: return make_formula(Relation{Rel::Ge, term(1, false), make_term(NumConst{rational()})});
        }
    }

    FormulaPtr formula(int depth)
    {
        if (depth == 0 || pick(3) == 0)
            return atom(0);
        std::vector<FormulaPtr> parts;
        const int n = 1 + pick(3);
        for (int i = 0; i < n; ++i)
            parts.push_back(atom(depth - 1));
        if (parts.size() == 1)
            return parts.front();
        return coin() ? make_formula(And{parts}) : make_formula(Or{parts});
    }

    std::mt19937 rng_;
    int k_ = 1;
    std::vector<std::string> bound_;
    std::vector<std::string> params_;
};

} // namespace random_ast
