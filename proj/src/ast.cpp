#include "patmine/ast.hpp"

#include <algorithm>
#include <array>
#include <set>

#include "patmine/dataset.hpp"

namespace patmine
{

std::string SourceSpan::to_string() const
{
    return std::to_string(line) + ":" + std::to_string(column);
}

AstError::AstError(SourceSpan span, const std::string& message)
    : std::runtime_error(span.line ? span.to_string() + ": " + message : message), span_(span), message_(message)
{
}

// ------------------------------------------------------------ equality

namespace
{

bool equal_args(const std::vector<TermPtr>& a, const std::vector<TermPtr>& b)
{
    return std::equal(a.begin(), a.end(), b.begin(), b.end(),
                      [](const TermPtr& x, const TermPtr& y) { return equal(x, y); });
}

bool equal_parts(const std::vector<FormulaPtr>& a, const std::vector<FormulaPtr>& b)
{
    return std::equal(a.begin(), a.end(), b.begin(), b.end(),
                      [](const FormulaPtr& x, const FormulaPtr& y) { return equal(x, y); });
}

template <class... Fs>
struct overloaded : Fs...
{
    using Fs::operator()...;
};

} // namespace

bool equal(const Term& a, const Term& b)
{
    if (a.node.index() != b.node.index())
        return false;
    return std::visit(
        overloaded{
            [&](const NumConst& x) { return x.value == std::get<NumConst>(b.node).value; },
            [&](const ItemConst& x) { return x.label == std::get<ItemConst>(b.node).label; },
            [&](const PatternConst& x) { return x.labels == std::get<PatternConst>(b.node).labels; },
            [&](const TransactionConst& x) { return x.index == std::get<TransactionConst>(b.node).index; },
            [&](const PartitionConst& x) { return x.name == std::get<PartitionConst>(b.node).name; },
            [&](const ParamRef& x) { return x.name == std::get<ParamRef>(b.node).name; },
            [&](const ArgRef& x) { return x.name == std::get<ArgRef>(b.node).name; },
            [&](const Var& x) { return x.index == std::get<Var>(b.node).index; },
            [&](const SetOp& x) {
                const auto& y = std::get<SetOp>(b.node);
                return x.op == y.op && equal(x.left, y.left) && equal(x.right, y.right);
            },
            [&](const NumOp& x) {
                const auto& y = std::get<NumOp>(b.node);
                return x.op == y.op && equal(x.left, y.left) && equal(x.right, y.right);
            },
            [&](const Call& x) {
                const auto& y = std::get<Call>(b.node);
                return x.name == y.name && equal_args(x.args, y.args);
            },
        },
        a.node);
}

bool equal(const TermPtr& a, const TermPtr& b)
{
    if (!a || !b)
        return !a && !b;
    return equal(*a, *b);
}

bool equal(const Formula& a, const Formula& b)
{
    if (a.node.index() != b.node.index())
        return false;
    return std::visit(
        overloaded{
            [&](const TrueConst&) { return true; },
            [&](const Relation& x) {
                const auto& y = std::get<Relation>(b.node);
                return x.rel == y.rel && equal(x.left, y.left) && equal(x.right, y.right);
            },
            [&](const Closed& x) { return x.var == std::get<Closed>(b.node).var; },
            [&](const Global& x) {
                const auto& y = std::get<Global>(b.node);
                return x.kind == y.kind && x.vars == y.vars;
            },
            [&](const And& x) { return equal_parts(x.parts, std::get<And>(b.node).parts); },
            [&](const Or& x) { return equal_parts(x.parts, std::get<Or>(b.node).parts); },
            [&](const ForAll& x) {
                const auto& y = std::get<ForAll>(b.node);
                return x.var == y.var && x.lo == y.lo && x.hi == y.hi && equal(x.body, y.body);
            },
            [&](const ForAllPairs& x) {
                const auto& y = std::get<ForAllPairs>(b.node);
                return x.first == y.first && x.second == y.second && equal(x.body, y.body);
            },
        },
        a.node);
}

bool equal(const FormulaPtr& a, const FormulaPtr& b)
{
    if (!a || !b)
        return !a && !b;
    return equal(*a, *b);
}

bool is_atom(const Formula& f)
{
    return std::holds_alternative<Relation>(f.node) || std::holds_alternative<Closed>(f.node)
           || std::holds_alternative<Global>(f.node);
}

bool equal(const Query& a, const Query& b)
{
    return a.name == b.name && a.k == b.k && equal(a.formula, b.formula);
}

bool equal(const FunctionDef& a, const FunctionDef& b)
{
    return a.name == b.name && a.params == b.params && equal(a.body, b.body);
}

// ------------------------------------------------------------ builtins

const BuiltinSignature* find_builtin(const std::string& name)
{
    static const std::array<BuiltinSignature, 7> table{{
        {"freq", 1, 2},
        {"size", 1, 1},
        {"cover", 1, 1},
        {"overlapItems", 2, 2},
        {"overlapTransactions", 2, 2},
        {"growthRate", 3, 3},
        {"card", 1, 1},
    }};
    for (const auto& b : table)
        if (b.name == name)
            return &b;
    return nullptr;
}

namespace
{

std::string arity_message(const std::string& name, std::size_t lo, std::size_t hi, std::size_t got)
{
    std::string expected = lo == hi ? std::to_string(lo) : std::to_string(lo) + " or " + std::to_string(hi);
    return name + " expects " + expected + " argument" + (hi == 1 ? "" : "s") + ", got " + std::to_string(got);
}

} // namespace

void Definitions::define(FunctionDef def)
{
    if (find_builtin(def.name))
        throw AstError(def.span, "cannot redefine builtin symbol " + def.name);
    if (find(def.name))
        throw AstError(def.span, "symbol " + def.name + " is already defined");
    if (def.params.empty())
        throw AstError(def.span, "function " + def.name + " needs at least one parameter");
    std::set<std::string> seen;
    for (const auto& p : def.params)
        if (!seen.insert(p).second)
            throw AstError(def.span, "duplicate parameter " + p + " in " + def.name);
    if (!def.body)
        throw AstError(def.span, "function " + def.name + " has no body");

    auto walk = [&](auto&& self, const Term& t) -> void {
        std::visit(overloaded{
                       [&](const ArgRef& a) {
                           if (!seen.contains(a.name))
                               throw AstError(t.span, "unknown parameter " + a.name + " in " + def.name);
                       },
                       [&](const Var&) {
                           throw AstError(t.span, "function bodies may only reference their parameters");
                       },
                       [&](const SetOp& o) {
                           self(self, *o.left);
                           self(self, *o.right);
                       },
                       [&](const NumOp& o) {
                           self(self, *o.left);
                           self(self, *o.right);
                       },
                       [&](const Call& c) {
                           if (c.name == def.name)
                               throw AstError(t.span, "recursive definition of " + def.name);
                           if (auto b = find_builtin(c.name))
                           {
                               if (c.args.size() < b->min_arity || c.args.size() > b->max_arity)
                                   throw AstError(t.span, arity_message(c.name, b->min_arity, b->max_arity, c.args.size()));
                           }
                           else if (auto f = find(c.name))
                           {
                               if (c.args.size() != f->arity())
                                   throw AstError(t.span, arity_message(c.name, f->arity(), f->arity(), c.args.size()));
                           }
                           else
                               throw AstError(t.span, "unknown symbol " + c.name);
                           for (const auto& a : c.args)
                               self(self, *a);
                       },
                       [](const auto&) {},
                   },
                   t.node);
    };
    walk(walk, *def.body);
    defs_.push_back(std::move(def));
}

const FunctionDef* Definitions::find(const std::string& name) const
{
    auto it = std::find_if(defs_.begin(), defs_.end(), [&](const FunctionDef& f) { return f.name == name; });
    return it == defs_.end() ? nullptr : &*it;
}

// ------------------------------------------------------------- rewriting

namespace
{

TermPtr substitute(const TermPtr& body, const std::map<std::string, TermPtr>& args, const SourceSpan& site)
{
    return std::visit(
        overloaded{
            [&](const ArgRef& a) -> TermPtr { return args.at(a.name); },
            [&](const SetOp& o) -> TermPtr {
                return make_term(SetOp{o.op, substitute(o.left, args, site), substitute(o.right, args, site)}, site);
            },
            [&](const NumOp& o) -> TermPtr {
                return make_term(NumOp{o.op, substitute(o.left, args, site), substitute(o.right, args, site)}, site);
            },
            [&](const Call& c) -> TermPtr {
                Call out{c.name, {}};
                for (const auto& a : c.args)
                    out.args.push_back(substitute(a, args, site));
                return make_term(std::move(out), site);
            },
            [&](const auto& leaf) -> TermPtr { return make_term(leaf, site); },
        },
        body->node);
}

} // namespace

TermPtr expand(const Definitions& defs, const TermPtr& t)
{
    return std::visit(
        overloaded{
            [&](const SetOp& o) -> TermPtr {
                return make_term(SetOp{o.op, expand(defs, o.left), expand(defs, o.right)}, t->span);
            },
            [&](const NumOp& o) -> TermPtr {
                return make_term(NumOp{o.op, expand(defs, o.left), expand(defs, o.right)}, t->span);
            },
            [&](const Call& c) -> TermPtr {
                std::vector<TermPtr> args;
                for (const auto& a : c.args)
                    args.push_back(expand(defs, a));
                if (auto b = find_builtin(c.name))
                {
                    if (args.size() < b->min_arity || args.size() > b->max_arity)
                        throw AstError(t->span, arity_message(c.name, b->min_arity, b->max_arity, args.size()));
                    return make_term(Call{c.name, std::move(args)}, t->span);
                }
                const FunctionDef* f = defs.find(c.name);
                if (!f)
                    throw AstError(t->span, "unknown symbol " + c.name);
                if (args.size() != f->arity())
                    throw AstError(t->span, arity_message(c.name, f->arity(), f->arity(), args.size()));
                std::map<std::string, TermPtr> bound;
                for (std::size_t i = 0; i < args.size(); ++i)
                    bound.emplace(f->params[i], args[i]);
                // arguments are already expanded; the body may still hold earlier
                // definitions, which terminate because bodies only look backwards
                return expand(defs, substitute(f->body, bound, t->span));
            },
            [&](const auto&) -> TermPtr { return t; },
        },
        t->node);
}

namespace
{

using Env = std::map<std::string, int>;

int resolve(const Index& idx, const Env& env, int k, const SourceSpan& span, const char* what = "variable index")
{
    int v = 0;
    if (idx.is_literal())
        v = idx.literal_value();
    else if (auto it = env.find(idx.name()); it != env.end())
        v = it->second;
    else if (idx.name() == "k")
        v = k;
    else
        throw AstError(span, "unbound range variable " + idx.name());
    if (v < 1 || v > k)
        throw AstError(span, std::string(what) + " " + std::to_string(v) + (v < 1 ? " is below 1" : " exceeds k=" + std::to_string(k)));
    return v;
}

struct Grounder
{
    const Definitions& defs;
    const std::map<std::string, Rational>& params;
    int k;

    TermPtr term(const TermPtr& t, const Env& env) const
    {
        return std::visit(
            overloaded{
                [&](const Var& v) -> TermPtr {
                    return make_term(Var{Index::literal(resolve(v.index, env, k, t->span))}, t->span);
                },
                [&](const ParamRef& p) -> TermPtr {
                    auto it = params.find(p.name);
                    if (it == params.end())
                        throw AstError(t->span, "unbound parameter $" + p.name);
                    return make_term(NumConst{it->second}, t->span);
                },
                [&](const ArgRef& a) -> TermPtr {
                    throw AstError(t->span, "parameter " + a.name + " used outside a function definition");
                },
                [&](const SetOp& o) -> TermPtr {
                    return make_term(SetOp{o.op, term(o.left, env), term(o.right, env)}, t->span);
                },
                [&](const NumOp& o) -> TermPtr {
                    return make_term(NumOp{o.op, term(o.left, env), term(o.right, env)}, t->span);
                },
                [&](const Call& c) -> TermPtr {
                    Call out{c.name, {}};
                    for (const auto& a : c.args)
                        out.args.push_back(term(a, env));
                    return make_term(std::move(out), t->span);
                },
                [&](const auto&) -> TermPtr { return t; },
            },
            t->node);
    }

    FormulaPtr conjunction(std::vector<FormulaPtr> parts, const SourceSpan& span) const
    {
        if (parts.empty())
            return make_formula(TrueConst{}, span);
        if (parts.size() == 1)
            return parts.front();
        return make_formula(And{std::move(parts)}, span);
    }

    FormulaPtr formula(const FormulaPtr& f, const Env& env) const
    {
        const SourceSpan& span = f->span;
        return std::visit(
            overloaded{
                [&](const TrueConst&) { return f; },
                [&](const Relation& r) {
                    return make_formula(Relation{r.rel, term(expand(defs, r.left), env), term(expand(defs, r.right), env)}, span);
                },
                [&](const Closed& c) {
                    return make_formula(Closed{Index::literal(resolve(c.var, env, k, span))}, span);
                },
                [&](const Global& g) {
                    Global out{g.kind, {}};
                    for (const auto& vs : g.vars)
                    {
                        int lo = resolve(vs.first, env, k, span);
                        int hi = vs.last ? resolve(*vs.last, env, k, span) : lo;
                        for (int i = lo; i <= hi; ++i)
                            out.vars.push_back({Index::literal(i), std::nullopt});
                    }
                    return make_formula(std::move(out), span);
                },
                [&](const And& a) {
                    std::vector<FormulaPtr> parts;
                    for (const auto& p : a.parts)
                        parts.push_back(formula(p, env));
                    return make_formula(And{std::move(parts)}, span);
                },
                [&](const Or& o) {
                    std::vector<FormulaPtr> parts;
                    for (const auto& p : o.parts)
                        parts.push_back(formula(p, env));
                    return make_formula(Or{std::move(parts)}, span);
                },
                [&](const ForAll& fa) {
                    int lo = resolve(fa.lo, env, k, span, "range bound");
                    int hi = resolve(fa.hi, env, k, span, "range bound");
                    std::vector<FormulaPtr> parts;
                    Env inner = env;
                    for (int i = lo; i <= hi; ++i)
                    {
                        inner[fa.var] = i;
                        parts.push_back(formula(fa.body, inner));
                    }
                    return conjunction(std::move(parts), span);
                },
                [&](const ForAllPairs& fp) {
                    std::vector<FormulaPtr> parts;
                    Env inner = env;
                    for (int i = 1; i <= k; ++i)
                        for (int j = i + 1; j <= k; ++j)
                        {
                            inner[fp.first] = i;
                            inner[fp.second] = j;
                            parts.push_back(formula(fp.body, inner));
                        }
                    return conjunction(std::move(parts), span);
                },
            },
            f->node);
    }
};

void check_term_bounds(const Term& t, const std::set<std::string>& bound, int k)
{
    std::visit(overloaded{
                   [&](const Var& v) {
                       if (v.index.is_literal() || !bound.contains(v.index.name()))
                           resolve(v.index, {}, k, t.span);
                   },
                   [&](const SetOp& o) {
                       check_term_bounds(*o.left, bound, k);
                       check_term_bounds(*o.right, bound, k);
                   },
                   [&](const NumOp& o) {
                       check_term_bounds(*o.left, bound, k);
                       check_term_bounds(*o.right, bound, k);
                   },
                   [&](const Call& c) {
                       for (const auto& a : c.args)
                           check_term_bounds(*a, bound, k);
                   },
                   [](const auto&) {},
               },
               t.node);
}

void check_index(const Index& idx, const std::set<std::string>& bound, int k, const SourceSpan& span, const char* what)
{
    if (idx.is_literal() || !bound.contains(idx.name()))
        resolve(idx, {}, k, span, what);
}

void check_formula_bounds(const Formula& f, const std::set<std::string>& bound, int k)
{
    std::visit(overloaded{
                   [](const TrueConst&) {},
                   [&](const Relation& r) {
                       check_term_bounds(*r.left, bound, k);
                       check_term_bounds(*r.right, bound, k);
                   },
                   [&](const Closed& c) { check_index(c.var, bound, k, f.span, "variable index"); },
                   [&](const Global& g) {
                       for (const auto& vs : g.vars)
                       {
                           check_index(vs.first, bound, k, f.span, "variable index");
                           if (vs.last)
                               check_index(*vs.last, bound, k, f.span, "variable index");
                       }
                   },
                   [&](const And& a) {
                       for (const auto& p : a.parts)
                           check_formula_bounds(*p, bound, k);
                   },
                   [&](const Or& o) {
                       for (const auto& p : o.parts)
                           check_formula_bounds(*p, bound, k);
                   },
                   [&](const ForAll& fa) {
                       check_index(fa.lo, bound, k, f.span, "range bound");
                       check_index(fa.hi, bound, k, f.span, "range bound");
                       auto inner = bound;
                       inner.insert(fa.var);
                       check_formula_bounds(*fa.body, inner, k);
                   },
                   [&](const ForAllPairs& fp) {
                       auto inner = bound;
                       inner.insert(fp.first);
                       inner.insert(fp.second);
                       check_formula_bounds(*fp.body, inner, k);
                   },
               },
               f.node);
}

} // namespace

Query refine(const Query& base, const FormulaPtr& extra, std::string name)
{
    check_var_bounds(extra, base.k);
    Query q;
    q.name = std::move(name);
    q.k = base.k;
    q.params = base.params;
    q.formula = make_formula(And{{base.formula, extra}}, extra->span);
    q.span = extra->span;
    return q;
}

void check_var_bounds(const FormulaPtr& f, int k)
{
    check_formula_bounds(*f, {}, k);
}

FormulaPtr ground(const Query& q, const Definitions& defs)
{
    if (q.k < 1)
        throw AstError(q.span, "query " + q.name + " needs k >= 1");
    return Grounder{defs, q.params, q.k}.formula(q.formula, {});
}

TermPtr ground(const TermPtr& t, int k, const Definitions& defs, const std::map<std::string, Rational>& params)
{
    return Grounder{defs, params, k}.term(expand(defs, t), {});
}

// ------------------------------------------------------------ type check

std::string to_string(Sort s)
{
    switch (s)
    {
    case Sort::Num: return "number";
    case Sort::Item: return "item";
    case Sort::Transaction: return "transaction";
    case Sort::ItemSet: return "item set";
    case Sort::TransSet: return "transaction set";
    case Sort::Partition: return "partition";
    }
    return "?";
}

namespace
{

bool is_item_set(Sort s) { return s == Sort::ItemSet || s == Sort::Transaction; }
bool is_set(Sort s) { return is_item_set(s) || s == Sort::TransSet; }

/// ItemSet and TransSet families; a transaction constant reads as its items.
std::optional<Sort> set_family(Sort s)
{
    if (is_item_set(s))
        return Sort::ItemSet;
    if (s == Sort::TransSet)
        return Sort::TransSet;
    return std::nullopt;
}

} // namespace

std::optional<Sort> infer_sort(const Term& t, const Dataset& d, int k, std::vector<Diagnostic>& diags)
{
    auto fail = [&](std::string msg) -> std::optional<Sort> {
        diags.push_back({t.span, std::move(msg)});
        return std::nullopt;
    };
    return std::visit(
        overloaded{
            [&](const NumConst&) -> std::optional<Sort> { return Sort::Num; },
            [&](const ItemConst& c) -> std::optional<Sort> {
                if (!d.find_item(c.label))
                    return fail("unknown item " + c.label);
                return Sort::Item;
            },
            [&](const PatternConst& c) -> std::optional<Sort> {
                if (c.labels.empty())
                    return fail("empty pattern constant");
                for (const auto& l : c.labels)
                    if (!d.find_item(l))
                        return fail("unknown item " + l);
                return Sort::ItemSet;
            },
            [&](const TransactionConst& c) -> std::optional<Sort> {
                if (c.index >= d.n_transactions())
                    return fail("transaction t@" + std::to_string(c.index) + " out of range (m=" + std::to_string(d.n_transactions()) + ")");
                return Sort::Transaction;
            },
            [&](const PartitionConst& c) -> std::optional<Sort> {
                if (!d.has_partition(c.name))
                    return fail("unknown partition \"" + c.name + "\"");
                return Sort::Partition;
            },
            [&](const ParamRef& p) -> std::optional<Sort> { return fail("unbound parameter $" + p.name); },
            [&](const ArgRef& a) -> std::optional<Sort> { return fail("parameter " + a.name + " used outside a function definition"); },
            [&](const Var& v) -> std::optional<Sort> {
                if (!v.index.is_literal())
                    return fail("unbound range variable " + v.index.name());
                if (v.index.literal_value() < 1 || v.index.literal_value() > k)
                    return fail("variable index " + std::to_string(v.index.literal_value()) + " exceeds k=" + std::to_string(k));
                return Sort::ItemSet;
            },
            [&](const SetOp& o) -> std::optional<Sort> {
                auto l = infer_sort(*o.left, d, k, diags);
                auto r = infer_sort(*o.right, d, k, diags);
                if (!l || !r)
                    return std::nullopt;
                if (!is_set(*l) || !is_set(*r))
                    return fail(*l == Sort::Num || *r == Sort::Num ? "set operator over numeric operand"
                                                                    : "set operator over " + to_string(is_set(*l) ? *r : *l) + " operand");
                if (set_family(*l) != set_family(*r))
                    return fail("set operator mixes item and transaction sets");
                return set_family(*l);
            },
            [&](const NumOp& o) -> std::optional<Sort> {
                auto l = infer_sort(*o.left, d, k, diags);
                auto r = infer_sort(*o.right, d, k, diags);
                if (!l || !r)
                    return std::nullopt;
                if (*l != Sort::Num || *r != Sort::Num)
                {
                    Sort bad = *l != Sort::Num ? *l : *r;
                    return fail(is_set(bad) ? "numeric operator over set operand" : "numeric operator over " + to_string(bad) + " operand");
                }
                return Sort::Num;
            },
            [&](const Call& c) -> std::optional<Sort> {
                std::vector<Sort> args;
                bool ok = true;
                for (const auto& a : c.args)
                {
                    auto s = infer_sort(*a, d, k, diags);
                    ok = ok && s.has_value();
                    if (s)
                        args.push_back(*s);
                }
                if (!ok)
                    return std::nullopt;
                auto b = find_builtin(c.name);
                if (!b)
                    return fail("unknown symbol " + c.name);
                if (args.size() < b->min_arity || args.size() > b->max_arity)
                    return fail(arity_message(c.name, b->min_arity, b->max_arity, args.size()));
                auto expect = [&](std::size_t i, bool good, const char* what) {
                    if (!good)
                        diags.push_back({c.args[i]->span, c.name + " expects " + what + " as argument " + std::to_string(i + 1)
                                                              + ", got " + to_string(args[i])});
                    return good;
                };
                if (c.name == "freq")
                {
                    bool good = expect(0, is_item_set(args[0]), "an item set");
                    if (args.size() == 2)
                        good = expect(1, args[1] == Sort::Partition, "a partition") && good;
                    return good ? std::optional(Sort::Num) : std::nullopt;
                }
                if (c.name == "size")
                    return expect(0, is_set(args[0]), "a set") ? std::optional(Sort::Num) : std::nullopt;
                if (c.name == "cover")
                    return expect(0, is_item_set(args[0]), "an item set") ? std::optional(Sort::TransSet) : std::nullopt;
                if (c.name == "overlapItems" || c.name == "overlapTransactions")
                {
                    bool good = expect(0, is_item_set(args[0]), "an item set");
                    good = expect(1, is_item_set(args[1]), "an item set") && good;
                    return good ? std::optional(Sort::Num) : std::nullopt;
                }
                if (c.name == "growthRate")
                {
                    bool good = expect(0, is_item_set(args[0]), "an item set");
                    good = expect(1, args[1] == Sort::Partition, "a partition") && good;
                    good = expect(2, args[2] == Sort::Partition, "a partition") && good;
                    return good ? std::optional(Sort::Num) : std::nullopt;
                }
                // card
                return expect(0, args[0] == Sort::Partition, "a partition") ? std::optional(Sort::Num) : std::nullopt;
            },
        },
        t.node);
}

void check_formula(const Formula& f, const Dataset& d, int k, std::vector<Diagnostic>& diags)
{
    auto var_ok = [&](const Index& idx) {
        if (!idx.is_literal())
            diags.push_back({f.span, "unbound range variable " + idx.name()});
        else if (idx.literal_value() < 1 || idx.literal_value() > k)
            diags.push_back({f.span, "variable index " + std::to_string(idx.literal_value()) + " exceeds k=" + std::to_string(k)});
    };
    std::visit(
        overloaded{
            [](const TrueConst&) {},
            [&](const Relation& r) {
                auto l = infer_sort(*r.left, d, k, diags);
                auto rs = infer_sort(*r.right, d, k, diags);
                if (!l || !rs)
                    return;
                auto mismatch = [&](const std::string& what) {
                    diags.push_back({f.span, what + " between " + to_string(*l) + " and " + to_string(*rs)});
                };
                switch (r.rel)
                {
                case Rel::Lt:
                case Rel::Le:
                case Rel::Ge:
                case Rel::Gt:
                    if (*l != Sort::Num || *rs != Sort::Num)
                        mismatch("numeric comparison");
                    break;
                case Rel::Eq:
                case Rel::Ne:
                    if (!((*l == Sort::Num && *rs == Sort::Num)
                          || (is_set(*l) && is_set(*rs) && set_family(*l) == set_family(*rs))
                          || (*l == Sort::Item && *rs == Sort::Item)))
                        mismatch("equality");
                    break;
                case Rel::In:
                case Rel::NotIn:
                    if (!((*l == Sort::Item && is_item_set(*rs)) || (*l == Sort::Transaction && *rs == Sort::TransSet)))
                        mismatch("membership");
                    break;
                case Rel::Subset:
                case Rel::SubsetEq:
                    if (!(is_set(*l) && is_set(*rs) && set_family(*l) == set_family(*rs)))
                        mismatch("inclusion");
                    break;
                }
            },
            [&](const Closed& c) { var_ok(c.var); },
            [&](const Global& g) {
                if (g.vars.empty())
                    diags.push_back({f.span, "empty variable list"});
                for (const auto& vs : g.vars)
                {
                    var_ok(vs.first);
                    if (vs.last)
                        var_ok(*vs.last);
                }
            },
            [&](const And& a) {
                for (const auto& p : a.parts)
                    check_formula(*p, d, k, diags);
            },
            [&](const Or& o) {
                for (const auto& p : o.parts)
                    check_formula(*p, d, k, diags);
            },
            [&](const ForAll&) { diags.push_back({f.span, "unexpanded forall"}); },
            [&](const ForAllPairs&) { diags.push_back({f.span, "unexpanded forall"}); },
        },
        f.node);
}

std::vector<Diagnostic> validate(const Query& q, const Dataset& d, const Definitions& defs)
{
    std::vector<Diagnostic> diags;
    FormulaPtr g;
    try
    {
        g = ground(q, defs);
    }
    catch (const AstError& e)
    {
        diags.push_back({e.span(), e.message()});
        return diags;
    }
    check_formula(*g, d, q.k, diags);
    return diags;
}

} // namespace patmine
