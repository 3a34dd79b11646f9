#include "patmine/evaluator.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>

namespace patmine
{

namespace
{

template <class... Fs>
struct overloaded : Fs...
{
    using Fs::operator()...;
};

} // namespace

namespace detail
{

enum class Op
{
    // numeric
    Const, Add, Sub, Mul, Div, Freq, FreqIn, Size, OverlapItems, OverlapTrans, GrowthRate, Card,
    // item sets
    VarItems, ConstItems,
    // transaction sets
    Cover,
    // either family
    Union, Inter, Diff,
    // elements
    ConstItem, ConstTrans,
};

struct Expr
{
    Op op;
    Sort sort;
    Rational num{0};
    std::size_t index = 0;
    Bitset bits;
    const Bitset* part1 = nullptr;
    const Bitset* part2 = nullptr;
    std::vector<Expr> kids;
};

enum class NodeKind { True, And, Or, NumRel, SetRel, Member, ElemEq, Closed, CoverTrans, CoverItems, Canonical };

struct Node
{
    NodeKind kind;
    Rel rel = Rel::Eq;
    std::vector<Expr> exprs;
    std::vector<int> vars;
    std::vector<Node> kids;
};

} // namespace detail

using detail::Expr;
using detail::Node;
using detail::NodeKind;
using detail::Op;

BoundAssignment::BoundAssignment(const Dataset& d, const Assignment& a)
{
    items_.reserve(a.size());
    covers_.reserve(a.size());
    for (const auto& p : a)
    {
        items_.push_back(p.to_bits(d.n_items()));
        covers_.push_back(cover(d, p));
    }
    for (std::size_t i = 0; i < a.size(); ++i)
        bindings_.push_back({&items_[i], &covers_[i]});
}

bool closed_constraint(const Dataset& d, const Bitset& items, const CoverSet& cover)
{
    if (cover.none())
        return false;
    Bitset clo = d.all_items();
    cover.for_each([&](std::size_t t) { clo &= d.transaction(t); });
    return clo == items;
}

bool lex_less(const Bitset& a, const Bitset& b)
{
    std::size_t i = a.find_first();
    std::size_t j = b.find_first();
    while (i < a.size() && j < b.size())
    {
        if (i != j)
            return i < j;
        i = a.find_next(i + 1);
        j = b.find_next(j + 1);
    }
    return i >= a.size() && j < b.size();
}

namespace
{

// ------------------------------------------------------------ compilation

class Compiler
{
public:
    Compiler(const Dataset& d, int k) : d_(d), k_(k) {}

    std::set<int> vars;

    Expr term(const Term& t)
    {
        return std::visit(
            overloaded{
                [&](const NumConst& c) { return leaf(Op::Const, Sort::Num, c.value); },
                [&](const ItemConst& c) {
                    Expr e = leaf(Op::ConstItem, Sort::Item);
                    e.index = item(c.label, t.span);
                    return e;
                },
                [&](const PatternConst& c) {
                    Expr e = leaf(Op::ConstItems, Sort::ItemSet);
                    e.bits = Bitset(d_.n_items());
                    for (const auto& l : c.labels)
                        e.bits.set(item(l, t.span));
                    return e;
                },
                [&](const TransactionConst& c) {
                    if (c.index >= d_.n_transactions())
                        fail(t.span, "transaction t@" + std::to_string(c.index) + " out of range");
                    Expr e = leaf(Op::ConstTrans, Sort::Transaction);
                    e.index = c.index;
                    return e;
                },
                [&](const PartitionConst& c) -> Expr {
                    fail(t.span, "partition \"" + c.name + "\" used outside freq/growthRate/card");
                },
                [&](const ParamRef& p) -> Expr { fail(t.span, "unbound parameter $" + p.name); },
                [&](const ArgRef& a) -> Expr { fail(t.span, "parameter " + a.name + " outside a definition"); },
                [&](const Var& v) {
                    if (!v.index.is_literal())
                        fail(t.span, "unexpanded variable index " + v.index.name());
                    int i = v.index.literal_value();
                    if (i < 1 || i > k_)
                        fail(t.span, "variable index " + std::to_string(i) + " exceeds k=" + std::to_string(k_));
                    vars.insert(i - 1);
                    Expr e = leaf(Op::VarItems, Sort::ItemSet);
                    e.index = static_cast<std::size_t>(i - 1);
                    return e;
                },
                [&](const SetOp& o) {
                    Expr l = term(*o.left);
                    Expr r = term(*o.right);
                    if (family(l.sort) != family(r.sort))
                        fail(t.span, "set operator over mismatched operands");
                    Expr e = leaf(o.op == SetOpKind::Union ? Op::Union : o.op == SetOpKind::Inter ? Op::Inter : Op::Diff,
                                  family(l.sort));
                    e.kids.push_back(coerce(std::move(l)));
                    e.kids.push_back(coerce(std::move(r)));
                    return e;
                },
                [&](const NumOp& o) {
                    Expr l = term(*o.left);
                    Expr r = term(*o.right);
                    if (l.sort != Sort::Num || r.sort != Sort::Num)
                        fail(t.span, "numeric operator over set operand");
                    Op op = o.op == NumOpKind::Add ? Op::Add : o.op == NumOpKind::Sub ? Op::Sub : o.op == NumOpKind::Mul ? Op::Mul : Op::Div;
                    Expr e = leaf(op, Sort::Num);
                    e.kids.push_back(std::move(l));
                    e.kids.push_back(std::move(r));
                    return e;
                },
                [&](const Call& c) { return call(c, t.span); },
            },
            t.node);
    }

    Node formula(const Formula& f)
    {
        return std::visit(
            overloaded{
                [&](const TrueConst&) { return Node{NodeKind::True}; },
                [&](const And& a) {
                    Node n{NodeKind::And};
                    for (const auto& p : a.parts)
                        n.kids.push_back(formula(*p));
                    return n;
                },
                [&](const Or& o) {
                    Node n{NodeKind::Or};
                    for (const auto& p : o.parts)
                        n.kids.push_back(formula(*p));
                    return n;
                },
                [&](const Relation& r) { return relation(r, f.span); },
                [&](const Closed& c) {
                    Node n{NodeKind::Closed};
                    n.vars.push_back(var(c.var, f.span));
                    return n;
                },
                [&](const Global& g) {
                    Node n{g.kind == GlobalKind::CoverTransactions ? NodeKind::CoverTrans
                           : g.kind == GlobalKind::CoverItems      ? NodeKind::CoverItems
                                                                   : NodeKind::Canonical};
                    for (const auto& vs : g.vars)
                    {
                        int lo = var(vs.first, f.span);
                        int hi = vs.last ? var(*vs.last, f.span) : lo;
                        for (int i = lo; i <= hi; ++i)
                        {
                            vars.insert(i);
                            n.vars.push_back(i);
                        }
                    }
                    return n;
                },
                [&](const ForAll&) -> Node { fail(f.span, "unexpanded forall"); },
                [&](const ForAllPairs&) -> Node { fail(f.span, "unexpanded forall"); },
            },
            f.node);
    }

private:
    [[noreturn]] static void fail(const SourceSpan& span, const std::string& msg)
    {
        throw EvalError(span.line ? span.to_string() + ": " + msg : msg);
    }

    static Expr leaf(Op op, Sort sort, Rational num = Rational(0))
    {
        Expr e{op, sort};
        e.num = num;
        return e;
    }

    static Sort family(Sort s)
    {
        return s == Sort::Transaction ? Sort::ItemSet : s;
    }

    /// A transaction constant in item-set position reads as its items.
    Expr coerce(Expr e) const
    {
        if (e.sort != Sort::Transaction)
            return e;
        Expr out = leaf(Op::ConstItems, Sort::ItemSet);
        out.bits = d_.transaction(e.index);
        return out;
    }

    std::size_t item(const std::string& label, const SourceSpan& span) const
    {
        auto id = d_.find_item(label);
        if (!id)
            fail(span, "unknown item " + label);
        return *id;
    }

    int var(const Index& idx, const SourceSpan& span)
    {
        if (!idx.is_literal())
            fail(span, "unexpanded variable index " + idx.name());
        int i = idx.literal_value();
        if (i < 1 || i > k_)
            fail(span, "variable index " + std::to_string(i) + " exceeds k=" + std::to_string(k_));
        vars.insert(i - 1);
        return i - 1;
    }

    const Bitset* partition(const Term& t)
    {
        auto p = std::get_if<PartitionConst>(&t.node);
        if (!p)
            fail(t.span, "expected a partition name");
        if (!d_.has_partition(p->name))
            fail(t.span, "unknown partition \"" + p->name + "\"");
        return &d_.partition(p->name);
    }

    Expr item_set_arg(const Term& t, const std::string& fn)
    {
        Expr e = coerce(term(t));
        if (e.sort != Sort::ItemSet)
            fail(t.span, fn + " expects an item set");
        return e;
    }

    Expr call(const Call& c, const SourceSpan& span)
    {
        const auto* b = find_builtin(c.name);
        if (!b)
            fail(span, "unknown symbol " + c.name);
        if (c.args.size() < b->min_arity || c.args.size() > b->max_arity)
            fail(span, "wrong number of arguments to " + c.name);
        const std::string& n = c.name;
        Expr e = leaf(Op::Const, Sort::Num);
        if (n == "freq")
        {
            e.op = c.args.size() == 2 ? Op::FreqIn : Op::Freq;
            e.kids.push_back(item_set_arg(*c.args[0], n));
            if (c.args.size() == 2)
                e.part1 = partition(*c.args[1]);
        }
        else if (n == "size")
        {
            e.op = Op::Size;
            Expr arg = coerce(term(*c.args[0]));
            if (arg.sort != Sort::ItemSet && arg.sort != Sort::TransSet)
                fail(span, "size expects a set");
            e.kids.push_back(std::move(arg));
        }
        else if (n == "cover")
        {
            e.op = Op::Cover;
            e.sort = Sort::TransSet;
            e.kids.push_back(item_set_arg(*c.args[0], n));
        }
        else if (n == "overlapItems" || n == "overlapTransactions")
        {
            e.op = n == "overlapItems" ? Op::OverlapItems : Op::OverlapTrans;
            e.kids.push_back(item_set_arg(*c.args[0], n));
            e.kids.push_back(item_set_arg(*c.args[1], n));
        }
        else if (n == "growthRate")
        {
            e.op = Op::GrowthRate;
            e.kids.push_back(item_set_arg(*c.args[0], n));
            e.part1 = partition(*c.args[1]);
            e.part2 = partition(*c.args[2]);
        }
        else // card
        {
            e.op = Op::Card;
            e.part1 = partition(*c.args[0]);
        }
        return e;
    }

    Node relation(const Relation& r, const SourceSpan& span)
    {
        Expr l = term(*r.left);
        Expr rt = term(*r.right);
        Node n{NodeKind::NumRel, r.rel};
        switch (r.rel)
        {
        case Rel::Lt:
        case Rel::Le:
        case Rel::Ge:
        case Rel::Gt:
            if (l.sort != Sort::Num || rt.sort != Sort::Num)
                fail(span, "numeric comparison between non-numeric operands");
            break;
        case Rel::Eq:
        case Rel::Ne:
            if (l.sort == Sort::Num && rt.sort == Sort::Num)
                break;
            if (l.sort == Sort::Item && rt.sort == Sort::Item)
            {
                n.kind = NodeKind::ElemEq;
                break;
            }
            [[fallthrough]];
        case Rel::Subset:
        case Rel::SubsetEq:
            l = coerce(std::move(l));
            rt = coerce(std::move(rt));
            if (l.sort != rt.sort || (l.sort != Sort::ItemSet && l.sort != Sort::TransSet))
                fail(span, "set comparison between incompatible operands");
            n.kind = NodeKind::SetRel;
            break;
        case Rel::In:
        case Rel::NotIn:
            if (!((l.sort == Sort::Item && (rt.sort == Sort::ItemSet || rt.sort == Sort::Transaction))
                  || (l.sort == Sort::Transaction && rt.sort == Sort::TransSet)))
                fail(span, "membership between incompatible operands");
            rt = coerce(std::move(rt));
            n.kind = NodeKind::Member;
            break;
        }
        n.exprs.push_back(std::move(l));
        n.exprs.push_back(std::move(rt));
        return n;
    }

    const Dataset& d_;
    int k_;
};

// --------------------------------------------------------------- runtime

struct Runtime
{
    const Dataset& d;
    std::span<const Binding> vars;

    const Binding& var(std::size_t i) const
    {
        if (i >= vars.size() || !vars[i].items)
            throw EvalError("variable X[" + std::to_string(i + 1) + "] is not assigned");
        return vars[i];
    }

    Bitset set(const Expr& e) const
    {
        switch (e.op)
        {
        case Op::VarItems: return *var(e.index).items;
        case Op::ConstItems: return e.bits;
        case Op::Cover: return cover_of(e.kids[0]);
        case Op::Union: return set(e.kids[0]) | set(e.kids[1]);
        case Op::Inter: return set(e.kids[0]) & set(e.kids[1]);
        case Op::Diff: return difference(set(e.kids[0]), set(e.kids[1]));
        default: throw EvalError("expression is not a set");
        }
    }

    CoverSet cover_of(const Expr& items) const
    {
        if (items.op == Op::VarItems)
            return *var(items.index).cover;
        return cover(d, set(items));
    }

    std::size_t count_cover(const Expr& items) const
    {
        if (items.op == Op::VarItems)
            return var(items.index).cover->count();
        return cover(d, set(items)).count();
    }

    Number num(const Expr& e) const
    {
        switch (e.op)
        {
        case Op::Const: return Number(e.num);
        case Op::Add: return num(e.kids[0]) + num(e.kids[1]);
        case Op::Sub: return num(e.kids[0]) - num(e.kids[1]);
        case Op::Mul: return num(e.kids[0]) * num(e.kids[1]);
        case Op::Div: return num(e.kids[0]) / num(e.kids[1]);
        case Op::Freq: return Number(static_cast<std::int64_t>(count_cover(e.kids[0])));
        case Op::FreqIn: return Number(static_cast<std::int64_t>(cover_of(e.kids[0]).intersection_count(*e.part1)));
        case Op::Size: return Number(static_cast<std::int64_t>(set(e.kids[0]).count()));
        case Op::OverlapItems:
            return Number(static_cast<std::int64_t>(set(e.kids[0]).intersection_count(set(e.kids[1]))));
        case Op::OverlapTrans:
            return Number(static_cast<std::int64_t>(cover_of(e.kids[0]).intersection_count(cover_of(e.kids[1]))));
        case Op::GrowthRate: return growth(cover_of(e.kids[0]), *e.part1, *e.part2);
        case Op::Card: return Number(static_cast<std::int64_t>(e.part1->count()));
        default: throw EvalError("expression is not numeric");
        }
    }

    static Number growth(const CoverSet& c, const Bitset& d1, const Bitset& d2)
    {
        const auto n1 = static_cast<std::int64_t>(d1.count());
        const auto n2 = static_cast<std::int64_t>(d2.count());
        if (n1 == 0 || n2 == 0)
            throw EvalError("growth rate over an empty partition");
        const auto f1 = static_cast<std::int64_t>(c.intersection_count(d1));
        const auto f2 = static_cast<std::int64_t>(c.intersection_count(d2));
        if (f2 == 0)
        {
            if (f1 == 0)
                throw EvalError("undefined growth rate (pattern absent from both partitions)");
            return Number::infinity();
        }
        return Number(Rational(n2 * f1, n1 * f2));
    }

    static bool compare(Rel rel, const Number& a, const Number& b)
    {
        switch (rel)
        {
        case Rel::Lt: return a < b;
        case Rel::Le: return a <= b;
        case Rel::Eq: return a == b;
        case Rel::Ne: return a != b;
        case Rel::Ge: return a >= b;
        case Rel::Gt: return a > b;
        default: throw EvalError("not a numeric relation");
        }
    }

    bool holds(const Node& n) const
    {
        switch (n.kind)
        {
        case NodeKind::True: return true;
        case NodeKind::And:
            return std::all_of(n.kids.begin(), n.kids.end(), [&](const Node& k) { return holds(k); });
        case NodeKind::Or:
            return std::any_of(n.kids.begin(), n.kids.end(), [&](const Node& k) { return holds(k); });
        case NodeKind::NumRel: return compare(n.rel, num(n.exprs[0]), num(n.exprs[1]));
        case NodeKind::SetRel:
        {
            Bitset a = set(n.exprs[0]);
            Bitset b = set(n.exprs[1]);
            switch (n.rel)
            {
            case Rel::Eq: return a == b;
            case Rel::Ne: return !(a == b);
            case Rel::Subset: return a.is_subset_of(b) && !(a == b);
            case Rel::SubsetEq: return a.is_subset_of(b);
            default: throw EvalError("not a set relation");
            }
        }
        case NodeKind::Member:
        {
            bool in = set(n.exprs[1]).test(n.exprs[0].index);
            return n.rel == Rel::In ? in : !in;
        }
        case NodeKind::ElemEq:
            return (n.exprs[0].index == n.exprs[1].index) == (n.rel == Rel::Eq);
        case NodeKind::Closed:
        {
            const auto& b = var(static_cast<std::size_t>(n.vars[0]));
            return closed_constraint(d, *b.items, *b.cover);
        }
        case NodeKind::CoverTrans:
        {
            CoverSet u(d.n_transactions());
            for (int v : n.vars)
                u |= *var(static_cast<std::size_t>(v)).cover;
            return u.all();
        }
        case NodeKind::CoverItems:
        {
            Bitset u(d.n_items());
            for (int v : n.vars)
                u |= *var(static_cast<std::size_t>(v)).items;
            return u.all();
        }
        case NodeKind::Canonical:
            for (std::size_t i = 1; i < n.vars.size(); ++i)
                if (!lex_less(*var(static_cast<std::size_t>(n.vars[i - 1])).items, *var(static_cast<std::size_t>(n.vars[i])).items))
                    return false;
            return true;
        }
        return false;
    }
};

void require_well_typed(const Dataset& d, const Formula& f, int k)
{
    std::vector<Diagnostic> diags;
    check_formula(f, d, k, diags);
    if (!diags.empty())
    {
        const auto& first = diags.front();
        throw EvalError(first.span.line ? first.span.to_string() + ": " + first.message : first.message);
    }
}

} // namespace

CompiledFormula CompiledFormula::compile(const Dataset& d, const Formula& ground, int k)
{
    require_well_typed(d, ground, k);
    Compiler c(d, k);
    CompiledFormula out;
    out.dataset_ = &d;
    out.root_ = std::make_shared<const Node>(c.formula(ground));
    out.variables_.assign(c.vars.begin(), c.vars.end());
    return out;
}

bool CompiledFormula::holds(std::span<const Binding> vars) const
{
    return Runtime{*dataset_, vars}.holds(*root_);
}

Value eval_term(const Dataset& d, const Assignment& a, const Term& ground)
{
    const int k = static_cast<int>(a.size());
    std::vector<Diagnostic> diags;
    auto sort = infer_sort(ground, d, k, diags);
    if (!sort)
        throw EvalError(diags.empty() ? "ill-typed term" : diags.front().message);
    if (*sort == Sort::Partition)
        throw EvalError("a partition name is not a value");
    Compiler c(d, k);
    Expr e = c.term(ground);
    BoundAssignment bound(d, a);
    Runtime rt{d, bound.bindings()};
    switch (e.sort)
    {
    case Sort::Num: return rt.num(e);
    case Sort::ItemSet: return ItemSetValue{rt.set(e)};
    case Sort::TransSet: return CoverValue{rt.set(e)};
    case Sort::Item: return ItemValue{static_cast<ItemId>(e.index)};
    case Sort::Transaction: return TransactionValue{e.index};
    case Sort::Partition: break;
    }
    throw EvalError("unsupported term");
}

Number eval_growth_rate(const Dataset& d, const Pattern& x, const std::string& part1, const std::string& part2)
{
    const Bitset& d1 = d.partition(part1);
    const Bitset& d2 = d.partition(part2);
    return Runtime::growth(cover(d, x), d1, d2);
}

bool check(const Dataset& d, const Assignment& a, const Formula& ground, int k)
{
    if (static_cast<int>(a.size()) != k)
        throw EvalError("assignment has " + std::to_string(a.size()) + " patterns, query has k=" + std::to_string(k));
    auto compiled = CompiledFormula::compile(d, ground, k);
    BoundAssignment bound(d, a);
    return compiled.holds(bound.bindings());
}

bool check(const Dataset& d, const Assignment& a, const Query& q, const Definitions& defs)
{
    return check(d, a, *ground(q, defs), q.k);
}

bool check_exception(const Dataset& d, const Pattern& x1, const Pattern& x2, ItemId item, const ExceptionThresholds& th)
{
    const std::size_t n = d.n_items();
    if (item >= n)
        throw std::invalid_argument("item index out of range");
    const Bitset b1 = x1.to_bits(n);
    const Bitset b2 = x2.to_bits(n);
    if (!b2.is_subset_of(b1) || b1 == b2)
        throw std::invalid_argument("exception rule requires X2 to be a proper subset of X1");
    if (b1.test(item))
        throw std::invalid_argument("exception rule requires I not in X1");

    Bitset single(n);
    single.set(item);
    const Bitset base = difference(b1, b2); // X1 \ X2, non-empty
    auto f = [&](const Bitset& items) { return static_cast<std::int64_t>(cover(d, items).count()); };

    const std::int64_t base_with_i = f(base | single);
    const std::int64_t x1_freq = f(b1);
    const std::int64_t x1_with_i = f(b1 | single);
    const std::int64_t x1_without_i = x1_freq - x1_with_i;

    return base_with_i >= th.minfr
           && f(base) - base_with_i <= th.delta1
           && x1_without_i <= th.maxfr
           && x1_freq - x1_without_i <= th.delta2;
}

} // namespace patmine
