#include "patmine/solver.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <mutex>
#include <thread>

namespace patmine
{

ValidationError::ValidationError(std::vector<Diagnostic> diags)
    : std::runtime_error(diags.empty() ? "invalid query"
                                       : (diags.front().span.line ? diags.front().span.to_string() + ": " : std::string())
                                             + diags.front().message),
      diags_(std::move(diags))
{
}

RefinementError::RefinementError(std::size_t position, const std::string& message)
    : std::runtime_error(message), position_(position)
{
}

void SearchStats::merge(const SearchStats& other)
{
    nodes += other.nodes;
    candidates += other.candidates;
    leaves += other.leaves;
    for (const auto& [rule, n] : other.prunes)
        prunes[rule] += n;
}

CandidatePool::CandidatePool(std::vector<Candidate> candidates) : candidates_(std::move(candidates))
{
    auto by_pattern = [](const Candidate& a, const Candidate& b) { return a.pattern < b.pattern; };
    if (!std::is_sorted(candidates_.begin(), candidates_.end(), by_pattern))
        std::sort(candidates_.begin(), candidates_.end(), by_pattern);
}

// ------------------------------------------------------------ candidates

namespace
{

constexpr std::size_t max_items_for_itemset_enumeration = 20;

Bitset closure_of_cover(const Dataset& d, const CoverSet& c)
{
    Bitset out = d.all_items();
    c.for_each([&](std::size_t t) { out &= d.transaction(t); });
    return out;
}

struct ClosedWalk
{
    const Dataset& d;
    const CandidateFilter& filter;
    std::size_t min_freq;
    std::vector<Candidate>& out;

    void emit(const Bitset& items, const CoverSet& c)
    {
        Candidate cand{Pattern::from_bits(items), items, c};
        if (!filter || filter(cand))
            out.push_back(std::move(cand));
    }

    void extend(const Bitset& p, const CoverSet& c, std::size_t first)
    {
        for (std::size_t e = first; e < d.n_items(); ++e)
        {
            if (p.test(e))
                continue;
            CoverSet nc = c & d.item_cover(static_cast<ItemId>(e));
            if (nc.count() < min_freq)
                continue;
            Bitset q = closure_of_cover(d, nc);
            // keep only prefix-preserving extensions: q adds no item below e
            bool preserves = true;
            for (std::size_t i = q.find_first(); i < e; i = q.find_next(i + 1))
                if (!p.test(i))
                {
                    preserves = false;
                    break;
                }
            if (!preserves)
                continue;
            emit(q, nc);
            extend(q, nc, e + 1);
        }
    }
};

struct ItemsetWalk
{
    const Dataset& d;
    const CandidateFilter& filter;
    std::size_t min_freq;
    std::vector<Candidate>& out;

    void extend(Bitset& p, const CoverSet& c, std::size_t first)
    {
        for (std::size_t e = first; e < d.n_items(); ++e)
        {
            CoverSet nc = c & d.item_cover(static_cast<ItemId>(e));
            if (nc.count() < min_freq)
                continue;
            p.set(e);
            Candidate cand{Pattern::from_bits(p), p, nc};
            if (!filter || filter(cand))
                out.push_back(std::move(cand));
            extend(p, nc, e + 1);
            p.reset(e);
        }
    }
};

} // namespace

CandidatePool enumerate_closed(const Dataset& d, const CandidateFilter& filter, std::size_t min_freq)
{
    min_freq = std::max<std::size_t>(min_freq, 1);
    std::vector<Candidate> out;
    ClosedWalk walk{d, filter, min_freq, out};
    CoverSet all = d.all_transactions();
    if (all.count() < min_freq)
        return {};
    Bitset root = closure_of_cover(d, all);
    if (root.any())
        walk.emit(root, all);
    walk.extend(root, all, 0);
    return CandidatePool(std::move(out));
}

CandidatePool enumerate_all(const Dataset& d, const CandidateFilter& filter, std::size_t min_freq)
{
    if (d.n_items() > max_items_for_itemset_enumeration)
        throw SolveError("itemset enumeration refused: " + std::to_string(d.n_items()) + " items (limit "
                         + std::to_string(max_items_for_itemset_enumeration) + "); constrain the variable with closed()");
    std::vector<Candidate> out;
    ItemsetWalk walk{d, filter, min_freq, out};
    Bitset p(d.n_items());
    walk.extend(p, d.all_transactions(), 0);
    return CandidatePool(std::move(out));
}

// ------------------------------------------------------------- analysis

namespace
{

template <class... Fs>
struct overloaded : Fs...
{
    using Fs::operator()...;
};

using Conjunct = std::vector<FormulaPtr>;
constexpr std::size_t max_disjuncts = 4096;

std::vector<Conjunct> to_dnf(const FormulaPtr& f)
{
    return std::visit(
        overloaded{
            [&](const TrueConst&) { return std::vector<Conjunct>{Conjunct{}}; },
            [&](const And& a) {
                std::vector<Conjunct> acc{Conjunct{}};
                for (const auto& p : a.parts)
                {
                    auto sub = to_dnf(p);
                    std::vector<Conjunct> next;
                    for (const auto& x : acc)
                        for (const auto& y : sub)
                        {
                            Conjunct c = x;
                            c.insert(c.end(), y.begin(), y.end());
                            next.push_back(std::move(c));
                            if (next.size() > max_disjuncts)
                                throw SolveError("formula too large once rewritten to disjunctive normal form");
                        }
                    acc = std::move(next);
                }
                return acc;
            },
            [&](const Or& o) {
                std::vector<Conjunct> acc;
                for (const auto& p : o.parts)
                {
                    auto sub = to_dnf(p);
                    acc.insert(acc.end(), sub.begin(), sub.end());
                    if (acc.size() > max_disjuncts)
                        throw SolveError("formula too large once rewritten to disjunctive normal form");
                }
                return acc;
            },
            [&](const ForAll&) -> std::vector<Conjunct> { throw SolveError("formula is not ground"); },
            [&](const ForAllPairs&) -> std::vector<Conjunct> { throw SolveError("formula is not ground"); },
            [&](const auto&) { return std::vector<Conjunct>{Conjunct{f}}; },
        },
        f->node);
}

std::optional<int> var_of(const Term& t)
{
    if (auto v = std::get_if<Var>(&t.node); v && v->index.is_literal())
        return v->index.literal_value() - 1;
    return std::nullopt;
}

std::optional<Rational> const_of(const Term& t)
{
    if (auto c = std::get_if<NumConst>(&t.node))
        return c->value;
    return std::nullopt;
}

std::int64_t floor_of(const Rational& r)
{
    auto q = r.numerator() / r.denominator();
    if (r.numerator() % r.denominator() != 0 && r.numerator() < 0)
        --q;
    return q;
}

/// Relation normalised so the constant is on the right.
Rel mirrored(Rel r)
{
    switch (r)
    {
    case Rel::Lt: return Rel::Gt;
    case Rel::Le: return Rel::Ge;
    case Rel::Ge: return Rel::Le;
    case Rel::Gt: return Rel::Lt;
    default: return r;
    }
}

struct CallVsConst
{
    const Call* call;
    Rel rel;
    Rational bound;
};

std::optional<CallVsConst> call_vs_const(const Formula& f)
{
    auto r = std::get_if<Relation>(&f.node);
    if (!r)
        return std::nullopt;
    auto lc = std::get_if<Call>(&r->left->node);
    auto rc = std::get_if<Call>(&r->right->node);
    if (lc)
        if (auto c = const_of(*r->right))
            return CallVsConst{lc, r->rel, *c};
    if (rc)
        if (auto c = const_of(*r->left))
            return CallVsConst{rc, mirrored(r->rel), *c};
    return std::nullopt;
}

/// freq(X_i) >= c style lower bound on support.
std::optional<std::pair<int, std::size_t>> support_bound(const Formula& f)
{
    auto cc = call_vs_const(f);
    if (!cc || cc->call->name != "freq" || cc->call->args.size() != 1)
        return std::nullopt;
    auto v = var_of(*cc->call->args[0]);
    if (!v)
        return std::nullopt;
    std::int64_t lo;
    if (cc->rel == Rel::Ge || cc->rel == Rel::Eq)
        lo = -floor_of(-cc->bound); // ceil
    else if (cc->rel == Rel::Gt)
        lo = floor_of(cc->bound) + 1;
    else
        return std::nullopt;
    return std::pair{*v, static_cast<std::size_t>(std::max<std::int64_t>(lo, 0))};
}

std::vector<int> span_vars(const Global& g)
{
    std::vector<int> out;
    for (const auto& vs : g.vars)
    {
        int lo = vs.first.literal_value(), hi = vs.last ? vs.last->literal_value() : lo;
        for (int i = lo; i <= hi; ++i)
            out.push_back(i - 1);
    }
    return out;
}

struct OverlapBudget
{
    int a, b;
    bool transactions;
    std::int64_t bound;
};

/// overlapTransactions/overlapItems(X_a, X_b) bounded above by a constant.
std::optional<OverlapBudget> overlap_budget(const Formula& f)
{
    auto cc = call_vs_const(f);
    if (!cc || cc->call->args.size() != 2)
        return std::nullopt;
    bool trans = cc->call->name == "overlapTransactions";
    if (!trans && cc->call->name != "overlapItems")
        return std::nullopt;
    auto a = var_of(*cc->call->args[0]);
    auto b = var_of(*cc->call->args[1]);
    if (!a || !b || *a == *b)
        return std::nullopt;
    std::int64_t ub;
    switch (cc->rel)
    {
    case Rel::Le:
    case Rel::Eq: ub = floor_of(cc->bound); break;
    case Rel::Lt: ub = -floor_of(-cc->bound) - 1; break;
    default: return std::nullopt;
    }
    return OverlapBudget{*a, *b, trans, ub};
}

struct PairRules
{
    std::vector<OverlapBudget> budgets;
    bool has_order_lt = false;           // assigned < other
    bool has_order_gt = false;           // other < assigned
};

struct CoverRule
{
    std::vector<int> vars;
    bool transactions;
};

struct Plan
{
    int k = 0;
    bool infeasible = false;
    std::vector<Candidate> universe;
    std::vector<std::vector<std::uint32_t>> domains;
    /// rules[j][l]: constraints between assigned X_j and future X_l (j < l)
    std::vector<std::vector<PairRules>> rules;
    std::vector<CoverRule> covers;
    /// checks[j]: atoms whose highest variable is X_j
    std::vector<std::vector<CompiledFormula>> checks;
    std::uint64_t candidates = 0;
};

Plan make_plan(const Dataset& d, const Conjunct& atoms, int k)
{
    Plan plan;
    plan.k = k;
    plan.rules.assign(k, std::vector<PairRules>(k));
    plan.checks.resize(k);

    std::vector<bool> closed(k, false);
    std::vector<std::size_t> min_support(k, 0);
    std::vector<std::vector<FormulaPtr>> unary(k);
    const std::vector<Binding> no_bindings(k);

    for (const auto& atom : atoms)
    {
        auto compiled = CompiledFormula::compile(d, *atom, k);
        const auto& vars = compiled.variables();
        if (vars.empty())
        {
            if (!compiled.holds(no_bindings))
                plan.infeasible = true;
            continue;
        }
        if (vars.size() == 1)
        {
            const int v = vars.front();
            if (std::holds_alternative<Closed>(atom->node))
                closed[v] = true;
            if (auto sb = support_bound(*atom))
                min_support[v] = std::max(min_support[v], sb->second);
            unary[v].push_back(atom);
            continue;
        }
        if (auto g = std::get_if<Global>(&atom->node))
        {
            if (g->kind == GlobalKind::Canonical)
            {
                std::vector<int> order = span_vars(*g);
                for (std::size_t i = 1; i < order.size(); ++i)
                {
                    int lo = order[i - 1], hi = order[i];
                    if (lo == hi)
                    {
                        plan.infeasible = true; // X < X
                        continue;
                    }
                    if (lo < hi)
                        plan.rules[lo][hi].has_order_lt = true;
                    else
                        plan.rules[hi][lo].has_order_gt = true;
                }
            }
            else
            {
                plan.covers.push_back(CoverRule{span_vars(*g), g->kind == GlobalKind::CoverTransactions});
            }
        }
        else if (auto ob = overlap_budget(*atom))
        {
            int lo = std::min(ob->a, ob->b), hi = std::max(ob->a, ob->b);
            plan.rules[lo][hi].budgets.push_back(*ob);
        }
        plan.checks[vars.back()].push_back(std::move(compiled));
    }
    if (plan.infeasible)
        return plan;

    // per-variable pools, merged into one lexicographically ordered universe
    std::vector<CandidatePool> pools;
    for (int v = 0; v < k; ++v)
    {
        CandidateFilter filter;
        if (!unary[v].empty())
        {
            auto conj = unary[v].size() == 1 ? unary[v].front() : make_formula(And{unary[v]});
            auto compiled = std::make_shared<CompiledFormula>(CompiledFormula::compile(d, *conj, k));
            filter = [compiled, v, k](const Candidate& c) {
                std::vector<Binding> b(k);
                b[v] = Binding{&c.items, &c.cover};
                return compiled->holds(b);
            };
        }
        pools.push_back(closed[v] ? enumerate_closed(d, filter, min_support[v]) : enumerate_all(d, filter, min_support[v]));
        plan.candidates += pools.back().size();
    }

    std::map<Pattern, std::uint32_t> rank;
    for (const auto& pool : pools)
        for (const auto& c : pool.candidates())
            rank.emplace(c.pattern, 0);
    std::uint32_t r = 0;
    for (auto& [p, idx] : rank)
        idx = r++;
    plan.universe.resize(rank.size());
    for (const auto& pool : pools)
        for (const auto& c : pool.candidates())
            plan.universe[rank.at(c.pattern)] = c;
    for (const auto& pool : pools)
    {
        std::vector<std::uint32_t> dom;
        dom.reserve(pool.size());
        for (const auto& c : pool.candidates())
            dom.push_back(rank.at(c.pattern));
        plan.domains.push_back(std::move(dom));
    }
    return plan;
}

// ---------------------------------------------------------------- search

using RankTuple = std::vector<std::uint32_t>;

class Search
{
public:
    Search(const Plan& plan, std::atomic<std::size_t>& found, std::optional<std::size_t> limit)
        : plan_(plan), found_(found), limit_(limit), ranks_(plan.k), bindings_(plan.k),
          levels_(plan.k + 1, plan.domains)
    {
    }

    SearchStats stats;
    std::vector<RankTuple> solutions;

    /// Root-level coverage test over the initial domains.
    bool root_feasible()
    {
        for (const auto& d : plan_.domains)
            if (d.empty())
                return false;
        return coverage_ok(-1, plan_.domains);
    }

    void try_candidate(int j, std::uint32_t c)
    {
        if (stopped())
            return;
        ++stats.nodes;
        ranks_[j] = c;
        const Candidate& cand = plan_.universe[c];
        bindings_[j] = Binding{&cand.items, &cand.cover};

        for (const auto& check : plan_.checks[j])
            if (!check.holds(bindings_))
            {
                ++stats.prunes["constraint"];
                return;
            }
        if (j == plan_.k - 1)
        {
            ++stats.leaves;
            if (!limit_ || found_.fetch_add(1) < *limit_)
                solutions.push_back(ranks_);
            return;
        }

        const auto& current = levels_[j];
        auto& next = levels_[j + 1];
        for (int l = j + 1; l < plan_.k; ++l)
        {
            auto& out = next[l];
            out.clear();
            const PairRules& rules = plan_.rules[j][l];
            for (auto c2 : current[l])
            {
                if ((rules.has_order_lt && !(c < c2)) || (rules.has_order_gt && !(c2 < c)))
                {
                    ++stats.prunes["canonical"];
                    continue;
                }
                if (!budgets_ok(rules, cand, plan_.universe[c2]))
                {
                    ++stats.prunes["overlap"];
                    continue;
                }
                out.push_back(c2);
            }
            if (out.empty())
            {
                ++stats.prunes["empty_domain"];
                return;
            }
        }
        if (!coverage_ok(j, next))
        {
            ++stats.prunes["coverage"];
            return;
        }
        for (auto c2 : next[j + 1])
        {
            if (stopped())
                return;
            try_candidate(j + 1, c2);
        }
    }

private:
    bool stopped() const { return limit_ && found_.load() >= *limit_; }

    static bool budgets_ok(const PairRules& rules, const Candidate& a, const Candidate& b)
    {
        for (const auto& budget : rules.budgets)
        {
            auto overlap = budget.transactions ? a.cover.intersection_count(b.cover) : a.items.intersection_count(b.items);
            if (static_cast<std::int64_t>(overlap) > budget.bound)
                return false;
        }
        return true;
    }

    /// Can the still-uncovered transactions (items) be covered by some
    /// admissible candidate of the unassigned variables?
    bool coverage_ok(int assigned_upto, const std::vector<std::vector<std::uint32_t>>& doms) const
    {
        for (const auto& rule : plan_.covers)
        {
            const bool trans = rule.transactions;
            Bitset reach = trans ? plan_.universe.empty() ? Bitset() : Bitset(plan_.universe.front().cover.size())
                                 : plan_.universe.empty() ? Bitset() : Bitset(plan_.universe.front().items.size());
            bool open = false;
            for (int v : rule.vars)
            {
                if (v <= assigned_upto)
                    reach |= trans ? *bindings_[v].cover : *bindings_[v].items;
                else
                {
                    open = true;
                    for (auto c : doms[v])
                        reach |= trans ? plan_.universe[c].cover : plan_.universe[c].items;
                }
            }
            if (open && !reach.all())
                return false;
        }
        return true;
    }

    const Plan& plan_;
    std::atomic<std::size_t>& found_;
    std::optional<std::size_t> limit_;
    RankTuple ranks_;
    std::vector<Binding> bindings_;
    std::vector<std::vector<std::vector<std::uint32_t>>> levels_;
};

std::vector<Assignment> search(const Plan& plan, const SearchConfig& cfg, SearchStats& stats)
{
    std::vector<Assignment> out;
    std::atomic<std::size_t> found{0};
    {
        Search probe(plan, found, cfg.limit);
        if (!probe.root_feasible())
        {
            ++stats.prunes["coverage"];
            return out;
        }
    }

    const auto& roots = plan.domains.front();
    const unsigned workers = std::max(1U, std::min<unsigned>(cfg.workers, static_cast<unsigned>(roots.size())));
    std::vector<Search> searches;
    searches.reserve(workers);
    for (unsigned w = 0; w < workers; ++w)
        searches.emplace_back(plan, found, cfg.limit);

    if (workers == 1)
    {
        for (auto c : roots)
            searches[0].try_candidate(0, c);
    }
    else
    {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> threads;
        for (unsigned w = 0; w < workers; ++w)
            threads.emplace_back([&, w] {
                for (std::size_t i = next++; i < roots.size(); i = next++)
                    searches[w].try_candidate(0, roots[i]);
            });
        for (auto& t : threads)
            t.join();
    }

    for (auto& s : searches)
    {
        stats.merge(s.stats);
        for (const auto& ranks : s.solutions)
        {
            Assignment a;
            a.reserve(ranks.size());
            for (auto r : ranks)
                a.push_back(plan.universe[r].pattern);
            out.push_back(std::move(a));
        }
    }
    return out;
}

void finish(std::vector<Assignment>& sols, const SearchConfig& cfg)
{
    std::sort(sols.begin(), sols.end());
    sols.erase(std::unique(sols.begin(), sols.end()), sols.end());
    if (cfg.limit && sols.size() > *cfg.limit)
        sols.resize(*cfg.limit);
}

double elapsed_ms(std::chrono::steady_clock::time_point start)
{
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
}

} // namespace

SolutionSet solve(const Dataset& d, const Formula& ground_formula, int k, const SearchConfig& cfg)
{
    if (cfg.mode == SearchMode::Oracle)
        return solve_oracle(d, ground_formula, k, cfg);
    if (k < 1)
        throw SolveError("k must be at least 1");
    if (cfg.limit && *cfg.limit < 1)
        throw SolveError("solution limit must be at least 1");
    const auto start = std::chrono::steady_clock::now();

    auto root = std::make_shared<const Formula>(ground_formula);
    const auto full = CompiledFormula::compile(d, *root, k);

    SolutionSet result;
    for (const auto& conj : to_dnf(root))
    {
        Plan plan = make_plan(d, conj, k);
        result.stats.candidates += plan.candidates;
        if (plan.infeasible)
            continue;
        auto sols = search(plan, cfg, result.stats);
        result.solutions.insert(result.solutions.end(), std::make_move_iterator(sols.begin()),
                                std::make_move_iterator(sols.end()));
    }
    finish(result.solutions, cfg);

    for (const auto& a : result.solutions)
    {
        BoundAssignment bound(d, a);
        if (!full.holds(bound.bindings()))
            throw std::logic_error("solver returned an assignment that violates the query");
    }
    result.stats.wall_ms = elapsed_ms(start);
    return result;
}

SolutionSet solve(const Dataset& d, const Query& q, const Definitions& defs, const SearchConfig& cfg)
{
    auto diags = validate(q, d, defs);
    if (!diags.empty())
        throw ValidationError(std::move(diags));
    auto g = ground(q, defs);
    return solve(d, *g, q.k, cfg);
}

SolutionSet solve_oracle(const Dataset& d, const Formula& ground_formula, int k, const SearchConfig& cfg)
{
    if (k < 1)
        throw SolveError("k must be at least 1");
    const auto start = std::chrono::steady_clock::now();
    const auto full = CompiledFormula::compile(d, ground_formula, k);

    std::vector<bool> closed(k, false);
    auto collect = [&](auto&& self, const Formula& f) -> void {
        if (auto a = std::get_if<And>(&f.node))
            for (const auto& p : a->parts)
                self(self, *p);
        else if (auto c = std::get_if<Closed>(&f.node))
            closed[c->var.literal_value() - 1] = true;
    };
    collect(collect, ground_formula);

    // closed patterns by direct test over all itemsets, independent of the
    // closure-extension walk the propagating solver uses
    const CandidatePool all = enumerate_all(d);
    std::vector<Candidate> closed_only;
    for (const auto& c : all.candidates())
        if (closed_constraint(d, c.items, c.cover))
            closed_only.push_back(c);

    std::vector<const std::vector<Candidate>*> universe(k);
    double product = 1;
    for (int v = 0; v < k; ++v)
    {
        universe[v] = closed[v] ? &closed_only : &all.candidates();
        product *= static_cast<double>(universe[v]->size());
    }
    if (product > 1e8)
        throw SolveError("instance too large for the oracle (" + std::to_string(static_cast<long long>(product)) + " tuples)");

    SolutionSet result;
    result.stats.candidates = all.size();
    for (const auto* u : universe)
        if (u->empty())
        {
            result.stats.wall_ms = elapsed_ms(start);
            return result;
        }

    std::vector<std::size_t> pos(k, 0);
    std::vector<Binding> bindings(k);
    while (true)
    {
        for (int v = 0; v < k; ++v)
        {
            const auto& c = (*universe[v])[pos[v]];
            bindings[v] = Binding{&c.items, &c.cover};
        }
        ++result.stats.nodes;
        if (full.holds(bindings))
        {
            Assignment a;
            for (int v = 0; v < k; ++v)
                a.push_back((*universe[v])[pos[v]].pattern);
            result.solutions.push_back(std::move(a));
            if (cfg.limit && result.solutions.size() >= *cfg.limit)
                break;
        }
        int v = k - 1;
        while (v >= 0 && ++pos[v] == universe[v]->size())
            pos[v--] = 0;
        if (v < 0)
            break;
    }
    result.stats.leaves = result.stats.nodes;
    result.stats.wall_ms = elapsed_ms(start);
    return result;
}

std::vector<std::size_t> count_by_refinement(const Dataset& d, const std::vector<Query>& chain, const Definitions& defs,
                                             const SearchConfig& cfg)
{
    std::vector<std::size_t> counts;
    std::vector<Assignment> previous;
    for (std::size_t i = 0; i < chain.size(); ++i)
    {
        auto result = solve(d, chain[i], defs, cfg);
        if (i > 0 && !std::includes(previous.begin(), previous.end(), result.solutions.begin(), result.solutions.end()))
            throw RefinementError(i, "query " + chain[i].name + " is not a refinement of " + chain[i - 1].name
                                         + ": it admits solutions its predecessor rejects");
        counts.push_back(result.solutions.size());
        previous = std::move(result.solutions);
    }
    return counts;
}

} // namespace patmine
