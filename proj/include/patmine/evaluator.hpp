#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "patmine/ast.hpp"
#include "patmine/dataset.hpp"
#include "patmine/number.hpp"

namespace patmine
{

/// Position i-1 holds the value of X_i.
using Assignment = std::vector<Pattern>;

struct ItemSetValue { Bitset items; };
struct CoverValue { CoverSet transactions; };
struct ItemValue { ItemId item; };
struct TransactionValue { std::size_t index; };

using Value = std::variant<Number, ItemSetValue, CoverValue, ItemValue, TransactionValue, bool>;

/// What the evaluator sees of one assigned variable. Both bit-vectors must
/// outlive the call; the solver points these at its candidate cache.
struct Binding
{
    const Bitset* items = nullptr;
    const CoverSet* cover = nullptr;
};

/// Owns the bit-vectors backing a set of bindings built from patterns.
class BoundAssignment
{
public:
    BoundAssignment(const Dataset& d, const Assignment& a);
    std::span<const Binding> bindings() const noexcept { return bindings_; }

private:
    std::vector<Bitset> items_;
    std::vector<CoverSet> covers_;
    std::vector<Binding> bindings_;
};

namespace detail
{
struct Expr;
struct Node;
} // namespace detail

/// A ground formula resolved against one dataset: labels mapped to item
/// indices, partitions to bit-vectors, sorts checked. Immutable and safe to
/// share between threads.
class CompiledFormula
{
public:
    /// Throws EvalError when the formula is not ground or not well typed.
    static CompiledFormula compile(const Dataset& d, const Formula& ground, int k);

    bool holds(std::span<const Binding> vars) const;
    /// 0-based indices of the variables the formula mentions, ascending.
    const std::vector<int>& variables() const noexcept { return variables_; }

private:
    const Dataset* dataset_ = nullptr;
    std::shared_ptr<const detail::Node> root_;
    std::vector<int> variables_;
};

/// `closed(X)` in a query: closed and covering at least one transaction.
bool closed_constraint(const Dataset& d, const Bitset& items, const CoverSet& cover);

/// Strict lexicographic order on increasing item-index sequences; a proper
/// prefix is smaller.
bool lex_less(const Bitset& a, const Bitset& b);

Value eval_term(const Dataset& d, const Assignment& a, const Term& ground);

/// |D2| * freq(x, D1) / (|D1| * freq(x, D2)); +inf when only the
/// denominator frequency is zero; EvalError when both are.
Number eval_growth_rate(const Dataset& d, const Pattern& x, const std::string& part1, const std::string& part2);

/// Truth of a ground query under a full assignment.
bool check(const Dataset& d, const Assignment& a, const Formula& ground, int k);
bool check(const Dataset& d, const Assignment& a, const Query& q, const Definitions& defs);

struct ExceptionThresholds
{
    std::int64_t minfr;
    std::int64_t maxfr;
    std::int64_t delta1;
    std::int64_t delta2;
};

/// Exception rule X1 -> not I deviating from the strong rule X1\X2 -> I.
/// Requires X2 a proper subset of X1 and I not in X1 (std::invalid_argument
/// otherwise). freq(X u not I) is read as freq(X) - freq(X u {I}).
bool check_exception(const Dataset& d, const Pattern& x1, const Pattern& x2, ItemId item, const ExceptionThresholds& th);

} // namespace patmine
