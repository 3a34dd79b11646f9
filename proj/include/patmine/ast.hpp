#pragma once

#include <cstddef>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "patmine/number.hpp"

namespace patmine
{

class Dataset;

struct SourceSpan
{
    std::size_t line = 0;   // 1-based; 0 means "no location"
    std::size_t column = 0; // 1-based
    std::size_t offset = 0;
    std::size_t length = 0;

    std::string to_string() const;
};

/// Error raised while building or rewriting an AST, located in the source.
class AstError : public std::runtime_error
{
public:
    AstError(SourceSpan span, const std::string& message);
    const SourceSpan& span() const noexcept { return span_; }
    const std::string& message() const noexcept { return message_; }

private:
    SourceSpan span_;
    std::string message_;
};

/// Variable index inside `X[...]`: a literal (1-based), the query's `k`, or a
/// name bound by an enclosing `forall`.
class Index
{
public:
    Index() = default;
    static Index literal(int i) { return Index(i); }
    static Index named(std::string name) { return Index(std::move(name)); }

    bool is_literal() const noexcept { return std::holds_alternative<int>(value_); }
    int literal_value() const { return std::get<int>(value_); }
    const std::string& name() const { return std::get<std::string>(value_); }

    bool operator==(const Index&) const = default;

private:
    explicit Index(int i) : value_(i) {}
    explicit Index(std::string s) : value_(std::move(s)) {}
    std::variant<int, std::string> value_ = 1;
};

// ---------------------------------------------------------------- terms

enum class SetOpKind { Union, Inter, Diff };
enum class NumOpKind { Add, Sub, Mul, Div };

struct Term;
using TermPtr = std::shared_ptr<const Term>;

struct NumConst { Rational value; };
struct ItemConst { std::string label; };
struct PatternConst { std::vector<std::string> labels; };
struct TransactionConst { std::size_t index; };
/// A named dataset partition, e.g. the D1 of a growth rate.
struct PartitionConst { std::string name; };
struct ParamRef { std::string name; };
/// A formal parameter inside a function definition body.
struct ArgRef { std::string name; };
struct Var { Index index; };
struct SetOp { SetOpKind op; TermPtr left, right; };
struct NumOp { NumOpKind op; TermPtr left, right; };
struct Call { std::string name; std::vector<TermPtr> args; };

struct Term
{
    using Node = std::variant<NumConst, ItemConst, PatternConst, TransactionConst, PartitionConst,
                              ParamRef, ArgRef, Var, SetOp, NumOp, Call>;
    Node node;
    SourceSpan span;
};

template <typename T>
TermPtr make_term(T node, SourceSpan span = {})
{
    return std::make_shared<const Term>(Term{std::move(node), span});
}

/// Structural equality; source spans are ignored.
bool equal(const Term& a, const Term& b);
bool equal(const TermPtr& a, const TermPtr& b);

// ------------------------------------------------------------- formulae

enum class Rel { Lt, Le, Eq, Ne, Ge, Gt, In, NotIn, Subset, SubsetEq };
enum class GlobalKind { CoverTransactions, CoverItems, Canonical };

/// One entry of a variable list: `X[i]` or `X[a..b]`.
struct VarSpan
{
    Index first;
    std::optional<Index> last;
    bool operator==(const VarSpan&) const = default;
};

struct Formula;
using FormulaPtr = std::shared_ptr<const Formula>;

struct TrueConst {};
struct Relation { Rel rel; TermPtr left, right; };
struct Closed { Index var; };
struct Global { GlobalKind kind; std::vector<VarSpan> vars; };
struct And { std::vector<FormulaPtr> parts; };
struct Or { std::vector<FormulaPtr> parts; };
/// `forall var in lo..hi: body`
struct ForAll { std::string var; Index lo, hi; FormulaPtr body; };
/// `forall first < second: body`, over 1 <= first < second <= k
struct ForAllPairs { std::string first, second; FormulaPtr body; };

struct Formula
{
    using Node = std::variant<TrueConst, Relation, Closed, Global, And, Or, ForAll, ForAllPairs>;
    Node node;
    SourceSpan span;
};

template <typename T>
FormulaPtr make_formula(T node, SourceSpan span = {})
{
    return std::make_shared<const Formula>(Formula{std::move(node), span});
}

bool equal(const Formula& a, const Formula& b);
bool equal(const FormulaPtr& a, const FormulaPtr& b);

/// True for the constraint kinds (everything except true/and/or/forall).
bool is_atom(const Formula& f);

// ------------------------------------------------------ queries, defs

struct Query
{
    std::string name;
    int k = 1;
    FormulaPtr formula;
    /// Parameter values captured when the query is solved.
    std::map<std::string, Rational> params;
    SourceSpan span;
};

bool equal(const Query& a, const Query& b);

struct FunctionDef
{
    std::string name;
    std::vector<std::string> params;
    TermPtr body;
    SourceSpan span;

    std::size_t arity() const noexcept { return params.size(); }
};

bool equal(const FunctionDef& a, const FunctionDef& b);

struct BuiltinSignature
{
    std::string name;
    std::size_t min_arity;
    std::size_t max_arity;
};

/// freq, size, cover, overlapItems, overlapTransactions, growthRate, card.
const BuiltinSignature* find_builtin(const std::string& name);

/// Ordered, append-only list of user-defined function symbols.
class Definitions
{
public:
    /// Rejects redefinitions, builtin names, unknown or forward references
    /// (hence recursion) and arity mismatches in the body.
    void define(FunctionDef def);

    const FunctionDef* find(const std::string& name) const;
    const std::vector<FunctionDef>& all() const noexcept { return defs_; }

private:
    std::vector<FunctionDef> defs_;
};

/// Substitutes user-defined calls by their bodies until only builtin
/// symbols remain. Substituted nodes take the call site's span.
TermPtr expand(const Definitions& defs, const TermPtr& t);

/// New query `name` whose formula is base.formula and extra.
Query refine(const Query& base, const FormulaPtr& extra, std::string name);

/// Expands forall families, user-defined symbols, and parameter references
/// (from q.params), yielding a formula with literal variable indices and only
/// builtin symbols. Throws AstError.
FormulaPtr ground(const Query& q, const Definitions& defs);
/// Same, for a standalone term (no forall-bound names allowed).
TermPtr ground(const TermPtr& t, int k, const Definitions& defs, const std::map<std::string, Rational>& params);

/// Throws AstError when a variable index or forall bound falls outside 1..k,
/// or a name inside `X[...]` is not bound by an enclosing forall.
void check_var_bounds(const FormulaPtr& f, int k);

struct Diagnostic
{
    SourceSpan span;
    std::string message;
};

/// Empty iff the query is well-typed against the dataset: items, partitions
/// and transactions exist, symbols resolve, parameters are bound and
/// operators receive operands of the right sort.
std::vector<Diagnostic> validate(const Query& q, const Dataset& d, const Definitions& defs);

/// Static sorts of terms.
enum class Sort { Num, Item, Transaction, ItemSet, TransSet, Partition };
std::string to_string(Sort s);

/// Sort of a ground term; reports problems into `diags` and returns nullopt.
std::optional<Sort> infer_sort(const Term& t, const Dataset& d, int k, std::vector<Diagnostic>& diags);
/// Type checks a ground formula.
void check_formula(const Formula& f, const Dataset& d, int k, std::vector<Diagnostic>& diags);

} // namespace patmine
