#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "patmine/ast.hpp"
#include "patmine/dataset.hpp"
#include "patmine/evaluator.hpp"

namespace patmine
{

class SolveError : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

/// A query that failed validation; carries every diagnostic.
class ValidationError : public std::runtime_error
{
public:
    explicit ValidationError(std::vector<Diagnostic> diags);
    const std::vector<Diagnostic>& diagnostics() const noexcept { return diags_; }

private:
    std::vector<Diagnostic> diags_;
};

/// Raised by count_by_refinement when a chain element is not a refinement of
/// its predecessor.
class RefinementError : public std::runtime_error
{
public:
    RefinementError(std::size_t position, const std::string& message);
    std::size_t position() const noexcept { return position_; }

private:
    std::size_t position_;
};

enum class SearchMode { Propagating, Oracle };

struct SearchConfig
{
    std::optional<std::size_t> limit;
    SearchMode mode = SearchMode::Propagating;
    unsigned workers = 1;
};

struct SearchStats
{
    std::uint64_t nodes = 0;
    std::uint64_t candidates = 0;
    std::uint64_t leaves = 0;
    /// canonical, overlap, coverage, empty_domain, constraint
    std::map<std::string, std::uint64_t> prunes;
    double wall_ms = 0;

    void merge(const SearchStats& other);
};

struct SolutionSet
{
    std::vector<Assignment> solutions;
    SearchStats stats;
};

struct Candidate
{
    Pattern pattern;
    Bitset items;
    CoverSet cover;
};

/// Candidate patterns for one variable, in lexicographic order.
class CandidatePool
{
public:
    CandidatePool() = default;
    explicit CandidatePool(std::vector<Candidate> candidates);

    const std::vector<Candidate>& candidates() const noexcept { return candidates_; }
    std::size_t size() const noexcept { return candidates_.size(); }
    const Candidate& operator[](std::size_t i) const { return candidates_[i]; }

private:
    std::vector<Candidate> candidates_;
};

using CandidateFilter = std::function<bool(const Candidate&)>;

/// Closed patterns with non-empty cover, at least `min_freq` transactions,
/// accepted by `filter`. Prefix-preserving closure extension, so each closed
/// pattern is generated exactly once.
CandidatePool enumerate_closed(const Dataset& d, const CandidateFilter& filter = {}, std::size_t min_freq = 1);

/// Every non-empty itemset with at least `min_freq` transactions accepted by
/// `filter`. Exponential in n; refuses datasets with more than 20 items.
CandidatePool enumerate_all(const Dataset& d, const CandidateFilter& filter = {}, std::size_t min_freq = 0);

/// Complete enumeration of the assignments satisfying a ground formula.
/// Solutions come back sorted lexicographically and duplicate free.
SolutionSet solve(const Dataset& d, const Formula& ground, int k, const SearchConfig& cfg = {});
/// Validates (ValidationError), grounds and solves. Dispatches on cfg.mode.
SolutionSet solve(const Dataset& d, const Query& q, const Definitions& defs, const SearchConfig& cfg = {});

/// Filters every k-tuple of the candidate universe through the evaluator.
/// The universe is all closed patterns for variables constrained closed at
/// top level, all non-empty itemsets otherwise.
SolutionSet solve_oracle(const Dataset& d, const Formula& ground, int k, const SearchConfig& cfg = {});

/// Solution counts along a refinement chain; RefinementError when a
/// solution set is not contained in its predecessor's.
std::vector<std::size_t> count_by_refinement(const Dataset& d, const std::vector<Query>& chain, const Definitions& defs,
                                             const SearchConfig& cfg = {});

} // namespace patmine
