#pragma once

// Independent brute-force reference: plain sorted int vectors and row scans,
// no bit-vectors, no closure tricks.

#include <algorithm>
#include <random>
#include <string>
#include <vector>

namespace oracle
{

using Itemset = std::vector<int>;

struct Table
{
    int n = 0;
    std::vector<Itemset> rows;
};

/// The 11 x 8 running example, items A..H as 0..7.
inline Table table1()
{
    const char* rows[] = {"ADF", "AEF", "AEG", "AEG", "BEG", "BEG", "CEG", "CEG", "CEH", "CEH", "CFGH"};
    Table t{8, {}};
    for (const char* r : rows)
    {
        Itemset row;
        for (const char* c = r; *c; ++c)
            row.push_back(*c - 'A');
        t.rows.push_back(row);
    }
    return t;
}

inline Itemset letters(const std::string& s)
{
    Itemset out;
    for (char c : s)
        out.push_back(c - 'A');
    std::sort(out.begin(), out.end());
    return out;
}

inline std::string name(const Itemset& x)
{
    std::string out;
    for (int i : x)
        out += static_cast<char>('A' + i);
    return out;
}

inline bool contains(const Itemset& row, const Itemset& x)
{
    return std::includes(row.begin(), row.end(), x.begin(), x.end());
}

inline std::vector<int> cover(const Table& t, const Itemset& x)
{
    std::vector<int> out;
    for (int r = 0; r < static_cast<int>(t.rows.size()); ++r)
        if (contains(t.rows[r], x))
            out.push_back(r);
    return out;
}

inline int freq(const Table& t, const Itemset& x)
{
    return static_cast<int>(cover(t, x).size());
}

inline Itemset unite(const Itemset& a, const Itemset& b)
{
    Itemset out;
    std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return out;
}

inline Itemset minus(const Itemset& a, const Itemset& b)
{
    Itemset out;
    std::set_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return out;
}

inline Itemset closure(const Table& t, const Itemset& x)
{
    Itemset out;
    for (int i = 0; i < t.n; ++i)
    {
        bool in_all = true;
        for (const auto& row : t.rows)
            if (contains(row, x) && !std::binary_search(row.begin(), row.end(), i))
                in_all = false;
        if (in_all)
            out.push_back(i);
    }
    return out;
}

inline bool closed(const Table& t, const Itemset& x)
{
    return closure(t, x) == x;
}

/// Every non-empty subset of {0..n-1}, lexicographically ordered.
inline std::vector<Itemset> all_itemsets(int n)
{
    std::vector<Itemset> out;
    for (unsigned mask = 1; mask < (1U << n); ++mask)
    {
        Itemset x;
        for (int i = 0; i < n; ++i)
            if (mask >> i & 1U)
                x.push_back(i);
        out.push_back(x);
    }
    std::sort(out.begin(), out.end());
    return out;
}

inline Table random_table(std::mt19937& rng, int max_rows, int max_items)
{
    std::uniform_int_distribution<int> rows(1, max_rows), items(1, max_items);
    Table t{items(rng), {}};
    const int m = rows(rng);
    std::bernoulli_distribution coin(std::uniform_real_distribution<double>(0.2, 0.7)(rng));
    std::uniform_int_distribution<int> pick(0, t.n - 1);
    for (int r = 0; r < m; ++r)
    {
        Itemset row;
        for (int i = 0; i < t.n; ++i)
            if (coin(rng))
                row.push_back(i);
        if (row.empty())
            row.push_back(pick(rng));
        t.rows.push_back(row);
    }
    return t;
}

} // namespace oracle
