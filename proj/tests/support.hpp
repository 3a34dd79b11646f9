#pragma once

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "oracle.hpp"
#include "patmine/dataset.hpp"
#include "patmine/parser.hpp"
#include "patmine/solver.hpp"

#ifndef PATMINE_SOURCE_DIR
#define PATMINE_SOURCE_DIR "."
#endif

namespace support
{

inline std::string source_path(const std::string& rel)
{
    return std::string(PATMINE_SOURCE_DIR) + "/" + rel;
}

inline patmine::Dataset running_example()
{
    return patmine::load_fimi(source_path("data/running_example.dat"));
}

/// Labels are item indices spelled as letters so oracle itemsets map directly.
inline patmine::Dataset to_dataset(const oracle::Table& t, const std::string& name = "random")
{
    std::vector<std::string> labels;
    for (int i = 0; i < t.n; ++i)
        labels.push_back(std::string(1, static_cast<char>('A' + i)));
    std::vector<std::vector<patmine::ItemId>> rows;
    for (const auto& r : t.rows)
        rows.emplace_back(r.begin(), r.end());
    return patmine::Dataset(name, labels, rows);
}

inline patmine::Pattern pattern(const oracle::Itemset& x)
{
    return patmine::Pattern(std::vector<patmine::ItemId>(x.begin(), x.end()));
}

inline oracle::Itemset itemset(const patmine::Pattern& p)
{
    return oracle::Itemset(p.items().begin(), p.items().end());
}

inline patmine::Pattern pattern(const std::string& letters)
{
    return pattern(oracle::letters(letters));
}

inline patmine::Query query_from_text(const std::string& text)
{
    auto s = patmine::parse_statement(text);
    return std::get<patmine::stmt::QueryDecl>(s.node).query;
}

inline patmine::Query fixture_query(int i)
{
    std::ifstream in(source_path("scripts/queries/Q" + std::to_string(i) + ".pmq"));
    std::stringstream ss;
    ss << in.rdbuf();
    return query_from_text(ss.str());
}

using Clustering = std::multiset<std::string>;

inline Clustering unordered(const patmine::Assignment& a)
{
    Clustering out;
    for (const auto& p : a)
        out.insert(oracle::name(itemset(p)));
    return out;
}

inline std::set<Clustering> unordered(const std::vector<patmine::Assignment>& sols)
{
    std::set<Clustering> out;
    for (const auto& a : sols)
        out.insert(unordered(a));
    return out;
}

inline Clustering clustering(std::initializer_list<const char*> names)
{
    Clustering out;
    for (const char* n : names)
        out.insert(n);
    return out;
}

} // namespace support
